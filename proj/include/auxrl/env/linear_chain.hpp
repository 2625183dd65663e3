#pragma once

#include <random>
#include <vector>

#include <Eigen/Dense>

#include "auxrl/env/environment.hpp"

namespace auxrl::env {

struct LinearChainParams {
    int state_dim = 32;      // n
    int action_dim = 8;      // m actuated coordinates
    double decay = 0.99;     // spectral radius of A
    double noise_std = 0.01;
    double control_weight = 0.1;
    double init_scale = 1.0;  // initial state ~ U(-init_scale, init_scale)^n
    int max_episode_steps = 200;

    void validate() const;
};

// x' = A x + B u + noise with A = decay * (cyclic shift), so the state travels
// around a ring of n coordinates and only m evenly spaced ones are actuated.
// Reward is -|x|^2 - control_weight |u|^2. Dimension is configurable to probe
// how representation learning scales with problem size.
class LinearChain final : public Environment {
public:
    explicit LinearChain(LinearChainParams params = {});

    const EnvSpec& spec() const override { return spec_; }
    Vec reset(std::uint64_t seed) override;
    StepResult step(const Vec& action) override;

    const Eigen::MatrixXd& a_matrix() const { return a_; }
    const Eigen::MatrixXd& b_matrix() const { return b_; }
    const Eigen::VectorXd& state() const { return x_; }
    void set_state(const Eigen::VectorXd& x);
    const std::vector<int>& actuated() const { return actuated_; }
    double spectral_radius() const;

private:
    Vec observation() const { return x_.cast<float>(); }

    LinearChainParams params_;
    EnvSpec spec_;
    Eigen::MatrixXd a_;
    Eigen::MatrixXd b_;
    std::vector<int> actuated_;
    Eigen::VectorXd x_;
    std::mt19937_64 noise_rng_;
    int t_ = 0;
};

}  // namespace auxrl::env
