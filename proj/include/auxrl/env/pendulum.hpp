#pragma once

#include <numbers>

#include "auxrl/env/environment.hpp"

namespace auxrl::env {

struct PendulumState {
    double theta = 0.0;      // rad, 0 is upright, wrapped to [-pi, pi]
    double theta_dot = 0.0;  // rad/s, |theta_dot| <= max_speed
};

// Swing-up pendulum with the classic-control constants: m = l = 1, g = 10,
// dt = 0.05, torque limit 2, speed limit 8, 200-step episodes.
class Pendulum final : public Environment {
public:
    static constexpr double kGravity = 10.0;
    static constexpr double kMass = 1.0;
    static constexpr double kLength = 1.0;
    static constexpr double kDt = 0.05;
    static constexpr double kMaxTorque = 2.0;
    static constexpr double kMaxSpeed = 8.0;

    explicit Pendulum(int max_episode_steps = 200);

    const EnvSpec& spec() const override { return spec_; }
    Vec reset(std::uint64_t seed) override;
    StepResult step(const Vec& action) override;

    const PendulumState& state() const { return state_; }
    void set_state(PendulumState s);
    Vec observation() const;

    static double angle_normalize(double x);
    // Rod energy with potential measured from the hanging position.
    static double energy(const PendulumState& s);

private:
    EnvSpec spec_;
    PendulumState state_;
    int t_ = 0;
};

}  // namespace auxrl::env
