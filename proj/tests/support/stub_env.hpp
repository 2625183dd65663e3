#pragma once

#include <random>

#include "auxrl/env/environment.hpp"

namespace auxrl::testing {

// Observations drift with the action; the reward never changes.
class ConstantRewardEnv final : public env::Environment {
public:
    explicit ConstantRewardEnv(double reward = 1.0, int horizon = 50) : reward_(reward) {
        spec_.id = "constant_reward";
        spec_.obs_dim = 3;
        spec_.action_dim = 1;
        spec_.action_low = Vec::Constant(1, -1.0f);
        spec_.action_high = Vec::Constant(1, 1.0f);
        spec_.max_episode_steps = horizon;
    }

    const env::EnvSpec& spec() const override { return spec_; }

    Vec reset(std::uint64_t seed) override {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<float> u(-1.0f, 1.0f);
        x_ = Vec(3);
        for (int i = 0; i < 3; ++i) x_(i) = u(rng);
        t_ = 0;
        return x_;
    }

    env::StepResult step(const Vec& action) override {
        const Vec a = clip_action(action);
        x_(0) = 0.9f * x_(0) + 0.1f * a(0);
        x_(1) = 0.8f * x_(1) + 0.2f * x_(0);
        x_(2) = 0.5f * x_(2) - 0.3f * a(0);
        ++t_;
        env::StepResult r;
        r.observation = x_;
        r.reward = reward_;
        r.done = t_ >= spec_.max_episode_steps;
        return r;
    }

private:
    double reward_;
    env::EnvSpec spec_;
    Vec x_;
    int t_ = 0;
};

}  // namespace auxrl::testing
