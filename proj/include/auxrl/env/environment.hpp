#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include <nlohmann/json.hpp>

#include "auxrl/transition.hpp"

namespace auxrl::env {

struct EnvSpec {
    std::string id;
    Eigen::Index obs_dim = 0;
    Eigen::Index action_dim = 0;
    Vec action_low;
    Vec action_high;
    int max_episode_steps = 1;
    // Goal-conditioned environments only. Observations end with
    // [achieved_goal, desired_goal], each goal_dim long.
    Eigen::Index goal_dim = 0;
    double success_threshold = 0.0;

    bool goal_conditioned() const { return goal_dim > 0; }
    Eigen::Index achieved_goal_offset() const { return obs_dim - 2 * goal_dim; }
    Eigen::Index desired_goal_offset() const { return obs_dim - goal_dim; }
};

struct StepResult {
    Vec observation;
    double reward = 0.0;
    bool done = false;      // episode over (time limit included)
    bool terminal = false;  // true terminal state; bootstrapping stops here
    bool success = false;   // goal-conditioned only
};

// Seedable single-threaded environment. Actions are in environment units and
// clipped to [action_low, action_high]; non-finite actions are rejected.
class Environment {
public:
    virtual ~Environment() = default;

    virtual const EnvSpec& spec() const = 0;
    virtual Vec reset(std::uint64_t seed) = 0;
    virtual StepResult step(const Vec& action) = 0;

    // Goal interface. The default implementations throw UnsupportedOperation.
    virtual double compute_reward(const Vec& achieved_goal, const Vec& desired_goal) const;
    virtual bool success(const Vec& achieved_goal, const Vec& desired_goal) const;

    bool goal_conditioned() const { return spec().goal_conditioned(); }

protected:
    // Validates length and finiteness, then clips into bounds.
    Vec clip_action(const Vec& action) const;
};

Vec achieved_goal_of(const EnvSpec& spec, const Vec& obs);
Vec desired_goal_of(const EnvSpec& spec, const Vec& obs);

// Environment selection as it appears in run configurations.
struct EnvConfig {
    std::string id;  // "pendulum", "puck_slide" or "linear_chain"
    nlohmann::json params = nlohmann::json::object();

    void validate() const;
    bool operator==(const EnvConfig&) const = default;
};

std::unique_ptr<Environment> make_environment(const EnvConfig& cfg);

}  // namespace auxrl::env
