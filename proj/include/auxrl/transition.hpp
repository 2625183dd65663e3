#pragma once

#include <cstddef>
#include <vector>

#include "auxrl/nn/tape.hpp"

namespace auxrl {

using Vec = nn::Vector<float>;
using Mat = nn::Matrix<float>;

// One environment step. Actions are stored in the agent's normalised
// [-1, 1] units; achieved_goal is the goal reached *after* the step, which is
// what the reward of a goal-conditioned step depends on. Goal fields are empty
// for environments without goals.
struct Transition {
    Vec obs;
    Vec action;
    float reward = 0.0f;
    Vec next_obs;
    bool done = false;  // true terminal state; time-limit ends do not set it
    Vec achieved_goal;
    Vec desired_goal;

    bool has_goals() const { return desired_goal.size() > 0; }
};

// Column-per-sample view of a set of transitions.
struct Batch {
    Mat obs;
    Mat action;
    Mat reward;  // 1 x B
    Mat next_obs;
    Mat done;  // 1 x B, 1 for terminal
    std::vector<std::size_t> indices;

    Eigen::Index size() const { return obs.cols(); }
};

Batch make_batch(const std::vector<Transition>& transitions);

}  // namespace auxrl
