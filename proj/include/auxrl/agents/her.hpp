#pragma once

#include <random>
#include <vector>

#include "auxrl/env/environment.hpp"
#include "auxrl/transition.hpp"

namespace auxrl::agents {

struct HerConfig {
    bool enabled = false;
    int k = 4;  // relabelled copies per real transition, "future" strategy

    void validate() const;
    bool operator==(const HerConfig&) const = default;
};

// Relabels an episode of goal-conditioned transitions. For each transition t,
// k copies get a desired goal taken from the achieved goal of a uniformly
// chosen step j in [t, T-1]; the reward is recomputed by the environment.
// Output: the real transitions unchanged, then all the copies.
std::vector<Transition> her_relabel(const std::vector<Transition>& episode, const HerConfig& cfg,
                                    const env::Environment& env, std::mt19937_64& rng);

// Only the relabelled copies, in the same order as her_relabel appends them.
std::vector<Transition> her_copies(const std::vector<Transition>& episode, const HerConfig& cfg,
                                   const env::Environment& env, std::mt19937_64& rng);

}  // namespace auxrl::agents
