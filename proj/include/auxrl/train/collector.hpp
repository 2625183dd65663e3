#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <random>
#include <vector>

#include "auxrl/agents/agent.hpp"
#include "auxrl/agents/her.hpp"
#include "auxrl/agents/replay_buffer.hpp"
#include "auxrl/env/environment.hpp"
#include "auxrl/repr/ofenet.hpp"

namespace auxrl::train {

// Steps an environment, stores transitions in a replay buffer and, when HER
// is enabled, appends relabelled copies at the end of every episode.
class Collector {
public:
    Collector(env::Environment& env, agents::ReplayBuffer& buffer, agents::HerConfig her, std::uint64_t seed);

    const Vec& observation() const { return obs_; }
    const agents::ActionScaler& scaler() const { return scaler_; }
    const agents::ReplayBuffer& buffer() const { return buffer_; }

    // Executes an action given in normalised [-1, 1] units.
    const Transition& step(const Vec& normalized_action);

    std::int64_t steps() const { return steps_; }
    std::int64_t episodes() const { return episodes_; }

    // Writes every collected transition as one JSON line.
    void set_trajectory_sink(std::ostream* out) { sink_ = out; }

private:
    void begin_episode();

    env::Environment& env_;
    agents::ReplayBuffer& buffer_;
    agents::HerConfig her_;
    agents::ActionScaler scaler_;
    std::uint64_t seed_;
    std::mt19937_64 her_rng_;
    Vec obs_;
    std::vector<Transition> episode_;
    Transition last_;
    std::int64_t steps_ = 0;
    std::int64_t episodes_ = 0;
    std::ostream* sink_ = nullptr;
};

// One JSON object per transition: t, obs, action, reward, next_obs, done,
// achieved_goal, desired_goal.
void write_transition_jsonl(std::ostream& out, std::int64_t t, const Transition& tr);

// Collects `env_steps` transitions under uniform-random actions, then (for an
// OFENet) fits target statistics and runs its configured pretraining updates.
void pretrain(Collector& collector, repr::OfeNet* net, std::int64_t env_steps, std::mt19937_64& rng);

}  // namespace auxrl::train
