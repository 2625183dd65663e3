#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "auxrl/agents/agent.hpp"
#include "auxrl/agents/her.hpp"
#include "auxrl/env/environment.hpp"
#include "auxrl/repr/ofenet.hpp"

namespace auxrl::train {

struct RunConfig {
    std::string label = "baseline";
    env::EnvConfig environment;
    agents::AgentConfig agent;
    std::optional<repr::RepresentationConfig> representation;  // absent: baseline
    agents::HerConfig her;
    std::int64_t total_steps = 30000;  // environment steps, pretraining included
    std::int64_t pretrain_steps = 1000;
    std::int64_t eval_interval = 1000;
    std::int64_t eval_episodes = 10;
    std::uint64_t seed = 0;
    bool record_trajectories = false;

    // RL training steps after pretraining; the axis of the learning curve.
    std::int64_t training_steps() const { return total_steps - pretrain_steps; }

    // Every violated constraint, as "field: message".
    std::vector<std::string> validation_errors() const;
    void validate() const;
    bool operator==(const RunConfig&) const = default;
};

// Defaults that depend on the environment: evaluation cadence and episodes.
std::int64_t default_eval_interval(const std::string& env_id);
std::int64_t default_eval_episodes(const std::string& env_id);

struct EvalRecord {
    std::int64_t step = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
    std::vector<double> scores;  // return, or 0/1 success for goal environments
};

using Policy = std::function<Vec(const Vec& obs)>;

// Rolls out `episodes` episodes of a deterministic policy. Episode seeds come
// from (seed, eval_index, episode). Goal environments score final success.
EvalRecord evaluate(const Policy& policy, env::Environment& env, std::int64_t episodes, std::uint64_t seed,
                    std::uint64_t eval_index);

// Instrumentation of one system step, filled only when a hook is installed.
struct StepTrace {
    std::int64_t step = 0;
    std::vector<std::size_t> aux_indices;
    std::vector<std::size_t> agent_indices;
    std::uint64_t agent_before_aux = 0, agent_after_aux = 0;
    std::uint64_t repr_before_agent = 0, repr_after_agent = 0;
    std::uint64_t repr_before_aux = 0, repr_after_aux = 0;
    std::uint64_t agent_before_agent = 0, agent_after_agent = 0;
    bool aux_updated = false;
};

struct RunHooks {
    std::function<void(const StepTrace&)> on_step;
    std::function<void(const EvalRecord&)> on_eval;
};

struct RunResult {
    std::vector<EvalRecord> curve;
    std::uint64_t agent_checksum = 0;
    std::uint64_t representation_checksum = 0;
    double seconds = 0.0;
};

// Runs one configuration. With an output directory the run writes
// config.json, curve.csv (appended after every evaluation), episodes.jsonl,
// checkpoints/ and optionally trajectories.jsonl.
RunResult run(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir = std::nullopt,
              const RunHooks& hooks = {});

// Identifier used for run directories: label_algorithm_env_sSEED.
std::string run_id(const RunConfig& cfg);

// Writes the curve as CSV with columns step, mean, min, max.
void write_curve_csv(std::ostream& out, const std::vector<EvalRecord>& curve);

}  // namespace auxrl::train
