#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "auxrl/train/run.hpp"

namespace auxrl::io {

// JSON schema (unknown keys are errors at every level):
//
//   label, algorithm ("td3" | "sac"), seed, total_steps, pretrain_steps,
//   eval_interval, eval_episodes, record_trajectories,
//   environment {id, params {...}},
//   agent {gamma, tau, batch_size, hidden, actor_lr, critic_lr,
//          reward_scale, buffer_capacity, exploration_noise, target_noise,
//          target_noise_clip, policy_delay, init_alpha, auto_alpha, alpha_lr,
//          target_entropy ("auto" | number), log_std_min, log_std_max},
//   representation {task, layers_per_part, width, pretrain_steps,
//                   learning_rate, batch_size, activation} or null,
//   her {enabled, k}
//
// A suite file has {runs: [run...], seeds: [...], output_dir, parallelism}.

nlohmann::json to_json(const train::RunConfig& cfg);

// Throws ValidationError listing every problem found.
train::RunConfig run_config_from_json(const nlohmann::json& j);

struct SuiteConfig {
    std::vector<train::RunConfig> runs;
    std::vector<std::uint64_t> seeds;  // empty: each run keeps its own seed
    std::string output_dir = "suite";
    int parallelism = 1;

    // Every run template crossed with every seed.
    std::vector<train::RunConfig> expand() const;
};

nlohmann::json to_json(const SuiteConfig& cfg);
SuiteConfig suite_config_from_json(const nlohmann::json& j);

bool is_suite(const nlohmann::json& j);

nlohmann::json load_json_file(const std::filesystem::path& path);

// Sets a dotted key ("agent.tau") to a value parsed as JSON, falling back to
// a plain string. Applies to every run template of a suite document.
void apply_override(nlohmann::json& doc, const std::string& dotted_key, const std::string& value);

// Hex FNV-1a over the canonical JSON form of the config.
std::string config_hash(const train::RunConfig& cfg);

}  // namespace auxrl::io
