#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "auxrl/train/run.hpp"

namespace auxrl::train {

enum class RunStatus { pending, running, done, failed };

std::string_view to_string(RunStatus s);
RunStatus run_status_from_string(std::string_view s);

struct ManifestEntry {
    std::string run_id;
    std::string config_hash;
    RunStatus status = RunStatus::pending;
    double seconds = 0.0;
    std::vector<std::string> artifacts;  // relative to the suite directory
    std::string error;                   // set when status is failed
};

nlohmann::json to_json(const ManifestEntry& e);
ManifestEntry manifest_entry_from_json(const nlohmann::json& j);

struct SuiteOptions {
    std::filesystem::path output_dir;
    int parallelism = 1;
    bool overwrite = false;
};

// Runs every config in its own directory under output_dir, up to
// `parallelism` at a time. manifest.json is rewritten on every status change.
// A failing run is recorded as failed and does not stop the others.
// Throws InputError if output_dir already holds a manifest and overwrite is
// not set, ConfigError on duplicate run ids.
std::vector<ManifestEntry> run_suite(const std::vector<RunConfig>& configs, const SuiteOptions& opts);

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& suite_dir);

}  // namespace auxrl::train
