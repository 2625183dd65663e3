#include "auxrl/train/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "auxrl/errors.hpp"
#include "auxrl/io/config.hpp"

namespace auxrl::train {

namespace fs = std::filesystem;

std::string_view to_string(RunStatus s) {
    switch (s) {
        case RunStatus::pending: return "pending";
        case RunStatus::running: return "running";
        case RunStatus::done: return "done";
        case RunStatus::failed: return "failed";
    }
    return "failed";
}

RunStatus run_status_from_string(std::string_view s) {
    if (s == "pending") return RunStatus::pending;
    if (s == "running") return RunStatus::running;
    if (s == "done") return RunStatus::done;
    if (s == "failed") return RunStatus::failed;
    throw InputError("unknown run status '" + std::string(s) + "'");
}

nlohmann::json to_json(const ManifestEntry& e) {
    return {{"run_id", e.run_id},   {"config_hash", e.config_hash}, {"status", std::string(to_string(e.status))},
            {"seconds", e.seconds}, {"artifacts", e.artifacts},     {"error", e.error}};
}

ManifestEntry manifest_entry_from_json(const nlohmann::json& j) {
    try {
        ManifestEntry e;
        e.run_id = j.at("run_id").get<std::string>();
        e.config_hash = j.at("config_hash").get<std::string>();
        e.status = run_status_from_string(j.at("status").get<std::string>());
        e.seconds = j.at("seconds").get<double>();
        e.artifacts = j.at("artifacts").get<std::vector<std::string>>();
        e.error = j.value("error", "");
        return e;
    } catch (const nlohmann::json::exception& ex) {
        throw InputError(std::string("malformed manifest entry: ") + ex.what());
    }
}

namespace {

void write_manifest(const fs::path& dir, const std::vector<ManifestEntry>& entries) {
    nlohmann::json runs = nlohmann::json::array();
    for (const auto& e : entries) runs.push_back(to_json(e));
    const fs::path tmp = dir / "manifest.json.tmp";
    {
        std::ofstream out(tmp);
        out << nlohmann::json{{"runs", runs}}.dump(2) << '\n';
        if (!out) throw InputError("cannot write manifest in " + dir.string());
    }
    fs::rename(tmp, dir / "manifest.json");
}

std::vector<std::string> artifacts_of(const RunConfig& cfg, const std::string& id) {
    std::vector<std::string> a = {id + "/config.json", id + "/curve.csv", id + "/episodes.jsonl",
                                  id + "/checkpoints/agent.ckpt"};
    if (cfg.representation) a.push_back(id + "/checkpoints/ofenet.ckpt");
    if (cfg.record_trajectories) a.push_back(id + "/trajectories.jsonl");
    return a;
}

}  // namespace

std::vector<ManifestEntry> run_suite(const std::vector<RunConfig>& configs, const SuiteOptions& opts) {
    if (opts.parallelism < 1) throw ConfigError("parallelism must be >= 1");
    if (opts.output_dir.empty()) throw ConfigError("suite output directory is empty");
    const fs::path dir = opts.output_dir;
    if (fs::exists(dir / "manifest.json") && !opts.overwrite)
        throw InputError(dir.string() + " already holds a suite; pass the overwrite flag to replace it");

    std::vector<ManifestEntry> entries;
    std::set<std::string> ids;
    for (const auto& c : configs) {
        ManifestEntry e;
        e.run_id = run_id(c);
        if (!ids.insert(e.run_id).second) throw ConfigError("duplicate run id '" + e.run_id + "' in suite");
        e.config_hash = io::config_hash(c);
        entries.push_back(std::move(e));
    }

    fs::create_directories(dir);
    std::mutex mu;
    write_manifest(dir, entries);

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= configs.size()) return;
            const std::string id = entries[i].run_id;
            {
                std::lock_guard lock(mu);
                entries[i].status = RunStatus::running;
                write_manifest(dir, entries);
            }
            RunStatus status = RunStatus::done;
            std::string error;
            double seconds = 0.0;
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const fs::path run_dir = dir / id;
                if (fs::exists(run_dir)) fs::remove_all(run_dir);
                seconds = run(configs[i], run_dir).seconds;
            } catch (const std::exception& ex) {
                status = RunStatus::failed;
                error = ex.what();
                seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            }
            std::lock_guard lock(mu);
            entries[i].status = status;
            entries[i].error = error;
            entries[i].seconds = seconds;
            if (status == RunStatus::done) entries[i].artifacts = artifacts_of(configs[i], id);
            write_manifest(dir, entries);
        }
    };

    const int n = std::min<int>(opts.parallelism, static_cast<int>(std::max<std::size_t>(configs.size(), 1)));
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    return entries;
}

std::vector<ManifestEntry> read_manifest(const fs::path& suite_dir) {
    nlohmann::json j = io::load_json_file(suite_dir / "manifest.json");
    std::vector<ManifestEntry> out;
    if (!j.contains("runs") || !j.at("runs").is_array()) throw InputError("manifest without a runs list");
    for (const auto& r : j.at("runs")) out.push_back(manifest_entry_from_json(r));
    return out;
}

}  // namespace auxrl::train
