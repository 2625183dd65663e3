#include "auxrl/train/run.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "auxrl/agents/replay_buffer.hpp"
#include "auxrl/errors.hpp"
#include "auxrl/io/config.hpp"
#include "auxrl/io/format.hpp"
#include "auxrl/repr/representation.hpp"
#include "auxrl/seeding.hpp"
#include "auxrl/train/collector.hpp"

namespace auxrl::train {

namespace {

constexpr std::uint64_t kReprStream = 1;
constexpr std::uint64_t kCollectStream = 2;
constexpr std::uint64_t kSampleStream = 3;
constexpr std::uint64_t kAgentStream = 4;
constexpr std::uint64_t kEvalStream = 5;

template <typename E>
[[noreturn]] void rethrow_with(const std::string& context, const E& e) {
    throw E(context + ": " + e.what());
}

}  // namespace

std::vector<std::string> RunConfig::validation_errors() const {
    std::vector<std::string> out;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) out.push_back(msg);
    };
    if (environment.id.empty()) {
        out.push_back("environment.id: missing");
    } else {
        try {
            environment.validate();
        } catch (const std::exception& e) {
            out.push_back(e.what());
        }
    }
    try {
        agent.validate();
    } catch (const std::exception& e) {
        out.push_back(e.what());
    }
    if (representation) {
        try {
            representation->validate();
        } catch (const std::exception& e) {
            out.push_back(e.what());
        }
    }
    try {
        her.validate();
    } catch (const std::exception& e) {
        out.push_back(e.what());
    }
    check(label.find_first_of("/\\ ") == std::string::npos && !label.empty(),
          "label: must be non-empty without spaces or path separators");
    check(pretrain_steps >= 0, "pretrain_steps: must be >= 0");
    check(total_steps >= pretrain_steps, "total_steps: must be >= pretrain_steps");
    check(eval_interval >= 1, "eval_interval: must be >= 1");
    check(eval_episodes >= 1, "eval_episodes: must be >= 1");
    return out;
}

void RunConfig::validate() const {
    auto problems = validation_errors();
    if (!problems.empty()) throw ValidationError(std::move(problems));
}

std::int64_t default_eval_interval(const std::string& env_id) { return env_id == "pendulum" ? 1000 : 5000; }

std::int64_t default_eval_episodes(const std::string& env_id) { return env_id == "puck_slide" ? 100 : 10; }

EvalRecord evaluate(const Policy& policy, env::Environment& env, std::int64_t episodes, std::uint64_t seed,
                    std::uint64_t eval_index) {
    if (episodes < 1) throw InputError("evaluate: episodes must be >= 1");
    EvalRecord rec;
    const bool goals = env.goal_conditioned();
    for (std::int64_t e = 0; e < episodes; ++e) {
        Vec obs = env.reset(derive_seed(seed, eval_index, static_cast<std::uint64_t>(e)));
        double ret = 0.0;
        bool success = false;
        for (;;) {
            const env::StepResult r = env.step(policy(obs));
            ret += r.reward;
            success = r.success;
            obs = r.observation;
            if (r.done || r.terminal) break;
        }
        rec.scores.push_back(goals ? (success ? 1.0 : 0.0) : ret);
    }
    rec.mean = std::accumulate(rec.scores.begin(), rec.scores.end(), 0.0) / static_cast<double>(rec.scores.size());
    rec.min = *std::min_element(rec.scores.begin(), rec.scores.end());
    rec.max = *std::max_element(rec.scores.begin(), rec.scores.end());
    // guard the invariant against rounding in the mean
    rec.mean = std::clamp(rec.mean, rec.min, rec.max);
    return rec;
}

std::string run_id(const RunConfig& cfg) {
    return cfg.label + "_" + std::string(agents::to_string(cfg.agent.algorithm)) + "_" + cfg.environment.id + "_s" +
           std::to_string(cfg.seed);
}

void write_curve_csv(std::ostream& out, const std::vector<EvalRecord>& curve) {
    out << "step,mean,min,max\n";
    for (const auto& r : curve)
        out << std::to_string(r.step) << ',' << io::format_number(r.mean) << ',' << io::format_number(r.min) << ','
            << io::format_number(r.max) << '\n';
}

namespace {

RunResult run_impl(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir, const RunHooks& hooks) {
    const auto t0 = std::chrono::steady_clock::now();
    auto env = env::make_environment(cfg.environment);
    auto eval_env = env::make_environment(cfg.environment);
    const env::EnvSpec& spec = env->spec();

    std::unique_ptr<repr::Representation> rep;
    repr::OfeNet* ofenet = nullptr;
    if (cfg.representation) {
        auto net = std::make_unique<repr::OfeNet>(spec.obs_dim, spec.action_dim, *cfg.representation,
                                                  derive_seed(cfg.seed, kReprStream));
        ofenet = net.get();
        rep = std::move(net);
    } else {
        rep = std::make_unique<repr::IdentityRepresentation>(spec.obs_dim, spec.action_dim);
    }

    agents::ReplayBuffer buffer(cfg.agent.buffer_capacity);
    Collector collector(*env, buffer, cfg.her, derive_seed(cfg.seed, kCollectStream));
    std::mt19937_64 rng(derive_seed(cfg.seed, kSampleStream));

    std::ofstream curve_out, episodes_out, traj_out;
    if (out_dir) {
        std::filesystem::create_directories(*out_dir / "checkpoints");
        std::ofstream(*out_dir / "config.json") << io::to_json(cfg).dump(2) << '\n';
        curve_out.open(*out_dir / "curve.csv");
        curve_out << "step,mean,min,max\n" << std::flush;
        episodes_out.open(*out_dir / "episodes.jsonl");
        if (cfg.record_trajectories) {
            traj_out.open(*out_dir / "trajectories.jsonl");
            collector.set_trajectory_sink(&traj_out);
        }
        if (!curve_out || !episodes_out) throw InputError("cannot write to run directory " + out_dir->string());
    }

    pretrain(collector, ofenet, cfg.pretrain_steps, rng);
    auto agent = agents::make_agent(cfg.agent, *rep, spec, derive_seed(cfg.seed, kAgentStream));

    RunResult result;
    const Policy policy = [&](const Vec& obs) -> Vec {
        return agent->select_action(rep->encode_obs(Mat(obs)).col(0), false);
    };
    std::uint64_t eval_index = 0;
    auto record_eval = [&](std::int64_t step) {
        EvalRecord rec = evaluate(policy, *eval_env, cfg.eval_episodes, derive_seed(cfg.seed, kEvalStream), eval_index++);
        rec.step = step;
        if (out_dir) {
            curve_out << rec.step << ',' << io::format_number(rec.mean) << ',' << io::format_number(rec.min) << ','
                      << io::format_number(rec.max) << '\n'
                      << std::flush;
            for (std::size_t e = 0; e < rec.scores.size(); ++e)
                episodes_out << nlohmann::json{{"step", step}, {"episode", e}, {"score", rec.scores[e]}}.dump() << '\n';
            episodes_out.flush();
        }
        if (hooks.on_eval) hooks.on_eval(rec);
        result.curve.push_back(std::move(rec));
    };
    record_eval(0);

    const bool tracing = static_cast<bool>(hooks.on_step);
    const auto batch_size = static_cast<std::size_t>(cfg.agent.batch_size);
    for (std::int64_t step = 1; step <= cfg.training_steps(); ++step) {
        const Vec z_o = rep->encode_obs(Mat(collector.observation())).col(0);
        collector.step(collector.scaler().normalize(agent->select_action(z_o, true)));

        StepTrace trace;
        trace.step = step;
        const Batch batch = buffer.gather(buffer.sample_indices(batch_size, rng));
        if (ofenet) {
            if (tracing) {
                trace.agent_before_aux = agent->checksum();
                trace.repr_before_aux = rep->checksum();
            }
            ofenet->aux_train_step(batch);
            trace.aux_updated = true;
            if (tracing) {
                trace.aux_indices = batch.indices;
                trace.agent_after_aux = agent->checksum();
                trace.repr_after_aux = rep->checksum();
            }
        }
        const agents::EncodedBatch encoded = agents::encode_batch(*rep, batch);
        if (tracing) {
            trace.repr_before_agent = rep->checksum();
            trace.agent_before_agent = agent->checksum();
        }
        agent->update(encoded);
        if (tracing) {
            trace.agent_indices = encoded.indices;
            trace.repr_after_agent = rep->checksum();
            trace.agent_after_agent = agent->checksum();
            hooks.on_step(trace);
        }

        if (step % cfg.eval_interval == 0) record_eval(step);
    }

    if (out_dir) {
        agent->to_checkpoint().save(*out_dir / "checkpoints" / "agent.ckpt");
        if (ofenet) ofenet->save(*out_dir / "checkpoints" / "ofenet.ckpt");
    }
    result.agent_checksum = agent->checksum();
    result.representation_checksum = rep->checksum();
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

}  // namespace

RunResult run(const RunConfig& cfg, const std::optional<std::filesystem::path>& out_dir, const RunHooks& hooks) {
    cfg.validate();
    const std::string context = "run " + run_id(cfg);
    try {
        return run_impl(cfg, out_dir, hooks);
    } catch (const NumericError& e) {
        rethrow_with(context, e);
    } catch (const DegenerateRewardError& e) {
        rethrow_with(context, e);
    }
}

}  // namespace auxrl::train
