// Acceptance suite: one PASS/FAIL line per criterion on stdout, progress on
// stderr. Exit status is non-zero when any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "auxrl/agents/her.hpp"
#include "auxrl/cli/cli.hpp"
#include "auxrl/env/puck_slide.hpp"
#include "auxrl/errors.hpp"
#include "auxrl/io/format.hpp"
#include "auxrl/metrics/se80.hpp"
#include "auxrl/nn/gradcheck.hpp"
#include "auxrl/repr/ofenet.hpp"
#include "auxrl/train/collector.hpp"
#include "auxrl/train/run.hpp"
#include "support/stub_env.hpp"

using namespace auxrl;
namespace fs = std::filesystem;

namespace {

constexpr int kSeeds = 5;
constexpr int kSmooth = 5;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(4);
    o << v;
    return o.str();
}

void progress(const std::string& msg) { std::cerr << "  .. " << msg << std::endl; }

metrics::LearningCurve to_curve(const train::RunResult& r) {
    metrics::LearningCurve c;
    for (const auto& e : r.curve) {
        c.steps.push_back(e.step);
        c.scores.push_back(e.mean);
    }
    return c;
}

double smoothed_best(const metrics::LearningCurve& c) {
    const auto s = metrics::smooth(c, kSmooth);
    return *std::max_element(s.scores.begin(), s.scores.end());
}

metrics::LearningCurve mean_curve(const std::vector<metrics::LearningCurve>& cs) {
    return metrics::aggregate(cs).mean_curve();
}

// Cached runs keyed by label/algorithm/seed so criteria can share them.
class Runs {
public:
    const train::RunResult& get(const train::RunConfig& cfg) {
        const std::string key = train::run_id(cfg);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        const auto t0 = std::chrono::steady_clock::now();
        auto res = train::run(cfg);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        progress(key + " best(smoothed)=" + fmt(smoothed_best(to_curve(res))) + " in " + fmt(s) + "s");
        return cache_.emplace(key, std::move(res)).first->second;
    }

    std::vector<metrics::LearningCurve> curves(train::RunConfig cfg) {
        std::vector<metrics::LearningCurve> out;
        for (int s = 0; s < kSeeds; ++s) {
            cfg.seed = static_cast<std::uint64_t>(s);
            out.push_back(to_curve(get(cfg)));
        }
        return out;
    }

private:
    std::map<std::string, train::RunResult> cache_;
};

// Pendulum: 30k RL training steps after 1k random steps.
train::RunConfig pendulum(agents::Algorithm algo) {
    train::RunConfig c;
    c.environment.id = "pendulum";
    c.agent.algorithm = algo;
    c.agent.hidden = {64, 64};
    c.total_steps = 31000;
    c.pretrain_steps = 1000;
    c.eval_interval = 1000;
    c.eval_episodes = 10;
    return c;
}

train::RunConfig with_task(train::RunConfig c, repr::AuxTask task, int layers, int width) {
    c.label = std::string(repr::to_string(task));
    repr::RepresentationConfig rc;
    rc.task = task;
    rc.layers_per_part = layers;
    rc.width = width;
    rc.pretrain_steps = static_cast<int>(c.pretrain_steps);
    c.representation = rc;
    return c;
}

// LinearChain n = 32 with SAC; rewards scaled in the critic targets.
train::RunConfig chain() {
    train::RunConfig c;
    c.environment.id = "linear_chain";
    c.environment.params = {{"state_dim", 32}};
    c.agent.algorithm = agents::Algorithm::sac;
    c.agent.hidden = {64, 64};
    c.agent.reward_scale = 0.01;
    c.total_steps = 21000;
    c.pretrain_steps = 1000;
    c.eval_interval = 1000;
    c.eval_episodes = 10;
    return c;
}
constexpr int kChainLayers = 1;
constexpr int kChainWidth = 8;

train::RunConfig puck(bool her) {
    train::RunConfig c;
    c.label = her ? "her" : "baseline";
    c.environment.id = "puck_slide";
    c.agent.algorithm = agents::Algorithm::sac;
    c.agent.hidden = {64, 64};
    c.her.enabled = her;
    c.her.k = 4;
    c.total_steps = 51000;
    c.pretrain_steps = 1000;
    c.eval_interval = 5000;
    c.eval_episodes = 100;
    return c;
}

const repr::AuxTask kTasks[] = {repr::AuxTask::rwp, repr::AuxTask::fsp, repr::AuxTask::fsdp};
const agents::Algorithm kAlgos[] = {agents::Algorithm::td3, agents::Algorithm::sac};

Outcome c1_dimensions() {
    const struct {
        const char *obs, *act, *layers, *width, *expected;
    } rows[] = {{"3", "1", "2", "10", "dim(z_o)=23 dim(z_oa)=44"},
                {"11", "3", "6", "40", "dim(z_o)=251 dim(z_oa)=494"},
                {"17", "6", "8", "30", "dim(z_o)=257 dim(z_oa)=503"},
                {"292", "17", "8", "30", "dim(z_o)=532 dim(z_oa)=789"},
                {"31", "4", "8", "30", "dim(z_o)=271 dim(z_oa)=515"}};
    int ok = 0;
    std::string bad;
    for (const auto& r : rows) {
        const char* argv[] = {"auxrl", "dimcheck", r.obs, r.act, r.layers, r.width};
        std::ostringstream out, err;
        const int code = cli::main(6, argv, out, err);
        if (code == 0 && out.str() == std::string(r.expected) + "\n")
            ++ok;
        else
            bad += " [" + out.str() + "]";
    }
    return {ok == 5, std::to_string(ok) + "/5 rows exact" + bad};
}

Outcome c2_gradients() {
    std::mt19937_64 rng(2024);
    std::uniform_int_distribution<int> in(1, 8), blocks(1, 4), width(1, 32), out(1, 6), batch(2, 16);
    int passed = 0, coords = 0;
    double worst = 0.0;
    const int configs = 12;
    for (int i = 0; i < configs; ++i) {
        nn::GradcheckSpec s;
        s.seed = rng();
        s.in_dim = in(rng);
        s.blocks = blocks(rng);
        s.width = width(rng);
        s.out_dim = out(rng);
        s.batch = batch(rng);
        s.activation = i % 3 == 2 ? nn::Activation::tanh : nn::Activation::swish;
        s.coordinates = 200;
        s.tolerance = 1e-4;
        const auto rep = nn::run_gradcheck(s);
        passed += rep.passed();
        coords += rep.coordinates_checked;
        worst = std::max(worst, rep.max_relative_error);
    }
    return {passed == configs, std::to_string(passed) + "/" + std::to_string(configs) + " configs, " +
                                   std::to_string(coords) + " coordinates, max relative error " + fmt(worst)};
}

Outcome c3_pendulum_baselines(Runs& runs) {
    bool pass = true;
    std::string detail;
    for (auto algo : kAlgos) {
        int reached = 0;
        std::string bests;
        for (const auto& c : runs.curves(pendulum(algo))) {
            const double b = smoothed_best(c);
            reached += b >= -300.0;
            bests += " " + fmt(b);
        }
        pass = pass && reached >= 4;
        detail += std::string(agents::to_string(algo)) + " " + std::to_string(reached) + "/5 reach -300 (best" + bests + "); ";
    }
    return {pass, detail};
}

// The variant's best smoothed mean return must lie inside the baseline's
// pointwise seed band (smoothed per-seed curves) at the step where it peaks.
Outcome c4_pendulum_parity(Runs& runs) {
    bool pass = true;
    std::string detail;
    for (auto algo : kAlgos) {
        std::vector<metrics::LearningCurve> base;
        for (const auto& c : runs.curves(pendulum(algo))) base.push_back(metrics::smooth(c, kSmooth));
        const auto band = metrics::aggregate(base);
        detail += std::string(agents::to_string(algo)) + ":";
        for (auto task : kTasks) {
            const auto m = metrics::smooth(mean_curve(runs.curves(with_task(pendulum(algo), task, 2, 10))), kSmooth);
            const auto at = static_cast<std::size_t>(std::max_element(m.scores.begin(), m.scores.end()) - m.scores.begin());
            const double best = m.scores[at], lo = band.min[at], hi = band.max[at];
            const bool in = best >= lo && best <= hi;
            pass = pass && in;
            detail += " " + std::string(repr::to_string(task)) + "=" + fmt(best) + " at " + std::to_string(m.steps[at]) +
                      " in [" + fmt(lo) + ", " + fmt(hi) + "]" + (in ? "" : "(out)");
        }
        detail += "; ";
    }
    return {pass, detail};
}

// Mean over seeds of the per-seed SE80 against the baseline threshold; a seed
// that never reaches the threshold counts as the whole budget (1.0).
double mean_se80(const std::vector<metrics::LearningCurve>& cs, double threshold, std::int64_t budget) {
    double sum = 0.0;
    for (const auto& c : cs) {
        const auto r = metrics::se80(c, threshold, budget);
        sum += r.fraction.value_or(1.0);
    }
    return sum / static_cast<double>(cs.size());
}

Outcome c5_chain_ordering(Runs& runs) {
    const auto base_cfg = chain();
    const auto base = runs.curves(base_cfg);
    const double t = metrics::se80_threshold(base);
    const std::int64_t budget = base_cfg.training_steps();
    std::map<repr::AuxTask, double> se;
    for (auto task : kTasks)
        se[task] = mean_se80(runs.curves(with_task(base_cfg, task, kChainLayers, kChainWidth)), t, budget);
    const double b = mean_se80(base, t, budget);
    const double rwp = se[repr::AuxTask::rwp], fsp = se[repr::AuxTask::fsp], fsdp = se[repr::AuxTask::fsdp];
    const bool pass = fsp <= b && fsdp <= b && fsp <= rwp && fsdp <= rwp;
    return {pass, "threshold " + fmt(t) + ", mean SE80 baseline=" + fmt(b) + " fsp=" + fmt(fsp) +
                      " fsdp=" + fmt(fsdp) + " rwp=" + fmt(rwp)};
}

std::vector<Transition> puck_episode(env::PuckSlide& e, std::uint64_t seed) {
    const auto& spec = e.spec();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<float> u(-1.0f, 1.0f);
    Vec obs = e.reset(seed);
    std::vector<Transition> ep;
    for (bool done = false; !done;) {
        Vec a(2);
        a << u(rng), u(rng);
        const auto r = e.step(a);
        Transition t;
        t.obs = obs;
        t.action = a;
        t.reward = static_cast<float>(r.reward);
        t.next_obs = r.observation;
        t.achieved_goal = env::achieved_goal_of(spec, r.observation);
        t.desired_goal = env::desired_goal_of(spec, obs);
        ep.push_back(t);
        obs = r.observation;
        done = r.done;
    }
    return ep;
}

Outcome c6a_her_rewards() {
    env::PuckSlide e;
    std::mt19937_64 rng(6);
    std::size_t checked = 0, exact = 0;
    for (std::uint64_t s = 0; checked < 1000; ++s) {
        for (const auto& t : agents::her_copies(puck_episode(e, s), {true, 4}, e, rng)) {
            if (checked == 1000) break;
            double d2 = 0.0;
            for (Eigen::Index i = 0; i < t.achieved_goal.size(); ++i) {
                const double d = static_cast<double>(t.achieved_goal(i)) - static_cast<double>(t.desired_goal(i));
                d2 += d * d;
            }
            exact += t.reward == static_cast<float>(-std::sqrt(d2));
            ++checked;
        }
    }
    return {exact == checked, std::to_string(exact) + "/" + std::to_string(checked) + " relabelled rewards exact"};
}

Outcome c6b_her_effect(Runs& runs) {
    auto final_success = [&](bool her) {
        double sum = 0.0;
        for (const auto& c : runs.curves(puck(her))) sum += c.scores.back();
        return sum / kSeeds;
    };
    const double with = final_success(true), without = final_success(false);
    return {with - without >= 0.1, "final success with HER " + fmt(with) + ", without " + fmt(without)};
}

Outcome c7_se80_examples() {
    auto curve = [](std::vector<double> s) {
        metrics::LearningCurve c;
        for (std::size_t i = 0; i < s.size(); ++i) c.steps.push_back(static_cast<std::int64_t>(i) * 1000);
        c.scores = std::move(s);
        return c;
    };
    metrics::Se80Options raw;
    raw.raw = true;
    int ok = 0;
    std::vector<double> lin;
    for (int i = 0; i <= 10; ++i) lin.push_back(10.0 * i);
    const auto linear = metrics::se80(curve(lin), metrics::se80_threshold({curve(lin)}), 10000, raw);
    ok += linear.fraction && *linear.fraction == 0.8;
    ok += !metrics::se80(curve({0, 10, 20, 30, 40}), 80.0, 4000).fraction.has_value();
    const auto start = metrics::se80(curve({90, 95, 100}), 80.0, 2000, raw);
    ok += start.fraction && *start.fraction == 0.0;
    ok += metrics::se80_threshold({curve({-1000, -600, -400}), curve({-1200, -800, -200})}) == -460.0;
    ok += metrics::se80_threshold({curve({0, 50, 100}), curve({0, 30, 60})}) == 64.0;
    ok += metrics::se80_threshold({curve({-1700, -900, -200}), curve({-1500, -700, -100})}) == -440.0;
    return {ok == 6, std::to_string(ok) + "/6 examples exact"};
}

Outcome c8_degenerate_guard() {
    std::string detail;
    bool pass = true;
    for (auto task : kTasks) {
        testing::ConstantRewardEnv e;
        agents::ReplayBuffer buffer(5000);
        train::Collector col(e, buffer, {}, 8);
        repr::RepresentationConfig rc;
        rc.task = task;
        rc.pretrain_steps = 200;
        repr::OfeNet net(3, 1, rc, 8);
        std::mt19937_64 rng(8);
        std::string got = "trained";
        try {
            train::pretrain(col, &net, 1000, rng);
            for (int i = 0; i < 50; ++i) net.aux_train_step(buffer.gather(buffer.sample_indices(64, rng)));
        } catch (const DegenerateRewardError&) {
            got = "degenerate-reward error";
        }
        const bool expected = (task == repr::AuxTask::rwp) == (got != "trained");
        pass = pass && expected;
        detail += std::string(repr::to_string(task)) + ": " + got + "; ";
    }
    return {pass, detail};
}

Outcome c9_determinism(const fs::path& work) {
    std::vector<std::string> csv;
    for (int i = 0; i < 2; ++i) {
        const fs::path dir = work / ("determinism_" + std::to_string(i));
        fs::remove_all(dir);
        train::run(pendulum(agents::Algorithm::td3), dir);
        std::ifstream in(dir / "curve.csv", std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        csv.push_back(ss.str());
        progress("determinism run " + std::to_string(i + 1) + " done");
    }
    const bool same = !csv[0].empty() && csv[0] == csv[1];
    return {same, same ? "curve.csv identical (" + std::to_string(csv[0].size()) + " bytes)" : "curve.csv differs"};
}

Outcome c10_freezing_contract() {
    std::size_t steps = 0, violations = 0;
    for (auto algo : kAlgos) {
        auto cfg = with_task(pendulum(algo), repr::AuxTask::fsp, 2, 10);
        cfg.total_steps = 3000;
        train::RunHooks hooks;
        hooks.on_step = [&](const train::StepTrace& t) {
            ++steps;
            const bool ok = t.aux_updated && !t.aux_indices.empty() && t.aux_indices == t.agent_indices &&
                            t.agent_before_aux == t.agent_after_aux && t.repr_before_agent == t.repr_after_agent &&
                            t.repr_before_aux != t.repr_after_aux && t.agent_before_agent != t.agent_after_agent;
            violations += !ok;
        };
        train::run(cfg, std::nullopt, hooks);
    }
    return {steps == 4000 && violations == 0,
            std::to_string(steps) + " system steps traced, " + std::to_string(violations) + " violations"};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<std::string> only;
    std::string work = (fs::temp_directory_path() / "auxrl_acceptance").string();
    app.add_option("--only", only, "Criteria to run, e.g. --only 1 6a 9");
    app.add_option("--workdir", work, "Scratch directory");
    CLI11_PARSE(app, argc, argv);
    fs::create_directories(work);

    Runs runs;
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"1", c1_dimensions},
        {"2", c2_gradients},
        {"3", [&] { return c3_pendulum_baselines(runs); }},
        {"4", [&] { return c4_pendulum_parity(runs); }},
        {"5", [&] { return c5_chain_ordering(runs); }},
        {"6a", c6a_her_rewards},
        {"6b", [&] { return c6b_her_effect(runs); }},
        {"7", c7_se80_examples},
        {"8", c8_degenerate_guard},
        {"9", [&] { return c9_determinism(work); }},
        {"10", c10_freezing_contract},
    };
    const std::set<std::string> selected(only.begin(), only.end());
    int failed = 0;
    for (const auto& [id, fn] : criteria) {
        if (!selected.empty() && !selected.count(id)) continue;
        std::cerr << "criterion " << id << std::endl;
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
