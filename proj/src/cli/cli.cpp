#include "auxrl/cli/cli.hpp"

#include <cstdlib>
#include <fstream>

#include <CLI11.hpp>

#include "auxrl/errors.hpp"
#include "auxrl/io/config.hpp"
#include "auxrl/io/format.hpp"
#include "auxrl/metrics/report.hpp"
#include "auxrl/nn/gradcheck.hpp"
#include "auxrl/repr/ofenet.hpp"
#include "auxrl/train/run.hpp"
#include "auxrl/train/suite.hpp"

namespace auxrl::cli {

namespace fs = std::filesystem;

fs::path output_root() {
    const char* env = std::getenv("AUXRL_OUTPUT_ROOT");
    return env && *env ? fs::path(env) : fs::path("results");
}

fs::path resolve_output(const fs::path& p) { return p.is_absolute() ? p : output_root() / p; }

namespace {

struct RunArgs {
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> task;
    std::optional<std::string> algorithm;
    std::optional<std::int64_t> total_steps;
    std::optional<std::string> output;
    std::optional<int> parallelism;
    bool overwrite = false;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
    nlohmann::json doc = io::load_json_file(a.config);
    for (const auto& s : a.sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) throw ConfigError("--set expects key=value, got '" + s + "'");
        io::apply_override(doc, s.substr(0, eq), s.substr(eq + 1));
    }
    if (a.seed) io::apply_override(doc, "seed", std::to_string(*a.seed));
    if (a.algorithm) io::apply_override(doc, "algorithm", nlohmann::json(*a.algorithm).dump());
    if (a.total_steps) io::apply_override(doc, "total_steps", std::to_string(*a.total_steps));
    if (a.task) {
        if (*a.task == "baseline" || *a.task == "none") {
            io::apply_override(doc, "representation", "null");
            io::apply_override(doc, "label", "\"baseline\"");
        } else {
            io::apply_override(doc, "representation.task", nlohmann::json(*a.task).dump());
            io::apply_override(doc, "label", nlohmann::json(*a.task).dump());
        }
    }

    if (io::is_suite(doc)) {
        if (a.output) doc["output_dir"] = *a.output;
        if (a.parallelism) doc["parallelism"] = *a.parallelism;
        const io::SuiteConfig suite = io::suite_config_from_json(doc);
        train::SuiteOptions opts;
        opts.output_dir = resolve_output(suite.output_dir);
        opts.parallelism = suite.parallelism;
        opts.overwrite = a.overwrite;
        const auto entries = train::run_suite(suite.expand(), opts);
        std::size_t failed = 0;
        for (const auto& e : entries) {
            out << e.run_id << ' ' << train::to_string(e.status) << ' ' << io::format_number(e.seconds) << "s\n";
            if (e.status == train::RunStatus::failed) {
                ++failed;
                err << e.run_id << ": " << e.error << '\n';
            }
        }
        out << "manifest: " << (opts.output_dir / "manifest.json").string() << '\n';
        return failed == 0 ? kOk : kRuntime;
    }

    const train::RunConfig cfg = io::run_config_from_json(doc);
    const fs::path dir = resolve_output(a.output ? fs::path(*a.output) : fs::path(train::run_id(cfg)));
    if (fs::exists(dir / "curve.csv") && !a.overwrite)
        throw InputError(dir.string() + " already holds a run; pass --overwrite to replace it");
    if (fs::exists(dir)) fs::remove_all(dir);
    train::RunHooks hooks;
    hooks.on_eval = [&](const train::EvalRecord& r) {
        out << "step " << r.step << " mean " << io::format_number(r.mean) << '\n' << std::flush;
    };
    const train::RunResult res = train::run(cfg, dir, hooks);
    out << "wrote " << (dir / "curve.csv").string() << " in " << io::format_number(res.seconds) << "s\n";
    return kOk;
}

struct CompareArgs {
    std::vector<std::string> dirs;
    std::string baseline = "baseline";
    std::string output = "compare";
    int smooth = 5;
    bool raw = false;
};

int cmd_compare(const CompareArgs& a, std::ostream& out) {
    std::vector<fs::path> paths(a.dirs.begin(), a.dirs.end());
    metrics::CompareOptions opts;
    opts.baseline_label = a.baseline;
    opts.se80.smooth_window = a.smooth;
    opts.se80.raw = a.raw;
    const auto rows = metrics::compare(metrics::collect_runs(paths), opts);
    const auto written = metrics::write_report(rows, resolve_output(a.output));
    metrics::write_report_csv(out, rows);
    for (const auto& p : written) out << "wrote " << p.string() << '\n';
    return kOk;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Decoupled representation learning for off-policy RL"};
    app.require_subcommand(1);

    RunArgs run_args;
    auto* run = app.add_subcommand("run", "Train one configuration or a suite");
    run->add_option("config", run_args.config, "JSON run or suite configuration")->required();
    run->add_option("--set", run_args.sets, "Override a field, e.g. --set agent.tau=0.01");
    run->add_option("--seed", run_args.seed, "Override the seed (a suite runs only this seed)");
    run->add_option("--task", run_args.task, "Auxiliary task: rwp, fsp, fsdp or baseline");
    run->add_option("--algorithm", run_args.algorithm, "td3 or sac");
    run->add_option("--total-steps", run_args.total_steps, "Environment step budget");
    run->add_option("--output", run_args.output, "Output directory (relative to the output root)");
    run->add_option("--parallelism", run_args.parallelism, "Concurrent runs of a suite");
    run->add_flag("--overwrite", run_args.overwrite, "Replace existing results");

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "Compare finished runs: CSV report and SVG figures");
    compare->add_option("dirs", cmp.dirs, "Run or suite directories")->required();
    compare->add_option("--baseline", cmp.baseline, "Label of the baseline variant");
    compare->add_option("--output", cmp.output, "Report directory (relative to the output root)");
    compare->add_option("--smooth", cmp.smooth, "Smoothing window for SE80 crossing (odd)");
    compare->add_flag("--raw", cmp.raw, "Assess SE80 crossing on the raw curve");

    long obs = 0, act = 0, layers = 0, width = 0;
    auto* dim = app.add_subcommand("dimcheck", "Representation dimensions for given sizes");
    dim->add_option("obs_dim", obs)->required()->check(CLI::PositiveNumber);
    dim->add_option("action_dim", act)->required()->check(CLI::PositiveNumber);
    dim->add_option("layers", layers, "DenseNet blocks per part")->required()->check(CLI::PositiveNumber);
    dim->add_option("width", width, "Units per block")->required()->check(CLI::PositiveNumber);

    nn::GradcheckSpec gs;
    std::string activation = "swish";
    auto* grad = app.add_subcommand("gradcheck", "Finite-difference check of DenseNet gradients");
    grad->add_option("--seed", gs.seed);
    grad->add_option("--in-dim", gs.in_dim)->check(CLI::PositiveNumber);
    grad->add_option("--blocks", gs.blocks)->check(CLI::PositiveNumber);
    grad->add_option("--width", gs.width)->check(CLI::PositiveNumber);
    grad->add_option("--out-dim", gs.out_dim)->check(CLI::PositiveNumber);
    grad->add_option("--batch", gs.batch)->check(CLI::PositiveNumber);
    grad->add_option("--coordinates", gs.coordinates)->check(CLI::PositiveNumber);
    grad->add_option("--tolerance", gs.tolerance);
    grad->add_option("--activation", activation);
    grad->add_flag("--corrupt", gs.corrupt_gradient, "Perturb the analytic gradient (negative control)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    }

    try {
        if (*run) return cmd_run(run_args, out, err);
        if (*compare) return cmd_compare(cmp, out);
        if (*dim) {
            const auto d = repr::representation_dims(obs, act, static_cast<int>(layers), static_cast<int>(width));
            out << "dim(z_o)=" << d.obs_features << " dim(z_oa)=" << d.obs_action_features << '\n';
            return kOk;
        }
        if (*grad) {
            gs.activation = nn::activation_from_string(activation);
            const auto rep = nn::run_gradcheck(gs);
            out << (rep.passed() ? "PASS" : "FAIL") << " coordinates=" << rep.coordinates_checked
                << " failures=" << rep.failures << " max_relative_error=" << io::format_number(rep.max_relative_error)
                << " worst=" << rep.worst_parameter << '\n';
            return rep.passed() ? kOk : kRuntime;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const InputError& e) {
        err << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kValidation;
}

}  // namespace auxrl::cli
