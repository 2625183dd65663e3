#include "auxrl/metrics/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "auxrl/env/environment.hpp"
#include "auxrl/errors.hpp"
#include "auxrl/io/config.hpp"
#include "auxrl/io/format.hpp"
#include "auxrl/io/svg.hpp"
#include "auxrl/train/suite.hpp"

namespace auxrl::metrics {

namespace fs = std::filesystem;

namespace {

double parse_double(const std::string& s, const std::string& where) {
    double v = 0.0;
    const char* end = s.data() + s.size();
    auto res = std::from_chars(s.data(), end, v);
    if (res.ec != std::errc{} || res.ptr != end) throw InputError(where + ": bad number '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

}  // namespace

LearningCurve read_curve_csv(std::istream& in, ScoreKind kind) {
    std::string line;
    if (!std::getline(in, line) || line != "step,mean,min,max") throw InputError("curve CSV: unexpected header");
    LearningCurve c;
    c.kind = kind;
    std::size_t row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) continue;
        const auto cells = split(line);
        if (cells.size() != 4) throw InputError("curve CSV row " + std::to_string(row) + ": expected 4 columns");
        const std::string where = "curve CSV row " + std::to_string(row);
        c.steps.push_back(static_cast<std::int64_t>(parse_double(cells[0], where)));
        c.scores.push_back(parse_double(cells[1], where));
    }
    c.validate();
    return c;
}

RunRecord load_run(const fs::path& run_dir) {
    const train::RunConfig cfg = io::run_config_from_json(io::load_json_file(run_dir / "config.json"));
    RunRecord r;
    r.dir = run_dir;
    r.label = cfg.label;
    r.algorithm = std::string(agents::to_string(cfg.agent.algorithm));
    r.env = cfg.environment.id;
    r.seed = cfg.seed;
    r.training_steps = cfg.training_steps();
    const bool goals = env::make_environment(cfg.environment)->goal_conditioned();
    std::ifstream in(run_dir / "curve.csv");
    if (!in) throw InputError("cannot open " + (run_dir / "curve.csv").string());
    try {
        r.curve = read_curve_csv(in, goals ? ScoreKind::success_rate : ScoreKind::return_);
    } catch (const InputError& e) {
        throw InputError(run_dir.string() + ": " + e.what());
    }
    return r;
}

std::vector<RunRecord> collect_runs(const std::vector<fs::path>& paths) {
    std::vector<RunRecord> out;
    for (const auto& p : paths) {
        if (fs::exists(p / "config.json")) {
            out.push_back(load_run(p));
        } else if (fs::exists(p / "manifest.json")) {
            for (const auto& e : train::read_manifest(p))
                if (e.status == train::RunStatus::done) out.push_back(load_run(p / e.run_id));
        } else if (fs::is_directory(p)) {
            std::vector<fs::path> subdirs;
            for (const auto& entry : fs::directory_iterator(p))
                if (entry.is_directory() && fs::exists(entry.path() / "config.json")) subdirs.push_back(entry.path());
            std::sort(subdirs.begin(), subdirs.end());
            if (subdirs.empty()) throw InputError(p.string() + " holds no runs");
            for (const auto& s : subdirs) out.push_back(load_run(s));
        } else {
            throw InputError(p.string() + " is not a directory");
        }
    }
    return out;
}

std::vector<ReportRow> compare(const std::vector<RunRecord>& runs, const CompareOptions& opts) {
    if (runs.empty()) throw InputError("compare: no runs");
    // (algorithm, env) -> label -> runs
    std::map<std::pair<std::string, std::string>, std::map<std::string, std::vector<const RunRecord*>>> groups;
    std::set<std::tuple<std::string, std::string, std::string, std::uint64_t>> seen;
    for (const auto& r : runs) {
        if (!seen.insert({r.label, r.algorithm, r.env, r.seed}).second)
            throw InputError("compare: run " + r.label + "/" + r.algorithm + "/" + r.env + " seed " +
                             std::to_string(r.seed) + " appears twice");
        groups[{r.algorithm, r.env}][r.label].push_back(&r);
    }

    std::vector<ReportRow> rows;
    for (const auto& [key, variants] : groups) {
        const RunRecord& first = *variants.begin()->second.front();
        for (const auto& [label, rs] : variants)
            for (const RunRecord* r : rs)
                if (r->training_steps != first.training_steps || r->curve.steps != first.curve.steps ||
                    r->curve.kind != first.curve.kind)
                    throw InputError("compare: incompatible runs for " + key.first + "/" + key.second + " (" +
                                     r->dir.string() + " and " + first.dir.string() +
                                     " differ in budget or evaluation grid)");

        auto curves_of = [](const std::vector<const RunRecord*>& rs) {
            std::vector<LearningCurve> out;
            for (const auto* r : rs) out.push_back(r->curve);
            return out;
        };
        auto best_of = [&](const LearningCurve& c) {
            const LearningCurve s = smooth(c, std::max(1, opts.se80.smooth_window));
            return *std::max_element(s.scores.begin(), s.scores.end());
        };

        const auto base_it = variants.find(opts.baseline_label);
        std::optional<double> threshold, r0, baseline_best, baseline_se80;
        if (base_it != variants.end()) {
            const auto base_curves = curves_of(base_it->second);
            const CurveBand band = aggregate(base_curves);
            threshold = se80_threshold(base_curves);
            r0 = band.mean.front();
            baseline_best = best_of(band.mean_curve(first.curve.kind));
            baseline_se80 = se80(band.mean_curve(first.curve.kind), *threshold, first.training_steps, opts.se80).fraction;
        }

        std::vector<std::string> order;
        if (base_it != variants.end()) order.push_back(opts.baseline_label);
        for (const auto& [label, _] : variants)
            if (label != opts.baseline_label) order.push_back(label);

        for (const auto& label : order) {
            const auto& rs = variants.at(label);
            const auto curves = curves_of(rs);
            ReportRow row;
            row.variant = label;
            row.algorithm = key.first;
            row.env = key.second;
            row.n_seeds = rs.size();
            row.band = aggregate(curves);
            const LearningCurve mean = row.band.mean_curve(first.curve.kind);
            row.best_score = best_of(mean);
            if (threshold) {
                row.threshold = *threshold;
                if (*baseline_best != *r0) {
                    row.normalized_best = normalize_best(row.best_score, *baseline_best, *r0);
                    double lo = 0, hi = 0;
                    for (std::size_t i = 0; i < curves.size(); ++i) {
                        const double v = normalize_best(best_of(curves[i]), *baseline_best, *r0);
                        lo = i == 0 ? v : std::min(lo, v);
                        hi = i == 0 ? v : std::max(hi, v);
                    }
                    row.normalized_best_range = {lo, hi};
                }
                row.se80 = se80(mean, *threshold, first.training_steps, opts.se80).fraction;
                if (row.se80 && baseline_se80) {
                    if (*baseline_se80 > 0)
                        row.se80_ratio = *row.se80 / *baseline_se80;
                    else if (*row.se80 == 0)
                        row.se80_ratio = 1.0;
                }
                std::optional<std::pair<double, double>> range;
                for (const auto& c : curves) {
                    const auto f = se80(c, *threshold, first.training_steps, opts.se80).fraction;
                    if (!f) continue;
                    range = range ? std::pair{std::min(range->first, *f), std::max(range->second, *f)} : std::pair{*f, *f};
                }
                row.se80_range = range;
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows) {
    auto opt = [](const std::optional<double>& v) { return v ? io::format_number(*v) : std::string(); };
    out << "variant,algorithm,env,best_score,normalized_best,se80,n_seeds\n";
    for (const auto& r : rows)
        out << r.variant << ',' << r.algorithm << ',' << r.env << ',' << io::format_number(r.best_score) << ','
            << opt(r.normalized_best) << ',' << opt(r.se80) << ',' << std::to_string(r.n_seeds) << '\n';
}

std::string scatter_svg(const std::vector<ReportRow>& rows, const std::string& title) {
    io::SvgPlot plot(title, "SE80 (fraction of training steps)", "normalized best score");
    plot.set_x_range(0.0, 1.0);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::string& color = io::SvgPlot::palette(i);
        if (r.se80 && r.normalized_best)
            plot.point(*r.se80, *r.normalized_best, color, r.variant, r.se80_range, r.normalized_best_range);
        else
            plot.note(r.variant + " (threshold not reached)", color);
    }
    return plot.render();
}

std::string curves_svg(const std::vector<ReportRow>& rows, const std::string& title) {
    const bool success = !rows.empty() && rows.front().env == "puck_slide";
    io::SvgPlot plot(title, "training steps", success ? "success rate" : "return");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::vector<double> x(r.band.steps.begin(), r.band.steps.end());
        plot.band(x, r.band.min, r.band.max, io::SvgPlot::palette(i));
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        const std::vector<double> x(r.band.steps.begin(), r.band.steps.end());
        const LearningCurve s = smooth(r.band.mean_curve(), r.band.steps.size() >= 3 ? 3 : 1);
        plot.line(x, s.scores, io::SvgPlot::palette(i), r.variant);
    }
    return plot.render();
}

std::vector<fs::path> write_report(const std::vector<ReportRow>& rows, const fs::path& out_dir) {
    fs::create_directories(out_dir);
    std::vector<fs::path> written;
    {
        const fs::path p = out_dir / "report.csv";
        std::ofstream out(p);
        write_report_csv(out, rows);
        if (!out) throw InputError("cannot write " + p.string());
        written.push_back(p);
    }
    std::map<std::pair<std::string, std::string>, std::vector<ReportRow>> groups;
    for (const auto& r : rows) groups[{r.algorithm, r.env}].push_back(r);
    for (const auto& [key, group] : groups) {
        const std::string stem = key.second + "_" + key.first;
        const fs::path scatter = out_dir / (stem + "_se80.svg");
        const fs::path curves = out_dir / (stem + "_curves.svg");
        std::ofstream(scatter) << scatter_svg(group, key.second + " / " + key.first);
        std::ofstream(curves) << curves_svg(group, key.second + " / " + key.first);
        written.push_back(scatter);
        written.push_back(curves);
    }
    return written;
}

}  // namespace auxrl::metrics
