#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "auxrl/metrics/se80.hpp"

namespace auxrl::metrics {

// One finished run as found on disk.
struct RunRecord {
    std::filesystem::path dir;
    std::string label;
    std::string algorithm;
    std::string env;
    std::uint64_t seed = 0;
    std::int64_t training_steps = 0;
    LearningCurve curve;
};

// Reads config.json and curve.csv of a run directory.
RunRecord load_run(const std::filesystem::path& run_dir);

// Accepts run directories, suite directories (completed runs of the
// manifest) or any directory holding run directories one level down.
std::vector<RunRecord> collect_runs(const std::vector<std::filesystem::path>& paths);

// Parses "step,mean,min,max" CSV into a curve of mean scores.
LearningCurve read_curve_csv(std::istream& in, ScoreKind kind);

struct ReportRow {
    std::string variant, algorithm, env;
    std::size_t n_seeds = 0;
    double best_score = 0.0;                // max of the smoothed mean curve
    std::optional<double> normalized_best;  // empty without a usable baseline
    std::optional<double> se80;             // empty when never reached
    std::optional<double> se80_ratio;       // se80 / baseline se80
    // per-seed spreads for error bars
    std::optional<std::pair<double, double>> normalized_best_range;
    std::optional<std::pair<double, double>> se80_range;
    CurveBand band;
    double threshold = 0.0;
};

struct CompareOptions {
    std::string baseline_label = "baseline";
    Se80Options se80;
};

// Rows grouped by (algorithm, env); variants sorted by label with the
// baseline first. Throws InputError for runs that cannot be compared.
std::vector<ReportRow> compare(const std::vector<RunRecord>& runs, const CompareOptions& opts = {});

// Columns: variant, algorithm, env, best_score, normalized_best, se80, n_seeds.
void write_report_csv(std::ostream& out, const std::vector<ReportRow>& rows);

// Normalized best against SE80 with min/max error bars; variants that never
// reached the threshold get no marker.
std::string scatter_svg(const std::vector<ReportRow>& rows, const std::string& title);

// Mean curves with min/max bands.
std::string curves_svg(const std::vector<ReportRow>& rows, const std::string& title);

// Writes report.csv plus one scatter and one curve figure per (algorithm,
// env) group into out_dir. Returns the written paths.
std::vector<std::filesystem::path> write_report(const std::vector<ReportRow>& rows, const std::filesystem::path& out_dir);

}  // namespace auxrl::metrics
