#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace auxrl::metrics {

enum class ScoreKind { return_, success_rate };

std::string_view to_string(ScoreKind k);

// Evaluation scores on a step grid. Steps strictly increase and start at 0.
struct LearningCurve {
    std::vector<std::int64_t> steps;
    std::vector<double> scores;
    ScoreKind kind = ScoreKind::return_;

    std::size_t size() const { return steps.size(); }
    void validate() const;  // throws InputError
};

struct CurveBand {
    std::vector<std::int64_t> steps;
    std::vector<double> mean, min, max;

    LearningCurve mean_curve(ScoreKind kind = ScoreKind::return_) const;
};

// Pointwise mean/min/max over curves sharing one step grid.
CurveBand aggregate(const std::vector<LearningCurve>& curves);

// Centred moving average; windows shrink at the boundaries. Window must be
// odd and >= 1.
LearningCurve smooth(const LearningCurve& curve, int window);

// T = r0 + 0.8 (R_max - r0): r0 is the mean step-0 score over the baseline
// seeds, R_max the largest value of the mean-across-seeds curve.
double se80_threshold(const std::vector<LearningCurve>& baseline_curves, double fraction = 0.8);

enum class Se80Denominator {
    budget,            // crossing step / total training steps
    baseline_crossing  // crossing step / baseline crossing step
};

struct Se80Options {
    int smooth_window = 5;  // crossing is assessed on the smoothed curve
    bool raw = false;       // assess on the raw curve instead
    Se80Denominator denominator = Se80Denominator::budget;
    std::int64_t baseline_crossing_step = 0;  // used by baseline_crossing
};

struct Se80Result {
    double threshold = 0.0;
    std::optional<std::int64_t> crossing_step;  // empty: never reached
    std::optional<double> fraction;

    bool reached() const { return crossing_step.has_value(); }
};

Se80Result se80(const LearningCurve& curve, double threshold, std::int64_t total_steps, const Se80Options& opts = {});

// (best - r0) / (baseline_best - r0); throws DegenerateBaselineError when the
// baseline best equals r0.
double normalize_best(double best, double baseline_best, double r0);
std::vector<double> normalize_best(const std::vector<double>& bests, double baseline_best, double r0);

}  // namespace auxrl::metrics
