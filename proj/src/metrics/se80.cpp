#include "auxrl/metrics/se80.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "auxrl/errors.hpp"

namespace auxrl::metrics {

std::string_view to_string(ScoreKind k) { return k == ScoreKind::return_ ? "return" : "success_rate"; }

void LearningCurve::validate() const {
    if (steps.size() != scores.size()) throw InputError("learning curve: steps and scores differ in length");
    if (steps.empty()) throw InputError("learning curve is empty");
    if (steps.front() != 0) throw InputError("learning curve must start at step 0");
    for (std::size_t i = 1; i < steps.size(); ++i)
        if (steps[i] <= steps[i - 1]) throw InputError("learning curve steps must strictly increase");
    for (double s : scores)
        if (!std::isfinite(s)) throw InputError("learning curve contains a non-finite score");
}

LearningCurve CurveBand::mean_curve(ScoreKind kind) const { return {steps, mean, kind}; }

CurveBand aggregate(const std::vector<LearningCurve>& curves) {
    if (curves.empty()) throw InputError("aggregate: no curves");
    for (const auto& c : curves) {
        c.validate();
        if (c.steps != curves.front().steps) throw InputError("aggregate: curves have different step grids");
    }
    CurveBand band;
    band.steps = curves.front().steps;
    const std::size_t n = band.steps.size();
    band.mean.assign(n, 0.0);
    band.min.assign(n, 0.0);
    band.max.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0, lo = curves.front().scores[i], hi = lo;
        for (const auto& c : curves) {
            sum += c.scores[i];
            lo = std::min(lo, c.scores[i]);
            hi = std::max(hi, c.scores[i]);
        }
        band.mean[i] = std::clamp(sum / static_cast<double>(curves.size()), lo, hi);
        band.min[i] = lo;
        band.max[i] = hi;
    }
    return band;
}

LearningCurve smooth(const LearningCurve& curve, int window) {
    if (window < 1 || window % 2 == 0) throw InputError("smooth: window must be odd and >= 1");
    curve.validate();
    LearningCurve out = curve;
    const auto n = static_cast<std::ptrdiff_t>(curve.size());
    const std::ptrdiff_t half = window / 2;
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, i - half);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, i + half);
        double sum = 0.0, mn = curve.scores[lo], mx = mn;
        for (std::ptrdiff_t k = lo; k <= hi; ++k) {
            sum += curve.scores[k];
            mn = std::min(mn, curve.scores[k]);
            mx = std::max(mx, curve.scores[k]);
        }
        out.scores[i] = std::clamp(sum / static_cast<double>(hi - lo + 1), mn, mx);
    }
    return out;
}

double se80_threshold(const std::vector<LearningCurve>& baseline_curves, double fraction) {
    if (baseline_curves.empty()) throw InputError("se80_threshold: no baseline curves");
    const CurveBand band = aggregate(baseline_curves);
    const double r0 = band.mean.front();
    const double r_max = *std::max_element(band.mean.begin(), band.mean.end());
    return r0 + fraction * (r_max - r0);
}

Se80Result se80(const LearningCurve& curve, double threshold, std::int64_t total_steps, const Se80Options& opts) {
    curve.validate();
    if (total_steps < curve.steps.back()) throw InputError("se80: total_steps is smaller than the last curve step");
    const LearningCurve assessed = opts.raw ? curve : smooth(curve, opts.smooth_window);
    Se80Result r;
    r.threshold = threshold;
    for (std::size_t i = 0; i < assessed.size(); ++i) {
        if (assessed.scores[i] >= threshold) {
            r.crossing_step = assessed.steps[i];
            break;
        }
    }
    if (!r.crossing_step) return r;
    if (opts.denominator == Se80Denominator::budget) {
        if (total_steps <= 0) {
            r.fraction = 0.0;  // the only possible crossing is at step 0
        } else {
            r.fraction = static_cast<double>(*r.crossing_step) / static_cast<double>(total_steps);
        }
    } else {
        if (opts.baseline_crossing_step <= 0) throw InputError("se80: baseline crossing step must be > 0");
        r.fraction = static_cast<double>(*r.crossing_step) / static_cast<double>(opts.baseline_crossing_step);
    }
    return r;
}

double normalize_best(double best, double baseline_best, double r0) {
    const double denom = baseline_best - r0;
    if (denom == 0.0)
        throw DegenerateBaselineError("normalize_best: baseline best equals the untrained score (" + std::to_string(r0) + ")");
    return (best - r0) / denom;
}

std::vector<double> normalize_best(const std::vector<double>& bests, double baseline_best, double r0) {
    std::vector<double> out;
    out.reserve(bests.size());
    for (double b : bests) out.push_back(normalize_best(b, baseline_best, r0));
    return out;
}

}  // namespace auxrl::metrics
