#pragma once

// Ensemble statistics over learning curves, error-landscape gradients and fits.

#include "rgreedy/curve.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace rgreedy::analysis {

struct MeanCurve {
    std::vector<double> mean;
    std::vector<double> std;
};

/// Pointwise mean and population std of eps_accepted over >= 2 equal-length curves.
MeanCurve average_curves(std::span<const LearningCurve> curves);

/// Per-epoch split of delta = eps_accepted(k-1) - eps_tested(k) into positive
/// and non-positive sets. Index j corresponds to epoch first_epoch + j.
struct GradientSplit {
    std::size_t first_epoch = 2;
    std::vector<double> pos_sum;
    std::vector<std::size_t> pos_count;
    std::vector<double> neg_sum;
    std::vector<std::size_t> neg_count;
    // epochs whose delta was non-finite (an all-dark mask scored +inf)
    std::vector<std::size_t> skipped;

    std::size_t size() const noexcept { return pos_sum.size(); }
    std::size_t epoch(std::size_t j) const noexcept { return first_epoch + j; }
    /// NaN where the set is empty.
    double pos_mean(std::size_t j) const;
    double neg_mean(std::size_t j) const;

    /// Adds another split of the same length (ensemble reduction).
    void accumulate(const GradientSplit& other);
};

GradientSplit gradient_split(const LearningCurve& curve);
GradientSplit gradient_split(std::span<const LearningCurve> curves);

/// 1-based index of the first attainment of min(values).
std::size_t find_optimal_epoch(std::span<const double> values);

/// a exp(-k / b) + c with c >= 0.
struct ExponentialFit {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;
    double residual_norm = 0.0;
    // b sits on the edge of the search bracket; the decay is not resolved
    bool rate_at_bound = false;

    double operator()(double k) const;
};

/// Least squares over k = 1..values.size(). Requires >= 4 positive values.
ExponentialFit fit_exponential(std::span<const double> values);
ExponentialFit fit_exponential(std::span<const double> k, std::span<const double> values);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
};

/// OLS of log(y) on log(x). Requires >= 3 points, all coordinates > 0.
LogLogFit fit_loglog_slope(std::span<const std::pair<double, double>> points);

/// Mean positive gradient just before and just after an epoch of interest.
struct KinkDiagnostic {
    std::size_t k_opt = 0;
    std::size_t window = 0;
    double mean_before = 0.0; // over epochs (k_opt - window, k_opt]
    double mean_after = 0.0;  // over epochs (k_opt, k_opt + window]
    std::size_t count_before = 0;
    std::size_t count_after = 0;

    bool rising() const noexcept { return mean_after > mean_before; }
};

/// Per-curve diagnostic; an empty window contributes a mean of 0.
KinkDiagnostic kink_diagnostic(const LearningCurve& curve, std::size_t k_opt, std::size_t window);
/// Ensemble diagnostic over per-epoch positive means of a merged split.
KinkDiagnostic kink_diagnostic(const GradientSplit& split, std::size_t k_opt, std::size_t window);

struct ScalingPoint {
    std::size_t n = 0;
    double mean_k_opt = 0.0;
    double std_k_opt = 0.0;
    double mean_eps_opt = 0.0;
};

struct ScalingResult {
    std::vector<ScalingPoint> points;
    // absent with fewer than 3 sizes
    std::optional<LogLogFit> fit;
    // mean eps_opt of the smallest n over that of the largest n
    double performance_ratio = 0.0;
};

/// Builds a scaling point from the per-run optimal epochs and errors at one size.
ScalingPoint scaling_point(std::size_t n, std::span<const double> k_opts, std::span<const double> eps_opts);
ScalingResult summarize_scaling(std::vector<ScalingPoint> points);

} // namespace rgreedy::analysis
