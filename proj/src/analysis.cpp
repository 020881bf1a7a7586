#include "rgreedy/analysis.hpp"

#include "rgreedy/common.hpp"
#include "rgreedy/errors.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace rgreedy::analysis {

namespace {

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

} // namespace

MeanCurve average_curves(std::span<const LearningCurve> curves)
{
    if (curves.size() < 2) throw ConfigError("average_curves: need at least 2 curves");
    const std::size_t len = curves.front().eps_accepted.size();
    for (const auto& c : curves)
        if (c.eps_accepted.size() != len) throw ConfigError("average_curves: curves differ in length");

    MeanCurve out;
    out.mean.resize(len);
    out.std.resize(len);
    std::vector<double> column(curves.size());
    for (std::size_t k = 0; k < len; ++k) {
        for (std::size_t r = 0; r < curves.size(); ++r) column[r] = curves[r].eps_accepted[k];
        out.mean[k] = stats::mean(column);
        out.std[k] = stats::population_std(column, out.mean[k]);
    }
    return out;
}

double GradientSplit::pos_mean(std::size_t j) const
{
    return pos_count[j] ? pos_sum[j] / static_cast<double>(pos_count[j]) : nan;
}

double GradientSplit::neg_mean(std::size_t j) const
{
    return neg_count[j] ? neg_sum[j] / static_cast<double>(neg_count[j]) : nan;
}

void GradientSplit::accumulate(const GradientSplit& other)
{
    if (other.size() != size() || other.first_epoch != first_epoch)
        throw ConfigError("gradient_split: ensemble curves differ in length");
    for (std::size_t j = 0; j < size(); ++j) {
        pos_sum[j] += other.pos_sum[j];
        pos_count[j] += other.pos_count[j];
        neg_sum[j] += other.neg_sum[j];
        neg_count[j] += other.neg_count[j];
        skipped[j] += other.skipped[j];
    }
}

GradientSplit gradient_split(const LearningCurve& curve)
{
    const std::size_t len = curve.eps_accepted.size();
    if (len < 2 || curve.eps_tested.size() != len) throw ConfigError("gradient_split: curve length must be >= 2");

    GradientSplit s;
    const std::size_t m = len - 1;
    s.pos_sum.assign(m, 0.0);
    s.pos_count.assign(m, 0);
    s.neg_sum.assign(m, 0.0);
    s.neg_count.assign(m, 0);
    s.skipped.assign(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
        // epoch k = j + 2 compares against the best error accepted up to epoch k - 1
        const double delta = curve.eps_accepted[j] - curve.eps_tested[j + 1];
        if (!std::isfinite(delta)) {
            s.skipped[j] = 1;
        } else if (delta > 0.0) {
            s.pos_sum[j] = delta;
            s.pos_count[j] = 1;
        } else {
            s.neg_sum[j] = delta;
            s.neg_count[j] = 1;
        }
    }
    return s;
}

GradientSplit gradient_split(std::span<const LearningCurve> curves)
{
    if (curves.empty()) throw ConfigError("gradient_split: empty ensemble");
    GradientSplit total = gradient_split(curves.front());
    for (std::size_t r = 1; r < curves.size(); ++r) total.accumulate(gradient_split(curves[r]));
    return total;
}

std::size_t find_optimal_epoch(std::span<const double> values)
{
    if (values.empty()) throw ConfigError("find_optimal_epoch: empty curve");
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i)
        if (values[i] < values[best]) best = i;
    return best + 1;
}

double ExponentialFit::operator()(double k) const { return a * std::exp(-k / b) + c; }

namespace {

struct LinearPart {
    double a_shifted = 0.0; // amplitude at k = k_min
    double c = 0.0;
    double sse = 0.0;
};

// Closed-form amplitude and non-negative floor for a fixed decay length b.
LinearPart solve_linear(std::span<const double> k, std::span<const double> v, double k_min, double b)
{
    const auto n = static_cast<double>(v.size());
    double sp = 0.0, spp = 0.0, sv = 0.0, spv = 0.0;
    std::vector<double> phi(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        phi[i] = std::exp(-(k[i] - k_min) / b);
        sp += phi[i];
        spp += phi[i] * phi[i];
        sv += v[i];
        spv += phi[i] * v[i];
    }
    LinearPart out;
    const double det = n * spp - sp * sp;
    if (det > 1e-14 * n * spp) {
        out.a_shifted = (n * spv - sp * sv) / det;
        out.c = (spp * sv - sp * spv) / det;
    } else {
        // phi indistinguishable from a constant: the floor absorbs everything
        out.a_shifted = 0.0;
        out.c = sv / n;
    }
    if (out.c < 0.0) {
        out.c = 0.0;
        out.a_shifted = spp > 0.0 ? spv / spp : 0.0;
    }
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double r = v[i] - out.a_shifted * phi[i] - out.c;
        out.sse += r * r;
    }
    return out;
}

} // namespace

ExponentialFit fit_exponential(std::span<const double> values)
{
    std::vector<double> k(values.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i + 1);
    return fit_exponential(k, values);
}

ExponentialFit fit_exponential(std::span<const double> k, std::span<const double> values)
{
    if (values.size() < 4) throw ConfigError("fit_exponential: need at least 4 points");
    if (k.size() != values.size()) throw ConfigError("fit_exponential: k and values differ in length");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i]))
            throw ConfigError("fit_exponential: values must be finite and positive (index " + std::to_string(i) + ")");
        if (!std::isfinite(k[i])) throw ConfigError("fit_exponential: non-finite abscissa");
    }

    const double k_min = *std::min_element(k.begin(), k.end());
    const double k_max = *std::max_element(k.begin(), k.end());
    const double span = std::max(k_max - k_min, 1.0);
    const double log_lo = std::log(span * 1e-3);
    const double log_hi = std::log(span * 1e3);
    constexpr int grid = 240;

    auto sse_at = [&](double log_b) { return solve_linear(k, values, k_min, std::exp(log_b)).sse; };

    int best = 0;
    double best_sse = std::numeric_limits<double>::infinity();
    for (int g = 0; g <= grid; ++g) {
        const double lb = log_lo + (log_hi - log_lo) * g / grid;
        const double s = sse_at(lb);
        if (s < best_sse) {
            best_sse = s;
            best = g;
        }
    }
    if (!std::isfinite(best_sse)) throw FitError("fit_exponential: residual is not finite on the search grid");

    const double step = (log_hi - log_lo) / grid;
    const double lo = log_lo + step * std::max(best - 1, 0);
    const double hi = log_lo + step * std::min(best + 1, grid);
    std::uintmax_t max_iter = 200;
    const auto [log_b, sse] = boost::math::tools::brent_find_minima(
        sse_at, lo, hi, std::numeric_limits<double>::digits / 2, max_iter);
    if (max_iter >= 200 || !std::isfinite(sse))
        throw FitError("fit_exponential: refinement did not converge (bracket [" + std::to_string(std::exp(lo)) +
                       ", " + std::to_string(std::exp(hi)) + "], grid sse " + std::to_string(best_sse) + ")");

    const double b = std::exp(log_b);
    const auto lin = solve_linear(k, values, k_min, b);
    ExponentialFit fit;
    fit.b = b;
    fit.a = lin.a_shifted == 0.0 ? 0.0 : lin.a_shifted * std::exp(k_min / b);
    fit.c = lin.c;
    fit.residual_norm = std::sqrt(lin.sse);
    fit.rate_at_bound = best == 0 || best == grid;
    return fit;
}

LogLogFit fit_loglog_slope(std::span<const std::pair<double, double>> points)
{
    if (points.size() < 3) throw ConfigError("fit_loglog_slope: need at least 3 points");
    double sx = 0.0, sy = 0.0;
    std::vector<double> lx, ly;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) throw ConfigError("fit_loglog_slope: coordinates must be positive");
        lx.push_back(std::log(x));
        ly.push_back(std::log(y));
        sx += lx.back();
        sy += ly.back();
    }
    const auto n = static_cast<double>(points.size());
    const double mx = sx / n;
    const double my = sy / n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
    }
    if (!(sxx > 0.0)) throw ConfigError("fit_loglog_slope: all x values are equal");
    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    return fit;
}

KinkDiagnostic kink_diagnostic(const LearningCurve& curve, std::size_t k_opt, std::size_t window)
{
    return kink_diagnostic(gradient_split(curve), k_opt, window);
}

KinkDiagnostic kink_diagnostic(const GradientSplit& split, std::size_t k_opt, std::size_t window)
{
    KinkDiagnostic d;
    d.k_opt = k_opt;
    d.window = window;
    double sum_before = 0.0, sum_after = 0.0;
    for (std::size_t j = 0; j < split.size(); ++j) {
        const std::size_t k = split.epoch(j);
        if (split.pos_count[j] == 0) continue;
        const double m = split.pos_mean(j);
        if (k + window > k_opt && k <= k_opt) {
            sum_before += m;
            ++d.count_before;
        } else if (k > k_opt && k <= k_opt + window) {
            sum_after += m;
            ++d.count_after;
        }
    }
    d.mean_before = d.count_before ? sum_before / static_cast<double>(d.count_before) : 0.0;
    d.mean_after = d.count_after ? sum_after / static_cast<double>(d.count_after) : 0.0;
    return d;
}

ScalingPoint scaling_point(std::size_t n, std::span<const double> k_opts, std::span<const double> eps_opts)
{
    if (k_opts.empty() || k_opts.size() != eps_opts.size())
        throw ConfigError("scaling_point: need matching non-empty k_opt and eps_opt lists");
    ScalingPoint p;
    p.n = n;
    p.mean_k_opt = stats::mean(k_opts);
    p.std_k_opt = stats::population_std(k_opts, p.mean_k_opt);
    p.mean_eps_opt = stats::mean(eps_opts);
    return p;
}

ScalingResult summarize_scaling(std::vector<ScalingPoint> points)
{
    if (points.empty()) throw ConfigError("summarize_scaling: no points");
    std::sort(points.begin(), points.end(), [](const auto& l, const auto& r) { return l.n < r.n; });
    ScalingResult res;
    res.points = std::move(points);
    if (res.points.size() >= 3) {
        std::vector<std::pair<double, double>> xy;
        for (const auto& p : res.points) xy.emplace_back(static_cast<double>(p.n), p.mean_k_opt);
        res.fit = fit_loglog_slope(xy);
    }
    res.performance_ratio = res.points.front().mean_eps_opt / res.points.back().mean_eps_opt;
    return res;
}

} // namespace rgreedy::analysis
