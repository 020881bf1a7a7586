#include "rgreedy/timeseries.hpp"

#include "rgreedy/common.hpp"
#include "rgreedy/csv.hpp"
#include "rgreedy/errors.hpp"

#include <cmath>
#include <ostream>
#include <string>

namespace rgreedy::timeseries {

void MackeyGlassParams::validate() const
{
    if (!(dt > 0.0)) throw ConfigError("mackey_glass: dt must be > 0");
    if (!(tau > 0.0)) throw ConfigError("mackey_glass: tau must be > 0");
    if (subsample < 1) throw ConfigError("mackey_glass: subsample must be >= 1");
    if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(exponent) || !std::isfinite(x0))
        throw ConfigError("mackey_glass: non-finite parameter");
    if (history_jitter < 0.0) throw ConfigError("mackey_glass: history_jitter must be >= 0");
    const double ratio = tau / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
        throw ConfigError("mackey_glass: tau/dt must be an integer (tau=" + std::to_string(tau) +
                          ", dt=" + std::to_string(dt) + ")");
}

std::size_t MackeyGlassParams::delay_steps() const
{
    return static_cast<std::size_t>(std::llround(tau / dt));
}

MackeyGlassIntegrator::MackeyGlassIntegrator(const MackeyGlassParams& params, std::uint64_t seed) : params_(params)
{
    params_.validate();
    ring_.assign(params_.delay_steps() + 1, params_.x0);
    if (params_.history_jitter > 0.0) {
        Rng rng(seed);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& v : ring_) v *= 1.0 + params_.history_jitter * u(rng);
    }
    head_ = ring_.size() - 1;
}

double MackeyGlassIntegrator::value() const noexcept { return ring_[head_]; }

// age 0 is the newest sample, age delay_steps the oldest
double MackeyGlassIntegrator::slot(std::size_t age) const noexcept
{
    const std::size_t m = ring_.size();
    return ring_[(head_ + m - age) % m];
}

double MackeyGlassIntegrator::rhs(double x, double xd) const noexcept
{
    return params_.a * xd / (1.0 + std::pow(xd, params_.exponent)) - params_.b * x;
}

void MackeyGlassIntegrator::advance()
{
    const std::size_t d = ring_.size() - 1;
    const double h = params_.dt;
    const double x = value();
    const double xd0 = slot(d);
    const double xd1 = slot(d - 1);
    const double xdm = 0.5 * (xd0 + xd1);

    const double k1 = rhs(x, xd0);
    const double k2 = rhs(x + 0.5 * h * k1, xdm);
    const double k3 = rhs(x + 0.5 * h * k2, xdm);
    const double k4 = rhs(x + h * k3, xd1);
    const double next = x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    // the oldest slot is no longer needed and becomes the newest
    head_ = (head_ + 1) % ring_.size();
    ring_[head_] = next;
}

void MackeyGlassIntegrator::advance(std::size_t steps)
{
    for (std::size_t i = 0; i < steps; ++i) advance();
}

std::vector<double> MackeyGlassIntegrator::history() const
{
    std::vector<double> h(ring_.size());
    for (std::size_t age = 0; age < ring_.size(); ++age) h[ring_.size() - 1 - age] = slot(age);
    return h;
}

void MackeyGlassIntegrator::set_history(std::span<const double> h)
{
    if (h.size() != ring_.size()) throw ConfigError("set_history: length mismatch");
    for (std::size_t i = 0; i < h.size(); ++i) ring_[i] = h[i];
    head_ = ring_.size() - 1;
}

TimeSeries generate_mackey_glass(const MackeyGlassParams& params, std::size_t n_points, std::uint64_t seed)
{
    if (n_points < 1) throw ConfigError("generate_mackey_glass: n_points must be >= 1");
    MackeyGlassIntegrator mg(params, seed);
    mg.advance(10 * params.delay_steps());

    TimeSeries out;
    out.values.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        out.values.push_back(mg.value());
        mg.advance(params.subsample);
    }
    out.origin = Origin::raw;
    out.mean = stats::mean(out.values);
    out.std = stats::population_std(out.values, out.mean);
    return out;
}

TimeSeries normalize(const TimeSeries& series)
{
    const double m = stats::mean(series.values);
    const double s = stats::population_std(series.values, m);
    if (!(s > 0.0) || !std::isfinite(s)) throw DegenerateError("normalize: series has zero variance");

    TimeSeries out;
    out.values.reserve(series.size());
    for (double v : series.values) out.values.push_back((v - m) / s);
    out.origin = Origin::normalized;
    out.mean = m;
    out.std = s;
    return out;
}

PredictionPairs make_prediction_pairs(const TimeSeries& series, std::size_t train_len, std::size_t test_len)
{
    if (series.size() < train_len + test_len + 2)
        throw ConfigError("make_prediction_pairs: need " + std::to_string(train_len + test_len + 2) +
                          " samples, have " + std::to_string(series.size()));
    const auto& v = series.values;
    PredictionPairs p;
    p.train_input.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(train_len));
    p.train_target.assign(v.begin() + 1, v.begin() + static_cast<std::ptrdiff_t>(train_len + 1));
    const auto t0 = static_cast<std::ptrdiff_t>(train_len);
    const auto t1 = static_cast<std::ptrdiff_t>(train_len + test_len);
    p.test_input.assign(v.begin() + t0, v.begin() + t1);
    p.test_target.assign(v.begin() + t0 + 1, v.begin() + t1 + 1);
    return p;
}

void write_csv(std::ostream& out, const TimeSeries& series)
{
    out << "value\n";
    for (double v : series.values) out << csv::format_number(v) << '\n';
}

} // namespace rgreedy::timeseries
