#pragma once

// Mackey-Glass generation, normalization and one-step-ahead windowing.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace rgreedy::timeseries {

/// dx/dt = a x(t-tau) / (1 + x(t-tau)^exponent) - b x(t), integrated with RK4.
struct MackeyGlassParams {
    double a = 0.2;
    double b = 0.1;
    double tau = 17.0;
    double exponent = 10.0;
    double dt = 0.1;
    // integrator steps per emitted sample
    std::size_t subsample = 10;
    double x0 = 1.2;
    // relative amplitude of the seeded jitter on the initial history; 0 disables it
    double history_jitter = 1e-6;

    /// Throws ConfigError on invalid parameters.
    void validate() const;
    /// tau / dt as an integer.
    std::size_t delay_steps() const;

    bool operator==(const MackeyGlassParams&) const = default;
};

enum class Origin { raw, normalized };

struct TimeSeries {
    std::vector<double> values;
    Origin origin = Origin::raw;
    // statistics of the raw values recorded by normalize()
    double mean = 0.0;
    double std = 1.0;

    std::size_t size() const noexcept { return values.size(); }
};

/// Fixed-step RK4 integrator for the delay equation. The delay term at the RK4
/// midpoint is linearly interpolated between adjacent history slots.
class MackeyGlassIntegrator {
public:
    MackeyGlassIntegrator(const MackeyGlassParams& params, std::uint64_t seed);

    double value() const noexcept;
    void advance();
    void advance(std::size_t steps);

    /// Delay buffer in chronological order: x(t - tau), ..., x(t).
    std::vector<double> history() const;
    void set_history(std::span<const double> h);

private:
    double rhs(double x, double x_delayed) const noexcept;
    double slot(std::size_t age) const noexcept;

    MackeyGlassParams params_;
    std::vector<double> ring_;
    // index of the newest sample in ring_
    std::size_t head_ = 0;
};

/// n_points samples taken every `subsample` steps after a 10 tau transient.
TimeSeries generate_mackey_glass(const MackeyGlassParams& params, std::size_t n_points, std::uint64_t seed);

/// Zero mean, unit population std. Throws DegenerateError on zero variance.
TimeSeries normalize(const TimeSeries& series);

/// Input u(n+1) and target u(n+2) windows for training and the following test span.
struct PredictionPairs {
    std::vector<double> train_input;
    std::vector<double> train_target;
    std::vector<double> test_input;
    std::vector<double> test_target;
};

PredictionPairs make_prediction_pairs(const TimeSeries& series, std::size_t train_len, std::size_t test_len);

/// Single column `value` with header.
void write_csv(std::ostream& out, const TimeSeries& series);

} // namespace rgreedy::timeseries
