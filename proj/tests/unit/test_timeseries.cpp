#include "rgreedy/errors.hpp"
#include "rgreedy/timeseries.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace rgreedy;
using namespace rgreedy::timeseries;

namespace {

// Positive root of a x / (1 + x^p) = b x by bisection on g(x) = a / (1 + x^p) - b.
double fixed_point(double a, double b, double p)
{
    double lo = 1e-9, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (a / (1.0 + std::pow(mid, p)) - b > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double history_distance(const std::vector<double>& a, const std::vector<double>& b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s);
}

} // namespace

TEST_SUITE("timeseries") {

TEST_CASE("zero history stays at the zero fixed point")
{
    MackeyGlassParams p;
    p.x0 = 0.0;
    const auto s = generate_mackey_glass(p, 300, 5);
    REQUIRE(s.size() == 300);
    for (double v : s.values) CHECK(v == 0.0);
}

TEST_CASE("non-trivial fixed point is preserved without jitter")
{
    MackeyGlassParams p;
    p.history_jitter = 0.0;
    p.x0 = fixed_point(p.a, p.b, p.exponent);
    CHECK(p.x0 == doctest::Approx(1.0).epsilon(1e-12));
    const auto s = generate_mackey_glass(p, 100, 1);
    for (double v : s.values) CHECK(std::abs(v - p.x0) < 1e-6);
}

TEST_CASE("canonical parameters are chaotic: two-trajectory divergence rate is positive")
{
    MackeyGlassParams p;
    MackeyGlassIntegrator ref(p, 3);
    ref.advance(10 * p.delay_steps());
    MackeyGlassIntegrator pert(p, 3);
    pert.advance(10 * p.delay_steps());

    const double d0 = 1e-8;
    auto h = ref.history();
    for (auto& v : h) v += d0 / std::sqrt(static_cast<double>(h.size()));
    pert.set_history(h);

    const std::size_t points = 100000;
    const std::size_t renorm_every = 10; // samples
    double log_sum = 0.0;
    for (std::size_t i = 1; i <= points; ++i) {
        ref.advance(p.subsample);
        pert.advance(p.subsample);
        if (i % renorm_every == 0) {
            const auto hr = ref.history();
            auto hp = pert.history();
            const double d = history_distance(hr, hp);
            REQUIRE(d > 0.0);
            log_sum += std::log(d / d0);
            for (std::size_t j = 0; j < hp.size(); ++j) hp[j] = hr[j] + (hp[j] - hr[j]) * d0 / d;
            pert.set_history(hp);
        }
    }
    const double t_total = static_cast<double>(points * p.subsample) * p.dt;
    const double lambda = log_sum / t_total;
    MESSAGE("largest Lyapunov exponent estimate: " << lambda);
    CHECK(lambda > 0.0);
}

TEST_CASE("generation is deterministic per seed and the seed matters")
{
    MackeyGlassParams p;
    const auto a = generate_mackey_glass(p, 500, 42);
    const auto b = generate_mackey_glass(p, 500, 42);
    const auto c = generate_mackey_glass(p, 500, 43);
    CHECK(a.values == b.values);
    CHECK(a.values != c.values);
}

TEST_CASE("invalid parameters are configuration errors")
{
    MackeyGlassParams p;
    CHECK_THROWS_AS(generate_mackey_glass(p, 0, 1), ConfigError);
    p.tau = 17.05;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.dt = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p = {};
    p.subsample = 0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("normalize uses the population convention")
{
    TimeSeries s{{1.0, 3.0}};
    const auto z = normalize(s);
    CHECK(z.values == std::vector<double>{-1.0, 1.0});
    CHECK(z.mean == 2.0);
    CHECK(z.std == 1.0);
    CHECK(z.origin == Origin::normalized);

    const auto zz = normalize(z);
    for (std::size_t i = 0; i < z.size(); ++i) CHECK(std::abs(zz.values[i] - z.values[i]) < 1e-12);

    CHECK_THROWS_AS(normalize(TimeSeries{{2.0, 2.0, 2.0}}), DegenerateError);
}

TEST_CASE("normalized Mackey-Glass segment has zero mean and unit std")
{
    const auto s = generate_mackey_glass({}, 200, 9);
    const auto z = normalize(s);
    double m = 0.0;
    for (double v : z.values) m += v;
    m /= static_cast<double>(z.size());
    double var = 0.0;
    for (double v : z.values) var += (v - m) * (v - m);
    var /= static_cast<double>(z.size());
    CHECK(std::abs(m) < 1e-12);
    CHECK(std::abs(std::sqrt(var) - 1.0) < 1e-12);
}

TEST_CASE("prediction pairs are shifted by one step")
{
    TimeSeries s{{1, 2, 3, 4, 5}};
    const auto p = make_prediction_pairs(s, 2, 1);
    CHECK(p.train_input == std::vector<double>{1, 2});
    CHECK(p.train_target == std::vector<double>{2, 3});
    CHECK(p.test_input == std::vector<double>{3});
    CHECK(p.test_target == std::vector<double>{4});
    CHECK_THROWS_AS(make_prediction_pairs(s, 3, 1), ConfigError);

    const auto mg = generate_mackey_glass({}, 9400, 7);
    const auto q = make_prediction_pairs(mg, 200, 9000);
    REQUIRE(q.train_input.size() == 200);
    REQUIRE(q.test_target.size() == 9000);
    for (std::size_t i = 0; i + 1 < q.train_input.size(); ++i) CHECK(q.train_target[i] == q.train_input[i + 1]);
}

TEST_CASE("csv output has a value column")
{
    std::ostringstream os;
    write_csv(os, TimeSeries{{0.5, 1.25}});
    CHECK(os.str() == "value\n0.5\n1.25\n");
}

}
