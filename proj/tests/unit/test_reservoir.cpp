#include "rgreedy/errors.hpp"
#include "rgreedy/reservoir.hpp"
#include "rgreedy/timeseries.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace rgreedy;
using namespace rgreedy::reservoir;

namespace {

// Scalar evaluation of the update rule with dense weights, no noise.
std::vector<double> oracle_step(const std::vector<double>& x, double u, const Config& cfg,
                                const std::vector<std::vector<double>>& w, const std::vector<double>& winj)
{
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        double field = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) field += w[i][j] * std::sqrt(x[j]);
        const double c = std::cos(cfg.beta * cfg.alpha * field * field + cfg.gamma * winj[i] * u + cfg.theta[i]);
        out[i] = std::max(0.0, cfg.alpha * cfg.e0_sq[i] * c * c);
    }
    return out;
}

std::vector<std::vector<double>> dense(const CouplingMatrix& m)
{
    std::vector<std::vector<double>> w(m.n, std::vector<double>(m.n));
    for (std::size_t i = 0; i < m.n; ++i)
        for (std::size_t j = 0; j < m.n; ++j) w[i][j] = m.at(i, j);
    return w;
}

Config quiet(std::size_t n)
{
    auto cfg = default_config(n);
    cfg.noise_state_sigma = 0.0;
    return cfg;
}

std::vector<double> drive(std::size_t len)
{
    return timeseries::normalize(timeseries::generate_mackey_glass({}, len, 7)).values;
}

} // namespace

TEST_SUITE("reservoir") {

TEST_CASE("radius zero gives the identity")
{
    const auto w = build_doe_coupling(16, 0, 3);
    for (std::size_t i = 0; i < 16; ++i)
        for (std::size_t j = 0; j < 16; ++j) CHECK(w.at(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("3x3 grid with radius 1: neighbourhood sizes and row sums")
{
    const auto w = build_doe_coupling(9, 1, 17);
    const int g = 3;
    for (int r = 0; r < g; ++r)
        for (int c = 0; c < g; ++c) {
            int expected = 0;
            for (int dr = -1; dr <= 1; ++dr)
                for (int dc = -1; dc <= 1; ++dc)
                    if (r + dr >= 0 && r + dr < g && c + dc >= 0 && c + dc < g) ++expected;
            const auto i = static_cast<std::size_t>(r * g + c);
            CHECK(w.row_nonzeros(i) == static_cast<std::size_t>(expected));
            CHECK(std::abs(w.row_sum(i) - 1.0) < 1e-12);
        }
    CHECK(w.row_nonzeros(4) == 9);
    CHECK(w.row_nonzeros(0) == 4);
}

TEST_CASE("coupling weights are positive, local and reproducible")
{
    const std::size_t n = 64;
    const int radius = 2;
    const auto w = build_doe_coupling(n, radius, 5);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t p = w.row_ptr[i]; p < w.row_ptr[i + 1]; ++p) {
            const auto j = w.cols[p];
            const auto dr = std::abs(static_cast<int>(i / 8) - static_cast<int>(j / 8));
            const auto dc = std::abs(static_cast<int>(i % 8) - static_cast<int>(j % 8));
            CHECK(std::max(dr, dc) <= radius);
            CHECK(w.weights[p] > 0.0);
        }
    CHECK(w == build_doe_coupling(n, radius, 5));
    CHECK_FALSE(w == build_doe_coupling(n, radius, 6));
    CHECK_THROWS_AS(build_doe_coupling(10, 1, 1), ConfigError);
}

TEST_CASE("injection weights: range, mean and determinism")
{
    const auto one = build_injection_weights(1, 1);
    REQUIRE(one.values.size() == 1);
    CHECK(one.values[0] >= 0.0);
    CHECK(one.values[0] <= 1.0);

    const auto big = build_injection_weights(10000, 99);
    double m = 0.0;
    for (double v : big.values) m += v;
    m /= 10000.0;
    CHECK(m >= 0.48);
    CHECK(m <= 0.52);
    CHECK(*std::min_element(big.values.begin(), big.values.end()) >= 0.0);
    CHECK(*std::max_element(big.values.begin(), big.values.end()) <= 1.0);
    CHECK(big == build_injection_weights(10000, 99));
}

TEST_CASE("zero-argument and quarter-period cases")
{
    Config cfg = quiet(4);
    cfg.beta = 0.0;
    cfg.gamma = 0.0;
    cfg.alpha = 1.0;
    cfg.theta.assign(4, 0.0);
    const auto w = build_doe_coupling(4, 1, 1);
    InjectionWeights winj{{0.5, 0.5, 0.5, 0.5}};
    Rng rng(1);
    State s{{0.3, 0.1, 0.7, 0.2}, 0};
    auto next = step(s, 1.234, cfg, w, winj, rng);
    for (double v : next.x) CHECK(v == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(next.step == 1);

    cfg.gamma = 1.0;
    next = step(s, std::numbers::pi, cfg, w, winj, rng);
    for (double v : next.x) CHECK(std::abs(v) < 1e-15);
}

TEST_CASE("step matches the scalar oracle at n = 4")
{
    Config cfg = quiet(4);
    const auto w = build_doe_coupling(4, 1, 21);
    const auto winj = build_injection_weights(4, 22);
    const std::vector<double> x{0.1, 0.45, 0.8, 0.02};
    Rng rng(0);
    const auto got = step(State{x, 0}, 0.37, cfg, w, winj, rng);
    const auto want = oracle_step(x, 0.37, cfg, dense(w), winj.values);
    for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(got.x[i] - want[i]) < 1e-12);
}

TEST_CASE("step matches the scalar oracle on random instances")
{
    std::mt19937_64 gen(2024);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const std::size_t sizes[] = {1, 4, 9, 16};
    for (int inst = 0; inst < 100; ++inst) {
        const std::size_t n = sizes[inst % 4];
        Config cfg = quiet(n);
        cfg.beta = 2.0 * u01(gen);
        cfg.gamma = u01(gen);
        cfg.alpha = 0.5 + u01(gen);
        for (auto& e : cfg.e0_sq) e = 0.2 + u01(gen);
        for (auto& t : cfg.theta) t = std::numbers::pi * u01(gen);
        const auto w = build_doe_coupling(n, inst % 3, gen());
        const auto winj = build_injection_weights(n, gen());
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) x[i] = cfg.alpha * cfg.e0_sq[i] * u01(gen);
        const double in = 4.0 * u01(gen) - 2.0;

        Rng rng(0);
        const auto got = step(State{x, 0}, in, cfg, w, winj, rng);
        const auto want = oracle_step(x, in, cfg, dense(w), winj.values);
        for (std::size_t i = 0; i < n; ++i) REQUIRE(std::abs(got.x[i] - want[i]) < 1e-12);
    }
}

TEST_CASE("states stay within [0, alpha e0] without noise")
{
    const auto res = Reservoir::build(quiet(64), 1);
    Rng rng(1);
    const auto u = drive(600);
    const auto r = res.run(u, 0, rng);
    for (double v : r.states.data()) {
        CHECK(v >= 0.0);
        CHECK(v <= res.config().alpha + 1e-15);
    }
}

TEST_CASE("noise respects the clamp and is reproducible")
{
    auto cfg = default_config(25);
    cfg.noise_state_sigma = 0.2;
    const auto res = Reservoir::build(cfg, 1);
    const auto u = drive(300);
    Rng a(5), b(5), c(6);
    const auto ra = res.run(u, 10, a);
    const auto rb = res.run(u, 10, b);
    const auto rc = res.run(u, 10, c);
    CHECK(ra.states == rb.states);
    CHECK_FALSE(ra.states == rc.states);
    for (double v : ra.states.data()) CHECK(v >= 0.0);
}

TEST_CASE("run retains rows after warmup with their inputs")
{
    const auto res = Reservoir::build(quiet(9), 1);
    const std::vector<double> u{0.1, -0.3, 0.7, 0.2};
    Rng rng(1);
    const auto r = res.run(u, 3, rng);
    CHECK(r.states.rows() == 1);
    CHECK(r.inputs == std::vector<double>{0.2});

    Rng rng2(1);
    const auto full = res.run(u, 0, rng2);
    REQUIRE(full.states.rows() == 4);
    for (std::size_t i = 0; i < 9; ++i) CHECK(full.states(3, i) == r.states(0, i));
}

TEST_CASE("constant drive settles onto a short orbit")
{
    const auto res = Reservoir::build(quiet(64), 1);
    const std::vector<double> u(500, 0.5);
    Rng rng(1);
    const auto r = res.run(u, 0, rng);
    const std::size_t last = r.states.rows() - 1;
    bool found = false;
    for (std::size_t p = 1; p <= 8 && !found; ++p) {
        double diff = 0.0;
        for (std::size_t i = 0; i < 64; ++i) diff = std::max(diff, std::abs(r.states(last, i) - r.states(last - p, i)));
        found = diff < 1e-6;
    }
    CHECK(found);
}

TEST_CASE("fading memory: different initial states converge under the same drive")
{
    const auto res = Reservoir::build(quiet(64), 1);
    const auto u = drive(500);
    State a = res.initial_state();
    State b{std::vector<double>(64), 0};
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u01(0.0, res.config().alpha);
    for (auto& v : b.x) v = u01(gen);
    Rng ra(0), rb(0);
    const auto xa = res.run_from(a, u, 0, ra);
    const auto xb = res.run_from(b, u, 0, rb);
    double diff = 0.0;
    const auto last = xa.states.rows() - 1;
    for (std::size_t i = 0; i < 64; ++i) diff = std::max(diff, std::abs(xa.states(last, i) - xb.states(last, i)));
    CHECK(diff < 1e-3);
}

TEST_CASE("configuration checks")
{
    auto cfg = default_config(9);
    cfg.theta.pop_back();
    CHECK_THROWS_AS(cfg.validate(), ConfigError);
    CHECK_THROWS_AS(default_config(8).validate(), ConfigError);
    CHECK(grid_side(961) == 31);

    const auto res = Reservoir::build(quiet(9), 1);
    Rng rng(1);
    CHECK_THROWS_AS(res.step(State{std::vector<double>(4), 0}, 0.0, rng), ConfigError);

    const auto th = theta_offsets(4, 1.0, 2.0, ThetaLayout::checkerboard);
    CHECK(th == std::vector<double>{1.0, 2.0, 2.0, 1.0});
}

}
