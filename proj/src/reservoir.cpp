#include "rgreedy/reservoir.hpp"

#include "rgreedy/csv.hpp"
#include "rgreedy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

namespace rgreedy::reservoir {

void Config::validate() const
{
    grid_side(n);
    if (!(beta >= 0.0) || !(gamma >= 0.0) || !(alpha >= 0.0))
        throw ConfigError("reservoir: beta, gamma and alpha must be >= 0");
    if (!(noise_state_sigma >= 0.0)) throw ConfigError("reservoir: noise_state_sigma must be >= 0");
    if (theta.size() != n)
        throw ConfigError("reservoir: theta has " + std::to_string(theta.size()) + " entries, expected " +
                          std::to_string(n));
    if (e0_sq.size() != n)
        throw ConfigError("reservoir: e0_sq has " + std::to_string(e0_sq.size()) + " entries, expected " +
                          std::to_string(n));
    for (double e : e0_sq)
        if (!(e >= 0.0)) throw ConfigError("reservoir: e0_sq entries must be >= 0");
}

std::size_t grid_side(std::size_t n)
{
    const auto g = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(n))));
    if (n == 0 || g * g != n) throw ConfigError("reservoir: n=" + std::to_string(n) + " is not a perfect square");
    return g;
}

std::vector<double> theta_offsets(std::size_t n, double theta0, double theta_alt, ThetaLayout layout)
{
    std::vector<double> theta(n, theta0);
    if (layout == ThetaLayout::checkerboard) {
        const std::size_t g = grid_side(n);
        for (std::size_t i = 0; i < n; ++i)
            if ((i / g + i % g) % 2 == 1) theta[i] = theta_alt;
    }
    return theta;
}

Config default_config(std::size_t n)
{
    Config cfg;
    cfg.n = n;
    cfg.e0_sq.assign(n, 1.0);
    cfg.theta.assign(n, default_theta0);
    return cfg;
}

double CouplingMatrix::row_sum(std::size_t i) const
{
    double s = 0.0;
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += weights[k];
    return s;
}

double CouplingMatrix::at(std::size_t i, std::size_t j) const
{
    for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k)
        if (cols[k] == j) return weights[k];
    return 0.0;
}

CouplingMatrix build_doe_coupling(std::size_t n, int kernel_radius, std::uint64_t seed)
{
    const std::size_t g = grid_side(n);
    if (kernel_radius < 0) throw ConfigError("build_doe_coupling: kernel_radius must be >= 0");

    CouplingMatrix m;
    m.n = n;
    m.row_ptr.reserve(n + 1);
    m.row_ptr.push_back(0);

    Rng rng(seed);
    std::uniform_real_distribution<double> jitter(0.8, 1.2);
    const double sigma = kernel_radius / 2.0;
    const auto r = static_cast<long>(kernel_radius);
    const auto side = static_cast<long>(g);

    for (long row = 0; row < side; ++row) {
        for (long col = 0; col < side; ++col) {
            const std::size_t first = m.weights.size();
            for (long dr = -r; dr <= r; ++dr) {
                for (long dc = -r; dc <= r; ++dc) {
                    const long rr = row + dr;
                    const long cc = col + dc;
                    if (rr < 0 || rr >= side || cc < 0 || cc >= side) continue;
                    const double d2 = static_cast<double>(dr * dr + dc * dc);
                    const double w = kernel_radius == 0 ? 1.0 : std::exp(-d2 / (2.0 * sigma * sigma)) * jitter(rng);
                    m.cols.push_back(static_cast<std::size_t>(rr * side + cc));
                    m.weights.push_back(w);
                }
            }
            double sum = 0.0;
            for (std::size_t k = first; k < m.weights.size(); ++k) sum += m.weights[k];
            if (sum > 0.0)
                for (std::size_t k = first; k < m.weights.size(); ++k) m.weights[k] /= sum;
            m.row_ptr.push_back(m.weights.size());
        }
    }
    return m;
}

InjectionWeights build_injection_weights(std::size_t n, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    InjectionWeights w;
    w.values.resize(n);
    for (auto& v : w.values) v = u(rng);
    return w;
}

Reservoir::Reservoir(Config cfg, CouplingMatrix wdoe, InjectionWeights winj)
    : cfg_(std::move(cfg)), wdoe_(std::move(wdoe)), winj_(std::move(winj))
{
    cfg_.validate();
    if (wdoe_.n != cfg_.n || wdoe_.row_ptr.size() != cfg_.n + 1)
        throw ConfigError("reservoir: coupling matrix dimension does not match n");
    if (winj_.values.size() != cfg_.n) throw ConfigError("reservoir: injection weights dimension does not match n");

    amplitude_.resize(cfg_.n);
    noise_std_.resize(cfg_.n);
    for (std::size_t i = 0; i < cfg_.n; ++i) {
        amplitude_[i] = cfg_.alpha * cfg_.e0_sq[i];
        noise_std_[i] = cfg_.noise_state_sigma * amplitude_[i];
    }
}

Reservoir Reservoir::build(Config cfg, int kernel_radius)
{
    cfg.validate();
    auto wdoe = build_doe_coupling(cfg.n, kernel_radius, derive_seed(cfg.seed, 1));
    auto winj = build_injection_weights(cfg.n, derive_seed(cfg.seed, 0));
    return Reservoir(std::move(cfg), std::move(wdoe), std::move(winj));
}

State Reservoir::initial_state() const
{
    State s;
    s.x.resize(cfg_.n);
    for (std::size_t i = 0; i < cfg_.n; ++i) s.x[i] = 0.5 * amplitude_[i];
    return s;
}

void Reservoir::update(std::span<const double> x, std::span<double> field, double u_next, std::span<double> out,
                       Rng& noise) const
{
    const std::size_t n = cfg_.n;
    for (std::size_t j = 0; j < n; ++j) field[j] = std::sqrt(std::max(x[j], 0.0));

    const double feedback = cfg_.beta * cfg_.alpha;
    const bool noisy = cfg_.noise_state_sigma > 0.0;
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (std::size_t i = 0; i < n; ++i) {
        double coupled = 0.0;
        for (std::size_t k = wdoe_.row_ptr[i]; k < wdoe_.row_ptr[i + 1]; ++k)
            coupled += wdoe_.weights[k] * field[wdoe_.cols[k]];
        const double arg = feedback * coupled * coupled + cfg_.gamma * winj_.values[i] * u_next + cfg_.theta[i];
        const double c = std::cos(arg);
        double xi = amplitude_[i] * c * c;
        if (noisy) xi += noise_std_[i] * gauss(noise);
        out[i] = std::max(xi, 0.0);
    }
}

void Reservoir::step_into(std::span<const double> x, double u_next, std::span<double> out, Rng& noise) const
{
    if (x.size() != cfg_.n || out.size() != cfg_.n)
        throw ConfigError("reservoir step: state dimension " + std::to_string(x.size()) + " != n=" +
                          std::to_string(cfg_.n));
    std::vector<double> field(cfg_.n);
    std::vector<double> next(cfg_.n);
    update(x, field, u_next, next, noise);
    std::copy(next.begin(), next.end(), out.begin());
}

State Reservoir::step(const State& s, double u_next, Rng& noise) const
{
    State out;
    out.x.resize(cfg_.n);
    step_into(s.x, u_next, out.x, noise);
    out.step = s.step + 1;
    return out;
}

RunResult Reservoir::run(std::span<const double> inputs, std::size_t warmup, Rng& noise) const
{
    return run_from(initial_state(), inputs, warmup, noise);
}

RunResult Reservoir::run_from(const State& init, std::span<const double> inputs, std::size_t warmup, Rng& noise) const
{
    if (inputs.size() < warmup + 1)
        throw ConfigError("reservoir run: " + std::to_string(inputs.size()) + " inputs cannot cover warmup " +
                          std::to_string(warmup) + " plus one retained step");
    if (init.x.size() != cfg_.n) throw ConfigError("reservoir run: initial state dimension mismatch");

    const std::size_t n = cfg_.n;
    RunResult result;
    result.states = StateMatrix(inputs.size() - warmup, n);
    result.inputs.assign(inputs.begin() + static_cast<std::ptrdiff_t>(warmup), inputs.end());

    std::vector<double> field(n);
    std::vector<double> cur = init.x;
    std::vector<double> next(n);
    for (std::size_t t = 0; t < inputs.size(); ++t) {
        update(cur, field, inputs[t], next, noise);
        cur.swap(next);
        if (t >= warmup) std::copy(cur.begin(), cur.end(), result.states.row(t - warmup).begin());
    }
    return result;
}

State step(const State& state, double u_next, const Config& cfg, const CouplingMatrix& wdoe,
           const InjectionWeights& winj, Rng& noise)
{
    return Reservoir(cfg, wdoe, winj).step(state, u_next, noise);
}

RunResult run(std::span<const double> inputs, const Config& cfg, const CouplingMatrix& wdoe,
              const InjectionWeights& winj, std::size_t warmup, Rng& noise)
{
    return Reservoir(cfg, wdoe, winj).run(inputs, warmup, noise);
}

void write_states_csv(std::ostream& out, const StateMatrix& states)
{
    for (std::size_t i = 0; i < states.cols(); ++i) out << (i ? "," : "") << "x_" << i;
    out << '\n';
    for (std::size_t t = 0; t < states.rows(); ++t) {
        const auto row = states.row(t);
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << csv::format_number(row[i]);
        out << '\n';
    }
}

} // namespace rgreedy::reservoir
