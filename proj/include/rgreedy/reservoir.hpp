#pragma once

// cos^2-nonlinear recurrent network with local diffractive-style coupling.
//
//   x_i(n+1) = alpha e0_i cos^2( beta alpha |sum_j W_ij E_j(n)|^2 + gamma w_i u(n+1) + theta_i ) + eta_i
//
// with field amplitudes E_j = sqrt(x_j) and eta_i additive Gaussian noise,
// followed by a clamp at zero.

#include "rgreedy/common.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <span>
#include <vector>

namespace rgreedy::reservoir {

enum class ThetaLayout {
    uniform,      // theta0 on every neuron
    checkerboard, // theta_alt on grid cells with odd (row + col)
};

struct Config {
    std::size_t n = 0;
    double beta = 0.8;
    double gamma = 0.25;
    double alpha = 0.9;
    // illumination intensity |E0_i|^2 per neuron
    std::vector<double> e0_sq;
    // phase offsets in radians
    std::vector<double> theta;
    // noise std as a fraction of alpha * e0_sq_i
    double noise_state_sigma = 1e-2;
    // seeds the injection weights and coupling jitter
    std::uint64_t seed = 0;

    void validate() const;
};

inline constexpr double default_theta0 = 0.44 * std::numbers::pi;
inline constexpr double default_theta_alt = 0.95 * std::numbers::pi;

std::vector<double> theta_offsets(std::size_t n, double theta0, double theta_alt, ThetaLayout layout);

/// Operating-point config: uniform e0_sq = 1, uniform theta0.
Config default_config(std::size_t n);

/// Side g of the g x g grid; throws ConfigError unless n is a nonzero perfect square.
std::size_t grid_side(std::size_t n);

/// Sparse non-negative coupling (CSR, rows = destination neuron).
struct CouplingMatrix {
    std::size_t n = 0;
    std::vector<std::size_t> row_ptr;
    std::vector<std::size_t> cols;
    std::vector<double> weights;

    std::size_t row_nonzeros(std::size_t i) const { return row_ptr[i + 1] - row_ptr[i]; }
    double row_sum(std::size_t i) const;
    /// Dense lookup; O(row nonzeros).
    double at(std::size_t i, std::size_t j) const;

    bool operator==(const CouplingMatrix&) const = default;
};

/// Each neuron couples to all cells within Chebyshev distance `kernel_radius`
/// (itself included) with a Gaussian profile (sigma = radius / 2) and +-20%
/// seeded jitter; rows normalized to sum 1. Radius 0 is the identity.
CouplingMatrix build_doe_coupling(std::size_t n, int kernel_radius, std::uint64_t seed);

struct InjectionWeights {
    std::vector<double> values;

    bool operator==(const InjectionWeights&) const = default;
};

/// n i.i.d. uniform [0, 1) draws.
InjectionWeights build_injection_weights(std::size_t n, std::uint64_t seed);

struct State {
    std::vector<double> x;
    std::size_t step = 0;
};

/// One update of every neuron. Noise is drawn from `noise` only when
/// cfg.noise_state_sigma > 0.
State step(const State& state, double u_next, const Config& cfg, const CouplingMatrix& wdoe,
           const InjectionWeights& winj, Rng& noise);

/// Retained rows of a driven run together with the inputs that produced them.
struct RunResult {
    StateMatrix states;
    std::vector<double> inputs;
};

/// Immutable network: configuration plus its coupling and injection weights.
class Reservoir {
public:
    Reservoir(Config cfg, CouplingMatrix wdoe, InjectionWeights winj);

    /// Builds W^DOE and W^inj from cfg.seed.
    static Reservoir build(Config cfg, int kernel_radius);

    const Config& config() const noexcept { return cfg_; }
    const CouplingMatrix& coupling() const noexcept { return wdoe_; }
    const InjectionWeights& injection() const noexcept { return winj_; }
    std::size_t size() const noexcept { return cfg_.n; }

    /// x(0) = alpha e0_sq / 2.
    State initial_state() const;

    void step_into(std::span<const double> x, double u_next, std::span<double> out, Rng& noise) const;
    State step(const State& s, double u_next, Rng& noise) const;

    /// Drives the network from initial_state(); the first `warmup` steps are discarded.
    RunResult run(std::span<const double> inputs, std::size_t warmup, Rng& noise) const;
    RunResult run_from(const State& init, std::span<const double> inputs, std::size_t warmup, Rng& noise) const;

private:
    Config cfg_;
    CouplingMatrix wdoe_;
    InjectionWeights winj_;
    // per-neuron constants hoisted out of the update loop
    std::vector<double> amplitude_;   // alpha * e0_sq_i
    std::vector<double> noise_std_;   // noise_state_sigma * alpha * e0_sq_i

    void update(std::span<const double> x, std::span<double> field, double u_next, std::span<double> out,
                Rng& noise) const;
};

RunResult run(std::span<const double> inputs, const Config& cfg, const CouplingMatrix& wdoe,
              const InjectionWeights& winj, std::size_t warmup, Rng& noise);

/// Header x_0..x_{n-1}, one row per step.
void write_states_csv(std::ostream& out, const StateMatrix& states);

} // namespace rgreedy::reservoir
