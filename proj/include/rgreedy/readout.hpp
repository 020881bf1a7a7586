#pragma once

// Boolean masked photodiode readout and the normalized mean square error.

#include "rgreedy/common.hpp"

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace rgreedy::readout {

/// Mirror configuration: 1 routes a neuron's light to the detector, 0 away.
class BooleanReadout {
public:
    BooleanReadout() = default;
    explicit BooleanReadout(std::size_t n, bool value = false) : bits_(n, value ? 1 : 0) {}
    /// Throws ConfigError if any entry is not 0 or 1.
    explicit BooleanReadout(std::vector<std::uint8_t> bits);

    static BooleanReadout ones(std::size_t n) { return BooleanReadout(n, true); }
    static BooleanReadout zeros(std::size_t n) { return BooleanReadout(n, false); }

    std::size_t size() const noexcept { return bits_.size(); }
    bool operator[](std::size_t i) const noexcept { return bits_[i] != 0; }
    void set(std::size_t i, bool v) { bits_.at(i) = v ? 1 : 0; }
    void flip(std::size_t i) { bits_.at(i) ^= 1; }

    std::size_t hamming_weight() const noexcept;
    std::size_t hamming_distance(const BooleanReadout& other) const;
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    /// n characters of '0'/'1'.
    std::string to_string() const;
    static BooleanReadout from_string(std::string_view text);

    bool operator==(const BooleanReadout&) const = default;

private:
    std::vector<std::uint8_t> bits_;
};

/// Per-neuron field contrast E0_i - E_i(t) for every retained step.
StateMatrix field_contrast(const StateMatrix& states, std::span<const double> e0_sq);

/// y(t) = |sum_i mask_i (E0_i - E_i(t))|^2 with E = sqrt(x).
std::vector<double> readout_output(const StateMatrix& states, std::span<const double> e0_sq,
                                   const BooleanReadout& mask);

/// Same as readout_output on a precomputed field_contrast matrix.
std::vector<double> readout_from_contrast(const StateMatrix& contrast, const BooleanReadout& mask);

/// Adds N(0, (rel_sigma * max|y|)^2) to every sample. No-op for rel_sigma == 0.
void add_detector_noise(std::vector<double>& raw, double rel_sigma, Rng& rng);

struct OutputTrace {
    std::vector<double> raw;
    std::vector<double> normalized;
    double norm_mean = 0.0;
    double norm_std = 1.0;
};

/// Throws DegenerateError on a zero-variance trace.
OutputTrace normalize_output(std::vector<double> raw);

/// Normalizes with externally supplied statistics (training-set reuse on test data).
OutputTrace normalize_with(std::vector<double> raw, double mean, double std);

/// (1/T) sum (target - y)^2.
double nmse(std::span<const double> y_norm, std::span<const double> target_norm);

/// Columns step,target,y_raw,y_norm,error.
void write_trace_csv(std::ostream& out, std::span<const double> target, const OutputTrace& trace);

} // namespace rgreedy::readout
