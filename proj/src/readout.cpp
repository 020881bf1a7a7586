#include "rgreedy/readout.hpp"

#include "rgreedy/csv.hpp"
#include "rgreedy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

namespace rgreedy::readout {

BooleanReadout::BooleanReadout(std::vector<std::uint8_t> bits) : bits_(std::move(bits))
{
    for (auto b : bits_)
        if (b > 1) throw ConfigError("BooleanReadout: entries must be 0 or 1");
}

std::size_t BooleanReadout::hamming_weight() const noexcept
{
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::size_t BooleanReadout::hamming_distance(const BooleanReadout& other) const
{
    if (other.size() != size()) throw ConfigError("hamming_distance: length mismatch");
    std::size_t d = 0;
    for (std::size_t i = 0; i < bits_.size(); ++i) d += bits_[i] != other.bits_[i];
    return d;
}

std::string BooleanReadout::to_string() const
{
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i)
        if (bits_[i]) s[i] = '1';
    return s;
}

BooleanReadout BooleanReadout::from_string(std::string_view text)
{
    std::vector<std::uint8_t> bits;
    for (char c : text) {
        if (c == '0' || c == '1')
            bits.push_back(static_cast<std::uint8_t>(c - '0'));
        else if (c != '\n' && c != '\r' && c != ' ')
            throw ConfigError(std::string("mask: unexpected character '") + c + "'");
    }
    return BooleanReadout(std::move(bits));
}

StateMatrix field_contrast(const StateMatrix& states, std::span<const double> e0_sq)
{
    if (e0_sq.size() != states.cols()) throw ConfigError("field_contrast: e0_sq length does not match state columns");
    StateMatrix c(states.rows(), states.cols());
    for (std::size_t t = 0; t < states.rows(); ++t)
        for (std::size_t i = 0; i < states.cols(); ++i)
            c(t, i) = std::sqrt(e0_sq[i]) - std::sqrt(std::max(states(t, i), 0.0));
    return c;
}

std::vector<double> readout_from_contrast(const StateMatrix& contrast, const BooleanReadout& mask)
{
    if (mask.size() != contrast.cols())
        throw ConfigError("readout: mask length " + std::to_string(mask.size()) + " != state columns " +
                          std::to_string(contrast.cols()));
    std::vector<double> y(contrast.rows());
    for (std::size_t t = 0; t < contrast.rows(); ++t) {
        const auto row = contrast.row(t);
        double s = 0.0;
        for (std::size_t i = 0; i < row.size(); ++i)
            if (mask[i]) s += row[i];
        y[t] = s * s;
    }
    return y;
}

std::vector<double> readout_output(const StateMatrix& states, std::span<const double> e0_sq,
                                   const BooleanReadout& mask)
{
    if (mask.size() != states.cols())
        throw ConfigError("readout: mask length " + std::to_string(mask.size()) + " != state columns " +
                          std::to_string(states.cols()));
    return readout_from_contrast(field_contrast(states, e0_sq), mask);
}

void add_detector_noise(std::vector<double>& raw, double rel_sigma, Rng& rng)
{
    if (rel_sigma <= 0.0 || raw.empty()) return;
    double peak = 0.0;
    for (double v : raw) peak = std::max(peak, std::abs(v));
    const double sigma = rel_sigma * peak;
    if (sigma <= 0.0) return;
    std::normal_distribution<double> gauss(0.0, sigma);
    for (auto& v : raw) v += gauss(rng);
}

OutputTrace normalize_output(std::vector<double> raw)
{
    const double m = stats::mean(raw);
    const double s = stats::population_std(raw, m);
    if (!(s > 0.0) || !std::isfinite(s)) throw DegenerateError("normalize_output: readout trace has zero variance");
    return normalize_with(std::move(raw), m, s);
}

OutputTrace normalize_with(std::vector<double> raw, double mean, double std)
{
    if (!(std > 0.0)) throw DegenerateError("normalize_with: non-positive std");
    OutputTrace tr;
    tr.normalized.reserve(raw.size());
    for (double v : raw) tr.normalized.push_back((v - mean) / std);
    tr.raw = std::move(raw);
    tr.norm_mean = mean;
    tr.norm_std = std;
    return tr;
}

double nmse(std::span<const double> y_norm, std::span<const double> target_norm)
{
    if (y_norm.size() != target_norm.size() || y_norm.empty())
        throw ConfigError("nmse: length mismatch (" + std::to_string(y_norm.size()) + " vs " +
                          std::to_string(target_norm.size()) + ")");
    double s = 0.0;
    for (std::size_t i = 0; i < y_norm.size(); ++i) {
        const double d = target_norm[i] - y_norm[i];
        s += d * d;
    }
    return s / static_cast<double>(y_norm.size());
}

void write_trace_csv(std::ostream& out, std::span<const double> target, const OutputTrace& trace)
{
    if (target.size() != trace.raw.size()) throw ConfigError("write_trace_csv: length mismatch");
    out << "step,target,y_raw,y_norm,error\n";
    for (std::size_t t = 0; t < target.size(); ++t) {
        out << t << ',' << csv::format_number(target[t]) << ',' << csv::format_number(trace.raw[t]) << ','
            << csv::format_number(trace.normalized[t]) << ',' << csv::format_number(target[t] - trace.normalized[t])
            << '\n';
    }
}

} // namespace rgreedy::readout
