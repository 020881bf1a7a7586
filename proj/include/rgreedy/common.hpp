#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace rgreedy {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; maps (base, stream) to a decorrelated seed.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept
{
    std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

namespace stats {

inline double mean(std::span<const double> v)
{
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

/// Population (1/T) standard deviation.
inline double population_std(std::span<const double> v, double m)
{
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return v.empty() ? 0.0 : std::sqrt(s / static_cast<double>(v.size()));
}

inline double population_std(std::span<const double> v) { return population_std(v, mean(v)); }

} // namespace stats

/// Dense row-major matrix; one row per time step.
class StateMatrix {
public:
    StateMatrix() = default;
    StateMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<double> row(std::size_t t) noexcept { return {data_.data() + t * cols_, cols_}; }
    std::span<const double> row(std::size_t t) const noexcept { return {data_.data() + t * cols_, cols_}; }

    double operator()(std::size_t t, std::size_t i) const noexcept { return data_[t * cols_ + i]; }
    double& operator()(std::size_t t, std::size_t i) noexcept { return data_[t * cols_ + i]; }

    std::span<const double> data() const noexcept { return data_; }

    bool operator==(const StateMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace rgreedy
