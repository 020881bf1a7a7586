#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace rgreedy {

/// Per-epoch errors of one greedy run. Entry k-1 holds epoch k (1-based).
struct LearningCurve {
    std::vector<double> eps_tested;
    // best accepted error after each epoch; non-increasing
    std::vector<double> eps_accepted;
    // error of the initial mask, evaluated before epoch 1
    double initial_error = 0.0;

    std::size_t n = 0;
    std::uint64_t seed = 0;
    double noise_state_sigma = 0.0;
    double detector_noise = 0.0;

    std::size_t k_max() const noexcept { return eps_accepted.size(); }
};

} // namespace rgreedy
