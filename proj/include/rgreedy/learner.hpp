#pragma once

// Greedy Boolean learning: biased position selection, single-bit flip,
// reward-gated keep/revert and bias bookkeeping.

#include "rgreedy/common.hpp"
#include "rgreedy/curve.hpp"
#include "rgreedy/readout.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <span>
#include <vector>

namespace rgreedy::learner {

struct EpochRecord {
    std::size_t k = 0;
    std::size_t l = 0;
    double eps_tested = 0.0;
    double eps_accepted = 0.0;
    int reward = 0;
    // weight of the accepted mask after this epoch
    std::size_t hamming_weight = 0;
};

struct LearnerState {
    readout::BooleanReadout mask;
    std::vector<double> w_bias;
    double eps_min = std::numeric_limits<double>::infinity();
    std::size_t k = 0;
    Rng rng;
    std::vector<EpochRecord> history;
};

/// w_bias drawn uniform [0, 1); eps_min = +inf; k = 0.
LearnerState init_learner(std::size_t n, std::uint64_t seed, readout::BooleanReadout initial_mask);

/// argmax_i rand_i * w_bias_i over a fresh uniform draw; ties go to the lowest index.
std::size_t select_position(LearnerState& state);

/// 1 iff eps_k < eps_prev.
int reward(double eps_k, double eps_prev) noexcept;

/// Keeps the already-applied flip at l (and records eps_k as eps_min) when r == 1,
/// otherwise flips the bit back.
void apply_reward(LearnerState& state, std::size_t l, int r, double eps_k);

/// w_bias += 1/n, then w_bias[l] = 0.
void update_bias(LearnerState& state, std::size_t l);

/// Error of a candidate mask. May throw DegenerateError, which scores +inf.
using Objective = std::function<double(const readout::BooleanReadout&)>;

struct TrainResult {
    LearningCurve curve;
    readout::BooleanReadout final_mask;
};

/// Runs `epochs` greedy epochs. On a fresh state the initial mask is evaluated
/// once to seed eps_min.
TrainResult train(LearnerState& state, const Objective& objective, std::size_t epochs);

/// Columns k,l_k,eps_tested,eps_accepted,reward,hamming_weight.
void write_log_csv(std::ostream& out, std::span<const EpochRecord> history);
std::vector<EpochRecord> read_log_csv(const std::filesystem::path& path);

/// Rebuilds the tested/accepted curve from a training log.
LearningCurve curve_from_log(std::span<const EpochRecord> history);

} // namespace rgreedy::learner
