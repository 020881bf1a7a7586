#pragma once

// Experiment configuration and orchestration shared by the CLI and the
// acceptance suite: task data, the training objective, single runs, ensembles
// and size sweeps.

#include "rgreedy/analysis.hpp"
#include "rgreedy/learner.hpp"
#include "rgreedy/readout.hpp"
#include "rgreedy/reservoir.hpp"
#include "rgreedy/timeseries.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace rgreedy::experiment {

struct MackeyGlassSection {
    timeseries::MackeyGlassParams params;
    std::uint64_t seed = 7;
    std::size_t n_points = 9400;

    bool operator==(const MackeyGlassSection&) const = default;
};

struct ReservoirSection {
    std::size_t n = 961;
    double beta = 0.8;
    double gamma = 0.25;
    double alpha = 0.9;
    double e0_sq = 1.0;
    double theta0 = reservoir::default_theta0;
    double theta_alt = reservoir::default_theta_alt;
    reservoir::ThetaLayout theta_layout = reservoir::ThetaLayout::uniform;
    double noise_state_sigma = 1e-2;
    int kernel_radius = 1;
    std::uint64_t seed = 11;
    std::size_t warmup = 100;

    bool operator==(const ReservoirSection&) const = default;
};

struct ReadoutSection {
    // detector noise std relative to the peak raw output
    double detector_noise = 1e-3;

    bool operator==(const ReadoutSection&) const = default;
};

struct LearnerSection {
    std::uint64_t seed = 1;
    std::size_t epochs = 1922;
    // epoch budget per neuron for size sweeps
    double epochs_per_neuron = 2.0;
    // "ones" or "zeros"
    std::string initial_mask = "ones";
    // reuse one noisy reservoir pass for every epoch instead of redrawing it
    bool frozen_states = true;

    bool operator==(const LearnerSection&) const = default;
};

struct RunSection {
    std::size_t ensemble = 20;
    std::vector<std::size_t> sweep = {9, 25, 64, 144, 256, 484, 961};
    std::size_t train_len = 200;
    std::size_t test_len = 9000;
    std::string out_dir = "out";

    bool operator==(const RunSection&) const = default;
};

struct ExperimentConfig {
    MackeyGlassSection mackey_glass;
    ReservoirSection reservoir;
    ReadoutSection readout;
    LearnerSection learner;
    RunSection run;

    /// Throws ConfigError on any invariant violation.
    void validate() const;

    reservoir::Config reservoir_config(std::size_t n) const;
    readout::BooleanReadout initial_mask(std::size_t n) const;
    std::size_t sweep_epochs(std::size_t n) const;
    /// Learner seed of ensemble member `index`.
    std::uint64_t run_seed(std::size_t index, std::uint64_t seed_offset = 0) const;

    bool operator==(const ExperimentConfig&) const = default;
};

nlohmann::json to_json(const ExperimentConfig& cfg);
/// Missing keys keep their defaults; unknown keys are a ConfigError.
ExperimentConfig from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string dump_config(const ExperimentConfig& cfg);

/// Normalized Mackey-Glass drive laid out as [warmup | train | test].
struct TaskData {
    timeseries::TimeSeries raw;
    timeseries::TimeSeries normalized;
    std::size_t warmup = 0;
    std::size_t train_len = 0;
    std::size_t test_len = 0;
    // warmup + train inputs u(n+1) and their targets u(n+2)
    std::vector<double> train_drive;
    std::vector<double> train_target;
    // warmup + train + test inputs; test rows follow the training rows
    std::vector<double> full_drive;
    std::vector<double> test_target;
};

TaskData prepare_task(const ExperimentConfig& cfg);
TaskData prepare_task(const timeseries::TimeSeries& raw, std::size_t warmup, std::size_t train_len,
                      std::size_t test_len);

/// Training NMSE of a mask over the training drive. Each call redraws the
/// reservoir and detector noise unless `frozen` is set, in which case the
/// reservoir pass is drawn once at construction.
class ReadoutObjective {
public:
    ReadoutObjective(const reservoir::Reservoir& res, const TaskData& task, double detector_noise, bool frozen,
                     std::uint64_t noise_seed);

    double operator()(const readout::BooleanReadout& mask);

    /// Contrast matrix of the frozen pass (empty when not frozen).
    const StateMatrix& frozen_contrast() const noexcept { return contrast_; }

private:
    const reservoir::Reservoir* res_;
    const TaskData* task_;
    double detector_noise_;
    bool frozen_;
    Rng state_noise_;
    Rng detector_rng_;
    StateMatrix contrast_;
};

struct RunOutput {
    std::uint64_t seed = 0;
    LearningCurve curve;
    std::vector<learner::EpochRecord> history;
    readout::BooleanReadout final_mask;
    std::size_t k_opt = 0;
    // accepted training error at k_opt
    double eps_opt = 0.0;
    // final mask re-measured on the training rows of the evaluation pass
    double eps_train_eval = 0.0;
    // held-out error, normalized with the training statistics
    double eps_test = 0.0;
    readout::OutputTrace test_trace;
};

RunOutput run_learner(const ExperimentConfig& cfg, const reservoir::Reservoir& res, const TaskData& task,
                      std::uint64_t run_seed, std::size_t epochs);

/// Runs cfg.run.ensemble learners at size n on up to `jobs` threads, ordered by run index.
std::vector<RunOutput> run_ensemble(const ExperimentConfig& cfg, const TaskData& task, std::size_t n,
                                    std::size_t epochs, std::size_t jobs, std::uint64_t seed_offset = 0);

struct SweepOutput {
    analysis::ScalingResult scaling;
    // per size, in sweep order
    std::vector<std::vector<double>> k_opts;
    std::vector<std::vector<double>> eps_opts;
};

SweepOutput run_sweep(const ExperimentConfig& cfg, const TaskData& task, std::size_t jobs,
                      std::uint64_t seed_offset = 0);

} // namespace rgreedy::experiment
