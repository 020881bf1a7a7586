#pragma once

// Subcommands of the rgreedy tool. Each writes only below the output
// directory and is deterministic for a given configuration.

#include "rgreedy/experiment.hpp"

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace rgreedy::cli {

struct Options {
    std::filesystem::path out_dir;
    std::size_t jobs = 1;
    std::uint64_t seed_offset = 0;
    // landscape: train the ensemble first instead of requiring existing logs
    bool compute = false;
    // plot: explicit CSV inputs; empty means every known CSV in out_dir
    std::vector<std::filesystem::path> inputs;
};

/// RGREEDY_OUT, then --out, then run.out_dir.
std::filesystem::path resolve_out_dir(const experiment::ExperimentConfig& cfg,
                                      const std::optional<std::string>& cli_out);

/// Directory of ensemble member with learner seed `seed`.
std::filesystem::path run_dir(const std::filesystem::path& out, std::uint64_t seed);

void cmd_generate(const experiment::ExperimentConfig& cfg, const Options& opt, std::ostream& log);
void cmd_train(const experiment::ExperimentConfig& cfg, const Options& opt, std::ostream& log);
void cmd_landscape(const experiment::ExperimentConfig& cfg, const Options& opt, std::ostream& log);
void cmd_scaling(const experiment::ExperimentConfig& cfg, const Options& opt, std::ostream& log);
void cmd_plot(const experiment::ExperimentConfig& cfg, const Options& opt, std::ostream& log);

/// 2 for configuration errors, 3 for I/O and data-file errors, 1 otherwise.
int exit_code(const std::exception& e) noexcept;

} // namespace rgreedy::cli
