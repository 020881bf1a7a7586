// rgreedy: greedy Boolean learning on a simulated cos^2 reservoir.

#include "rgreedy/commands.hpp"
#include "rgreedy/errors.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <thread>

int main(int argc, char** argv)
{
    using namespace rgreedy;

    CLI::App app{"Reservoir simulator and greedy Boolean readout learning"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::optional<std::string> out;
    std::size_t jobs = 1;
    std::uint64_t seed_offset = 0;
    bool compute = false;
    std::vector<std::string> inputs;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Experiment configuration (JSON); defaults when omitted");
        sub->add_option("--out", out, "Output directory (RGREEDY_OUT takes precedence)");
        sub->add_option("--jobs", jobs, "Concurrent ensemble members")->check(CLI::PositiveNumber);
        sub->add_option("--seed-offset", seed_offset, "Added to every learner seed");
    };

    auto* generate = app.add_subcommand("generate", "Write the Mackey-Glass series as CSV");
    auto* train = app.add_subcommand("train", "Train an ensemble of greedy learners");
    auto* landscape = app.add_subcommand("landscape", "Gradient split and exponential fits from training logs");
    auto* scaling = app.add_subcommand("scaling", "Optimal epoch versus reservoir size");
    auto* plot = app.add_subcommand("plot", "Render CSV outputs as SVG");
    for (auto* sub : {generate, train, landscape, scaling, plot}) add_common(sub);
    landscape->add_flag("--compute", compute, "Run the training ensemble first");
    plot->add_option("inputs", inputs, "CSV files to plot (default: known outputs in the output directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        const auto cfg = config_path ? experiment::load_config(*config_path) : experiment::ExperimentConfig{};
        cfg.validate();

        cli::Options opt;
        opt.out_dir = cli::resolve_out_dir(cfg, out);
        opt.jobs = jobs;
        opt.seed_offset = seed_offset;
        opt.compute = compute;
        for (const auto& in : inputs) opt.inputs.emplace_back(in);

        if (generate->parsed())
            cli::cmd_generate(cfg, opt, std::cout);
        else if (train->parsed())
            cli::cmd_train(cfg, opt, std::cout);
        else if (landscape->parsed())
            cli::cmd_landscape(cfg, opt, std::cout);
        else if (scaling->parsed())
            cli::cmd_scaling(cfg, opt, std::cout);
        else if (plot->parsed())
            cli::cmd_plot(cfg, opt, std::cout);
    } catch (const std::exception& e) {
        std::cerr << "rgreedy: " << e.what() << '\n';
        return cli::exit_code(e);
    }
    return 0;
}
