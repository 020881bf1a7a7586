#include "rgreedy/commands.hpp"
#include "rgreedy/csv.hpp"
#include "rgreedy/errors.hpp"
#include "rgreedy/learner.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace rgreedy;
using namespace rgreedy::experiment;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("rgreedy_unit_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

ExperimentConfig small_config()
{
    ExperimentConfig cfg;
    cfg.mackey_glass.n_points = 800;
    cfg.reservoir.n = 16;
    cfg.reservoir.warmup = 50;
    cfg.learner.epochs = 40;
    cfg.run.ensemble = 3;
    cfg.run.sweep = {9, 16, 25};
    cfg.run.train_len = 100;
    cfg.run.test_len = 400;
    return cfg;
}

cli::Options opts(const fs::path& out)
{
    cli::Options o;
    o.out_dir = out;
    return o;
}

std::string slurp(const fs::path& p) { return csv::read_text_file(p); }

void write_log(const fs::path& dir, const std::vector<learner::EpochRecord>& recs)
{
    std::ostringstream os;
    learner::write_log_csv(os, recs);
    csv::write_text_file(dir / "training_log.csv", os.str());
}

int run_cli(const std::string& args)
{
    const std::string cmd = std::string(RGREEDY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("config round trip")
{
    ExperimentConfig cfg = small_config();
    cfg.reservoir.theta_layout = reservoir::ThetaLayout::checkerboard;
    cfg.learner.initial_mask = "zeros";
    cfg.reservoir.theta0 = 1.2345678901234567;
    CHECK(from_json(to_json(cfg)) == cfg);
    CHECK(from_json(to_json(ExperimentConfig{})) == ExperimentConfig{});

    const auto dir = scratch("config");
    csv::write_text_file(dir / "c.json", dump_config(cfg));
    const auto back = load_config(dir / "c.json");
    CHECK(back == cfg);
    CHECK(dump_config(back) == dump_config(cfg));
}

TEST_CASE("config defaults and validation")
{
    const ExperimentConfig d;
    CHECK(d.reservoir.beta == 0.8);
    CHECK(d.reservoir.gamma == 0.25);
    CHECK(d.reservoir.n == 961);
    CHECK(d.run.train_len == 200);
    CHECK(d.run.test_len == 9000);
    CHECK_NOTHROW(d.validate());

    CHECK_THROWS_AS(from_json(nlohmann::json::parse(R"({"reservoir": {"colour": 1}})")), ConfigError);
    auto bad = small_config();
    bad.reservoir.n = 10;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_config();
    bad.run.sweep = {9, 12};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_config();
    bad.run.ensemble = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_config();
    bad.learner.epochs = 0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);

    // only the size has to be known for a partial file
    const auto partial = from_json(nlohmann::json::parse(R"({"reservoir": {"n": 25}})"));
    CHECK(partial.reservoir.n == 25);
    CHECK(partial.run == d.run);
}

TEST_CASE("output directory precedence")
{
    const auto cfg = small_config();
    ::unsetenv("RGREEDY_OUT");
    CHECK(cli::resolve_out_dir(cfg, std::nullopt) == fs::path("out"));
    CHECK(cli::resolve_out_dir(cfg, std::string("cli_dir")) == fs::path("cli_dir"));
    ::setenv("RGREEDY_OUT", "env_dir", 1);
    CHECK(cli::resolve_out_dir(cfg, std::string("cli_dir")) == fs::path("env_dir"));
    ::unsetenv("RGREEDY_OUT");
}

TEST_CASE("generate writes the default-length series deterministically")
{
    const auto a = scratch("gen_a");
    const auto b = scratch("gen_b");
    std::ostringstream log;
    cli::cmd_generate(ExperimentConfig{}, opts(a), log);
    cli::cmd_generate(ExperimentConfig{}, opts(b), log);
    const auto table = csv::read(a / "mackey_glass.csv");
    CHECK(table.rows.size() == 9400);
    CHECK(slurp(a / "mackey_glass.csv") == slurp(b / "mackey_glass.csv"));
    CHECK(log.str().find("length=9400") != std::string::npos);

    auto zero = ExperimentConfig{};
    zero.mackey_glass.n_points = 0;
    CHECK_THROWS_AS(cli::cmd_generate(zero, opts(a), log), ConfigError);
}

TEST_CASE("train outputs are complete and byte-identical across repeats")
{
    const auto cfg = small_config();
    const auto a = scratch("train_a");
    const auto b = scratch("train_b");
    std::ostringstream log;
    auto oa = opts(a);
    oa.jobs = 2;
    cli::cmd_train(cfg, oa, log);
    cli::cmd_train(cfg, opts(b), log);
    for (std::uint64_t seed : {1, 2, 3})
        for (const char* f : {"training_log.csv", "mask.txt", "trace.csv"}) {
            const auto rel = fs::path("run_" + std::to_string(seed)) / f;
            REQUIRE(fs::exists(a / rel));
            CHECK(slurp(a / rel) == slurp(b / rel));
        }
    CHECK(slurp(a / "mean_curve.csv") == slurp(b / "mean_curve.csv"));
    CHECK(slurp(a / "train_summary.json") == slurp(b / "train_summary.json"));

    const auto summary = nlohmann::json::parse(slurp(a / "train_summary.json"));
    CHECK(summary["runs"].size() == 3);
    CHECK(summary["runs"][0].contains("eps_test"));
    CHECK(csv::read(a / "run_2" / "training_log.csv").rows.size() == 40);
    CHECK(csv::read(a / "run_2" / "trace.csv").rows.size() == 400);
}

TEST_CASE("seed offset selects different run directories")
{
    auto cfg = small_config();
    cfg.run.ensemble = 1;
    const auto dir = scratch("offset");
    auto o = opts(dir);
    o.seed_offset = 100;
    std::ostringstream log;
    cli::cmd_train(cfg, o, log);
    CHECK(fs::exists(dir / "run_101" / "training_log.csv"));
}

TEST_CASE("single run with a single epoch")
{
    auto cfg = small_config();
    cfg.run.ensemble = 1;
    cfg.learner.epochs = 1;
    const auto dir = scratch("single");
    std::ostringstream log;
    cli::cmd_train(cfg, opts(dir), log);
    CHECK(csv::read(dir / "run_1" / "training_log.csv").rows.size() == 1);
    const auto mean = csv::read(dir / "mean_curve.csv");
    REQUIRE(mean.rows.size() == 1);
    CHECK(mean.column("std")[0] == 0.0);
}

TEST_CASE("landscape names the missing logs")
{
    auto cfg = small_config();
    const auto dir = scratch("missing");
    std::ostringstream log;
    try {
        cli::cmd_landscape(cfg, opts(dir), log);
        FAIL("expected an I/O error");
    } catch (const IoError& e) {
        const std::string what = e.what();
        CHECK(what.find("run_1") != std::string::npos);
        CHECK(what.find("run_3") != std::string::npos);
        CHECK(what.find("training_log.csv") != std::string::npos);
    }

    auto o = opts(dir);
    o.compute = true;
    CHECK_NOTHROW(cli::cmd_landscape(cfg, o, log));
    CHECK(fs::exists(dir / "gradient_split.csv"));
    CHECK(fs::exists(dir / "landscape.json"));
}

TEST_CASE("landscape on synthetic logs matches hand enumeration")
{
    auto cfg = small_config();
    cfg.run.ensemble = 2;
    const auto dir = scratch("synthetic");
    // run 1 accepted: 1.0, 0.8, 0.8, 0.5 ; run 2 accepted: 2.0, 2.0, 1.0, 1.0
    write_log(dir / "run_1", {{1, 0, 1.0, 1.0, 1, 3}, {2, 1, 0.8, 0.8, 1, 2}, {3, 2, 0.9, 0.8, 0, 2},
                              {4, 0, 0.5, 0.5, 1, 1}});
    write_log(dir / "run_2", {{1, 0, 2.0, 2.0, 0, 4}, {2, 1, 2.5, 2.0, 0, 4}, {3, 2, 1.0, 1.0, 1, 3},
                              {4, 0, 1.5, 1.0, 0, 3}});
    std::ostringstream log;
    cli::cmd_landscape(cfg, opts(dir), log);
    CHECK(slurp(dir / "gradient_split.csv") ==
          "k,pos_mean,pos_count,neg_mean,neg_count\n"
          "2,0.19999999999999996,1,-0.5,1\n"
          "3,1,1,-0.09999999999999998,1\n"
          "4,0.30000000000000004,1,-0.5,1\n");
    const auto j = nlohmann::json::parse(slurp(dir / "landscape.json"));
    CHECK(j["fits"]["positive"].is_null());
}

TEST_CASE("a single monotone run has an empty negative column")
{
    auto cfg = small_config();
    cfg.run.ensemble = 1;
    const auto dir = scratch("monotone");
    write_log(dir / "run_1", {{1, 0, 0.9, 0.9, 1, 15}, {2, 1, 0.8, 0.8, 1, 14}, {3, 2, 0.7, 0.7, 1, 13}});
    std::ostringstream log;
    cli::cmd_landscape(cfg, opts(dir), log);
    const auto t = csv::read(dir / "gradient_split.csv");
    for (double v : t.column("neg_mean")) CHECK(std::isnan(v));
    for (double v : t.column("neg_count")) CHECK(v == 0.0);
    CHECK(slurp(dir / "gradient_split.csv").find(",,0\n") != std::string::npos);
}

TEST_CASE("scaling with a single size has no slope")
{
    auto cfg = small_config();
    cfg.run.sweep = {16};
    cfg.run.ensemble = 2;
    const auto dir = scratch("scaling1");
    std::ostringstream log;
    cli::cmd_scaling(cfg, opts(dir), log);
    CHECK(csv::read(dir / "scaling.csv").rows.size() == 1);
    const auto j = nlohmann::json::parse(slurp(dir / "scaling.json"));
    CHECK(j["slope"].is_null());
    CHECK(j["sizes"][0]["k_opt"].size() == 2);
}

TEST_CASE("plots are deterministic and malformed input is reported by line")
{
    const auto cfg = small_config();
    const auto dir = scratch("plot");
    std::ostringstream log;
    cli::cmd_train(cfg, opts(dir), log);
    cli::cmd_scaling(cfg, opts(dir), log);
    cli::cmd_plot(cfg, opts(dir), log);
    const auto first = slurp(dir / "plots" / "mean_curve.svg");
    const auto scaling = slurp(dir / "plots" / "scaling.svg");
    cli::cmd_plot(cfg, opts(dir), log);
    CHECK(slurp(dir / "plots" / "mean_curve.svg") == first);
    CHECK(first.rfind("<svg", 0) == 0);
    CHECK(scaling.find("fit slope") != std::string::npos);

    auto o = opts(dir);
    o.inputs = {dir / "run_1" / "trace.csv"};
    cli::cmd_plot(cfg, o, log);
    CHECK(fs::exists(dir / "plots" / "run_1_trace.svg"));

    csv::write_text_file(dir / "broken.csv", "k,mean,std\n1,0.5,0\n2,zzz,0\n");
    o.inputs = {dir / "broken.csv"};
    try {
        cli::cmd_plot(cfg, o, log);
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    csv::write_text_file(dir / "other.csv", "a,b\n1,2\n");
    o.inputs = {dir / "other.csv"};
    CHECK_THROWS_AS(cli::cmd_plot(cfg, o, log), ParseError);
}

TEST_CASE("exit codes of the executable")
{
    const auto dir = scratch("exit");
    csv::write_text_file(dir / "bad.json", R"({"reservoir": {"n": 10}})");
    csv::write_text_file(dir / "unknown.json", R"({"nonsense": true})");
    csv::write_text_file(dir / "small.json", dump_config(small_config()));
    const std::string out = " --out " + (dir / "o").string();

    CHECK(run_cli("generate --config " + (dir / "small.json").string() + out) == 0);
    CHECK(run_cli("train --config " + (dir / "bad.json").string() + out) == 2);
    CHECK(run_cli("train --config " + (dir / "unknown.json").string() + out) == 2);
    CHECK(run_cli("train --jobs 0" + out) == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("landscape --config " + (dir / "small.json").string() + out) == 3);
    CHECK(run_cli("train --config " + (dir / "does_not_exist.json").string() + out) == 3);

    // an output path below a regular file cannot be created
    csv::write_text_file(dir / "blocker", "x");
    CHECK(run_cli("generate --config " + (dir / "small.json").string() + " --out " + (dir / "blocker" / "o").string()) ==
          3);
}

TEST_CASE("RGREEDY_OUT redirects the executable's output")
{
    const auto dir = scratch("env");
    csv::write_text_file(dir / "small.json", dump_config(small_config()));
    const std::string cmd = "RGREEDY_OUT=" + (dir / "env_out").string() + " " + RGREEDY_CLI_PATH +
                            " generate --config " + (dir / "small.json").string() + " --out " +
                            (dir / "cli_out").string() + " >/dev/null 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(dir / "env_out" / "mackey_glass.csv"));
    CHECK_FALSE(fs::exists(dir / "cli_out"));
}

}
