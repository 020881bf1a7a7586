#include "rgreedy/commands.hpp"

#include "rgreedy/analysis.hpp"
#include "rgreedy/csv.hpp"
#include "rgreedy/errors.hpp"
#include "rgreedy/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>

namespace rgreedy::cli {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path resolve_out_dir(const experiment::ExperimentConfig& cfg, const std::optional<std::string>& cli_out)
{
    if (const char* env = std::getenv("RGREEDY_OUT"); env && *env) return env;
    if (cli_out && !cli_out->empty()) return *cli_out;
    return cfg.run.out_dir;
}

fs::path run_dir(const fs::path& out, std::uint64_t seed) { return out / ("run_" + std::to_string(seed)); }

int exit_code(const std::exception& e) noexcept
{
    if (dynamic_cast<const ConfigError*>(&e)) return 2;
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const ParseError*>(&e)) return 3;
    return 1;
}

namespace {

json number(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

json fit_json(const analysis::ExponentialFit& f)
{
    return {{"a", number(f.a)},
            {"b", number(f.b)},
            {"rate", number(1.0 / f.b)},
            {"c", number(f.c)},
            {"residual_norm", number(f.residual_norm)},
            {"rate_at_bound", f.rate_at_bound}};
}

// Exponential fit on the strictly positive points of (k, v); null when impossible.
json try_fit(const std::vector<double>& k, const std::vector<double>& v)
{
    std::vector<double> kk, vv;
    for (std::size_t i = 0; i < v.size(); ++i)
        if (std::isfinite(v[i]) && v[i] > 0.0) {
            kk.push_back(k[i]);
            vv.push_back(v[i]);
        }
    if (vv.size() < 4) return nullptr;
    try {
        return fit_json(analysis::fit_exponential(kk, vv));
    } catch (const FitError& e) {
        return {{"error", e.what()}};
    }
}

void write_json(const fs::path& path, const json& j) { csv::write_text_file(path, j.dump(2) + "\n"); }

std::vector<std::string> strings(std::initializer_list<const char*> names) { return {names.begin(), names.end()}; }

void write_mean_curve(const fs::path& path, const std::vector<LearningCurve>& curves, json& summary)
{
    analysis::MeanCurve mc;
    if (curves.size() >= 2) {
        mc = analysis::average_curves(curves);
    } else {
        mc.mean = curves.front().eps_accepted;
        mc.std.assign(mc.mean.size(), 0.0);
    }
    std::vector<double> k(mc.mean.size());
    for (std::size_t i = 0; i < k.size(); ++i) k[i] = static_cast<double>(i + 1);

    std::optional<analysis::ExponentialFit> fit;
    json fit_j = try_fit(k, mc.mean);
    if (fit_j.is_object() && !fit_j.contains("error")) {
        fit = analysis::ExponentialFit{fit_j["a"].get<double>(), fit_j["b"].get<double>(), fit_j["c"].get<double>(),
                                       fit_j["residual_norm"].get<double>(), fit_j["rate_at_bound"].get<bool>()};
    }
    summary["mean_curve_fit"] = fit_j;

    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < k.size(); ++i)
        rows.push_back({k[i], mc.mean[i], mc.std[i], fit ? (*fit)(k[i]) : std::nan("")});
    csv::write_file(path, strings({"k", "mean", "std", "fit"}), rows);
}

std::vector<LearningCurve> load_curves(const experiment::ExperimentConfig& cfg, const Options& opt)
{
    std::vector<fs::path> expected;
    for (std::size_t r = 0; r < cfg.run.ensemble; ++r)
        expected.push_back(run_dir(opt.out_dir, cfg.run_seed(r, opt.seed_offset)) / "training_log.csv");
    std::vector<fs::path> missing;
    for (const auto& p : expected)
        if (!fs::exists(p)) missing.push_back(p);
    if (!missing.empty()) {
        std::ostringstream msg;
        msg << "missing training logs (run `rgreedy train` with the same config, or pass --compute):";
        for (const auto& p : missing) msg << "\n  " << p.string();
        throw IoError(msg.str());
    }
    std::vector<LearningCurve> curves;
    for (std::size_t r = 0; r < expected.size(); ++r) {
        auto c = learner::curve_from_log(learner::read_log_csv(expected[r]));
        c.seed = cfg.run_seed(r, opt.seed_offset);
        c.n = cfg.reservoir.n;
        curves.push_back(std::move(c));
    }
    return curves;
}

} // namespace

void cmd_generate(const experiment::ExperimentConfig& cfg, const Options& opt, std::ostream& log)
{
    cfg.validate();
    const auto series = timeseries::generate_mackey_glass(cfg.mackey_glass.params, cfg.mackey_glass.n_points,
                                                          cfg.mackey_glass.seed);
    std::ostringstream os;
    timeseries::write_csv(os, series);
    const auto path = opt.out_dir / "mackey_glass.csv";
    csv::write_text_file(path, os.str());
    log << "wrote " << path.string() << ": length=" << series.size() << " mean=" << csv::format_number(series.mean)
        << " std=" << csv::format_number(series.std) << '\n';
}

void cmd_train(const experiment::ExperimentConfig& cfg, const Options& opt, std::ostream& log)
{
    const auto task = experiment::prepare_task(cfg);
    const std::size_t n = cfg.reservoir.n;
    const auto runs = experiment::run_ensemble(cfg, task, n, cfg.learner.epochs, opt.jobs, opt.seed_offset);

    json summary;
    summary["n"] = n;
    summary["epochs"] = cfg.learner.epochs;
    summary["ensemble"] = runs.size();
    summary["runs"] = json::array();

    std::vector<LearningCurve> curves;
    std::vector<double> k_opts, eps_train, eps_test;
    for (const auto& r : runs) {
        const auto dir = run_dir(opt.out_dir, r.seed);
        std::ostringstream log_csv;
        learner::write_log_csv(log_csv, r.history);
        csv::write_text_file(dir / "training_log.csv", log_csv.str());
        csv::write_text_file(dir / "mask.txt", r.final_mask.to_string() + "\n");
        std::ostringstream trace;
        if (!r.test_trace.raw.empty()) readout::write_trace_csv(trace, task.test_target, r.test_trace);
        csv::write_text_file(dir / "trace.csv", trace.str());

        summary["runs"].push_back({{"seed", r.seed},
                                   {"k_opt", r.k_opt},
                                   {"initial_error", number(r.curve.initial_error)},
                                   {"eps_train", number(r.eps_opt)},
                                   {"eps_train_eval", number(r.eps_train_eval)},
                                   {"eps_test", number(r.eps_test)},
                                   {"hamming_weight", r.final_mask.hamming_weight()}});
        curves.push_back(r.curve);
        k_opts.push_back(static_cast<double>(r.k_opt));
        eps_train.push_back(r.eps_opt);
        eps_test.push_back(r.eps_test);
    }
    summary["mean_k_opt"] = stats::mean(k_opts);
    summary["std_k_opt"] = stats::population_std(k_opts);
    summary["mean_eps_train"] = number(stats::mean(eps_train));
    summary["std_eps_train"] = number(stats::population_std(eps_train));
    summary["mean_eps_test"] = number(stats::mean(eps_test));

    write_mean_curve(opt.out_dir / "mean_curve.csv", curves, summary);
    write_json(opt.out_dir / "train_summary.json", summary);

    log << "trained " << runs.size() << " run(s) at n=" << n << " for " << cfg.learner.epochs
        << " epochs: mean k_opt=" << csv::format_number(stats::mean(k_opts))
        << " train NMSE=" << csv::format_number(stats::mean(eps_train))
        << " test NMSE=" << csv::format_number(stats::mean(eps_test)) << '\n';
}

void cmd_landscape(const experiment::ExperimentConfig& cfg, const Options& opt, std::ostream& log)
{
    cfg.validate();
    if (opt.compute) cmd_train(cfg, opt, log);
    const auto curves = load_curves(cfg, opt);
    const auto split = analysis::gradient_split(curves);

    std::vector<std::vector<double>> rows;
    std::vector<double> k, pos, neg_abs;
    for (std::size_t j = 0; j < split.size(); ++j) {
        const auto e = static_cast<double>(split.epoch(j));
        rows.push_back({e, split.pos_mean(j), static_cast<double>(split.pos_count[j]), split.neg_mean(j),
                        static_cast<double>(split.neg_count[j])});
        k.push_back(e);
        pos.push_back(split.pos_mean(j));
        neg_abs.push_back(std::abs(split.neg_mean(j)));
    }
    csv::write_file(opt.out_dir / "gradient_split.csv",
                    strings({"k", "pos_mean", "pos_count", "neg_mean", "neg_count"}), rows);

    std::vector<double> k_opts;
    json per_run = json::array();
    std::size_t rising = 0;
    const std::size_t window = std::max<std::size_t>(1, cfg.reservoir.n / 10);
    for (const auto& c : curves) {
        const auto ko = analysis::find_optimal_epoch(c.eps_accepted);
        k_opts.push_back(static_cast<double>(ko));
        const auto d = analysis::kink_diagnostic(c, ko, window);
        rising += d.rising();
        per_run.push_back({{"seed", c.seed},
                           {"k_opt", ko},
                           {"mean_before", d.mean_before},
                           {"mean_after", d.mean_after},
                           {"count_before", d.count_before},
                           {"count_after", d.count_after},
                           {"rising", d.rising()}});
    }
    const double mean_k_opt = stats::mean(k_opts);
    const auto ens = analysis::kink_diagnostic(split, static_cast<std::size_t>(std::llround(mean_k_opt)), window);

    json out;
    out["runs"] = curves.size();
    out["n"] = cfg.reservoir.n;
    out["mean_k_opt"] = mean_k_opt;
    out["window"] = window;
    json fits;
    {
        std::vector<double> kk(curves.front().eps_accepted.size());
        for (std::size_t i = 0; i < kk.size(); ++i) kk[i] = static_cast<double>(i + 1);
        std::vector<double> mean(kk.size(), 0.0);
        for (const auto& c : curves)
            for (std::size_t i = 0; i < kk.size(); ++i) mean[i] += c.eps_accepted[i] / static_cast<double>(curves.size());
        fits["mean_curve"] = try_fit(kk, mean);
    }
    fits["positive"] = try_fit(k, pos);
    fits["negative_abs"] = try_fit(k, neg_abs);
    out["fits"] = fits;
    out["kink"] = {{"ensemble",
                    {{"k_opt", ens.k_opt},
                     {"mean_before", ens.mean_before},
                     {"mean_after", ens.mean_after},
                     {"rising", ens.rising()}}},
                   {"per_run", per_run},
                   {"rising_fraction", static_cast<double>(rising) / static_cast<double>(curves.size())}};
    write_json(opt.out_dir / "landscape.json", out);

    log << "gradient split over " << curves.size() << " run(s): mean k_opt=" << csv::format_number(mean_k_opt)
        << ", positive-gradient kink rising on " << rising << "/" << curves.size() << " runs\n";
}

void cmd_scaling(const experiment::ExperimentConfig& cfg, const Options& opt, std::ostream& log)
{
    const auto task = experiment::prepare_task(cfg);
    const auto sweep = experiment::run_sweep(cfg, task, opt.jobs, opt.seed_offset);
    const auto& res = sweep.scaling;

    std::vector<std::vector<double>> rows;
    for (const auto& p : res.points)
        rows.push_back({static_cast<double>(p.n), p.mean_k_opt, p.std_k_opt, p.mean_eps_opt});
    csv::write_file(opt.out_dir / "scaling.csv", strings({"n", "mean_k_opt", "std_k_opt", "mean_eps_opt"}), rows);

    bool decreasing = true;
    for (std::size_t i = 1; i < res.points.size(); ++i)
        decreasing = decreasing && res.points[i].mean_eps_opt < res.points[i - 1].mean_eps_opt;

    json out;
    out["ensemble"] = cfg.run.ensemble;
    out["epochs_per_neuron"] = cfg.learner.epochs_per_neuron;
    out["slope"] = res.fit ? json(res.fit->slope) : json(nullptr);
    out["intercept"] = res.fit ? json(res.fit->intercept) : json(nullptr);
    out["performance_ratio"] = number(res.performance_ratio);
    out["eps_opt_strictly_decreasing"] = decreasing;
    out["sizes"] = json::array();
    for (std::size_t i = 0; i < cfg.run.sweep.size(); ++i)
        out["sizes"].push_back({{"n", cfg.run.sweep[i]},
                                {"epochs", cfg.sweep_epochs(cfg.run.sweep[i])},
                                {"k_opt", sweep.k_opts[i]},
                                {"eps_opt", sweep.eps_opts[i]}});
    write_json(opt.out_dir / "scaling.json", out);

    log << "scaling over " << res.points.size() << " size(s): slope="
        << (res.fit ? csv::format_number(res.fit->slope) : std::string("unavailable"))
        << " performance ratio=" << csv::format_number(res.performance_ratio) << '\n';
}

namespace {

const char* const palette[] = {"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd"};

std::vector<double> head(std::vector<double> v, std::size_t n)
{
    if (v.size() > n) v.resize(n);
    return v;
}

svg::Plot plot_for(const csv::Table& t, const std::string& name)
{
    svg::Plot p;
    p.title = name;
    auto has = [&](std::initializer_list<const char*> cols) {
        return std::all_of(cols.begin(), cols.end(), [&](const char* c) { return t.has_column(c); });
    };

    if (has({"k", "mean", "std"})) {
        p.x_label = "epoch k";
        p.y_label = "NMSE";
        p.log_y = true;
        p.series.push_back({"ensemble mean", t.column("k"), t.column("mean"), svg::Style::markers, palette[0]});
        if (t.has_column("fit")) p.series.push_back({"exponential fit", t.column("k"), t.column("fit"), svg::Style::line, palette[2]});
    } else if (has({"k", "pos_mean", "neg_mean"})) {
        p.x_label = "epoch k";
        p.y_label = "|mean gradient|";
        p.log_y = true;
        auto neg = t.column("neg_mean");
        for (auto& v : neg) v = std::abs(v);
        p.series.push_back({"positive", t.column("k"), t.column("pos_mean"), svg::Style::line, palette[0]});
        p.series.push_back({"negative (abs)", t.column("k"), neg, svg::Style::line, palette[1]});
    } else if (has({"n", "mean_k_opt"})) {
        p.x_label = "neurons n";
        p.y_label = "optimal epoch";
        p.log_x = true;
        p.log_y = true;
        const auto n = t.column("n");
        const auto k = t.column("mean_k_opt");
        p.series.push_back({"mean k_opt", n, k, svg::Style::markers, palette[1]});
        if (n.size() >= 3) {
            std::vector<std::pair<double, double>> xy;
            for (std::size_t i = 0; i < n.size(); ++i) xy.emplace_back(n[i], k[i]);
            const auto fit = analysis::fit_loglog_slope(xy);
            const double lo = *std::min_element(n.begin(), n.end());
            const double hi = *std::max_element(n.begin(), n.end());
            std::vector<double> fx{lo, hi};
            std::vector<double> fy{std::exp(fit.intercept) * std::pow(lo, fit.slope),
                                   std::exp(fit.intercept) * std::pow(hi, fit.slope)};
            p.series.push_back({"fit slope " + csv::format_number(std::round(fit.slope * 100.0) / 100.0), fx, fy,
                                svg::Style::line, palette[0]});
        }
    } else if (has({"k", "eps_tested", "eps_accepted"})) {
        p.x_label = "epoch k";
        p.y_label = "NMSE";
        p.log_y = true;
        p.series.push_back({"tested", t.column("k"), t.column("eps_tested"), svg::Style::markers, "#bbbbbb"});
        p.series.push_back({"accepted", t.column("k"), t.column("eps_accepted"), svg::Style::line, palette[0]});
    } else if (has({"step", "target", "y_norm", "error"})) {
        p.x_label = "step";
        p.y_label = "normalized signal";
        const auto step = head(t.column("step"), 300);
        p.series.push_back({"target", step, head(t.column("target"), 300), svg::Style::line, palette[3]});
        p.series.push_back({"output", step, head(t.column("y_norm"), 300), svg::Style::line, palette[1]});
        p.series.push_back({"error", step, head(t.column("error"), 300), svg::Style::line, palette[2]});
    } else if (has({"value"})) {
        p.x_label = "sample";
        p.y_label = "x";
        const auto v = head(t.column("value"), 1000);
        std::vector<double> idx(v.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<double>(i);
        p.series.push_back({"", idx, v, svg::Style::line, palette[1]});
    } else {
        throw ParseError(name, 1, "unrecognized CSV columns");
    }
    return p;
}

} // namespace

void cmd_plot(const experiment::ExperimentConfig&, const Options& opt, std::ostream& log)
{
    std::vector<fs::path> inputs = opt.inputs;
    if (inputs.empty()) {
        for (const char* f : {"mackey_glass.csv", "mean_curve.csv", "gradient_split.csv", "scaling.csv"})
            if (fs::exists(opt.out_dir / f)) inputs.push_back(opt.out_dir / f);
        if (inputs.empty())
            throw IoError("no CSV files to plot in '" + opt.out_dir.string() +
                          "' (expected mackey_glass.csv, mean_curve.csv, gradient_split.csv or scaling.csv)");
    }
    for (const auto& in : inputs) {
        const auto table = csv::read(in);
        std::string stem = in.stem().string();
        if (stem == "training_log" || stem == "trace") stem = in.parent_path().filename().string() + "_" + stem;
        const auto svg_text = svg::render(plot_for(table, stem));
        const auto path = opt.out_dir / "plots" / (stem + ".svg");
        csv::write_text_file(path, svg_text);
        log << "wrote " << path.string() << '\n';
    }
}

} // namespace rgreedy::cli
