#include "rgreedy/experiment.hpp"

#include "rgreedy/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

namespace rgreedy::experiment {

using nlohmann::json;

void ExperimentConfig::validate() const
{
    mackey_glass.params.validate();
    if (mackey_glass.n_points < 1) throw ConfigError("mackey_glass.n_points must be >= 1");

    reservoir::grid_side(reservoir.n);
    if (reservoir.beta < 0.0 || reservoir.gamma < 0.0 || reservoir.alpha < 0.0)
        throw ConfigError("reservoir: beta, gamma and alpha must be >= 0");
    if (reservoir.noise_state_sigma < 0.0) throw ConfigError("reservoir.noise_state_sigma must be >= 0");
    if (reservoir.e0_sq < 0.0) throw ConfigError("reservoir.e0_sq must be >= 0");
    if (reservoir.kernel_radius < 0) throw ConfigError("reservoir.kernel_radius must be >= 0");
    if (readout.detector_noise < 0.0) throw ConfigError("readout.detector_noise must be >= 0");

    if (learner.epochs < 1) throw ConfigError("learner.epochs must be >= 1");
    if (!(learner.epochs_per_neuron > 0.0)) throw ConfigError("learner.epochs_per_neuron must be > 0");
    if (learner.initial_mask != "ones" && learner.initial_mask != "zeros")
        throw ConfigError("learner.initial_mask must be \"ones\" or \"zeros\"");

    if (run.ensemble < 1) throw ConfigError("run.ensemble must be >= 1");
    if (run.train_len < 1) throw ConfigError("run.train_len must be >= 1");
    for (auto n : run.sweep) reservoir::grid_side(n);

    const std::size_t needed = reservoir.warmup + run.train_len + run.test_len + 2;
    if (mackey_glass.n_points < needed)
        throw ConfigError("mackey_glass.n_points=" + std::to_string(mackey_glass.n_points) + " is shorter than warmup + train + test + 2 = " +
                          std::to_string(needed));
}

reservoir::Config ExperimentConfig::reservoir_config(std::size_t n) const
{
    reservoir::Config c;
    c.n = n;
    c.beta = reservoir.beta;
    c.gamma = reservoir.gamma;
    c.alpha = reservoir.alpha;
    c.e0_sq.assign(n, reservoir.e0_sq);
    c.theta = reservoir::theta_offsets(n, reservoir.theta0, reservoir.theta_alt, reservoir.theta_layout);
    c.noise_state_sigma = reservoir.noise_state_sigma;
    c.seed = reservoir.seed;
    return c;
}

readout::BooleanReadout ExperimentConfig::initial_mask(std::size_t n) const
{
    return learner.initial_mask == "zeros" ? readout::BooleanReadout::zeros(n) : readout::BooleanReadout::ones(n);
}

std::size_t ExperimentConfig::sweep_epochs(std::size_t n) const
{
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(learner.epochs_per_neuron * static_cast<double>(n))));
}

std::uint64_t ExperimentConfig::run_seed(std::size_t index, std::uint64_t seed_offset) const
{
    return learner.seed + seed_offset + index;
}

namespace {

const char* layout_name(reservoir::ThetaLayout l)
{
    return l == reservoir::ThetaLayout::checkerboard ? "checkerboard" : "uniform";
}

reservoir::ThetaLayout parse_layout(const std::string& s)
{
    if (s == "uniform") return reservoir::ThetaLayout::uniform;
    if (s == "checkerboard") return reservoir::ThetaLayout::checkerboard;
    throw ConfigError("reservoir.theta_layout must be \"uniform\" or \"checkerboard\", got \"" + s + "\"");
}

void check_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed)
{
    if (!j.is_object()) throw ConfigError("config: section '" + section + "' must be an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : j.items())
        if (!ok.count(key)) throw ConfigError("config: unknown key '" + section + (section.empty() ? "" : ".") + key + "'");
}

template <class T>
void read(const json& j, const char* key, T& out, const std::string& section)
{
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + section + "." + key + "': " + e.what());
    }
}

} // namespace

json to_json(const ExperimentConfig& c)
{
    const auto& mg = c.mackey_glass.params;
    json j;
    j["mackey_glass"] = {{"a", mg.a},
                         {"b", mg.b},
                         {"tau", mg.tau},
                         {"exponent", mg.exponent},
                         {"dt", mg.dt},
                         {"subsample", mg.subsample},
                         {"x0", mg.x0},
                         {"history_jitter", mg.history_jitter},
                         {"seed", c.mackey_glass.seed},
                         {"n_points", c.mackey_glass.n_points}};
    const auto& r = c.reservoir;
    j["reservoir"] = {{"n", r.n},
                      {"beta", r.beta},
                      {"gamma", r.gamma},
                      {"alpha", r.alpha},
                      {"e0_sq", r.e0_sq},
                      {"theta0", r.theta0},
                      {"theta_alt", r.theta_alt},
                      {"theta_layout", layout_name(r.theta_layout)},
                      {"noise_state_sigma", r.noise_state_sigma},
                      {"kernel_radius", r.kernel_radius},
                      {"seed", r.seed},
                      {"warmup", r.warmup}};
    j["readout"] = {{"detector_noise", c.readout.detector_noise}};
    j["learner"] = {{"seed", c.learner.seed},
                    {"epochs", c.learner.epochs},
                    {"epochs_per_neuron", c.learner.epochs_per_neuron},
                    {"initial_mask", c.learner.initial_mask},
                    {"frozen_states", c.learner.frozen_states}};
    j["run"] = {{"ensemble", c.run.ensemble},
                {"sweep", c.run.sweep},
                {"train_len", c.run.train_len},
                {"test_len", c.run.test_len},
                {"out_dir", c.run.out_dir}};
    return j;
}

ExperimentConfig from_json(const json& j)
{
    ExperimentConfig c;
    check_keys(j, "", {"mackey_glass", "reservoir", "readout", "learner", "run"});

    if (j.contains("mackey_glass")) {
        const auto& s = j["mackey_glass"];
        check_keys(s, "mackey_glass",
                   {"a", "b", "tau", "exponent", "dt", "subsample", "x0", "history_jitter", "seed", "n_points"});
        auto& p = c.mackey_glass.params;
        read(s, "a", p.a, "mackey_glass");
        read(s, "b", p.b, "mackey_glass");
        read(s, "tau", p.tau, "mackey_glass");
        read(s, "exponent", p.exponent, "mackey_glass");
        read(s, "dt", p.dt, "mackey_glass");
        read(s, "subsample", p.subsample, "mackey_glass");
        read(s, "x0", p.x0, "mackey_glass");
        read(s, "history_jitter", p.history_jitter, "mackey_glass");
        read(s, "seed", c.mackey_glass.seed, "mackey_glass");
        read(s, "n_points", c.mackey_glass.n_points, "mackey_glass");
    }
    if (j.contains("reservoir")) {
        const auto& s = j["reservoir"];
        check_keys(s, "reservoir",
                   {"n", "beta", "gamma", "alpha", "e0_sq", "theta0", "theta_alt", "theta_layout",
                    "noise_state_sigma", "kernel_radius", "seed", "warmup"});
        auto& r = c.reservoir;
        read(s, "n", r.n, "reservoir");
        read(s, "beta", r.beta, "reservoir");
        read(s, "gamma", r.gamma, "reservoir");
        read(s, "alpha", r.alpha, "reservoir");
        read(s, "e0_sq", r.e0_sq, "reservoir");
        read(s, "theta0", r.theta0, "reservoir");
        read(s, "theta_alt", r.theta_alt, "reservoir");
        std::string layout = layout_name(r.theta_layout);
        read(s, "theta_layout", layout, "reservoir");
        r.theta_layout = parse_layout(layout);
        read(s, "noise_state_sigma", r.noise_state_sigma, "reservoir");
        read(s, "kernel_radius", r.kernel_radius, "reservoir");
        read(s, "seed", r.seed, "reservoir");
        read(s, "warmup", r.warmup, "reservoir");
    }
    if (j.contains("readout")) {
        const auto& s = j["readout"];
        check_keys(s, "readout", {"detector_noise"});
        read(s, "detector_noise", c.readout.detector_noise, "readout");
    }
    if (j.contains("learner")) {
        const auto& s = j["learner"];
        check_keys(s, "learner", {"seed", "epochs", "epochs_per_neuron", "initial_mask", "frozen_states"});
        read(s, "seed", c.learner.seed, "learner");
        read(s, "epochs", c.learner.epochs, "learner");
        read(s, "epochs_per_neuron", c.learner.epochs_per_neuron, "learner");
        read(s, "initial_mask", c.learner.initial_mask, "learner");
        read(s, "frozen_states", c.learner.frozen_states, "learner");
    }
    if (j.contains("run")) {
        const auto& s = j["run"];
        check_keys(s, "run", {"ensemble", "sweep", "train_len", "test_len", "out_dir"});
        read(s, "ensemble", c.run.ensemble, "run");
        read(s, "sweep", c.run.sweep, "run");
        read(s, "train_len", c.run.train_len, "run");
        read(s, "test_len", c.run.test_len, "run");
        read(s, "out_dir", c.run.out_dir, "run");
    }
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw ConfigError("config '" + path.string() + "': " + e.what());
    }
    return from_json(j);
}

std::string dump_config(const ExperimentConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

TaskData prepare_task(const timeseries::TimeSeries& raw, std::size_t warmup, std::size_t train_len,
                      std::size_t test_len)
{
    TaskData t;
    t.raw = raw;
    t.normalized = timeseries::normalize(raw);
    t.warmup = warmup;
    t.train_len = train_len;
    t.test_len = test_len;

    const auto& v = t.normalized.values;
    if (v.size() < warmup + train_len + test_len + 2)
        throw ConfigError("prepare_task: series too short for warmup + train + test");

    timeseries::TimeSeries tail;
    tail.values.assign(v.begin() + static_cast<std::ptrdiff_t>(warmup), v.end());
    tail.origin = timeseries::Origin::normalized;
    const auto pairs = timeseries::make_prediction_pairs(tail, train_len, test_len);

    t.train_drive.assign(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(warmup));
    t.train_drive.insert(t.train_drive.end(), pairs.train_input.begin(), pairs.train_input.end());
    t.train_target = pairs.train_target;
    t.full_drive = t.train_drive;
    t.full_drive.insert(t.full_drive.end(), pairs.test_input.begin(), pairs.test_input.end());
    t.test_target = pairs.test_target;
    return t;
}

TaskData prepare_task(const ExperimentConfig& cfg)
{
    cfg.validate();
    const auto raw = timeseries::generate_mackey_glass(cfg.mackey_glass.params, cfg.mackey_glass.n_points,
                                                       cfg.mackey_glass.seed);
    return prepare_task(raw, cfg.reservoir.warmup, cfg.run.train_len, cfg.run.test_len);
}

ReadoutObjective::ReadoutObjective(const reservoir::Reservoir& res, const TaskData& task, double detector_noise,
                                   bool frozen, std::uint64_t noise_seed)
    : res_(&res),
      task_(&task),
      detector_noise_(detector_noise),
      frozen_(frozen),
      state_noise_(derive_seed(noise_seed, 0)),
      detector_rng_(derive_seed(noise_seed, 1))
{
    if (frozen_) {
        const auto run = res_->run(task_->train_drive, task_->warmup, state_noise_);
        contrast_ = readout::field_contrast(run.states, res_->config().e0_sq);
    }
}

double ReadoutObjective::operator()(const readout::BooleanReadout& mask)
{
    std::vector<double> y;
    if (frozen_) {
        y = readout::readout_from_contrast(contrast_, mask);
    } else {
        const auto run = res_->run(task_->train_drive, task_->warmup, state_noise_);
        y = readout::readout_output(run.states, res_->config().e0_sq, mask);
    }
    readout::add_detector_noise(y, detector_noise_, detector_rng_);
    const auto trace = readout::normalize_output(std::move(y));
    return readout::nmse(trace.normalized, task_->train_target);
}

RunOutput run_learner(const ExperimentConfig& cfg, const reservoir::Reservoir& res, const TaskData& task,
                      std::uint64_t run_seed, std::size_t epochs)
{
    const std::size_t n = res.size();
    RunOutput out;
    out.seed = run_seed;

    ReadoutObjective objective(res, task, cfg.readout.detector_noise, cfg.learner.frozen_states,
                               derive_seed(run_seed, 2));
    auto state = learner::init_learner(n, derive_seed(run_seed, 1), cfg.initial_mask(n));
    auto trained = learner::train(state, std::ref(objective), epochs);

    out.curve = std::move(trained.curve);
    out.curve.n = n;
    out.curve.seed = run_seed;
    out.curve.noise_state_sigma = res.config().noise_state_sigma;
    out.curve.detector_noise = cfg.readout.detector_noise;
    out.history = std::move(state.history);
    out.final_mask = std::move(trained.final_mask);
    out.k_opt = analysis::find_optimal_epoch(out.curve.eps_accepted);
    out.eps_opt = out.curve.eps_accepted[out.k_opt - 1];

    // held-out evaluation: one noisy pass over warmup + train + test
    Rng eval_state(derive_seed(run_seed, 3));
    Rng eval_detector(derive_seed(run_seed, 4));
    const auto run = res.run(task.full_drive, task.warmup, eval_state);
    auto y = readout::readout_output(run.states, res.config().e0_sq, out.final_mask);
    readout::add_detector_noise(y, cfg.readout.detector_noise, eval_detector);

    const auto split = static_cast<std::ptrdiff_t>(task.train_len);
    std::vector<double> y_train(y.begin(), y.begin() + split);
    std::vector<double> y_test(y.begin() + split, y.end());
    try {
        const auto train_trace = readout::normalize_output(std::move(y_train));
        out.eps_train_eval = readout::nmse(train_trace.normalized, task.train_target);
        out.test_trace = readout::normalize_with(std::move(y_test), train_trace.norm_mean, train_trace.norm_std);
        out.eps_test = readout::nmse(out.test_trace.normalized, task.test_target);
    } catch (const DegenerateError&) {
        out.eps_train_eval = std::numeric_limits<double>::infinity();
        out.eps_test = std::numeric_limits<double>::infinity();
    }
    return out;
}

namespace {

template <class F>
void parallel_for(std::size_t count, std::size_t jobs, F&& body)
{
    jobs = std::max<std::size_t>(1, std::min(jobs, count));
    if (jobs == 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < jobs; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

} // namespace

std::vector<RunOutput> run_ensemble(const ExperimentConfig& cfg, const TaskData& task, std::size_t n,
                                    std::size_t epochs, std::size_t jobs, std::uint64_t seed_offset)
{
    const auto res = reservoir::Reservoir::build(cfg.reservoir_config(n), cfg.reservoir.kernel_radius);
    std::vector<RunOutput> outputs(cfg.run.ensemble);
    parallel_for(outputs.size(), jobs, [&](std::size_t r) {
        outputs[r] = run_learner(cfg, res, task, cfg.run_seed(r, seed_offset), epochs);
    });
    return outputs;
}

SweepOutput run_sweep(const ExperimentConfig& cfg, const TaskData& task, std::size_t jobs, std::uint64_t seed_offset)
{
    if (cfg.run.sweep.empty()) throw ConfigError("run.sweep must not be empty");
    SweepOutput out;
    std::vector<analysis::ScalingPoint> points;
    for (const auto n : cfg.run.sweep) {
        const auto runs = run_ensemble(cfg, task, n, cfg.sweep_epochs(n), jobs, seed_offset);
        std::vector<double> k, e;
        for (const auto& r : runs) {
            k.push_back(static_cast<double>(r.k_opt));
            e.push_back(r.eps_opt);
        }
        points.push_back(analysis::scaling_point(n, k, e));
        out.k_opts.push_back(std::move(k));
        out.eps_opts.push_back(std::move(e));
    }
    out.scaling = analysis::summarize_scaling(std::move(points));
    return out;
}

} // namespace rgreedy::experiment
