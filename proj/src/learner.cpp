#include "rgreedy/learner.hpp"

#include "rgreedy/csv.hpp"
#include "rgreedy/errors.hpp"

#include <cmath>
#include <ostream>

namespace rgreedy::learner {

LearnerState init_learner(std::size_t n, std::uint64_t seed, readout::BooleanReadout initial_mask)
{
    if (n < 1) throw ConfigError("init_learner: n must be >= 1");
    if (initial_mask.size() != n)
        throw ConfigError("init_learner: initial mask has " + std::to_string(initial_mask.size()) +
                          " entries, expected " + std::to_string(n));
    LearnerState s;
    s.mask = std::move(initial_mask);
    s.rng.seed(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    s.w_bias.resize(n);
    for (auto& w : s.w_bias) w = u(s.rng);
    return s;
}

std::size_t select_position(LearnerState& state)
{
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < state.w_bias.size(); ++i) {
        const double v = u(state.rng) * state.w_bias[i];
        if (v > best_value) {
            best_value = v;
            best = i;
        }
    }
    return best;
}

int reward(double eps_k, double eps_prev) noexcept { return eps_k < eps_prev ? 1 : 0; }

void apply_reward(LearnerState& state, std::size_t l, int r, double eps_k)
{
    if (l >= state.mask.size()) throw ConfigError("apply_reward: position out of range");
    if (r == 1)
        state.eps_min = eps_k;
    else
        state.mask.flip(l);
}

void update_bias(LearnerState& state, std::size_t l)
{
    if (l >= state.w_bias.size()) throw ConfigError("update_bias: position out of range");
    const double step = 1.0 / static_cast<double>(state.w_bias.size());
    for (auto& w : state.w_bias) w += step;
    state.w_bias[l] = 0.0;
}

namespace {

double score(const Objective& objective, const readout::BooleanReadout& mask)
{
    if (mask.hamming_weight() == 0) return std::numeric_limits<double>::infinity();
    try {
        const double e = objective(mask);
        return std::isnan(e) ? std::numeric_limits<double>::infinity() : e;
    } catch (const DegenerateError&) {
        return std::numeric_limits<double>::infinity();
    }
}

} // namespace

TrainResult train(LearnerState& state, const Objective& objective, std::size_t epochs)
{
    if (epochs < 1) throw ConfigError("train: epochs must be >= 1");

    TrainResult result;
    if (state.k == 0 && state.history.empty()) state.eps_min = score(objective, state.mask);
    result.curve.initial_error = state.eps_min;
    result.curve.n = state.mask.size();
    result.curve.eps_tested.reserve(epochs);
    result.curve.eps_accepted.reserve(epochs);

    for (std::size_t e = 0; e < epochs; ++e) {
        ++state.k;
        const std::size_t l = select_position(state);
        state.mask.flip(l);
        const double eps_k = score(objective, state.mask);
        const int r = reward(eps_k, state.eps_min);
        apply_reward(state, l, r, eps_k);
        update_bias(state, l);

        state.history.push_back({state.k, l, eps_k, state.eps_min, r, state.mask.hamming_weight()});
        result.curve.eps_tested.push_back(eps_k);
        result.curve.eps_accepted.push_back(state.eps_min);
    }
    result.final_mask = state.mask;
    return result;
}

void write_log_csv(std::ostream& out, std::span<const EpochRecord> history)
{
    out << "k,l_k,eps_tested,eps_accepted,reward,hamming_weight\n";
    for (const auto& r : history) {
        out << r.k << ',' << r.l << ',' << csv::format_number(r.eps_tested) << ','
            << csv::format_number(r.eps_accepted) << ',' << r.reward << ',' << r.hamming_weight << '\n';
    }
}

std::vector<EpochRecord> read_log_csv(const std::filesystem::path& path)
{
    const auto table = csv::read(path);
    for (const char* col : {"k", "l_k", "eps_tested", "eps_accepted", "reward", "hamming_weight"})
        if (!table.has_column(col))
            throw ParseError(path.string(), 1, std::string("missing column '") + col + "'");
    const auto ck = table.column_index("k");
    const auto cl = table.column_index("l_k");
    const auto ct = table.column_index("eps_tested");
    const auto ca = table.column_index("eps_accepted");
    const auto cr = table.column_index("reward");
    const auto ch = table.column_index("hamming_weight");
    std::vector<EpochRecord> out;
    out.reserve(table.rows.size());
    for (const auto& row : table.rows) {
        out.push_back({static_cast<std::size_t>(row[ck]), static_cast<std::size_t>(row[cl]), row[ct], row[ca],
                       static_cast<int>(row[cr]), static_cast<std::size_t>(row[ch])});
    }
    return out;
}

LearningCurve curve_from_log(std::span<const EpochRecord> history)
{
    LearningCurve c;
    for (const auto& r : history) {
        c.eps_tested.push_back(r.eps_tested);
        c.eps_accepted.push_back(r.eps_accepted);
    }
    if (!history.empty()) {
        // the log does not carry epoch 0; it is only recoverable when epoch 1 was rejected
        c.initial_error = history.front().reward ? std::numeric_limits<double>::quiet_NaN()
                                                 : history.front().eps_accepted;
    }
    return c;
}

} // namespace rgreedy::learner
