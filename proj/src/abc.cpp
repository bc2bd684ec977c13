#include "abcbp/abc.hpp"

#include "abcbp/error.hpp"
#include "abcbp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace abcbp::abc {

namespace {

// Stream domains. Cycle streams use (seed, cycle, slot) with cycle >= 1.
constexpr std::uint64_t init_domain = 0;

} // namespace

std::string_view to_string(Role r)
{
    switch (r) {
    case Role::employed: return "employed";
    case Role::onlooker: return "onlooker";
    case Role::scout: return "scout";
    }
    return "unknown";
}

std::string_view to_string(StepMode m)
{
    return m == StepMode::stochastic ? "stochastic" : "literal";
}

std::string_view to_string(ProbMode m)
{
    return m == ProbMode::classic ? "classic" : "literal";
}

StepMode step_mode_from_string(std::string_view s)
{
    if (s == "stochastic") return StepMode::stochastic;
    if (s == "literal") return StepMode::literal;
    throw ConfigError("unknown step mode '" + std::string(s) + "' (valid: stochastic, literal)");
}

ProbMode prob_mode_from_string(std::string_view s)
{
    if (s == "classic") return ProbMode::classic;
    if (s == "literal") return ProbMode::literal;
    throw ConfigError("unknown probability mode '" + std::string(s) + "' (valid: classic, literal)");
}

void AbcConfig::validate() const
{
    if (population < 2) throw ConfigError("population must be at least 2");
    if (max_cycles < 1) throw ConfigError("max cycles must be at least 1");
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw ConfigError("learning rate must be finite and non-negative");
    if (!(ccr_threshold >= 0.0 && ccr_threshold <= 100.0)) throw ConfigError("threshold must be in [0, 100]");
    if (!(divergence_cap > 0.0) || !std::isfinite(divergence_cap)) throw ConfigError("divergence cap must be positive");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be positive");
    if (stable_window < 1) throw ConfigError("stability window must be at least 1");
}

nlohmann::ordered_json AbcConfig::to_json() const
{
    return {{"population", population},
            {"max_cycles", max_cycles},
            {"learning_rate", learning_rate},
            {"ccr_threshold", ccr_threshold},
            {"step_mode", to_string(step_mode)},
            {"prob_mode", to_string(prob_mode)},
            {"divergence_cap", divergence_cap},
            {"epsilon", epsilon},
            {"seed", seed},
            {"hybrid_bp", hybrid_bp},
            {"movement", movement},
            {"stop_on_stable", stop_on_stable},
            {"stable_window", stable_window}};
}

Colony init_population(const AbcConfig& cfg, const nn::Architecture& arch)
{
    cfg.validate();
    arch.validate();
    const std::size_t dim = arch.parameter_count();
    Colony colony;
    colony.seed = cfg.seed;
    colony.n_scout = 1;
    colony.n_employed = cfg.population - 1;
    colony.solutions.resize(cfg.population);
    for (std::size_t i = 0; i < cfg.population; ++i) {
        Rng rng = make_stream(cfg.seed, init_domain, i);
        auto& s = colony.solutions[i];
        s.params.resize(dim);
        for (auto& p : s.params) p = uniform01(rng);
        s.role = (i + 1 == cfg.population) ? Role::scout : Role::employed;
    }
    return colony;
}

void evaluate_solution(Solution& s, const nn::Architecture& arch, const data::Dataset& data, const AbcConfig& cfg)
{
    try {
        const auto sc = metrics::score(nn::make_network(arch, s.params), data);
        const double f = sc.mean_sse();
        if (!std::isfinite(f) || f > cfg.divergence_cap) {
            s.fitness = cfg.divergence_cap;
            s.ccr = 0.0;
        } else {
            s.fitness = f;
            s.ccr = sc.ccr();
        }
    } catch (const NumericError&) {
        s.fitness = cfg.divergence_cap;
        s.ccr = 0.0;
    }
}

Colony evaluate(Colony colony, const nn::Architecture& arch, const data::Dataset& data, const AbcConfig& cfg)
{
    if (arch.input_width() != data.feature_width() || arch.output_width() != data.classes())
        throw ShapeError("architecture does not fit dataset '" + data.name + "'");
    parallel_for(colony.size(), cfg.threads,
                 [&](std::size_t i) { evaluate_solution(colony.solutions[i], arch, data, cfg); });
    colony.best_index = scout_best(colony);
    return colony;
}

std::size_t scout_best(const Colony& colony)
{
    if (colony.solutions.empty()) throw StateError("empty colony");
    std::size_t best = 0;
    for (std::size_t i = 0; i < colony.size(); ++i) {
        const auto& f = colony.solutions[i].fitness;
        if (!f) throw StateError("solution " + std::to_string(i) + " has no fitness");
        if (*f < *colony.solutions[best].fitness) best = i;
    }
    return best;
}

std::vector<double> selection_probabilities(std::span<const double> fitness, const AbcConfig& cfg)
{
    const std::size_t n = fitness.size();
    if (n == 0) return {};
    std::vector<double> weights(n);
    for (std::size_t i = 0; i < n; ++i) weights[i] = 1.0 / (1.0 + std::max(fitness[i], 0.0));

    if (cfg.prob_mode == ProbMode::literal) {
        const double best = *std::min_element(fitness.begin(), fitness.end());
        bool all_small = true;
        for (std::size_t i = 0; i < n; ++i) {
            weights[i] *= std::max(std::abs(fitness[i] - best), cfg.epsilon);
            if (weights[i] >= cfg.epsilon) all_small = false;
        }
        if (all_small) std::fill(weights.begin(), weights.end(), 1.0);
    }

    const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
    for (auto& w : weights) w /= total;
    return weights;
}

std::vector<double> selection_probabilities(const Colony& colony, const AbcConfig& cfg)
{
    std::vector<double> f;
    f.reserve(colony.size());
    for (std::size_t i = 0; i < colony.size(); ++i) {
        if (!colony.solutions[i].fitness) throw StateError("solution " + std::to_string(i) + " has no fitness");
        f.push_back(*colony.solutions[i].fitness);
    }
    return selection_probabilities(f, cfg);
}

double move_bee(double f_best, double f_j, const AbcConfig& cfg)
{
    const double fi = std::max(f_best, cfg.epsilon);
    const double fj = std::max(f_j, cfg.epsilon);
    const double step = (f_best - f_j) + std::exp(std::cos(fi / fj)) - std::log(fi * fj);
    if (!std::isfinite(step)) throw NumericError("bee movement is not finite");
    return step;
}

double classic_move(double v, double neighbor, double r)
{
    return v + (v - neighbor) * r;
}

Solution apply_move(const Solution& sol, double step, const AbcConfig& cfg, Rng& rng)
{
    Solution out;
    out.role = sol.role;
    out.params = sol.params;
    if (cfg.step_mode == StepMode::literal) {
        for (auto& p : out.params) p -= step;
    } else {
        for (auto& p : out.params) p -= step * uniform_symmetric(rng);
    }
    return out;
}

bool improves(double old_fitness, double candidate_fitness, const AbcConfig& cfg)
{
    return std::isfinite(candidate_fitness) && candidate_fitness <= cfg.divergence_cap &&
           candidate_fitness < old_fitness;
}

Retention greedy_retain_or_revert(const Solution& old, Solution candidate, const nn::Architecture& arch,
                                  const data::Dataset& data, const AbcConfig& cfg)
{
    if (!old.fitness) throw StateError("old solution has no fitness");
    evaluate_solution(candidate, arch, data, cfg);
    if (improves(*old.fitness, *candidate.fitness, cfg)) {
        candidate.role = old.role;
        return {std::move(candidate), true};
    }
    return {old, false};
}

Colony adjust_roles(Colony colony, bool improved)
{
    const std::size_t n = colony.size();
    if (improved) {
        if (colony.n_employed > 1) --colony.n_employed;
    } else {
        colony.n_scout = std::min(colony.n_scout + 1, n - 1);
        colony.n_employed = std::min(colony.n_employed, n - colony.n_scout);
    }
    colony.n_employed = std::max<std::size_t>(colony.n_employed, 1);
    return colony;
}

std::vector<std::size_t> rank(const Colony& colony)
{
    std::vector<std::size_t> order(colony.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < colony.size(); ++i)
        if (!colony.solutions[i].fitness) throw StateError("solution " + std::to_string(i) + " has no fitness");
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return *colony.solutions[a].fitness < *colony.solutions[b].fitness;
    });
    return order;
}

void assign_roles(Colony& colony)
{
    const auto order = rank(colony);
    const std::size_t n = colony.size();
    for (std::size_t r = 0; r < n; ++r) {
        Role role = Role::onlooker;
        if (r < colony.n_employed)
            role = Role::employed;
        else if (r >= n - colony.n_scout)
            role = Role::scout;
        colony.solutions[order[r]].role = role;
    }
}

namespace {

double mean_fitness(const Colony& c)
{
    double sum = 0.0;
    for (const auto& s : c.solutions) sum += *s.fitness;
    return sum / static_cast<double>(c.size());
}

double mean_ccr(const Colony& c)
{
    double sum = 0.0;
    for (const auto& s : c.solutions) sum += *s.ccr;
    return sum / static_cast<double>(c.size());
}

metrics::IterationRecord make_record(const Colony& c)
{
    return {c.cycle, *c.best().fitness, mean_fitness(c), mean_ccr(c), c.n_employed, c.n_scout};
}

// One slot's work for a cycle. Reads only the snapshot; writes only `out`.
void advance_slot(const Colony& snapshot, std::size_t slot, std::size_t best, bool explore,
                  const std::vector<double>& probs, const nn::Architecture& arch, const data::Dataset& data,
                  const AbcConfig& cfg, Solution& out)
{
    Rng rng = make_stream(cfg.seed, snapshot.cycle + 1, slot);
    const Solution& own = snapshot.solutions[slot];
    const double f_best = *snapshot.solutions[best].fitness;
    out = own;

    std::optional<Solution> candidate;
    switch (own.role) {
    case Role::scout: {
        if (explore && slot != best) {
            Solution fresh;
            fresh.params.resize(own.params.size());
            for (auto& p : fresh.params) p = uniform01(rng);
            fresh.role = own.role;
            evaluate_solution(fresh, arch, data, cfg);
            out = std::move(fresh);
        }
        break;
    }
    case Role::employed:
        if (cfg.movement) candidate = apply_move(own, move_bee(f_best, *own.fitness, cfg), cfg, rng);
        break;
    case Role::onlooker:
        if (cfg.movement) {
            const auto& source = snapshot.solutions[roulette(probs, rng)];
            candidate = apply_move(source, move_bee(f_best, *source.fitness, cfg), cfg, rng);
        }
        break;
    }
    if (candidate) out = greedy_retain_or_revert(own, std::move(*candidate), arch, data, cfg).solution;

    if (cfg.hybrid_bp && cfg.learning_rate > 0.0) {
        Solution trained;
        trained.role = out.role;
        try {
            trained.params =
                nn::flatten(nn::bp_epoch(nn::make_network(arch, out.params), data, cfg.learning_rate));
        } catch (const NumericError&) {
            return;
        }
        evaluate_solution(trained, arch, data, cfg);
        const double f = *trained.fitness;
        const bool keep = slot == best ? improves(*out.fitness, f, cfg)
                                       : (std::isfinite(f) && f < cfg.divergence_cap);
        if (keep) out = std::move(trained);
    }
}

} // namespace

metrics::RunReport run(const AbcConfig& cfg, const nn::Architecture& arch, const data::Dataset& data,
                       const RecordSink& sink)
{
    cfg.validate();
    arch.validate();
    if (data.samples() == 0) throw ShapeError("dataset '" + data.name + "' is empty");

    Colony colony = evaluate(init_population(cfg, arch), arch, data, cfg);
    assign_roles(colony);
    double previous_avg = mean_fitness(colony);
    bool explore = true;

    std::vector<metrics::IterationRecord> records;
    auto terminated = metrics::Termination::mcn;
    const std::vector<double> no_probs;

    while (colony.cycle < cfg.max_cycles) {
        const std::size_t best = colony.best_index;
        const auto probs = colony.n_onlooker() > 0 ? selection_probabilities(colony, cfg) : no_probs;

        std::vector<Solution> next(colony.size());
        parallel_for(colony.size(), cfg.threads, [&](std::size_t slot) {
            advance_slot(colony, slot, best, explore, probs, arch, data, cfg, next[slot]);
        });
        colony.solutions = std::move(next);
        colony.best_index = scout_best(colony);
        ++colony.cycle;

        const double avg = mean_fitness(colony);
        explore = !(avg < previous_avg);
        colony = adjust_roles(std::move(colony), !explore);
        previous_avg = avg;
        assign_roles(colony);

        const auto rec = make_record(colony);
        records.push_back(rec);
        if (sink) sink(rec);
        if (rec.ccr_avg > cfg.ccr_threshold) {
            terminated = metrics::Termination::threshold;
            break;
        }
        if (cfg.stop_on_stable && metrics::summarize(records, cfg.stable_window).ccr_stable) {
            terminated = metrics::Termination::stable;
            break;
        }
    }

    metrics::RunReport report;
    report.algorithm = "abc";
    report.dataset = metrics::DatasetInfo::from(data);
    report.config = cfg.to_json();
    report.config["architecture"] = arch.sizes;
    report.config["hidden_transfer"] = nn::to_string(arch.hidden);
    report.config["output_transfer"] = nn::to_string(arch.output);
    report.records = records;
    report.summary = metrics::summarize(records, cfg.stable_window);
    report.summary.terminated_by = terminated;
    report.best_params = colony.best().params;
    return report;
}

} // namespace abcbp::abc
