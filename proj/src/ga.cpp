#include "abcbp/ga.hpp"

#include "abcbp/error.hpp"
#include "abcbp/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace abcbp::ga {

namespace {

constexpr std::uint64_t init_domain = 0;
constexpr std::uint64_t breed_domain = 1;

struct Individual {
    std::vector<double> params;
    double fitness = 0.0;
    double ccr = 0.0;
};

void score(Individual& ind, const nn::Architecture& arch, const data::Dataset& data, const GaConfig& cfg)
{
    try {
        const auto sc = metrics::score(nn::make_network(arch, ind.params), data);
        const double f = sc.mean_sse();
        if (std::isfinite(f) && f <= cfg.divergence_cap) {
            ind.fitness = f;
            ind.ccr = sc.ccr();
            return;
        }
    } catch (const NumericError&) {
    }
    ind.fitness = cfg.divergence_cap;
    ind.ccr = 0.0;
}

metrics::IterationRecord make_record(std::size_t generation, const std::vector<Individual>& pop)
{
    double best = pop.front().fitness;
    double sum = 0.0;
    double ccr = 0.0;
    for (const auto& ind : pop) {
        best = std::min(best, ind.fitness);
        sum += ind.fitness;
        ccr += ind.ccr;
    }
    const auto n = static_cast<double>(pop.size());
    return {generation, best, sum / n, ccr / n, 0, 0};
}

} // namespace

void GaConfig::validate() const
{
    if (population < 2) throw ConfigError("GA population must be at least 2");
    if (generations < 1) throw ConfigError("GA generations must be at least 1");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) throw ConfigError("crossover rate must be in [0, 1]");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) throw ConfigError("mutation rate must be in [0, 1]");
    if (!(mutation_sigma >= 0.0) || !std::isfinite(mutation_sigma))
        throw ConfigError("mutation sigma must be finite and non-negative");
    if (elitism >= population) throw ConfigError("elitism must be smaller than the population");
    if (!(divergence_cap > 0.0)) throw ConfigError("divergence cap must be positive");
    if (stable_window < 1) throw ConfigError("stability window must be at least 1");
}

nlohmann::ordered_json GaConfig::to_json() const
{
    return {{"population", population},       {"generations", generations},
            {"crossover_rate", crossover_rate}, {"mutation_rate", mutation_rate},
            {"mutation_sigma", mutation_sigma}, {"elitism", elitism},
            {"seed", seed},                     {"divergence_cap", divergence_cap},
            {"stable_window", stable_window}};
}

std::size_t ga_select(std::span<const double> fitness, Rng& rng)
{
    std::vector<double> quality(fitness.size());
    for (std::size_t i = 0; i < fitness.size(); ++i) {
        if (!std::isfinite(fitness[i])) throw StateError("fitness must be finite for selection");
        quality[i] = 1.0 / (1.0 + std::max(fitness[i], 0.0));
    }
    return roulette(quality, rng);
}

std::pair<std::vector<double>, std::vector<double>> ga_crossover(std::span<const double> a,
                                                                 std::span<const double> b, Rng& rng,
                                                                 const GaConfig& cfg)
{
    if (a.size() != b.size()) throw ShapeError("crossover parents differ in length");
    std::vector<double> c1(a.begin(), a.end());
    std::vector<double> c2(b.begin(), b.end());
    if (uniform01(rng) < cfg.crossover_rate && a.size() >= 2) {
        const std::size_t cut = 1 + uniform_index(rng, a.size() - 1);
        for (std::size_t i = cut; i < a.size(); ++i) std::swap(c1[i], c2[i]);
    }
    return {std::move(c1), std::move(c2)};
}

std::vector<double> ga_mutate(std::span<const double> p, Rng& rng, const GaConfig& cfg)
{
    std::vector<double> out(p.begin(), p.end());
    for (auto& g : out)
        if (uniform01(rng) < cfg.mutation_rate) g += cfg.mutation_sigma * standard_normal(rng);
    return out;
}

metrics::RunReport run_ga(const GaConfig& cfg, const nn::Architecture& arch, const data::Dataset& data,
                          const RecordSink& sink)
{
    cfg.validate();
    arch.validate();
    if (arch.input_width() != data.feature_width() || arch.output_width() != data.classes())
        throw ShapeError("architecture does not fit dataset '" + data.name + "'");
    if (data.samples() == 0) throw ShapeError("dataset '" + data.name + "' is empty");

    const std::size_t dim = arch.parameter_count();
    std::vector<Individual> pop(cfg.population);
    for (std::size_t i = 0; i < pop.size(); ++i) {
        Rng rng = make_stream(cfg.seed, init_domain, i);
        pop[i].params.resize(dim);
        for (auto& p : pop[i].params) p = uniform01(rng);
    }
    parallel_for(pop.size(), cfg.threads, [&](std::size_t i) { score(pop[i], arch, data, cfg); });

    std::vector<metrics::IterationRecord> records;
    for (std::size_t gen = 1; gen <= cfg.generations; ++gen) {
        std::vector<std::size_t> order(pop.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pop[a].fitness < pop[b].fitness; });

        std::vector<double> fitness;
        fitness.reserve(pop.size());
        for (const auto& ind : pop) fitness.push_back(ind.fitness);

        Rng rng = make_stream(cfg.seed, breed_domain, gen);
        std::vector<Individual> next;
        next.reserve(pop.size());
        for (std::size_t e = 0; e < cfg.elitism; ++e) next.push_back(pop[order[e]]);
        const std::size_t first_child = next.size();
        while (next.size() < pop.size()) {
            const auto& pa = pop[ga_select(fitness, rng)].params;
            const auto& pb = pop[ga_select(fitness, rng)].params;
            auto [c1, c2] = ga_crossover(pa, pb, rng, cfg);
            next.push_back({ga_mutate(c1, rng, cfg)});
            if (next.size() < pop.size()) next.push_back({ga_mutate(c2, rng, cfg)});
        }
        parallel_for(next.size() - first_child, cfg.threads,
                     [&](std::size_t i) { score(next[first_child + i], arch, data, cfg); });
        pop = std::move(next);

        const auto rec = make_record(gen, pop);
        records.push_back(rec);
        if (sink) sink(rec);
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < pop.size(); ++i)
        if (pop[i].fitness < pop[best].fitness) best = i;

    metrics::RunReport report;
    report.algorithm = "ga";
    report.dataset = metrics::DatasetInfo::from(data);
    report.config = cfg.to_json();
    report.config["architecture"] = arch.sizes;
    report.config["hidden_transfer"] = nn::to_string(arch.hidden);
    report.config["output_transfer"] = nn::to_string(arch.output);
    report.records = records;
    report.summary = metrics::summarize(records, cfg.stable_window);
    report.best_params = pop[best].params;
    return report;
}

} // namespace abcbp::ga
