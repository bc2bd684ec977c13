#ifndef ABCBP_GA_HPP
#define ABCBP_GA_HPP

#include "abcbp/dataset.hpp"
#include "abcbp/metrics.hpp"
#include "abcbp/network.hpp"
#include "abcbp/random.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

// Generational genetic algorithm over flattened network parameters, used as
// the comparison baseline. Fitness and reporting are shared with the bee
// colony so the curves line up record for record.
namespace abcbp::ga {

struct GaConfig {
    std::size_t population = 10;
    std::size_t generations = 100;
    double crossover_rate = 0.9;
    double mutation_rate = 0.01;
    double mutation_sigma = 0.1;
    std::size_t elitism = 1;
    std::uint64_t seed = 1;
    double divergence_cap = 1e6;
    std::size_t stable_window = metrics::default_stable_window;
    std::size_t threads = 1;

    void validate() const;
    nlohmann::ordered_json to_json() const;
};

// Roulette on quality 1 / (1 + fitness).
std::size_t ga_select(std::span<const double> fitness, Rng& rng);

// One uniform01 draw decides whether to cross; if so a uniform_index draw
// picks the cut in [1, n - 1] and the suffixes are swapped.
std::pair<std::vector<double>, std::vector<double>> ga_crossover(std::span<const double> a,
                                                                 std::span<const double> b, Rng& rng,
                                                                 const GaConfig& cfg);

// Per gene in order: one uniform01 draw; below mutation_rate the gene gets
// mutation_sigma * standard_normal added.
std::vector<double> ga_mutate(std::span<const double> p, Rng& rng, const GaConfig& cfg);

using RecordSink = std::function<void(const metrics::IterationRecord&)>;

metrics::RunReport run_ga(const GaConfig& cfg, const nn::Architecture& arch, const data::Dataset& data,
                          const RecordSink& sink = {});

} // namespace abcbp::ga

#endif
