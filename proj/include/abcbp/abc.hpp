#ifndef ABCBP_ABC_HPP
#define ABCBP_ABC_HPP

#include "abcbp/dataset.hpp"
#include "abcbp/metrics.hpp"
#include "abcbp/network.hpp"
#include "abcbp/random.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

// Artificial-bee-colony training of feed-forward networks.
//
// Every solution (food source) is a flattened parameter vector scored by its
// mean squared error over the dataset. A cycle ranks the colony by fitness and
// gives each slot a role: the first n_employed ranks are employed bees and
// refine their own source, the last n_scout ranks are scouts and propose a
// fresh random source, and the ranks in between are onlookers that pick a
// source by selection probability and move from it. Moves are built from the
// cycle-start snapshot and kept only on strict improvement. Scouts replace
// their source with a fresh random one, unconditionally, in every cycle that
// follows a cycle in which the average fitness did not improve; the best slot
// is exempt. With hybrid_bp each slot then receives one online
// back-propagation epoch, which is greedy for the cycle's best slot and only
// divergence-guarded elsewhere. The best slot never gets worse, so the
// population minimum is monotone.
namespace abcbp::abc {

enum class Role { employed, onlooker, scout };
enum class StepMode { stochastic, literal };
enum class ProbMode { classic, literal };

std::string_view to_string(Role r);
std::string_view to_string(StepMode m);
std::string_view to_string(ProbMode m);
StepMode step_mode_from_string(std::string_view s);
ProbMode prob_mode_from_string(std::string_view s);

struct AbcConfig {
    std::size_t population = 10;
    std::size_t max_cycles = 100;
    double learning_rate = 0.5;
    double ccr_threshold = 95.0; // percent; stop once the average CCR exceeds it
    StepMode step_mode = StepMode::stochastic;
    ProbMode prob_mode = ProbMode::classic;
    double divergence_cap = 1e6;
    double epsilon = 1e-12;
    std::uint64_t seed = 1;
    bool hybrid_bp = true;
    bool movement = true;
    bool stop_on_stable = false; // also stop once the average CCR held for stable_window cycles
    std::size_t stable_window = metrics::default_stable_window;
    std::size_t threads = 1; // does not change results

    // Throws ConfigError.
    void validate() const;

    // Every field that influences the result (threads excluded).
    nlohmann::ordered_json to_json() const;
};

struct Solution {
    std::vector<double> params;
    std::optional<double> fitness; // mean squared error over the dataset
    std::optional<double> ccr;     // percent
    Role role = Role::employed;
};

struct Colony {
    std::vector<Solution> solutions;
    std::size_t best_index = 0;
    std::size_t n_employed = 0;
    std::size_t n_scout = 1;
    std::size_t cycle = 0;
    std::uint64_t seed = 0; // streams are derived from (seed, cycle, slot)

    std::size_t size() const { return solutions.size(); }
    std::size_t n_onlooker() const { return size() - n_employed - n_scout; }
    const Solution& best() const { return solutions.at(best_index); }
};

// N solutions drawn uniformly from [0, 1), fitness unset, one scout.
Colony init_population(const AbcConfig& cfg, const nn::Architecture& arch);

// Scores every solution. A solution whose evaluation diverges gets
// fitness = divergence_cap and ccr = 0. Updates best_index.
Colony evaluate(Colony colony, const nn::Architecture& arch, const data::Dataset& data, const AbcConfig& cfg);

// Scores one solution in place (same divergence rule as evaluate).
void evaluate_solution(Solution& s, const nn::Architecture& arch, const data::Dataset& data, const AbcConfig& cfg);

// Argmin of fitness, ties to the lowest index. Throws StateError on an unset fitness.
std::size_t scout_best(const Colony& colony);

std::vector<double> selection_probabilities(std::span<const double> fitness, const AbcConfig& cfg);
std::vector<double> selection_probabilities(const Colony& colony, const AbcConfig& cfg);

// (F_best - F_j) + exp(cos(F_best / F_j)) - ln(F_best * F_j), with both
// fitness values floored at cfg.epsilon inside the ratio and the product.
double move_bee(double f_best, double f_j, const AbcConfig& cfg);

// v + (v - neighbor) * r
double classic_move(double v, double neighbor, double r);

// Literal mode subtracts `step` from every parameter. Stochastic mode
// subtracts step * r_k, one uniform_symmetric draw per parameter in order.
Solution apply_move(const Solution& sol, double step, const AbcConfig& cfg, Rng& rng);

// True when the candidate is finite, within the divergence cap and strictly
// better than the old fitness.
bool improves(double old_fitness, double candidate_fitness, const AbcConfig& cfg);

struct Retention {
    Solution solution;
    bool accepted = false;
};

// Evaluates the candidate and keeps it only if it improves on `old`.
// On rejection the returned solution is `old` unchanged.
Retention greedy_retain_or_revert(const Solution& old, Solution candidate, const nn::Architecture& arch,
                                  const data::Dataset& data, const AbcConfig& cfg);

// Improvement: one employed bee becomes an onlooker (floor 1). Otherwise one
// more scout (cap N - 1), with n_employed trimmed so the counts fit.
Colony adjust_roles(Colony colony, bool improved);

// Slot indices sorted by fitness, ties by index.
std::vector<std::size_t> rank(const Colony& colony);

// Sets each solution's role from its rank and the colony counts.
void assign_roles(Colony& colony);

using RecordSink = std::function<void(const metrics::IterationRecord&)>;

// Runs the full optimizer. Throws ConfigError / ShapeError before the loop;
// numeric trouble inside the loop is absorbed by reverting.
metrics::RunReport run(const AbcConfig& cfg, const nn::Architecture& arch, const data::Dataset& data,
                       const RecordSink& sink = {});

} // namespace abcbp::abc

#endif
