#ifndef ABCBP_EXPERIMENT_HPP
#define ABCBP_EXPERIMENT_HPP

#include "abcbp/abc.hpp"
#include "abcbp/bp.hpp"
#include "abcbp/dataset.hpp"
#include "abcbp/ga.hpp"
#include "abcbp/metrics.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace abcbp::cli {

enum class Algorithm { abc, ga, bp };

std::string_view to_string(Algorithm a);
Algorithm algorithm_from_string(std::string_view s);

// Everything needed to reproduce one experiment. Population size, cycle
// budget, learning rate, seed and stability window live in `abc` and are
// copied into the GA (population, generations) and BP (learning rate,
// epochs) configurations so the three algorithms run on matched budgets.
struct RunSpec {
    std::string dataset = "iris";             // builtin name or file path
    std::optional<data::DatasetSpec> layout;  // required for file paths
    std::filesystem::path data_dir;           // empty: default_data_dir()
    bool normalize = true;
    bool shuffle = true; // present training rows in a seeded random order
    Algorithm algo = Algorithm::abc;
    std::vector<std::size_t> hidden = {5};
    abc::AbcConfig abc;
    ga::GaConfig ga;
    bp::Update bp_update = bp::Update::online;
    std::vector<std::uint64_t> seeds = {1};
    std::optional<double> split; // holdout fraction
    std::string command_line;
};

// $ABCBP_DATA_DIR, else ./data when it exists, else the source tree's data/.
std::filesystem::path default_data_dir();

// Builtin names resolve inside the data directory. Anything else must be an
// existing file; otherwise ConfigError naming the valid choices.
data::Dataset load_dataset(const RunSpec& spec);

// [features, hidden..., classes], logistic throughout.
nn::Architecture architecture_for(const RunSpec& spec, const data::Dataset& data);

// One run of spec.algo on `data` with the given seed. With a split, trains
// on the training part and reports the best network's holdout CCR.
metrics::RunReport run_experiment(const RunSpec& spec, const data::Dataset& data, std::uint64_t seed,
                                  const std::function<void(const metrics::IterationRecord&)>& sink = {});

// "name algo seed=.. cycles=.. sse_avg=.. ..." for the console.
std::string summary_line(const metrics::RunReport& report);

// Inserts "_seed<k>" before the extension.
std::filesystem::path per_seed_path(const std::filesystem::path& path, std::uint64_t seed);

struct ComparisonRow {
    std::string dataset;
    Algorithm algo = Algorithm::abc;
    std::size_t runs = 0;
    double sse_median = 0.0; // median over seeds of final sse_avg
    double sse_best = 0.0;   // lowest final sse_avg over seeds
    std::uint64_t best_seed = 0;
    // CCR columns of the best-of-seeds run
    double ccr_max = 0.0;
    double ccr_min = 0.0;
    std::optional<double> ccr_stable;
    std::size_t stable_runs = 0;
    double ccr_max_over_seeds = 0.0;
};

double median(std::vector<double> values);

ComparisonRow summarize_runs(const std::string& dataset, Algorithm algo,
                             const std::vector<metrics::RunReport>& reports,
                             const std::vector<std::uint64_t>& seeds);

struct Comparison {
    std::vector<ComparisonRow> rows;
    std::vector<metrics::RunReport> reports; // dataset-major, then algorithm, then seed
};

// Runs every dataset x algorithm x seed; `jobs` runs execute concurrently.
Comparison compare(const RunSpec& base, const std::vector<std::string>& datasets,
                   const std::vector<Algorithm>& algos, std::size_t jobs = 1);

std::string render_table(const std::vector<ComparisonRow>& rows);
nlohmann::ordered_json comparison_to_json(const RunSpec& base, const std::vector<ComparisonRow>& rows);

} // namespace abcbp::cli

#endif
