#ifndef ABCBP_METRICS_HPP
#define ABCBP_METRICS_HPP

#include "abcbp/dataset.hpp"
#include "abcbp/network.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace abcbp::metrics {

inline constexpr std::string_view schema_version = "abcbp.run_report/1";
inline constexpr std::string_view curves_header = "cycle,sse_best,sse_avg,ccr_avg";
inline constexpr std::string_view not_stable_marker = "not stable";
inline constexpr std::size_t default_stable_window = 10;

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(const Eigen::Ref<const Eigen::VectorXd>& v);

// Sum of squared error and number of argmax hits over a dataset, in one pass.
struct Score {
    double sse = 0.0;
    std::size_t correct = 0;
    std::size_t samples = 0;

    double mean_sse() const { return sse / static_cast<double>(samples); }
    double ccr() const { return 100.0 * static_cast<double>(correct) / static_cast<double>(samples); }
};

Score score(const nn::Network& net, const data::Dataset& data);

// Percentage of rows whose argmax prediction equals the argmax target.
double correct_classification_rate(const nn::Network& net, const data::Dataset& data);

struct IterationRecord {
    std::size_t cycle = 0;
    double sse_best = 0.0; // population minimum of per-solution mean SSE
    double sse_avg = 0.0;  // population average of per-solution mean SSE
    double ccr_avg = 0.0;  // population average CCR, percent
    std::size_t n_employed = 0;
    std::size_t n_scout = 0;

    bool operator==(const IterationRecord&) const = default;
};

enum class Termination { threshold, stable, mcn };

std::string_view to_string(Termination t);

struct RunSummary {
    double final_sse = 0.0;      // last sse_avg
    double final_sse_best = 0.0; // last sse_best
    double ccr_max = 0.0;
    double ccr_min = 0.0;
    std::optional<double> ccr_stable; // empty = not stable
    std::size_t stable_window = default_stable_window;
    std::size_t cycles_run = 0;
    Termination terminated_by = Termination::mcn;
    std::optional<double> test_ccr; // only when a holdout split was used

    bool operator==(const RunSummary&) const = default;
};

// Max/min over the ccr_avg curve; stable when the final ccr_avg is identical
// over the last `window` records. terminated_by is left at mcn for the caller
// to set. Throws StateError on empty input.
RunSummary summarize(const std::vector<IterationRecord>& records, std::size_t window = default_stable_window);

struct DatasetInfo {
    std::string name;
    std::size_t samples = 0;
    std::size_t features = 0;
    std::vector<std::string> class_names;
    std::vector<std::size_t> class_counts;
    bool normalized = false;

    static DatasetInfo from(const data::Dataset& d);
    bool operator==(const DatasetInfo&) const = default;
};

struct RunReport {
    std::string algorithm;
    DatasetInfo dataset;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    std::string command_line;
    std::vector<IterationRecord> records;
    RunSummary summary;
    std::vector<double> best_params;

    bool operator==(const RunReport&) const = default;
};

nlohmann::ordered_json to_json(const RunReport& report);

// Throws ParseError when the document is not a report of this schema.
RunReport report_from_json(const nlohmann::ordered_json& j);

std::string serialize_report(const RunReport& report);

void write_report(const RunReport& report, const std::filesystem::path& path);
RunReport read_report(const std::filesystem::path& path);

// One row per record under curves_header.
std::string serialize_curves(const std::vector<IterationRecord>& records);
void write_curves(const std::vector<IterationRecord>& records, const std::filesystem::path& path);

// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

} // namespace abcbp::metrics

#endif
