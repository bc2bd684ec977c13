#ifndef ABCBP_DATASET_HPP
#define ABCBP_DATASET_HPP

#include <Eigen/Core>

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace abcbp::data {

// Labelled classification data. Rows are samples; targets are one-hot with
// column order equal to class_names order.
struct Dataset {
    std::string name;
    Eigen::MatrixXd features;
    Eigen::MatrixXd targets;
    std::vector<std::string> class_names;
    std::vector<std::size_t> labels; // class index per row
    bool normalized = false;

    std::size_t samples() const { return static_cast<std::size_t>(features.rows()); }
    std::size_t feature_width() const { return static_cast<std::size_t>(features.cols()); }
    std::size_t classes() const { return class_names.size(); }

    // Samples per class, in class_names order.
    std::vector<std::size_t> class_counts() const;
};

// Where the class label sits in a row.
struct ClassColumn {
    enum class Kind { first, last, index };
    Kind kind = Kind::last;
    std::size_t index = 0; // only for Kind::index, 0-based

    static ClassColumn first() { return {Kind::first, 0}; }
    static ClassColumn last() { return {Kind::last, 0}; }
    static ClassColumn at(std::size_t i) { return {Kind::index, i}; }

    // Resolves to a 0-based column for a row of the given width.
    std::size_t resolve(std::size_t width) const;

    bool operator==(const ClassColumn&) const = default;
};

// Column layout of a delimited file.
struct DatasetSpec {
    ClassColumn class_column = ClassColumn::last();
    std::vector<std::size_t> id_columns; // 0-based, dropped before parsing features
    char delimiter = ',';
    bool header = false;
    bool normalize = true;

    bool operator==(const DatasetSpec&) const = default;
};

inline constexpr std::string_view builtin_names[] = {"iris", "wine", "glass", "soybean"};

// Layout of the UCI distribution file for a builtin dataset. Throws
// ConfigError for an unknown name.
DatasetSpec builtin_spec(std::string_view name);

// Conventional file name of a builtin dataset inside a data directory.
std::string builtin_filename(std::string_view name);

bool is_builtin(std::string_view name);

// Parses a delimited file. Blank lines are skipped; anything else that does
// not parse (wrong field count, non-numeric feature, missing "?" value)
// throws ParseError with the line number.
Dataset load_csv(const std::filesystem::path& path, const DatasetSpec& spec);

// Same as load_csv but reads from memory; `name` labels the result.
Dataset parse_csv(std::string_view text, const DatasetSpec& spec, std::string name = "inline");

// Min-max scales each feature column to [0, 1]; constant columns map to 0.
void normalize_min_max(Eigen::MatrixXd& features);

// Permutes rows (features, targets and labels together). Deterministic per seed.
Dataset shuffle(const Dataset& data, std::uint64_t seed);

// Row subset in the given order.
Dataset select_rows(const Dataset& data, const std::vector<std::size_t>& rows);

// Shuffles, then holds out round(test_fraction * samples) rows as the test
// set. Returns {train, test}.
std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed);

} // namespace abcbp::data

#endif
