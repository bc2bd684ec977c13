#include "abcbp/dataset.hpp"

#include "abcbp/error.hpp"
#include "abcbp/random.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace abcbp::data {

std::vector<std::size_t> Dataset::class_counts() const
{
    std::vector<std::size_t> counts(classes(), 0);
    for (auto l : labels) ++counts.at(l);
    return counts;
}

std::size_t ClassColumn::resolve(std::size_t width) const
{
    if (width == 0) throw ParseError("row has no fields", 0);
    switch (kind) {
    case Kind::first: return 0;
    case Kind::last: return width - 1;
    case Kind::index:
        if (index >= width)
            throw ConfigError("class column " + std::to_string(index) + " is outside a row of " +
                              std::to_string(width) + " fields");
        return index;
    }
    return width - 1;
}

DatasetSpec builtin_spec(std::string_view name)
{
    DatasetSpec spec;
    if (name == "iris") {
        spec.class_column = ClassColumn::last();
    } else if (name == "wine") {
        spec.class_column = ClassColumn::first();
    } else if (name == "glass") {
        spec.class_column = ClassColumn::last();
        spec.id_columns = {0};
    } else if (name == "soybean") {
        spec.class_column = ClassColumn::last();
    } else {
        throw ConfigError("unknown dataset '" + std::string(name) + "' (valid: iris, wine, glass, soybean)");
    }
    return spec;
}

std::string builtin_filename(std::string_view name)
{
    if (name == "soybean") return "soybean-small.data";
    if (!is_builtin(name))
        throw ConfigError("unknown dataset '" + std::string(name) + "' (valid: iris, wine, glass, soybean)");
    return std::string(name) + ".data";
}

bool is_builtin(std::string_view name)
{
    return std::find(std::begin(builtin_names), std::end(builtin_names), name) != std::end(builtin_names);
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_fields(std::string_view line, char delim)
{
    std::vector<std::string_view> out;
    if (delim == ' ') {
        // Whitespace-delimited: runs of blanks count as one separator.
        std::size_t i = 0;
        while (i < line.size()) {
            while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
            if (i >= line.size()) break;
            std::size_t j = i;
            while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
            out.push_back(line.substr(i, j - i));
            i = j;
        }
        return out;
    }
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(delim, start);
        out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

double parse_number(std::string_view field, std::size_t line_no)
{
    if (field.empty() || field == "?")
        throw ParseError("missing value", line_no);
    if (field.front() == '+') field.remove_prefix(1);
    double v = 0.0;
    const auto* end = field.data() + field.size();
    auto [ptr, ec] = std::from_chars(field.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v))
        throw ParseError("not a number: '" + std::string(field) + "'", line_no);
    return v;
}

} // namespace

void normalize_min_max(Eigen::MatrixXd& features)
{
    for (Eigen::Index c = 0; c < features.cols(); ++c) {
        auto col = features.col(c);
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        if (hi > lo) {
            const double span = hi - lo;
            for (Eigen::Index r = 0; r < col.size(); ++r) col(r) = (col(r) - lo) / span;
        } else {
            col.setZero();
        }
    }
}

Dataset parse_csv(std::string_view text, const DatasetSpec& spec, std::string name)
{
    std::vector<std::vector<double>> rows;
    std::vector<std::string> raw_labels;
    std::size_t width = 0;
    std::size_t class_col = 0;
    bool header_pending = spec.header;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view line =
            trim(text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos));
        pos = (nl == std::string_view::npos) ? text.size() + 1 : nl + 1;
        ++line_no;
        if (line.empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }

        const auto fields = split_fields(line, spec.delimiter);
        if (width == 0) {
            width = fields.size();
            class_col = spec.class_column.resolve(width);
            for (auto id : spec.id_columns) {
                if (id >= width) throw ConfigError("id column " + std::to_string(id) + " is outside the row");
                if (id == class_col) throw ConfigError("id column coincides with the class column");
            }
        }
        if (fields.size() != width)
            throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()),
                             line_no);

        std::vector<double> row;
        row.reserve(width);
        for (std::size_t c = 0; c < width; ++c) {
            if (c == class_col) continue;
            if (std::find(spec.id_columns.begin(), spec.id_columns.end(), c) != spec.id_columns.end()) continue;
            row.push_back(parse_number(fields[c], line_no));
        }
        if (fields[class_col].empty() || fields[class_col] == "?") throw ParseError("missing class label", line_no);
        raw_labels.emplace_back(fields[class_col]);
        rows.push_back(std::move(row));
    }

    if (rows.empty()) throw ParseError("dataset '" + name + "' has no rows", 0);
    if (rows.front().empty()) throw ParseError("dataset '" + name + "' has no feature columns", 0);

    Dataset d;
    d.name = std::move(name);
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = static_cast<Eigen::Index>(rows.front().size());
    d.features.resize(n, m);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < m; ++c) d.features(r, c) = rows[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];

    for (const auto& label : raw_labels) {
        auto it = std::find(d.class_names.begin(), d.class_names.end(), label);
        if (it == d.class_names.end()) {
            d.labels.push_back(d.class_names.size());
            d.class_names.push_back(label);
        } else {
            d.labels.push_back(static_cast<std::size_t>(it - d.class_names.begin()));
        }
    }
    d.targets = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(d.class_names.size()));
    for (Eigen::Index r = 0; r < n; ++r) d.targets(r, static_cast<Eigen::Index>(d.labels[static_cast<std::size_t>(r)])) = 1.0;

    if (spec.normalize) {
        normalize_min_max(d.features);
        d.normalized = true;
    }
    return d;
}

Dataset load_csv(const std::filesystem::path& path, const DatasetSpec& spec)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open dataset file '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw IoError("error reading '" + path.string() + "'");
    try {
        return parse_csv(buf.str(), spec, path.stem().string());
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), 0);
    }
}

Dataset select_rows(const Dataset& data, const std::vector<std::size_t>& rows)
{
    Dataset out;
    out.name = data.name;
    out.class_names = data.class_names;
    out.normalized = data.normalized;
    out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
    out.targets.resize(static_cast<Eigen::Index>(rows.size()), data.targets.cols());
    out.labels.reserve(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto src = static_cast<Eigen::Index>(rows[i]);
        if (rows[i] >= data.samples()) throw ShapeError("row index out of range");
        out.features.row(static_cast<Eigen::Index>(i)) = data.features.row(src);
        out.targets.row(static_cast<Eigen::Index>(i)) = data.targets.row(src);
        out.labels.push_back(data.labels[rows[i]]);
    }
    return out;
}

namespace {

std::vector<std::size_t> permutation(std::size_t n, std::uint64_t seed)
{
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    Rng rng = make_stream(seed, 0x5348'5546ULL);
    // Fisher-Yates from the back.
    for (std::size_t i = n; i > 1; --i) std::swap(idx[i - 1], idx[uniform_index(rng, i)]);
    return idx;
}

} // namespace

Dataset shuffle(const Dataset& data, std::uint64_t seed)
{
    return select_rows(data, permutation(data.samples(), seed));
}

std::pair<Dataset, Dataset> split(const Dataset& data, double test_fraction, std::uint64_t seed)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0)) throw ConfigError("split fraction must be in (0, 1)");
    if (data.samples() < 2) throw ConfigError("cannot split a dataset with fewer than two rows");
    const auto idx = permutation(data.samples(), seed);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(data.samples())));
    n_test = std::clamp<std::size_t>(n_test, 1, data.samples() - 1);
    std::vector<std::size_t> test(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(idx.begin() + static_cast<std::ptrdiff_t>(n_test), idx.end());
    return {select_rows(data, train), select_rows(data, test)};
}

} // namespace abcbp::data
