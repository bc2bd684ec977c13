#include "abcbp/dataset.hpp"
#include "abcbp/error.hpp"
#include "support.hpp"

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <sstream>

using namespace abcbp;
using data::ClassColumn;

namespace {

data::Dataset load_builtin(const std::string& name)
{
    return data::load_csv(testing::data_dir() / data::builtin_filename(name), data::builtin_spec(name));
}

void check_invariants(const data::Dataset& d)
{
    REQUIRE(d.features.rows() == d.targets.rows());
    REQUIRE(d.labels.size() == d.samples());
    for (Eigen::Index r = 0; r < d.targets.rows(); ++r) {
        CHECK(d.targets.row(r).sum() == 1.0);
        CHECK(d.targets(r, static_cast<Eigen::Index>(d.labels[static_cast<std::size_t>(r)])) == 1.0);
    }
    if (d.normalized) {
        CHECK(d.features.minCoeff() >= 0.0);
        CHECK(d.features.maxCoeff() <= 1.0);
    }
}

// Same layout as the UCI soybean-small file: 35 integer attributes, class
// label D1..D4 last, 10/10/10/17 rows.
std::string synthetic_soybean()
{
    std::ostringstream out;
    const int counts[] = {10, 10, 10, 17};
    int row = 0;
    for (int c = 0; c < 4; ++c) {
        for (int i = 0; i < counts[c]; ++i, ++row) {
            for (int a = 0; a < 35; ++a) out << (row * 7 + a * 3 + c) % (a % 4 + 2) << ',';
            out << 'D' << c + 1 << '\n';
        }
    }
    return out.str();
}

} // namespace

TEST_CASE("builtin layouts")
{
    CHECK(data::builtin_spec("iris").class_column == ClassColumn::last());
    CHECK(data::builtin_spec("iris").id_columns.empty());
    CHECK(data::builtin_spec("wine").class_column == ClassColumn::first());
    CHECK(data::builtin_spec("glass").id_columns == std::vector<std::size_t>{0});
    CHECK(data::builtin_spec("glass").class_column == ClassColumn::last());
    CHECK(data::builtin_spec("soybean").class_column == ClassColumn::last());
    CHECK(data::builtin_filename("soybean") == "soybean-small.data");
    CHECK(data::builtin_filename("iris") == "iris.data");
    CHECK(data::is_builtin("wine"));
    CHECK_FALSE(data::is_builtin("nosuch"));
    CHECK_THROWS_AS(data::builtin_spec("nosuch"), ConfigError);
}

TEST_CASE("iris shape")
{
    const auto d = load_builtin("iris");
    CHECK(d.samples() == 150);
    CHECK(d.feature_width() == 4);
    CHECK(d.classes() == 3);
    CHECK(d.class_counts() == std::vector<std::size_t>{50, 50, 50});
    CHECK(d.class_names.front() == "Iris-setosa");
    CHECK(d.normalized);
    check_invariants(d);
}

TEST_CASE("wine shape")
{
    const auto d = load_builtin("wine");
    CHECK(d.samples() == 178);
    CHECK(d.feature_width() == 13);
    CHECK(d.classes() == 3);
    CHECK(d.class_counts() == std::vector<std::size_t>{59, 71, 48});
    check_invariants(d);
}

TEST_CASE("glass shape follows the file")
{
    const auto d = load_builtin("glass");
    CHECK(d.samples() == 214);
    CHECK(d.feature_width() == 9);
    // the distributed file has no rows of class 4
    CHECK(d.classes() == 6);
    CHECK(d.class_names == std::vector<std::string>{"1", "2", "3", "5", "6", "7"});
    CHECK(d.class_counts() == std::vector<std::size_t>{70, 76, 17, 13, 9, 29});
    check_invariants(d);
}

TEST_CASE("soybean layout")
{
    const auto d = data::parse_csv(synthetic_soybean(), data::builtin_spec("soybean"), "soybean");
    CHECK(d.samples() == 47);
    CHECK(d.feature_width() == 35);
    CHECK(d.classes() == 4);
    CHECK(d.class_names == std::vector<std::string>{"D1", "D2", "D3", "D4"});
    CHECK(d.class_counts() == std::vector<std::size_t>{10, 10, 10, 17});
    check_invariants(d);
}

TEST_CASE("parse errors carry line numbers")
{
    const auto spec = data::DatasetSpec{};
    SUBCASE("field count")
    {
        try {
            data::parse_csv("1,2,a\n1,2,3,b\n", spec);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("non-numeric")
    {
        try {
            data::parse_csv("1,2,a\n1,x,b\n", spec);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 2);
        }
    }
    SUBCASE("missing value")
    {
        try {
            data::parse_csv("1,2,a\n\n?,3,b\n", spec);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 3);
        }
    }
    SUBCASE("empty")
    {
        CHECK_THROWS_AS(data::parse_csv("\n\n", spec), ParseError);
    }
    SUBCASE("missing file")
    {
        CHECK_THROWS_AS(data::load_csv(testing::data_dir() / "does-not-exist.data", spec), IoError);
    }
}

TEST_CASE("layout options")
{
    data::DatasetSpec spec;
    spec.header = true;
    spec.delimiter = ';';
    spec.class_column = ClassColumn::at(1);
    spec.id_columns = {0};
    spec.normalize = false;
    const auto d = data::parse_csv("id;label;x;y\n7;b;1.5;2\n8;a;3;4\n9;b;5;6\n", spec);
    CHECK(d.samples() == 3);
    CHECK(d.feature_width() == 2);
    CHECK(d.class_names == std::vector<std::string>{"b", "a"});
    CHECK(d.labels == std::vector<std::size_t>{0, 1, 0});
    CHECK(d.features(0, 0) == 1.5);
    CHECK(d.features(2, 1) == 6.0);
    CHECK_FALSE(d.normalized);
}

TEST_CASE("normalization")
{
    Eigen::MatrixXd m(4, 3);
    m << 1, 5, 2, //
        3, 5, -1, //
        2, 5, 0,  //
        9, 5, 4;
    const Eigen::MatrixXd before = m;
    data::normalize_min_max(m);
    CHECK(m.col(0).minCoeff() == 0.0);
    CHECK(m.col(0).maxCoeff() == 1.0);
    CHECK(m.col(1).isZero());
    // monotone per column
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.rows(); ++j)
                if (before(i, c) < before(j, c)) CHECK(m(i, c) < m(j, c));
}

TEST_CASE("loading twice gives identical data")
{
    const auto a = load_builtin("wine");
    const auto b = load_builtin("wine");
    CHECK(a.features == b.features);
    CHECK(a.targets == b.targets);
    CHECK(a.labels == b.labels);
}

TEST_CASE("shuffle")
{
    const auto d = load_builtin("iris");
    SUBCASE("single row unchanged")
    {
        const auto one = data::select_rows(d, {5});
        const auto s = data::shuffle(one, 9);
        CHECK(s.features == one.features);
    }
    SUBCASE("deterministic and a permutation")
    {
        const auto a = data::shuffle(d, 4);
        const auto b = data::shuffle(d, 4);
        CHECK(a.features == b.features);
        CHECK(a.labels == b.labels);
        CHECK(a.features != d.features);
        CHECK(a.class_counts() == d.class_counts());

        // Tag every row with its index, shuffle, then sort back by the tag.
        auto tagged = d;
        tagged.features.conservativeResize(Eigen::NoChange, d.features.cols() + 1);
        for (Eigen::Index r = 0; r < d.features.rows(); ++r) tagged.features(r, d.features.cols()) = double(r);
        const auto s = data::shuffle(tagged, 11);
        std::vector<std::size_t> order(d.samples());
        for (std::size_t r = 0; r < order.size(); ++r)
            order[static_cast<std::size_t>(s.features(static_cast<Eigen::Index>(r), d.features.cols()))] = r;
        const auto restored = data::select_rows(s, order);
        CHECK(restored.features == tagged.features);
        CHECK(restored.targets == d.targets);
        CHECK(restored.labels == d.labels);
    }
}

TEST_CASE("split")
{
    const auto d = load_builtin("iris");
    const auto [train, test] = data::split(d, 0.2, 3);
    CHECK(test.samples() == 30);
    CHECK(train.samples() == 120);
    CHECK(train.class_names == d.class_names);
    CHECK_THROWS_AS(data::split(d, 0.0, 3), ConfigError);
    CHECK_THROWS_AS(data::split(d, 1.0, 3), ConfigError);
}
