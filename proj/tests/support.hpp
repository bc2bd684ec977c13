#ifndef ABCBP_TEST_SUPPORT_HPP
#define ABCBP_TEST_SUPPORT_HPP

#include "abcbp/dataset.hpp"
#include "abcbp/random.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace testing {

inline std::filesystem::path data_dir() { return ABCBP_TEST_DATA_DIR; }

// Dataset from explicit rows; class_names are "c0".."c{k-1}" and targets are
// taken as given (not necessarily one-hot).
inline abcbp::data::Dataset make_data(const std::vector<std::vector<double>>& x,
                                      const std::vector<std::vector<double>>& t)
{
    abcbp::data::Dataset d;
    d.name = "inline";
    const auto rows = static_cast<Eigen::Index>(x.size());
    d.features.resize(rows, static_cast<Eigen::Index>(x.front().size()));
    d.targets.resize(rows, static_cast<Eigen::Index>(t.front().size()));
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < d.features.cols(); ++c) d.features(r, c) = x[r][c];
        Eigen::Index best = 0;
        for (Eigen::Index c = 0; c < d.targets.cols(); ++c) {
            d.targets(r, c) = t[r][c];
            if (t[r][c] > t[r][best]) best = c;
        }
        d.labels.push_back(static_cast<std::size_t>(best));
    }
    for (Eigen::Index c = 0; c < d.targets.cols(); ++c) d.class_names.push_back("c" + std::to_string(c));
    return d;
}

// Random rows in [0,1) with random one-hot targets.
inline abcbp::data::Dataset random_data(std::size_t rows, std::size_t features, std::size_t classes,
                                        abcbp::Rng& rng)
{
    std::vector<std::vector<double>> x(rows, std::vector<double>(features));
    std::vector<std::vector<double>> t(rows, std::vector<double>(classes, 0.0));
    for (std::size_t r = 0; r < rows; ++r) {
        for (auto& v : x[r]) v = abcbp::uniform01(rng);
        t[r][abcbp::uniform_index(rng, classes)] = 1.0;
    }
    return make_data(x, t);
}

} // namespace testing

#endif
