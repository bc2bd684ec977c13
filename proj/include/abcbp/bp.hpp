#ifndef ABCBP_BP_HPP
#define ABCBP_BP_HPP

#include "abcbp/dataset.hpp"
#include "abcbp/metrics.hpp"
#include "abcbp/network.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <string_view>

// Plain back-propagation trainer: a single network, no population.
namespace abcbp::bp {

enum class Update { online, batch };

std::string_view to_string(Update u);
Update update_from_string(std::string_view s);

struct BpConfig {
    double learning_rate = 0.5;
    std::size_t epochs = 100;
    Update update = Update::online;
    std::uint64_t seed = 1;
    std::size_t stable_window = metrics::default_stable_window;

    void validate() const;
    nlohmann::ordered_json to_json() const;
};

using RecordSink = std::function<void(const metrics::IterationRecord&)>;

// Initial parameters are uniform on [0, 1) like the population methods.
// A non-finite update throws NumericError.
metrics::RunReport run_bp(const BpConfig& cfg, const nn::Architecture& arch, const data::Dataset& data,
                          const RecordSink& sink = {});

} // namespace abcbp::bp

#endif
