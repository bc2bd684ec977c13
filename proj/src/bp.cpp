#include "abcbp/bp.hpp"

#include "abcbp/error.hpp"
#include "abcbp/random.hpp"

#include <cmath>
#include <string>

namespace abcbp::bp {

std::string_view to_string(Update u)
{
    return u == Update::online ? "online" : "batch";
}

Update update_from_string(std::string_view s)
{
    if (s == "online") return Update::online;
    if (s == "batch") return Update::batch;
    throw ConfigError("unknown BP update '" + std::string(s) + "' (valid: online, batch)");
}

void BpConfig::validate() const
{
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate))
        throw ConfigError("learning rate must be finite and non-negative");
    if (epochs < 1) throw ConfigError("epochs must be at least 1");
    if (stable_window < 1) throw ConfigError("stability window must be at least 1");
}

nlohmann::ordered_json BpConfig::to_json() const
{
    return {{"learning_rate", learning_rate},
            {"epochs", epochs},
            {"update", to_string(update)},
            {"seed", seed},
            {"stable_window", stable_window}};
}

metrics::RunReport run_bp(const BpConfig& cfg, const nn::Architecture& arch, const data::Dataset& data,
                          const RecordSink& sink)
{
    cfg.validate();
    arch.validate();
    if (arch.input_width() != data.feature_width() || arch.output_width() != data.classes())
        throw ShapeError("architecture does not fit dataset '" + data.name + "'");

    std::vector<double> params(arch.parameter_count());
    Rng rng = make_stream(cfg.seed, 0, 0);
    for (auto& p : params) p = uniform01(rng);
    nn::Network net = nn::make_network(arch, params);

    std::vector<metrics::IterationRecord> records;
    for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
        net = cfg.update == Update::online ? nn::bp_epoch(net, data, cfg.learning_rate)
                                           : nn::bp_step(net, data, cfg.learning_rate);
        const auto sc = metrics::score(net, data);
        const metrics::IterationRecord rec{epoch, sc.mean_sse(), sc.mean_sse(), sc.ccr(), 0, 0};
        records.push_back(rec);
        if (sink) sink(rec);
    }

    metrics::RunReport report;
    report.algorithm = "bp";
    report.dataset = metrics::DatasetInfo::from(data);
    report.config = cfg.to_json();
    report.config["architecture"] = arch.sizes;
    report.config["hidden_transfer"] = nn::to_string(arch.hidden);
    report.config["output_transfer"] = nn::to_string(arch.output);
    report.records = records;
    report.summary = metrics::summarize(records, cfg.stable_window);
    report.best_params = nn::flatten(net);
    return report;
}

} // namespace abcbp::bp
