#include "abcbp/metrics.hpp"

#include "abcbp/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace abcbp::metrics {

using json = nlohmann::ordered_json;

std::size_t argmax(const Eigen::Ref<const Eigen::VectorXd>& v)
{
    std::size_t best = 0;
    for (Eigen::Index i = 1; i < v.size(); ++i)
        if (v(i) > v(static_cast<Eigen::Index>(best))) best = static_cast<std::size_t>(i);
    return best;
}

Score score(const nn::Network& net, const data::Dataset& data)
{
    if (net.input_width() != data.feature_width() || net.output_width() != data.classes())
        throw ShapeError("network shape " + std::to_string(net.input_width()) + "->" +
                         std::to_string(net.output_width()) + " does not fit dataset " +
                         std::to_string(data.feature_width()) + "->" + std::to_string(data.classes()));
    Score s;
    s.samples = data.samples();
    for (Eigen::Index r = 0; r < data.features.rows(); ++r) {
        const Eigen::VectorXd p = nn::predict(net, data.features.row(r).transpose());
        s.sse += nn::sample_sse(data.targets.row(r).transpose(), p);
        if (argmax(p) == argmax(data.targets.row(r).transpose())) ++s.correct;
    }
    if (!std::isfinite(s.sse)) throw NumericError("sum of squared error is not finite");
    return s;
}

double correct_classification_rate(const nn::Network& net, const data::Dataset& data)
{
    if (data.samples() == 0) throw ShapeError("empty dataset");
    return score(net, data).ccr();
}

std::string_view to_string(Termination t)
{
    switch (t) {
    case Termination::threshold: return "threshold";
    case Termination::stable: return "stable";
    case Termination::mcn: return "mcn";
    }
    return "mcn";
}

RunSummary summarize(const std::vector<IterationRecord>& records, std::size_t window)
{
    if (records.empty()) throw StateError("cannot summarize an empty run");
    if (window == 0) throw ConfigError("stability window must be positive");
    RunSummary s;
    s.stable_window = window;
    s.cycles_run = records.size();
    s.final_sse = records.back().sse_avg;
    s.final_sse_best = records.back().sse_best;
    s.ccr_max = records.front().ccr_avg;
    s.ccr_min = records.front().ccr_avg;
    for (const auto& r : records) {
        s.ccr_max = std::max(s.ccr_max, r.ccr_avg);
        s.ccr_min = std::min(s.ccr_min, r.ccr_avg);
    }
    if (records.size() >= window) {
        const double last = records.back().ccr_avg;
        bool stable = true;
        for (std::size_t i = records.size() - window; i < records.size(); ++i)
            if (records[i].ccr_avg != last) stable = false;
        if (stable) s.ccr_stable = last;
    }
    return s;
}

DatasetInfo DatasetInfo::from(const data::Dataset& d)
{
    return {d.name, d.samples(), d.feature_width(), d.class_names, d.class_counts(), d.normalized};
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc()) throw NumericError("cannot format value");
    return std::string(buf, ptr);
}

json to_json(const RunReport& r)
{
    json j;
    j["schema_version"] = schema_version;
    j["algorithm"] = r.algorithm;
    j["command_line"] = r.command_line;
    j["dataset"] = {{"name", r.dataset.name},
                    {"samples", r.dataset.samples},
                    {"features", r.dataset.features},
                    {"classes", r.dataset.class_names.size()},
                    {"class_names", r.dataset.class_names},
                    {"class_counts", r.dataset.class_counts},
                    {"normalized", r.dataset.normalized}};
    j["config"] = r.config;

    json s;
    s["final_sse"] = r.summary.final_sse;
    s["final_sse_best"] = r.summary.final_sse_best;
    s["ccr_max"] = r.summary.ccr_max;
    s["ccr_min"] = r.summary.ccr_min;
    if (r.summary.ccr_stable)
        s["ccr_stable"] = *r.summary.ccr_stable;
    else
        s["ccr_stable"] = not_stable_marker;
    s["stable_window"] = r.summary.stable_window;
    s["cycles_run"] = r.summary.cycles_run;
    s["terminated_by"] = to_string(r.summary.terminated_by);
    if (r.summary.test_ccr) s["test_ccr"] = *r.summary.test_ccr;
    j["summary"] = s;

    json recs = json::array();
    for (const auto& rec : r.records)
        recs.push_back({{"cycle", rec.cycle},
                        {"sse_best", rec.sse_best},
                        {"sse_avg", rec.sse_avg},
                        {"ccr_avg", rec.ccr_avg},
                        {"n_employed", rec.n_employed},
                        {"n_scout", rec.n_scout}});
    j["records"] = recs;
    j["best_params"] = r.best_params;
    return j;
}

RunReport report_from_json(const json& j)
{
    try {
        if (j.at("schema_version").get<std::string>() != schema_version)
            throw ParseError("unsupported report schema '" + j.at("schema_version").get<std::string>() + "'", 0);
        RunReport r;
        r.algorithm = j.at("algorithm").get<std::string>();
        r.command_line = j.at("command_line").get<std::string>();
        const auto& d = j.at("dataset");
        r.dataset.name = d.at("name").get<std::string>();
        r.dataset.samples = d.at("samples").get<std::size_t>();
        r.dataset.features = d.at("features").get<std::size_t>();
        r.dataset.class_names = d.at("class_names").get<std::vector<std::string>>();
        r.dataset.class_counts = d.at("class_counts").get<std::vector<std::size_t>>();
        r.dataset.normalized = d.at("normalized").get<bool>();
        r.config = j.at("config");

        const auto& s = j.at("summary");
        r.summary.final_sse = s.at("final_sse").get<double>();
        r.summary.final_sse_best = s.at("final_sse_best").get<double>();
        r.summary.ccr_max = s.at("ccr_max").get<double>();
        r.summary.ccr_min = s.at("ccr_min").get<double>();
        if (s.at("ccr_stable").is_number()) r.summary.ccr_stable = s.at("ccr_stable").get<double>();
        r.summary.stable_window = s.at("stable_window").get<std::size_t>();
        r.summary.cycles_run = s.at("cycles_run").get<std::size_t>();
        const auto term = s.at("terminated_by").get<std::string>();
        if (term == "threshold")
            r.summary.terminated_by = Termination::threshold;
        else if (term == "stable")
            r.summary.terminated_by = Termination::stable;
        else if (term == "mcn")
            r.summary.terminated_by = Termination::mcn;
        else
            throw ParseError("unknown terminated_by '" + term + "'", 0);
        if (s.contains("test_ccr")) r.summary.test_ccr = s.at("test_ccr").get<double>();

        for (const auto& rec : j.at("records"))
            r.records.push_back({rec.at("cycle").get<std::size_t>(), rec.at("sse_best").get<double>(),
                                 rec.at("sse_avg").get<double>(), rec.at("ccr_avg").get<double>(),
                                 rec.at("n_employed").get<std::size_t>(), rec.at("n_scout").get<std::size_t>()});
        r.best_params = j.at("best_params").get<std::vector<double>>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("malformed run report: ") + e.what(), 0);
    }
}

std::string serialize_report(const RunReport& report)
{
    return to_json(report).dump(2) + "\n";
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("error writing '" + path.string() + "'");
}

} // namespace

void write_report(const RunReport& report, const std::filesystem::path& path)
{
    write_text(path, serialize_report(report));
}

RunReport read_report(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    json j = json::parse(buf.str(), nullptr, false);
    if (j.is_discarded()) throw ParseError(path.string() + ": not valid JSON", 0);
    return report_from_json(j);
}

std::string serialize_curves(const std::vector<IterationRecord>& records)
{
    std::string out(curves_header);
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.cycle);
        out += ',';
        out += format_double(r.sse_best);
        out += ',';
        out += format_double(r.sse_avg);
        out += ',';
        out += format_double(r.ccr_avg);
        out += '\n';
    }
    return out;
}

void write_curves(const std::vector<IterationRecord>& records, const std::filesystem::path& path)
{
    write_text(path, serialize_curves(records));
}

} // namespace abcbp::metrics
