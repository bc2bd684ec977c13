#include "abcbp/experiment.hpp"

#include "abcbp/error.hpp"
#include "abcbp/parallel.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#ifndef ABCBP_SOURCE_DATA_DIR
#define ABCBP_SOURCE_DATA_DIR "data"
#endif

namespace abcbp::cli {

std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::abc: return "abc";
    case Algorithm::ga: return "ga";
    case Algorithm::bp: return "bp";
    }
    return "unknown";
}

Algorithm algorithm_from_string(std::string_view s)
{
    if (s == "abc") return Algorithm::abc;
    if (s == "ga") return Algorithm::ga;
    if (s == "bp") return Algorithm::bp;
    throw ConfigError("unknown algorithm '" + std::string(s) + "' (valid: abc, ga, bp)");
}

std::filesystem::path default_data_dir()
{
    if (const char* env = std::getenv("ABCBP_DATA_DIR"); env && *env) return env;
    if (std::filesystem::is_directory("data")) return "data";
    return ABCBP_SOURCE_DATA_DIR;
}

data::Dataset load_dataset(const RunSpec& spec)
{
    data::Dataset d;
    if (data::is_builtin(spec.dataset)) {
        auto layout = spec.layout.value_or(data::builtin_spec(spec.dataset));
        layout.normalize = spec.normalize;
        const auto dir = spec.data_dir.empty() ? default_data_dir() : spec.data_dir;
        d = data::load_csv(dir / data::builtin_filename(spec.dataset), layout);
        d.name = spec.dataset;
    } else if (std::filesystem::is_regular_file(spec.dataset)) {
        auto layout = spec.layout.value_or(data::DatasetSpec{});
        layout.normalize = spec.normalize;
        d = data::load_csv(spec.dataset, layout);
    } else {
        throw ConfigError("unknown dataset '" + spec.dataset +
                          "' (valid: iris, wine, glass, soybean, or a path to a data file)");
    }
    return d;
}

nn::Architecture architecture_for(const RunSpec& spec, const data::Dataset& data)
{
    nn::Architecture arch;
    arch.sizes.push_back(data.feature_width());
    for (auto h : spec.hidden) arch.sizes.push_back(h);
    arch.sizes.push_back(data.classes());
    arch.validate();
    return arch;
}

metrics::RunReport run_experiment(const RunSpec& spec, const data::Dataset& full, std::uint64_t seed,
                                  const std::function<void(const metrics::IterationRecord&)>& sink)
{
    data::Dataset train = full;
    std::optional<data::Dataset> test;
    if (spec.split) {
        auto parts = data::split(full, *spec.split, seed);
        train = std::move(parts.first);
        test = std::move(parts.second);
    }
    if (spec.shuffle) train = data::shuffle(train, seed);
    const auto arch = architecture_for(spec, train);

    metrics::RunReport report;
    switch (spec.algo) {
    case Algorithm::abc: {
        auto cfg = spec.abc;
        cfg.seed = seed;
        report = abc::run(cfg, arch, train, sink);
        break;
    }
    case Algorithm::ga: {
        auto cfg = spec.ga;
        cfg.seed = seed;
        cfg.population = spec.abc.population;
        cfg.generations = spec.abc.max_cycles;
        cfg.divergence_cap = spec.abc.divergence_cap;
        cfg.stable_window = spec.abc.stable_window;
        cfg.threads = spec.abc.threads;
        report = ga::run_ga(cfg, arch, train, sink);
        break;
    }
    case Algorithm::bp: {
        bp::BpConfig cfg;
        cfg.seed = seed;
        cfg.learning_rate = spec.abc.learning_rate;
        cfg.epochs = spec.abc.max_cycles;
        cfg.update = spec.bp_update;
        cfg.stable_window = spec.abc.stable_window;
        report = bp::run_bp(cfg, arch, train, sink);
        break;
    }
    }

    if (spec.split) {
        report.config["split"] = *spec.split;
        const auto net = nn::make_network(arch, report.best_params);
        report.summary.test_ccr = metrics::correct_classification_rate(net, *test);
    }
    report.config["shuffle"] = spec.shuffle;
    report.command_line = spec.command_line;
    return report;
}

namespace {

std::string fixed(double v, int digits)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

std::string summary_line(const metrics::RunReport& r)
{
    std::ostringstream out;
    out << r.dataset.name << ' ' << r.algorithm << " seed=" << r.config.value("seed", std::uint64_t{0})
        << " cycles=" << r.summary.cycles_run << " sse_avg=" << fixed(r.summary.final_sse, 4)
        << " sse_best=" << fixed(r.summary.final_sse_best, 4) << " ccr_max=" << fixed(r.summary.ccr_max, 2)
        << " ccr_min=" << fixed(r.summary.ccr_min, 2) << " ccr_stable="
        << (r.summary.ccr_stable ? fixed(*r.summary.ccr_stable, 2) : std::string(metrics::not_stable_marker))
        << " terminated_by=" << metrics::to_string(r.summary.terminated_by);
    if (r.summary.test_ccr) out << " test_ccr=" << fixed(*r.summary.test_ccr, 2);
    return out.str();
}

std::filesystem::path per_seed_path(const std::filesystem::path& path, std::uint64_t seed)
{
    auto out = path;
    out.replace_filename(path.stem().string() + "_seed" + std::to_string(seed) + path.extension().string());
    return out;
}

double median(std::vector<double> values)
{
    if (values.empty()) throw StateError("median of no values");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

ComparisonRow summarize_runs(const std::string& dataset, Algorithm algo,
                             const std::vector<metrics::RunReport>& reports, const std::vector<std::uint64_t>& seeds)
{
    if (reports.empty() || reports.size() != seeds.size()) throw StateError("comparison row needs one report per seed");
    ComparisonRow row;
    row.dataset = dataset;
    row.algo = algo;
    row.runs = reports.size();
    std::vector<double> sse;
    std::size_t best = 0;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const auto& s = reports[i].summary;
        sse.push_back(s.final_sse);
        if (s.final_sse < reports[best].summary.final_sse) best = i;
        if (s.ccr_stable) ++row.stable_runs;
        row.ccr_max_over_seeds = std::max(row.ccr_max_over_seeds, s.ccr_max);
    }
    row.sse_median = median(sse);
    row.sse_best = reports[best].summary.final_sse;
    row.best_seed = seeds[best];
    row.ccr_max = reports[best].summary.ccr_max;
    row.ccr_min = reports[best].summary.ccr_min;
    row.ccr_stable = reports[best].summary.ccr_stable;
    return row;
}

Comparison compare(const RunSpec& base, const std::vector<std::string>& datasets, const std::vector<Algorithm>& algos,
                   std::size_t jobs)
{
    if (base.seeds.empty()) throw ConfigError("comparison needs at least one seed");
    if (datasets.empty() || algos.empty()) throw ConfigError("comparison needs a dataset and an algorithm");

    std::vector<data::Dataset> loaded;
    for (const auto& name : datasets) {
        RunSpec s = base;
        s.dataset = name;
        loaded.push_back(load_dataset(s));
    }

    struct Job {
        std::size_t dataset;
        Algorithm algo;
        std::uint64_t seed;
    };
    std::vector<Job> plan;
    for (std::size_t d = 0; d < datasets.size(); ++d)
        for (auto a : algos)
            for (auto seed : base.seeds) plan.push_back({d, a, seed});

    Comparison out;
    out.reports.resize(plan.size());
    parallel_for(plan.size(), jobs, [&](std::size_t i) {
        RunSpec s = base;
        s.dataset = datasets[plan[i].dataset];
        s.algo = plan[i].algo;
        s.abc.threads = 1;
        out.reports[i] = run_experiment(s, loaded[plan[i].dataset], plan[i].seed);
    });

    const std::size_t per_row = base.seeds.size();
    for (std::size_t start = 0; start < plan.size(); start += per_row) {
        std::vector<metrics::RunReport> group(out.reports.begin() + static_cast<std::ptrdiff_t>(start),
                                              out.reports.begin() + static_cast<std::ptrdiff_t>(start + per_row));
        out.rows.push_back(summarize_runs(datasets[plan[start].dataset], plan[start].algo, group, base.seeds));
    }
    return out;
}

std::string render_table(const std::vector<ComparisonRow>& rows)
{
    const std::vector<std::string> head = {"Dataset", "Algorithm", "Runs", "SSE median", "SSE best",
                                           "CCR max", "CCR min",   "CCR stable", "Stable runs"};
    std::vector<std::vector<std::string>> cells;
    for (const auto& r : rows) {
        const std::string algo = r.algo == Algorithm::abc ? "ABCBPNN" : r.algo == Algorithm::ga ? "GABPNN" : "BPNN";
        cells.push_back({r.dataset, algo, std::to_string(r.runs), fixed(r.sse_median, 4), fixed(r.sse_best, 4),
                         fixed(r.ccr_max, 2), fixed(r.ccr_min, 2),
                         r.ccr_stable ? fixed(*r.ccr_stable, 2) : std::string(metrics::not_stable_marker),
                         std::to_string(r.stable_runs) + "/" + std::to_string(r.runs)});
    }
    std::vector<std::size_t> width(head.size());
    for (std::size_t c = 0; c < head.size(); ++c) {
        width[c] = head[c].size();
        for (const auto& row : cells) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream out;
    auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << row[c];
            if (c + 1 < row.size())
                out << std::string(width[c] - row[c].size() + 2, ' ');
            else
                out << '\n';
        }
    };
    emit(head);
    std::size_t total = 0;
    for (auto w : width) total += w + 2;
    out << std::string(total - 2, '-') << '\n';
    for (const auto& row : cells) emit(row);
    return out.str();
}

nlohmann::ordered_json comparison_to_json(const RunSpec& base, const std::vector<ComparisonRow>& rows)
{
    nlohmann::ordered_json j;
    j["schema_version"] = "abcbp.comparison/1";
    j["command_line"] = base.command_line;
    j["seeds"] = base.seeds;
    j["abc_config"] = base.abc.to_json();
    j["ga_config"] = base.ga.to_json();
    j["hidden"] = base.hidden;
    auto arr = nlohmann::ordered_json::array();
    for (const auto& r : rows) {
        nlohmann::ordered_json row;
        row["dataset"] = r.dataset;
        row["algorithm"] = to_string(r.algo);
        row["runs"] = r.runs;
        row["sse_median"] = r.sse_median;
        row["sse_best"] = r.sse_best;
        row["best_seed"] = r.best_seed;
        row["ccr_max"] = r.ccr_max;
        row["ccr_min"] = r.ccr_min;
        if (r.ccr_stable)
            row["ccr_stable"] = *r.ccr_stable;
        else
            row["ccr_stable"] = metrics::not_stable_marker;
        row["stable_runs"] = r.stable_runs;
        row["ccr_max_over_seeds"] = r.ccr_max_over_seeds;
        arr.push_back(row);
    }
    j["rows"] = arr;
    return j;
}

} // namespace abcbp::cli
