// Acceptance suite: one PASS/FAIL line per criterion. Exit status is 0 only
// when every criterion passes. `--soybean` checks only the Soybean shape and
// exits 77 (skipped) when the data file is not present.

#include "abcbp/abc.hpp"
#include "abcbp/error.hpp"
#include "abcbp/experiment.hpp"
#include "abcbp/ga.hpp"
#include "abcbp/metrics.hpp"
#include "abcbp/network.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <string>
#include <vector>

using namespace abcbp;
using cli::Algorithm;
using cli::RunSpec;

namespace {

const std::filesystem::path data_dir = ABCBP_TEST_DATA_DIR;

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

int failures = 0;
std::map<int, std::string> lines; // printed in criterion order at the end

void report(int id, const std::string& name, const std::function<Verdict()>& check)
{
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
        v = check();
    } catch (const std::exception& e) {
        v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!v.pass) ++failures;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s %2d ", v.pass ? "PASS" : "FAIL", id);
    lines[id] = buf + name + ": " + v.detail + fmt(" [%.1fs]", secs);
}

// Role counts seen after every cycle of every ABC run in this suite.
struct RoleLog {
    std::size_t cycles = 0;
    std::size_t violations = 0;
    void check(const metrics::IterationRecord& r, std::size_t n)
    {
        ++cycles;
        if (r.n_employed < 1 || r.n_scout < 1 || r.n_scout > n - 1 || r.n_employed + r.n_scout > n) ++violations;
    }
    void check_all(const metrics::RunReport& r, std::size_t n)
    {
        for (const auto& rec : r.records) check(rec, n);
    }
} roles;

RunSpec protocol(const std::string& dataset)
{
    RunSpec s;
    s.dataset = dataset;
    s.data_dir = data_dir;
    return s;
}

metrics::RunReport run_abc(const RunSpec& s, const data::Dataset& d, std::uint64_t seed)
{
    auto r = cli::run_experiment(s, d, seed);
    roles.check_all(r, s.abc.population);
    return r;
}

// ---- 1 ------------------------------------------------------------------

double loss(const nn::Architecture& arch, const std::vector<double>& p, const data::Dataset& d)
{
    return nn::total_sse(nn::make_network(arch, p), d);
}

Verdict gradient_oracle()
{
    Rng rng = make_stream(1001);
    const nn::Transfer kinds[] = {nn::Transfer::logistic, nn::Transfer::linear};
    double worst = 0.0;
    int nets = 0;
    while (nets < 50) {
        const std::size_t in = 1 + uniform_index(rng, 4);
        const std::size_t hid = 1 + uniform_index(rng, 4);
        const std::size_t out = 1 + uniform_index(rng, 3);
        nn::Architecture arch{{in, hid, out}, kinds[uniform_index(rng, 2)], kinds[uniform_index(rng, 2)]};
        if (arch.parameter_count() > 30) continue;
        ++nets;

        const std::size_t rows = 1 + uniform_index(rng, 6);
        data::Dataset d;
        d.features.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(in));
        d.targets = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(out));
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < in; ++c) d.features(Eigen::Index(r), Eigen::Index(c)) = uniform_symmetric(rng);
            const auto k = uniform_index(rng, out);
            d.targets(Eigen::Index(r), Eigen::Index(k)) = 1.0;
            d.labels.push_back(k);
        }
        for (std::size_t k = 0; k < out; ++k) d.class_names.push_back(std::to_string(k));

        std::vector<double> p(arch.parameter_count());
        for (auto& v : p) v = uniform_symmetric(rng);
        const auto g = nn::gradient(nn::make_network(arch, p), d);
        const double h = 1e-5;
        for (std::size_t k = 0; k < p.size(); ++k) {
            auto up = p;
            auto down = p;
            up[k] += h;
            down[k] -= h;
            const double fd = (loss(arch, up, d) - loss(arch, down, d)) / (2 * h);
            const double scale = std::max({std::abs(g[k]), std::abs(fd), 1e-6});
            worst = std::max(worst, std::abs(g[k] - fd) / scale);
        }
    }
    return {worst < 1e-4, "50 networks, max relative error " + fmt("%.2e", worst)};
}

// ---- 2 ------------------------------------------------------------------

Verdict best_so_far_monotone()
{
    auto s = protocol("iris");
    s.abc.ccr_threshold = 100.0; // run every one of the 100 cycles
    const auto d = cli::load_dataset(s);
    std::size_t cycles = 0;
    std::size_t bad = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto r = run_abc(s, d, seed);
        for (std::size_t i = 1; i < r.records.size(); ++i) {
            ++cycles;
            if (r.records[i].sse_best > r.records[i - 1].sse_best) ++bad;
        }
        if (r.records.size() != 100) return {false, "seed " + std::to_string(seed) + " stopped early"};
    }
    return {bad == 0, "20 runs x 100 cycles, " + std::to_string(bad) + " increases in " + std::to_string(cycles) +
                          " transitions"};
}

// ---- 3 ------------------------------------------------------------------

Verdict probability_normalization()
{
    Rng rng = make_stream(1003);
    double worst_sum = 0.0;
    std::size_t out_of_range = 0;
    for (int v = 0; v < 1000; ++v) {
        std::vector<double> f(1 + uniform_index(rng, 40));
        const int kind = v % 5;
        const double common = uniform01(rng) * 10.0;
        for (auto& x : f) {
            switch (kind) {
            case 0: x = common; break;                                     // all equal
            case 1: x = 0.0; break;                                        // all zero
            case 2: x = 1e6 - uniform01(rng) * 1e-3; break;                // near the cap
            case 3: x = uniform01(rng) < 0.3 ? 1e6 : uniform01(rng) * 1e-9; // mixed extremes
            default: x = uniform01(rng) * std::pow(10.0, double(uniform_index(rng, 12)) - 6);
            }
        }
        for (auto mode : {abc::ProbMode::classic, abc::ProbMode::literal}) {
            abc::AbcConfig cfg;
            cfg.prob_mode = mode;
            const auto p = abc::selection_probabilities(f, cfg);
            double sum = 0.0;
            for (double x : p) {
                if (!(x >= 0.0 && x <= 1.0)) ++out_of_range;
                sum += x;
            }
            worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
        }
    }
    return {worst_sum <= 1e-9 && out_of_range == 0,
            "1000 vectors x 2 modes, max |sum - 1| " + fmt("%.2e", worst_sum) + ", " + std::to_string(out_of_range) +
                " entries outside [0,1]"};
}

// ---- 4 ------------------------------------------------------------------

Verdict revert_bit_exact()
{
    const auto d = cli::load_dataset(protocol("iris"));
    const nn::Architecture arch{{4, 5, 3}};
    abc::AbcConfig cfg;
    cfg.population = 20;
    const auto colony = abc::evaluate(abc::init_population(cfg, arch), arch, d, cfg);
    Rng rng = make_stream(1004);
    std::size_t rejections = 0;
    std::size_t mismatches = 0;
    while (rejections < 1000) {
        const auto& old = colony.solutions[uniform_index(rng, colony.size())];
        abc::Solution candidate = old;
        switch (rejections % 4) {
        case 0: for (auto& p : candidate.params) p += 20.0 + uniform01(rng); break; // saturated, worse
        case 1: for (auto& p : candidate.params) p = std::numeric_limits<double>::quiet_NaN(); break;
        case 2: for (auto& p : candidate.params) p *= 1e300; break;                 // diverges
        default: break;                                                              // equal fitness
        }
        const auto kept = abc::greedy_retain_or_revert(old, candidate, arch, d, cfg);
        if (kept.accepted) continue;
        ++rejections;
        if (kept.solution.params.size() != old.params.size() ||
            std::memcmp(kept.solution.params.data(), old.params.data(), old.params.size() * sizeof(double)) != 0 ||
            kept.solution.fitness != old.fitness)
            ++mismatches;
    }
    return {mismatches == 0, "1000 rejections, " + std::to_string(mismatches) + " differ from the stored source"};
}

// ---- 5 ------------------------------------------------------------------

Verdict determinism()
{
    std::vector<std::string> datasets{"iris", "wine", "glass"};
    if (std::filesystem::exists(data_dir / data::builtin_filename("soybean"))) datasets.push_back("soybean");
    std::size_t triples = 0;
    std::size_t differ = 0;
    for (const auto& name : datasets) {
        auto s = protocol(name);
        s.abc.max_cycles = 20;
        s.abc.ccr_threshold = 100.0;
        const auto d = cli::load_dataset(s);
        for (auto algo : {Algorithm::abc, Algorithm::ga, Algorithm::bp}) {
            for (std::uint64_t seed : {1, 2}) {
                s.algo = algo;
                s.abc.threads = 1;
                const auto a = metrics::serialize_report(cli::run_experiment(s, d, seed));
                const auto b = metrics::serialize_report(cli::run_experiment(s, d, seed));
                s.abc.threads = 4;
                const auto par = cli::run_experiment(s, d, seed);
                if (algo == Algorithm::abc) roles.check_all(par, s.abc.population);
                const auto c = metrics::serialize_report(par);
                ++triples;
                if (a != b || a != c) ++differ;
            }
        }
    }
    return {differ == 0, std::to_string(triples) + " (algorithm, dataset, seed) triples on " +
                             std::to_string(datasets.size()) + " datasets, " + std::to_string(differ) +
                             " not byte-identical across repeat and 4-thread runs"};
}

// ---- 6 ------------------------------------------------------------------

// Extended precision throughout except the cosine argument: for ratios near
// 1e17 (a floored F_j) the cosine is ill-conditioned, so the argument is the
// correctly rounded double quotient the formula defines.
long double oracle_step(double fb, double fj, double eps)
{
    const double a = fb < eps ? eps : fb;
    const double b = fj < eps ? eps : fj;
    const long double ratio = a / b;
    return (static_cast<long double>(fb) - fj) + std::exp(std::cos(ratio)) - std::log(static_cast<long double>(a)) -
           std::log(static_cast<long double>(b));
}

Verdict move_bee_oracle()
{
    const abc::AbcConfig cfg;
    double worst = 0.0;
    std::size_t n = 0;
    for (int i = 0; i < 100; ++i) {
        for (int j = 0; j < 100; ++j) {
            const double fb = 1e6 * i / 99.0;
            const double fj = 1e6 * j / 99.0;
            const long double want = oracle_step(fb, fj, cfg.epsilon);
            const double got = abc::move_bee(fb, fj, cfg);
            const double rel = static_cast<double>(std::abs(got - want) / std::max(std::abs(want), 1.0L));
            worst = std::max(worst, rel);
            ++n;
        }
    }
    return {worst <= 1e-12, std::to_string(n) + " grid pairs on [0, 1e6]^2, max relative error " + fmt("%.2e", worst)};
}

// ---- 8, 9 ---------------------------------------------------------------

Verdict best_of_five(const std::string& name, double floor)
{
    const auto s = protocol(name);
    const auto d = cli::load_dataset(s);
    double best = 0.0;
    std::uint64_t best_seed = 0;
    std::string per_seed;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = run_abc(s, d, seed);
        if (r.summary.ccr_max > best) {
            best = r.summary.ccr_max;
            best_seed = seed;
        }
        per_seed += (seed > 1 ? " " : "") + fmt("%.2f", r.summary.ccr_max);
    }
    return {best >= floor, "max CCR " + fmt("%.2f", best) + "% (seed " + std::to_string(best_seed) + ", need >= " +
                               fmt("%.0f", floor) + "); per seed " + per_seed};
}

// ---- 10 -----------------------------------------------------------------

Verdict ordering_vs_ga()
{
    auto s = protocol("iris");
    s.seeds = {1, 2, 3, 4, 5};
    const auto result = cli::compare(s, {"iris"}, {Algorithm::abc, Algorithm::ga});
    for (std::size_t i = 0; i < 5; ++i) roles.check_all(result.reports[i], s.abc.population);
    const double abc_median = result.rows[0].sse_median;
    const double ga_median = result.rows[1].sse_median;
    return {abc_median < ga_median,
            "median final sse_avg ABC " + fmt("%.4f", abc_median) + " vs GA " + fmt("%.4f", ga_median)};
}

// ---- 11 -----------------------------------------------------------------

Verdict stability_reporting()
{
    // The CCR threshold is lifted so runs are free to settle; a run stops as
    // soon as its average CCR has held for the window.
    auto s = protocol("iris");
    s.abc.ccr_threshold = 100.0;
    s.abc.stop_on_stable = true;
    const auto d = cli::load_dataset(s);

    std::size_t stable = 0;
    std::string detail = "converging seeds 1-5:";
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto r = run_abc(s, d, seed);
        if (r.summary.ccr_stable && r.summary.cycles_run <= 100 && r.summary.stable_window == 10) {
            ++stable;
            detail += " " + fmt("%.2f", *r.summary.ccr_stable) + "@" + std::to_string(r.summary.cycles_run);
        } else {
            detail += " -";
        }
    }

    auto frozen = s;
    frozen.abc.learning_rate = 0.0;
    frozen.abc.movement = false;
    const auto r = run_abc(frozen, d, 1);
    const auto j = metrics::to_json(r);
    const bool marked = !r.summary.ccr_stable && j["summary"]["ccr_stable"] == "not stable" &&
                        cli::summary_line(r).find("ccr_stable=not stable") != std::string::npos &&
                        r.summary.cycles_run == 100;
    detail += "; eta=0 without movement, seed 1: " + std::string(marked ? "not stable" : "MISSING MARKER");
    for (std::uint64_t seed = 2; seed <= 5; ++seed) {
        const auto other = run_abc(frozen, d, seed);
        detail += std::string(seed == 2 ? " (seeds 2-5:" : "") + " " +
                  (other.summary.ccr_stable ? "stable" : "not-stable") + (seed == 5 ? ")" : "");
    }
    return {stable >= 1 && marked, detail};
}

// ---- 12 -----------------------------------------------------------------

bool shape_is(const data::Dataset& d, std::size_t rows, std::size_t cols, std::size_t classes)
{
    return d.samples() == rows && d.feature_width() == cols && d.classes() == classes;
}

std::string shape(const data::Dataset& d)
{
    return std::to_string(d.samples()) + "x" + std::to_string(d.feature_width()) + "/" + std::to_string(d.classes());
}

Verdict dataset_integrity()
{
    const auto iris = cli::load_dataset(protocol("iris"));
    const auto wine = cli::load_dataset(protocol("wine"));
    const auto glass = cli::load_dataset(protocol("glass"));
    // Glass: the class count is whatever the file contains.
    std::vector<std::string> glass_labels;
    for (auto l : glass.labels) glass_labels.push_back(glass.class_names[l]);
    std::sort(glass_labels.begin(), glass_labels.end());
    const auto file_classes = static_cast<std::size_t>(
        std::unique(glass_labels.begin(), glass_labels.end()) - glass_labels.begin());
    const bool ok = shape_is(iris, 150, 4, 3) && shape_is(wine, 178, 13, 3) && shape_is(glass, 214, 9, file_classes);
    std::string detail = "iris " + shape(iris) + ", wine " + shape(wine) + ", glass " + shape(glass);
    if (std::filesystem::exists(data_dir / data::builtin_filename("soybean")))
        detail += ", soybean checked by acceptance_soybean";
    else
        detail += "; soybean SKIP (data file absent, see acceptance_soybean)";
    return {ok, detail};
}

int soybean_only()
{
    if (!std::filesystem::exists(data_dir / data::builtin_filename("soybean"))) {
        std::printf("SKIP 12 soybean shape: %s not present (run tools/fetch_data.sh)\n",
                    (data_dir / data::builtin_filename("soybean")).string().c_str());
        return 77;
    }
    report(12, "dataset integrity (soybean)", [] {
        const auto d = cli::load_dataset(protocol("soybean"));
        return Verdict{shape_is(d, 47, 35, 4), "soybean " + shape(d)};
    });
    std::printf("%s\n", lines[12].c_str());
    return failures == 0 ? 0 : 1;
}

} // namespace

int main(int argc, char** argv)
{
    if (argc > 1 && std::strcmp(argv[1], "--soybean") == 0) return soybean_only();

    report(1, "gradient oracle", gradient_oracle);
    report(2, "best-so-far monotonicity", best_so_far_monotone);
    report(3, "probability normalization", probability_normalization);
    report(4, "revert bit-exactness", revert_bit_exact);
    report(5, "determinism", determinism);
    report(6, "move_bee scalar oracle", move_bee_oracle);
    report(8, "Iris best of 5 seeds", [] { return best_of_five("iris", 90.0); });
    report(9, "Wine best of 5 seeds", [] { return best_of_five("wine", 85.0); });
    report(10, "ordering against GA on Iris", ordering_vs_ga);
    report(11, "stability reporting", stability_reporting);
    report(12, "dataset integrity", dataset_integrity);
    // Role bounds are collected over every ABC run above.
    report(7, "role bounds", [] {
        return Verdict{roles.cycles > 0 && roles.violations == 0,
                       std::to_string(roles.cycles) + " cycles checked, " + std::to_string(roles.violations) +
                           " violations"};
    });
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::printf("%s\n", failures == 0 ? "ALL PASS" : (std::to_string(failures) + " FAILED").c_str());
    return failures == 0 ? 0 : 1;
}
