#include "abcbp/cli.hpp"

#include "abcbp/error.hpp"
#include "abcbp/experiment.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <ostream>

namespace abcbp::cli {

namespace {

struct Options {
    RunSpec spec;
    std::string algo = "abc";
    std::string step_mode = "stochastic";
    std::string prob_mode = "classic";
    std::string bp_update = "online";
    std::uint64_t seed = 1;
    std::vector<std::uint64_t> seeds;
    bool no_normalize = false;
    bool no_move = false;
    bool no_shuffle = false;
    std::string out;
    std::string curves;
    std::string data_dir;
    std::string class_column;
    std::vector<std::size_t> id_columns;
    std::string delimiter;
    bool header = false;
    bool quiet = false;

    std::vector<std::string> datasets;
    std::vector<std::string> algos = {"abc", "ga"};
    std::size_t jobs = 1;
    std::string report_dir;
};

std::string join_args(const std::vector<std::string>& args)
{
    std::string line = "abcbp";
    for (std::size_t i = 1; i < args.size(); ++i) {
        line += ' ';
        const auto& a = args[i];
        if (a.empty() || a.find_first_of(" \t\"'") != std::string::npos) {
            line += '\'';
            for (char c : a) line += c == '\'' ? std::string("'\\''") : std::string(1, c);
            line += '\'';
        } else {
            line += a;
        }
    }
    return line;
}

data::ClassColumn parse_class_column(const std::string& s)
{
    if (s == "first") return data::ClassColumn::first();
    if (s == "last") return data::ClassColumn::last();
    std::size_t idx = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), idx);
    if (ec != std::errc{} || p != s.data() + s.size())
        throw ConfigError("--class-column must be first, last or a 0-based column index");
    return data::ClassColumn::at(idx);
}

void finish_spec(Options& o, const std::vector<std::string>& args)
{
    auto& s = o.spec;
    s.algo = algorithm_from_string(o.algo);
    s.abc.step_mode = abc::step_mode_from_string(o.step_mode);
    s.abc.prob_mode = abc::prob_mode_from_string(o.prob_mode);
    s.abc.movement = !o.no_move;
    s.bp_update = bp::update_from_string(o.bp_update);
    s.normalize = !o.no_normalize;
    s.shuffle = !o.no_shuffle;
    s.seeds = o.seeds.empty() ? std::vector<std::uint64_t>{o.seed} : o.seeds;
    s.data_dir = o.data_dir;
    s.abc.seed = s.seeds.front();
    s.ga.seed = s.seeds.front();
    if (!o.class_column.empty() || !o.id_columns.empty() || !o.delimiter.empty() || o.header) {
        data::DatasetSpec layout = data::is_builtin(s.dataset) ? data::builtin_spec(s.dataset) : data::DatasetSpec{};
        if (!o.class_column.empty()) layout.class_column = parse_class_column(o.class_column);
        if (!o.id_columns.empty()) layout.id_columns = o.id_columns;
        if (!o.delimiter.empty()) {
            if (o.delimiter.size() != 1) throw ConfigError("--delimiter must be a single character");
            layout.delimiter = o.delimiter.front();
        }
        layout.header = o.header;
        s.layout = layout;
    }
    s.command_line = join_args(args);
    s.abc.validate();
    s.ga.population = s.abc.population;
    s.ga.generations = s.abc.max_cycles;
    s.ga.validate();
}

std::string default_stem(const RunSpec& s)
{
    const std::string name = data::is_builtin(s.dataset) ? s.dataset : std::filesystem::path(s.dataset).stem().string();
    return name + "_" + std::string(to_string(s.algo));
}

int run_single(const Options& o, std::ostream& out)
{
    const auto& spec = o.spec;
    const auto data = load_dataset(spec);
    const bool many = spec.seeds.size() > 1;
    const std::filesystem::path report_path = o.out.empty() ? default_stem(spec) + "_report.json" : o.out;
    const std::filesystem::path curves_path = o.curves.empty() ? default_stem(spec) + "_curves.csv" : o.curves;
    for (auto seed : spec.seeds) {
        const auto report = run_experiment(spec, data, seed);
        metrics::write_report(report, many ? per_seed_path(report_path, seed) : report_path);
        metrics::write_curves(report.records, many ? per_seed_path(curves_path, seed) : curves_path);
        if (!o.quiet) out << summary_line(report) << '\n';
    }
    return exit_ok;
}

int run_compare(Options& o, std::ostream& out)
{
    auto& spec = o.spec;
    if (o.seeds.empty()) spec.seeds = {1, 2, 3, 4, 5};
    std::vector<Algorithm> algos;
    for (const auto& a : o.algos) algos.push_back(algorithm_from_string(a));
    const auto datasets = o.datasets.empty() ? std::vector<std::string>{spec.dataset} : o.datasets;

    const auto result = compare(spec, datasets, algos, o.jobs);
    out << render_table(result.rows);
    if (!o.out.empty()) {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw IoError("cannot write '" + o.out + "'");
        f << comparison_to_json(spec, result.rows).dump(2) << '\n';
        if (!f) throw IoError("failed writing '" + o.out + "'");
    }
    if (!o.report_dir.empty()) {
        std::filesystem::create_directories(o.report_dir);
        for (const auto& r : result.reports) {
            const auto stem = r.dataset.name + "_" + r.algorithm + "_seed" + std::to_string(r.config.value("seed", 0ULL));
            metrics::write_report(r, std::filesystem::path(o.report_dir) / (stem + "_report.json"));
            metrics::write_curves(r.records, std::filesystem::path(o.report_dir) / (stem + "_curves.csv"));
        }
    }
    return exit_ok;
}

int run_inspect(const Options& o, std::ostream& out)
{
    const auto d = load_dataset(o.spec);
    out << d.name << ": " << d.samples() << " samples, " << d.feature_width() << " features, " << d.classes()
        << " classes\n";
    const auto counts = d.class_counts();
    for (std::size_t c = 0; c < d.classes(); ++c) out << "  " << d.class_names[c] << ": " << counts[c] << '\n';
    return exit_ok;
}

} // namespace

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    Options o;
    auto& s = o.spec;

    CLI::App app{"Train feed-forward classifiers with a bee colony, a genetic algorithm or back-propagation.", "abcbp"};
    app.fallthrough();

    app.add_option("--dataset", s.dataset, "iris, wine, glass, soybean, or a path to a data file")
        ->capture_default_str();
    app.add_option("--data-dir", o.data_dir, "Directory holding the builtin data files (default: $ABCBP_DATA_DIR)");
    app.add_option("--class-column", o.class_column, "Class label column: first, last or a 0-based index");
    app.add_option("--id-columns", o.id_columns, "0-based columns to drop before parsing");
    app.add_option("--delimiter", o.delimiter, "Field delimiter (default ,)");
    app.add_flag("--header", o.header, "Skip the first line of the data file");
    app.add_flag("--no-normalize", o.no_normalize, "Keep raw feature values instead of min-max scaling");
    app.add_flag("--no-shuffle", o.no_shuffle, "Train on rows in file order instead of a seeded random order");

    app.add_option("--algo", o.algo, "abc, ga or bp")->check(CLI::IsMember({"abc", "ga", "bp"}))->capture_default_str();
    app.add_option("--pop", s.abc.population, "Population size")->capture_default_str();
    app.add_option("--mcn", s.abc.max_cycles, "Maximum cycle number (generations, epochs)")->capture_default_str();
    app.add_option("--lr", s.abc.learning_rate, "Learning rate for back-propagation")->capture_default_str();
    app.add_option("--threshold", s.abc.ccr_threshold, "Stop once the average CCR exceeds this percentage")
        ->capture_default_str();
    app.add_option("--hidden", s.hidden, "Hidden layer sizes")->capture_default_str();
    app.add_option("--seed", o.seed, "Random seed")->capture_default_str();
    app.add_option("--seeds", o.seeds, "Several seeds, one run each");
    app.add_option("--step-mode", o.step_mode, "stochastic or literal")
        ->check(CLI::IsMember({"stochastic", "literal"}))
        ->capture_default_str();
    app.add_option("--prob-mode", o.prob_mode, "classic or literal")
        ->check(CLI::IsMember({"classic", "literal"}))
        ->capture_default_str();
    app.add_flag("--hybrid-bp,!--no-hybrid-bp", s.abc.hybrid_bp, "One back-propagation epoch per solution per cycle")
        ->capture_default_str();
    app.add_flag("--no-move", o.no_move, "Disable employed and onlooker moves");
    app.add_flag("--stop-on-stable", s.abc.stop_on_stable,
                 "Also stop once the average CCR held for --stable-window cycles");
    app.add_option("--divergence-cap", s.abc.divergence_cap, "Fitness assigned to diverged solutions")
        ->capture_default_str();
    app.add_option("--epsilon", s.abc.epsilon, "Floor inside the move formula")->capture_default_str();
    app.add_option("--stable-window", s.abc.stable_window, "Records the final CCR must hold to count as stable")
        ->capture_default_str();
    app.add_option("--threads", s.abc.threads, "Worker threads inside one run")->capture_default_str();
    app.add_option("--bp-update", o.bp_update, "online or batch (bp algorithm)")
        ->check(CLI::IsMember({"online", "batch"}))
        ->capture_default_str();
    app.add_option("--crossover-rate", s.ga.crossover_rate, "GA crossover probability")->capture_default_str();
    app.add_option("--mutation-rate", s.ga.mutation_rate, "GA per-gene mutation probability")->capture_default_str();
    app.add_option("--mutation-sigma", s.ga.mutation_sigma, "GA mutation standard deviation")->capture_default_str();
    app.add_option("--elitism", s.ga.elitism, "GA elites copied unchanged")->capture_default_str();
    app.add_option("--split", s.split, "Hold out this fraction of rows and report test CCR");
    app.add_option("--out", o.out, "Report path (JSON); compare writes its table here");
    app.add_option("--curves", o.curves, "Curves path (CSV)");
    app.add_flag("--quiet", o.quiet, "Do not print summary lines");

    auto* cmp = app.add_subcommand("compare", "Run several algorithms over seeds and print a comparison table");
    cmp->fallthrough();
    cmp->add_option("--datasets", o.datasets, "Datasets to compare (default: --dataset)");
    cmp->add_option("--algos", o.algos, "Algorithms to compare")->check(CLI::IsMember({"abc", "ga", "bp"}));
    cmp->add_option("--jobs", o.jobs, "Runs executed concurrently")->capture_default_str();
    cmp->add_option("--report-dir", o.report_dir, "Also write every run's report and curves here");

    auto* inspect = app.add_subcommand("inspect", "Print the shape and class counts of a dataset");
    inspect->fallthrough();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_config;
    }

    try {
        finish_spec(o, args);
        if (cmp->parsed()) return run_compare(o, out);
        if (inspect->parsed()) return run_inspect(o, out);
        return run_single(o, out);
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const ShapeError& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const ParseError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const IoError& e) {
        err << "data error: " << e.what() << '\n';
        return exit_data;
    } catch (const NumericError& e) {
        err << "numeric error: " << e.what() << '\n';
        return exit_numeric;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_numeric;
    }
}

} // namespace abcbp::cli
