// nonbloch: run experiments and render their CSV output as SVG.
//
//   nonbloch run --preset fig2b --task evolve --out out [--check] [--threads N]
//   nonbloch run --config experiment.json [--check]
//   nonbloch plot out/evolve/trace.csv [--out figs]
//   nonbloch presets

#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "nonbloch/config.hpp"
#include "nonbloch/plot.hpp"
#include "nonbloch/presets.hpp"
#include "nonbloch/runner.hpp"

namespace fs = std::filesystem;
using namespace nonbloch;

namespace {

int summarize(const RunResult& result, bool check) {
    for (const auto& t : result.tasks) {
        std::cout << t.task << ": " << (t.error ? "error" : "ok") << "\n";
        for (const auto& p : t.pairs)
            std::cout << "  " << (p.pass ? "pass" : "FAIL") << "  [" << p.kind << "] " << p.name
                      << "  predicted " << p.predicted << "  measured " << p.fitted << "  tol " << p.tolerance
                      << (p.relative ? " (rel)" : "") << "\n";
        for (const auto& n : t.notes) std::cout << "  note: " << n << "\n";
    }
    if (result.failed()) return 2;
    if (check && !result.checks_pass()) {
        std::cerr << "check failed: some prediction/fit pairs are outside tolerance\n";
        return 3;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Edge Lyapunov exponents of non-Hermitian lattices"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "run the tasks of a preset or a config file");
    std::string preset_name, config_path, out_dir = "out";
    std::vector<std::string> tasks;
    bool check = false;
    int threads = 0;
    auto* preset_opt = run->add_option("--preset", preset_name, "named parameter set");
    auto* config_opt = run->add_option("--config", config_path, "experiment JSON file")->check(CLI::ExistingFile);
    preset_opt->excludes(config_opt);
    run->add_option("--task", tasks, "task(s) to run (overrides the config's list)")
        ->check(CLI::IsMember(task_names()));
    auto* out_opt = run->add_option("--out", out_dir, "output directory");
    run->add_flag("--check", check, "exit nonzero when a prediction/fit pair is outside tolerance");
    run->add_option("--threads", threads, "worker threads (default NONBLOCH_THREADS or all cores)")
        ->check(CLI::NonNegativeNumber);

    auto* plot = app.add_subcommand("plot", "render CSV files written by run as SVG");
    std::vector<std::string> csvs;
    std::string plot_out;
    plot->add_option("csv", csvs, "CSV files")->required()->check(CLI::ExistingFile);
    plot->add_option("--out", plot_out, "directory for the SVG files (default: next to each CSV)");

    auto* list = app.add_subcommand("presets", "list preset names");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*list) {
            for (const auto& n : preset_names()) std::cout << n << "\n";
            return 0;
        }
        if (*plot) {
            for (const auto& c : csvs) {
                const fs::path csv(c);
                const fs::path dir = plot_out.empty() ? csv.parent_path() : fs::path(plot_out);
                std::cout << plot_file(csv, dir.empty() ? fs::path(".") : dir).string() << "\n";
            }
            return 0;
        }

        ExperimentConfig config;
        if (!config_path.empty()) {
            config = parse_config(read_json(config_path));
        } else if (!preset_name.empty()) {
            config = preset_config(preset_name, {});
        } else {
            std::cerr << "run: one of --preset and --config is required\n";
            return 1;
        }
        if (!tasks.empty()) config.tasks = tasks;
        if (out_opt->count() > 0 || config_path.empty()) config.out = out_dir;
        if (threads > 0) config.threads = threads;
        if (config.tasks.empty()) {
            std::cout << "no tasks\n";
            return 0;
        }
        const RunResult result = run_experiment(config);
        std::cout << "manifest: " << (fs::path(config.out) / "manifest.json").string() << " (config "
                  << result.config_hash << ")\n";
        return summarize(result, check);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
