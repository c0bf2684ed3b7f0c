// Command-line front end: configuration-driven Monte Carlo sweeps with CSV
// output. Exit codes: 0 success, 2 configuration error, 3 tolerated-failure
// rate breached.

#include <CLI11.hpp>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "psml/psml.hpp"

namespace {

struct CommonArgs {
    std::string preset;
    std::string config_path;
    std::string out_path = "psml_out.csv";
    std::optional<std::uint64_t> seed;
    std::optional<long> trials;
    std::optional<int> workers;
    std::optional<std::string> crb;
    std::optional<std::string> timing;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--preset", args.preset, "named built-in experiment preset");
    cmd->add_option("--config", args.config_path, "key-value config file");
    cmd->add_option("--seed", args.seed, "master seed (u64)");
    cmd->add_option("--trials", args.trials, "Monte Carlo repetitions per sweep point");
    cmd->add_option("--out", args.out_path, "output CSV path");
    cmd->add_option("--workers", args.workers, "worker thread count (0 = auto)");
    cmd->add_option("--crb", args.crb, "emit the empirical lower bound (on/off)");
    cmd->add_option("--timing", args.timing, "fill the runtime column (on/off)");
}

psml::ExperimentConfig resolve(const CommonArgs& args) {
    psml::ExperimentConfig cfg;
    bool have_base = false;
    if (!args.preset.empty()) {
        cfg = psml::find_preset(args.preset).config;
        have_base = true;
    }
    if (!args.config_path.empty()) {
        std::ifstream f(args.config_path);
        if (!f) throw psml::ConfigError("cannot open config file: " + args.config_path);
        std::stringstream ss;
        ss << f.rdbuf();
        psml::apply_config_text(cfg, ss.str());
        have_base = true;
    }
    if (!have_base) {
        throw psml::ConfigError("nothing to run: pass --preset and/or --config");
    }
    if (args.seed) cfg.seed = *args.seed;
    if (args.trials) cfg.trials = *args.trials;
    if (args.workers) cfg.workers = *args.workers;
    if (args.crb) cfg.emit_crb = psml::cfgdetail::parse_bool("--crb", *args.crb);
    if (args.timing) cfg.timing = psml::cfgdetail::parse_bool("--timing", *args.timing);
    psml::validate_config(cfg);
    return cfg;
}

void print_summary(const psml::ExperimentReport& report) {
    std::cout << psml::sweep_name(report.config.sweep_var) << " sweep, "
              << report.config.trials << " trials per point\n";
    for (const auto& cell : report.cells) {
        std::cout << "  " << psml::sweep_name(report.config.sweep_var) << "="
                  << cell.sweep_value << "  " << cell.estimator
                  << "  psi_bias=" << cell.psi_bias << "  psmse=" << cell.psmse;
        if (cell.has_runtime) std::cout << "  runtime_ms=" << cell.runtime_ms;
        if (cell.has_crb) std::cout << "  crb=" << cell.crb;
        if (cell.fail_rate > 0.0) std::cout << "  fail_rate=" << cell.fail_rate;
        std::cout << "\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"two-stage estimation-after-selection experiment runner"};
    app.require_subcommand(1);

    CommonArgs run_args;
    CLI::App* run_cmd = app.add_subcommand("run", "run a Monte Carlo experiment sweep");
    add_common(run_cmd, run_args);

    CommonArgs bench_args;
    CLI::App* bench_cmd =
        app.add_subcommand("bench", "measure per-estimate runtime over a sweep");
    add_common(bench_cmd, bench_args);

    CLI::App* presets_cmd = app.add_subcommand("presets", "preset utilities");
    presets_cmd->require_subcommand(1);
    CLI::App* presets_list = presets_cmd->add_subcommand("list", "list built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (presets_list->parsed()) {
            for (const auto& p : psml::presets()) {
                std::cout << p.name << "  -  " << p.description << "\n";
            }
            return 0;
        }
        if (run_cmd->parsed()) {
            const auto cfg = resolve(run_args);
            const auto report = psml::run_experiment(cfg);
            psml::emit_csv(report, run_args.out_path);
            print_summary(report);
            std::cout << "wrote " << run_args.out_path << "\n";
            return 0;
        }
        if (bench_cmd->parsed()) {
            const auto cfg = resolve(bench_args);
            const auto report = psml::bench_runtime(cfg);
            psml::emit_csv(report, bench_args.out_path);
            print_summary(report);
            std::cout << "wrote " << bench_args.out_path << "\n";
            return 0;
        }
    } catch (const psml::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const psml::FailureRateError& e) {
        std::cerr << "failure rate breached: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
