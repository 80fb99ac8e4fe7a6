#include <CLI11.hpp>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "cpush/config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitConnectivity = 4;

int threads_from_env() {
    const char* env = std::getenv("CPUSH_THREADS");
    if (!env) return 0;
    return std::max(0, std::atoi(env));
}

struct Overrides {
    std::string config_path;
    int agents = -1;
    double beta = -1.0;
    double alpha_c = -1.0;
    double alpha_sigma = -1.0;
    long horizon = -1;
    long seed = -1;
    bool slow_step = false;
    std::string output;
    long log_every = -1;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--agents", ov.agents, "Number of agents");
    cmd->add_option("--beta", ov.beta, "Correction step constant in (0, 2)");
    cmd->add_option("--alpha-c", ov.alpha_c, "Step size numerator c");
    cmd->add_option("--alpha-sigma", ov.alpha_sigma, "Step size exponent in (0.5, 1]");
    cmd->add_option("--horizon", ov.horizon, "Iteration count T");
    cmd->add_option("--seed", ov.seed, "RNG seed");
    cmd->add_flag("--slow-step", ov.slow_step, "Use the conservative c = 1e-3 step size");
    cmd->add_option("--output", ov.output, "CSV output path");
    cmd->add_option("--log-every", ov.log_every, "Logging stride in iterations");
}

void apply(const Overrides& ov, cpush::RunConfig& cfg) {
    if (ov.agents >= 0) cfg.agents = ov.agents;
    if (ov.beta >= 0.0) cfg.beta = ov.beta;
    if (ov.alpha_c >= 0.0) cfg.alpha.c = ov.alpha_c;
    if (ov.alpha_sigma >= 0.0) cfg.alpha.sigma = ov.alpha_sigma;
    if (ov.slow_step) cfg.alpha.c = 1e-3;
    if (ov.horizon >= 0) cfg.horizon = ov.horizon;
    if (ov.seed >= 0) cfg.seed = static_cast<std::uint64_t>(ov.seed);
    if (!ov.output.empty()) cfg.output = ov.output;
    if (ov.log_every > 0) cfg.log_every = ov.log_every;
    cfg.threads = threads_from_env();
}

int do_run(cpush::RunConfig cfg) {
    cpush::BuiltRun run = cpush::build_run(cfg);
    std::ofstream csv(cfg.output, std::ios::binary);
    if (!csv) throw cpush::ConfigError("cannot open output file: " + cfg.output.string());
    cpush::RunArtifacts art = cpush::execute_run(run, csv);
    csv.close();

    std::ofstream summary_file(cfg.output.string() + ".summary.txt");
    cpush::write_summary(summary_file, run, art);
    cpush::write_summary(std::cout, run, art);
    std::cout << "csv: " << cfg.output.string() << "\n";
    return 0;
}

int do_validate(const cpush::RunConfig& cfg) {
    cpush::BuiltRun run = cpush::build_run(cfg);
    const int window = run.schedule.window();
    const long horizon = std::max<long>(cfg.horizon, 10L * run.schedule.n_nodes());
    const bool ok = cpush::verify_jointly_connected(run.schedule, horizon);
    std::cout << "window: " << window << "\n";
    std::cout << "jointly connected over horizon " << horizon << ": " << (ok ? "yes" : "no")
              << "\n";
    const long k_max = std::min<long>(10L * window, horizon - 1);
    auto spreads = cpush::product_decay_diagnostic(run.schedule, k_max);
    std::cout << "k spread_A spread_B\n";
    for (const auto& s : spreads) {
        if (s.k % window == 0)
            std::cout << s.k << " " << s.spread_a << " " << s.spread_b << "\n";
    }
    if (!ok) {
        std::cerr << "schedule could not be verified uniformly jointly strongly connected\n";
        return kExitConnectivity;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distributed constrained push-pull optimization simulator"};
    app.require_subcommand(1);

    Overrides run_ov, a_ov, b_ov, val_ov;

    auto* cmd_run = app.add_subcommand("run", "Run an experiment from a config file");
    cmd_run->add_option("--config", run_ov.config_path, "JSON config path")->required();
    add_common_flags(cmd_run, run_ov);

    auto* cmd_a = app.add_subcommand("case-a", "Built-in 8-agent rotating-graph experiment");
    cmd_a->add_option("--config", a_ov.config_path, "JSON config path overriding defaults");
    add_common_flags(cmd_a, a_ov);

    auto* cmd_b = app.add_subcommand("case-b", "Built-in random-graph experiment (default N=100)");
    cmd_b->add_option("--config", b_ov.config_path, "JSON config path overriding defaults");
    add_common_flags(cmd_b, b_ov);

    auto* cmd_val = app.add_subcommand("validate-graphs", "Verify joint connectivity and decay");
    cmd_val->add_option("--config", val_ov.config_path, "JSON config path")->required();
    add_common_flags(cmd_val, val_ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitConfig;
    }

    try {
        if (cmd_run->parsed()) {
            cpush::RunConfig cfg = cpush::parse_config(run_ov.config_path);
            apply(run_ov, cfg);
            return do_run(std::move(cfg));
        }
        if (cmd_a->parsed()) {
            cpush::RunConfig cfg = a_ov.config_path.empty()
                                       ? cpush::case_a_defaults()
                                       : cpush::parse_config(a_ov.config_path);
            apply(a_ov, cfg);
            return do_run(std::move(cfg));
        }
        if (cmd_b->parsed()) {
            cpush::RunConfig cfg = b_ov.config_path.empty()
                                       ? cpush::case_b_defaults()
                                       : cpush::parse_config(b_ov.config_path);
            apply(b_ov, cfg);
            return do_run(std::move(cfg));
        }
        cpush::RunConfig cfg = cpush::parse_config(val_ov.config_path);
        apply(val_ov, cfg);
        return do_validate(cfg);
    } catch (const cpush::ConnectivityError& e) {
        std::cerr << "connectivity error: " << e.what() << "\n";
        return kExitConnectivity;
    } catch (const cpush::NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const cpush::DegenerateConstraintError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const cpush::Error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }
}
