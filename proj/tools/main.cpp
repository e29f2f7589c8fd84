#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "fedsched/harness.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_path;
    bool enforce_budget = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "experiment config file")
        ->check(CLI::ExistingFile);
    cmd->add_option("--seed", args.seed, "override the config seed");
    cmd->add_option("--out", args.out_path, "write CSV output to this path");
    cmd->add_flag("--enforce-budget", args.enforce_budget,
                  "stop a run once a budget would be exceeded");
}

fedsched::ExperimentSetup make_setup(const CommonArgs& args) {
    fedsched::ExperimentConfig cfg;
    if (!args.config_path.empty()) cfg = fedsched::load_config_file(args.config_path);
    if (args.seed) cfg.seed = *args.seed;
    return fedsched::prepare_experiment(cfg);
}

void maybe_write(const std::string& path, const std::string& content) {
    if (path.empty()) return;
    fedsched::write_text_file(path, content);
    std::cout << "wrote " << path << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"federated training schedule simulator and budget-constrained optimizer"};
    app.require_subcommand(1);

    CommonArgs solve_args, sim_args, sweep_args, bounds_args, compare_args;
    auto* solve = app.add_subcommand("solve", "closed-form schedule candidates");
    add_common(solve, solve_args);
    auto* simulate = app.add_subcommand("simulate", "run one schedule");
    add_common(simulate, sim_args);
    auto* sweep = app.add_subcommand("sweep", "one budget-derived run per tau value");
    add_common(sweep, sweep_args);
    auto* bounds = app.add_subcommand("bounds", "convergence-bound report");
    add_common(bounds, bounds_args);
    auto* compare = app.add_subcommand("compare", "optimized schedule vs fixed-tau baselines");
    add_common(compare, compare_args);

    CLI11_PARSE(app, argc, argv);

    try {
        if (solve->parsed()) {
            auto setup = make_setup(solve_args);
            auto rep = fedsched::run_solve(setup);
            std::cout << rep.table;
            maybe_write(solve_args.out_path, rep.csv);
            return rep.feasible ? 0 : 2;
        }
        if (simulate->parsed()) {
            auto setup = make_setup(sim_args);
            auto rep = fedsched::run_simulate(setup, std::nullopt,
                                              sim_args.enforce_budget
                                                  ? fedsched::BudgetMode::Enforce
                                                  : fedsched::BudgetMode::Ignore);
            std::cout << rep.summary;
            maybe_write(sim_args.out_path, fedsched::metrics_to_csv(rep.records));
            return 0;
        }
        if (sweep->parsed()) {
            auto setup = make_setup(sweep_args);
            auto rep = fedsched::run_sweep(setup, setup.cfg.sweep_taus);
            std::cout << rep.summary;
            maybe_write(sweep_args.out_path, fedsched::metrics_to_csv(rep.records));
            return 0;
        }
        if (bounds->parsed()) {
            auto setup = make_setup(bounds_args);
            auto rep = fedsched::run_bounds(setup);
            std::cout << rep.summary;
            maybe_write(bounds_args.out_path, rep.csv);
            return 0;
        }
        if (compare->parsed()) {
            auto setup = make_setup(compare_args);
            auto rep = fedsched::run_compare(setup);
            std::cout << rep.summary;
            maybe_write(compare_args.out_path, fedsched::metrics_to_csv(rep.records));
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
