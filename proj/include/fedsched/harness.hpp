#pragma once

#include <optional>
#include <string>

#include "fedsched/bounds.hpp"
#include "fedsched/config.hpp"
#include "fedsched/constants.hpp"
#include "fedsched/fed.hpp"
#include "fedsched/metrics.hpp"
#include "fedsched/optimizer.hpp"

namespace fedsched {

// Everything a run needs, materialized once from a config: dataset, holdout
// split, partition, initial parameters, resource and bound constants.
struct ExperimentSetup {
    ExperimentConfig cfg;
    LossModel model;
    Partition partition;
    ClientDataset holdout;  // rows == 0 when holdout = 0
    ParamVector initial;
    ResourceParams res;
    ConvergenceConstants constants;  // from config; delta_i left empty
};

ExperimentSetup prepare_experiment(const ExperimentConfig& cfg);

struct SimulateReport {
    Schedule schedule;
    Trajectory trajectory;
    std::vector<MetricsRecord> records;
    std::string summary;
};

// Runs one schedule (config tau/K unless overridden; K = 0 derives the largest
// feasible K). seed_offset derives the run's random stream from the base seed.
SimulateReport run_simulate(const ExperimentSetup& setup,
                            std::optional<Schedule> schedule = std::nullopt,
                            BudgetMode budget = BudgetMode::Enforce,
                            std::uint64_t seed_offset = 0, bool record_clients = false);

struct SweepPoint {
    long long tau = 0;
    bool feasible = false;
    Schedule schedule;
    double final_loss = 0.0;
    double final_accuracy = 0.0;
};

struct SweepReport {
    std::vector<SweepPoint> points;
    std::vector<MetricsRecord> records;  // per-round rows of every feasible run
    std::string summary;
};

// One budget-derived run per tau value (K = largest feasible). Infeasible tau
// values are reported in the summary, not fatal.
SweepReport run_sweep(const ExperimentSetup& setup, const std::vector<long long>& taus);

struct CompareArm {
    std::string name;
    Schedule schedule;
    double final_loss = 0.0;
    double final_accuracy = 0.0;
};

struct CompareReport {
    std::vector<CompareArm> arms;  // optimized first when available, then baselines
    std::vector<MetricsRecord> records;
    bool optimized_available = false;
    std::string summary;
};

// Closed-form optimized schedule vs fixed-tau baselines (tau = 1 and
// tau = tau_max) under the same budgets.
CompareReport run_compare(const ExperimentSetup& setup);

struct BoundsReport {
    Schedule schedule;
    ConvergenceConstants estimated;
    double measured_gap = 0.0;
    bool epsilon_from_config = false;
    std::optional<double> gap_bound;  // empty when the bound is vacuous
    double min_trainings = 0.0;       // steps needed for eps_target
    TightnessReport tightness;
    DeviationReport deviation;
    std::string summary;
    std::string csv;  // key,value rows
};

// Runs a recorded schedule, estimates the empirical constants from the
// trajectory plus perturbation probes, and evaluates the bound machinery.
BoundsReport run_bounds(const ExperimentSetup& setup);

struct SolveReport {
    TradeoffSolution solution;  // candidate table, possibly with nothing selected
    bool feasible = false;
    std::optional<Schedule> rounded;
    std::string table;  // aligned text table + notes
    std::string csv;    // candidate rows
};

// Closed-form candidate table for the configured budgets and constants.
SolveReport run_solve(const ExperimentSetup& setup);

}  // namespace fedsched
