#pragma once

#include <cstdint>
#include <vector>

#include "fedsched/dataset.hpp"
#include "fedsched/model.hpp"
#include "fedsched/resource.hpp"
#include "fedsched/schedule.hpp"

namespace fedsched {

enum class BudgetMode { Ignore, Enforce };
enum class DelayAccounting { Expected, Sampled };

struct RoundRecord {
    long long round = 0;     // aggregation index k, 1-based
    double loss = 0.0;       // weighted global loss after the aggregation
    double accuracy = 0.0;   // on the eval split; NaN when none was supplied
    double cum_delay_s = 0.0;
    double cum_energy_J = 0.0;
};

// Everything recorded while executing a schedule. Per-step client history is
// optional and only needed for the bound diagnostics.
struct Trajectory {
    ParamVector initial;
    ParamVector final_params;
    std::vector<ParamVector> global_after_agg;  // one entry per completed round
    std::vector<RoundRecord> rounds;
    long long planned_rounds = 0;
    long long completed_rounds = 0;
    bool truncated = false;  // a budget ran out before planned_rounds

    bool clients_recorded = false;
    // client_history[t-1][i] is client i's parameter after step t (post-aggregation
    // at aggregation steps); virtual_global[t-1] is the size-weighted average of
    // the client parameters at step t.
    std::vector<std::vector<ParamVector>> client_history;
    std::vector<ParamVector> virtual_global;
};

struct RunOptions {
    BudgetMode budget = BudgetMode::Ignore;
    DelayAccounting delay = DelayAccounting::Expected;
    bool record_clients = false;
    const ClientDataset* eval = nullptr;  // optional held-out split for accuracy
    std::uint64_t seed = 0;               // stream for sampled delays
};

// One gradient-descent step: params - eta * grad.
ParamVector local_step(const ParamVector& params, const LossModel& model,
                       const ClientDataset& data, double eta);

// Size-weighted average sum(D_i w_i) / D, accumulated in ascending client order.
ParamVector aggregate(const std::vector<ParamVector>& client_params,
                      const std::vector<std::size_t>& sizes);

// Weighted global loss sum(D_i F_i(params)) / D.
double global_loss(const Partition& partition, const LossModel& model,
                   const ParamVector& params);

// Runs the synchronous schedule: every client takes tau local full-batch steps,
// then all are replaced by the aggregate; repeated K times. In Enforce mode a
// round only executes if it fits in both remaining budgets, so recorded usage
// never exceeds t_tot / E_tot.
Trajectory run_schedule(const Schedule& schedule, const Partition& partition,
                        const LossModel& model, double eta, const ParamVector& initial,
                        const ResourceParams& res, const RunOptions& opts);

// Plain gradient descent on one dataset until ||grad|| < grad_tol or max_steps;
// returns the best (lowest-loss) iterate seen.
ParamVector minimize_pooled(const LossModel& model, const ClientDataset& data, double eta,
                            double grad_tol, long long max_steps);

}  // namespace fedsched
