#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fedsched/constants.hpp"
#include "fedsched/resource.hpp"
#include "fedsched/schedule.hpp"

namespace fedsched {

// Surrogate objective tau - rho*eta*grad_f_star * K * tau; lower is better.
double surrogate_objective(double tau, double K, const ConvergenceConstants& c);

// One continuous stationary point of the budgeted schedule problem.
// EnergyBinding:  the energy budget is tight, the delay budget slack.
// BothBinding:    both budgets are tight (root of the budget-ratio quadratic).
// The remaining two stationarity patterns never yield a usable schedule
// (without any active budget the tau-derivative forces tau = 0, and with only
// the delay budget active the derivation collapses to a negative tau), so they
// are rejected up front rather than enumerated.
struct KktCandidate {
    enum class Case { EnergyBinding, BothBinding };
    Case kkt_case = Case::EnergyBinding;
    double tau = 0.0;
    double K = 0.0;
    double discriminant = 0.0;  // of the both-binding quadratic; shared by all rows
    double objective = 0.0;
    bool feasible = false;
    std::string reject_reason;      // empty when feasible
    double delay_residual = 0.0;    // relative slack/violation of each budget
    double energy_residual = 0.0;
};

struct TradeoffSolution {
    std::vector<KktCandidate> candidates;
    std::optional<std::size_t> selected;  // index of the best feasible candidate
    double objective_coeff = 0.0;         // rho*eta*grad_f_star

    const KktCandidate& selected_candidate() const { return candidates.at(selected.value()); }
};

// Raised when no candidate (or no integer neighbor) satisfies both budgets.
// Carries the full candidate table for reporting.
class InfeasibleBudgetError : public std::runtime_error {
public:
    InfeasibleBudgetError(std::string message, TradeoffSolution diagnostics)
        : std::runtime_error(std::move(message)), solution(std::move(diagnostics)) {}
    TradeoffSolution solution;
};

// Evaluates the closed-form candidates, filters by tau >= 1, K >= 1, a
// nonnegative discriminant (for the both-binding case) and both budgets, and
// selects the feasible candidate with the lowest surrogate objective.
// Throws InfeasibleBudgetError when nothing survives.
TradeoffSolution solve_closed_form(const ResourceParams& params,
                                   const ConvergenceConstants& constants);

// Exhaustive integer minimizer of the surrogate objective over
// tau in [tau_lo, tau_hi] x K in [K_lo, K_hi] subject to both budgets.
// Ties break toward smaller tau, then smaller K.
struct GridResult {
    Schedule schedule;
    double objective = 0.0;
};
GridResult grid_oracle(const ResourceParams& params, const ConvergenceConstants& constants,
                       long long tau_lo, long long tau_hi, long long K_lo, long long K_hi);

// Integer schedule from the selected continuous candidate: tries floor/ceil of
// tau clamped to [1, tau_max], recomputes K as the largest feasible integer for
// each, and keeps the best surrogate objective. Never returns an infeasible
// schedule; throws InfeasibleBudgetError when no integer neighbor fits.
Schedule round_and_clamp(const TradeoffSolution& solution, double tau_max,
                         const ResourceParams& params, const ConvergenceConstants& constants);

const char* kkt_case_name(KktCandidate::Case c);

}  // namespace fedsched
