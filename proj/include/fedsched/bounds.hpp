#pragma once

#include <array>
#include <optional>

#include "fedsched/constants.hpp"
#include "fedsched/fed.hpp"

namespace fedsched {

// Linear envelope bounding how far client i's parameters can drift from the
// final global model after t local steps:
//   (delta_i + grad_f_star) * eta * t - tau / rho.
// The closed form is negative for small t; callers treat only positive values
// as an active bound.
double deviation_envelope(double t, double delta_i, const ConvergenceConstants& c,
                          double tau);

// Upper bound on F(w(T)) - F(w*):
//   epsilon^2 / (rho*eta*(delta + grad_f_star) - tau + rho*eta*grad_f_star*T)
// using the aggregate divergence delta. Returns nullopt when the denominator
// is not positive (the bound is vacuous there, which is not a numeric error).
std::optional<double> loss_gap_bound(double T, double tau, const ConvergenceConstants& c);

// Same bound with a single client's divergence in place of the aggregate.
std::optional<double> loss_gap_bound_for_client(double T, double tau,
                                                const ConvergenceConstants& c,
                                                double delta_i);

// Inverse of loss_gap_bound in T: the least number of local steps for which
// the bound reaches eps_target.
double min_trainings_for_gap(double eps_target, const ConvergenceConstants& c, double tau);

// Positive-collinearity diagnostics for the four tightness conditions:
//   1. the shared initial parameters vs the final global model
//   2. every client gradient vs the global gradient, at each recorded point
//   3. every client parameter vs the weighted global average, at each step
//   4. each global step vs the negative global gradient (best-fit step size)
// Residuals are relative to the reference vector's norm; a condition holds when
// its worst residual is below `tol` and every fitted coefficient is positive.
struct TightnessReport {
    struct Condition {
        bool satisfied = false;
        double max_residual = 0.0;
        double min_coefficient = 0.0;
        long long points = 0;
    };
    std::array<Condition, 4> conditions;
    bool all_satisfied() const {
        for (const auto& c : conditions)
            if (!c.satisfied) return false;
        return true;
    }
};

TightnessReport check_tightness_conditions(const Trajectory& traj, const Partition& partition,
                                           const LossModel& model, double tol = 1e-6);

// Diagnostic comparison of a recorded run against the deviation envelope and
// the local-gradient cap ||grad F_i|| <= delta_i + grad_f_star. Violations are
// reported, never thrown: estimated constants are lower bounds of the true
// suprema, so empirical excursions are possible.
struct DeviationReport {
    long long envelope_points = 0;     // (i, t) pairs with a positive envelope
    long long envelope_violations = 0;
    double max_envelope_excess = 0.0;  // worst ||w_i(t) - w(T)|| - envelope
    long long gradcap_points = 0;
    long long gradcap_violations = 0;
    double max_gradcap_ratio = 0.0;    // worst ||grad F_i|| / (delta_i + grad_f_star)
};

DeviationReport verify_local_deviation_bound(const Trajectory& traj,
                                             const Partition& partition,
                                             const LossModel& model,
                                             const ConvergenceConstants& c, double tau);

}  // namespace fedsched
