#pragma once

#include <vector>

#include "fedsched/dataset.hpp"
#include "fedsched/model.hpp"

namespace fedsched {

// Constants feeding the convergence bounds and the schedule optimizer.
// rho, beta, delta_i, delta and grad_f_star are empirical maxima over a probe
// set, so they are lower bounds of the true suprema.
struct ConvergenceConstants {
    double rho = 0.0;          // Lipschitz constant of the global loss
    double beta = 0.0;         // smoothness constant; reported, unused by the bounds
    double eta = 0.0;          // learning rate
    std::vector<double> delta_i;  // per-client gradient divergence caps
    double delta = 0.0;        // size-weighted average of delta_i
    double grad_f_star = 0.0;  // cap on the global gradient norm
    double epsilon = 0.0;      // residual gap of federated vs centralized training
    double tau_max = 20.0;     // overfitting cap on tau
};

// Empirical constants over a probe set of parameter vectors:
//   rho   = max |F(w) - F(w')| / ||w - w'||        over probe pairs
//   beta  = max ||grad F(w) - grad F(w')|| / ||w - w'||
//   delta_i = max_w ||grad F_i(w) - grad F(w)||
//   delta = sum(D_i delta_i) / D
//   grad_f_star = max_w ||grad F(w)||
// Pairs with coincident probes are skipped; throws std::invalid_argument when
// every pair coincides. eta / epsilon / tau_max are left for the caller.
ConvergenceConstants estimate_constants(const LossModel& model, const Partition& partition,
                                        const std::vector<ParamVector>& probes);

// Standard probe set: the points of a recorded trajectory plus `count` Gaussian
// perturbations of them (cycled), stddev `sigma` per coordinate.
std::vector<ParamVector> add_perturbations(std::vector<ParamVector> probes, std::size_t count,
                                           double sigma, Rng& rng);

}  // namespace fedsched
