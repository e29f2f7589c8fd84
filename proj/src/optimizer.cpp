#include "fedsched/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fedsched {

double surrogate_objective(double tau, double K, const ConvergenceConstants& c) {
    return tau - c.rho * c.eta * c.grad_f_star * K * tau;
}

namespace {

void fill_residuals(KktCandidate& cand, const ResourceParams& p) {
    const double delay = p.delay_coeff() * cand.K * cand.tau * cand.tau +
                         p.comm_delay() * cand.K;
    const double energy = p.train_energy() * cand.K * cand.tau + p.comm_energy() * cand.K;
    cand.delay_residual = (delay - p.t_tot) / p.t_tot;
    cand.energy_residual = (energy - p.E_tot) / p.E_tot;
}

void finish_candidate(KktCandidate& cand, const ResourceParams& p,
                      const ConvergenceConstants& c) {
    cand.objective = surrogate_objective(cand.tau, cand.K, c);
    fill_residuals(cand, p);
    if (!(cand.tau >= 1.0)) {
        cand.reject_reason = "tau < 1";
    } else if (!(cand.K >= 1.0)) {
        cand.reject_reason = "K < 1";
    } else if (cand.delay_residual > 1e-9) {
        cand.reject_reason = "delay budget exceeded";
    } else if (cand.energy_residual > 1e-9) {
        cand.reject_reason = "energy budget exceeded";
    } else {
        cand.feasible = true;
    }
}

}  // namespace

TradeoffSolution solve_closed_form(const ResourceParams& params,
                                   const ConvergenceConstants& constants) {
    const double q = constants.rho * constants.eta * constants.grad_f_star;
    if (!(q > 0.0))
        throw std::invalid_argument("solve_closed_form: rho*eta*grad_f_star must be positive");
    if (!(params.t_tot > 0.0) || !(params.E_tot > 0.0))
        throw std::invalid_argument("solve_closed_form: budgets must be positive");

    const double e_cm = params.comm_energy();
    const double e_tr = params.train_energy();
    const double t_cm = params.comm_delay();
    const double c_delay = params.delay_coeff();
    const double E_tot = params.E_tot;
    const double t_tot = params.t_tot;

    TradeoffSolution sol;
    sol.objective_coeff = q;

    // Both-binding quadratic in tau:
    //   c_delay*E_tot*tau^2 - e_tr*t_tot*tau + t_cm*E_tot - e_cm*t_tot = 0
    const double qa = c_delay * E_tot;
    const double qb = -e_tr * t_tot;
    const double qc = t_cm * E_tot - e_cm * t_tot;
    const double disc = qb * qb - 4.0 * qa * qc;

    // Energy-binding candidate.
    {
        KktCandidate cand;
        cand.kkt_case = KktCandidate::Case::EnergyBinding;
        cand.discriminant = disc;
        cand.tau = (std::sqrt(q * e_cm * E_tot) - e_cm) / e_tr;
        cand.K = std::sqrt(E_tot / (q * e_cm));
        finish_candidate(cand, params, constants);
        sol.candidates.push_back(std::move(cand));
    }

    // Both-binding candidates: evaluate both quadratic roots and let the
    // feasibility filter decide. The smaller root can be negative while the
    // larger one is the valid binding solution.
    if (disc >= 0.0) {
        const double sq = std::sqrt(disc);
        // Stable split, then one Newton polish per root to push the binding
        // residual down to rounding error.
        const double qsplit = -0.5 * (qb + std::copysign(sq, qb));
        double roots[2] = {qsplit / qa, qc != 0.0 ? qc / qsplit : 0.0};
        for (double root : roots) {
            const double deriv = 2.0 * qa * root + qb;
            if (deriv != 0.0) root -= (qa * root * root + qb * root + qc) / deriv;
            KktCandidate cand;
            cand.kkt_case = KktCandidate::Case::BothBinding;
            cand.discriminant = disc;
            cand.tau = root;
            cand.K = E_tot / (e_cm + e_tr * root);
            finish_candidate(cand, params, constants);
            sol.candidates.push_back(std::move(cand));
        }
    } else {
        KktCandidate cand;
        cand.kkt_case = KktCandidate::Case::BothBinding;
        cand.discriminant = disc;
        cand.tau = std::numeric_limits<double>::quiet_NaN();
        cand.K = std::numeric_limits<double>::quiet_NaN();
        cand.objective = std::numeric_limits<double>::quiet_NaN();
        cand.delay_residual = std::numeric_limits<double>::quiet_NaN();
        cand.energy_residual = std::numeric_limits<double>::quiet_NaN();
        cand.reject_reason = "negative discriminant (budgets never bind together)";
        sol.candidates.push_back(std::move(cand));
    }

    for (std::size_t i = 0; i < sol.candidates.size(); ++i) {
        const auto& cand = sol.candidates[i];
        if (!cand.feasible) continue;
        if (!sol.selected || cand.objective < sol.candidates[*sol.selected].objective)
            sol.selected = i;
    }

    if (!sol.selected)
        throw InfeasibleBudgetError(
            "no closed-form candidate satisfies both budgets; see candidate table", sol);
    return sol;
}

GridResult grid_oracle(const ResourceParams& params, const ConvergenceConstants& constants,
                       long long tau_lo, long long tau_hi, long long K_lo, long long K_hi) {
    if (tau_lo > tau_hi || K_lo > K_hi)
        throw std::invalid_argument("grid_oracle: empty range");
    GridResult best;
    bool found = false;
    for (long long tau = std::max(1LL, tau_lo); tau <= tau_hi; ++tau) {
        for (long long K = std::max(1LL, K_lo); K <= K_hi; ++K) {
            if (!schedule_fits(static_cast<double>(tau), static_cast<double>(K), params))
                continue;
            const double obj = surrogate_objective(static_cast<double>(tau),
                                                   static_cast<double>(K), constants);
            // Strict improvement keeps the smallest tau, then smallest K, on ties.
            if (!found || obj < best.objective) {
                best.schedule = Schedule{tau, K};
                best.objective = obj;
                found = true;
            }
        }
    }
    if (!found)
        throw InfeasibleBudgetError("grid_oracle: no feasible integer schedule in range", {});
    return best;
}

Schedule round_and_clamp(const TradeoffSolution& solution, double tau_max,
                         const ResourceParams& params, const ConvergenceConstants& constants) {
    if (!solution.selected)
        throw std::invalid_argument("round_and_clamp: solution has no selected candidate");
    if (!(tau_max >= 1.0)) throw std::invalid_argument("round_and_clamp: tau_max must be >= 1");

    const KktCandidate& cand = solution.selected_candidate();
    const long long cap = static_cast<long long>(std::floor(tau_max));

    // Snap away root-polish noise so an (up to rounding) integer tau* is not
    // split into two neighbors.
    double tau_star = cand.tau;
    const double nearest = std::round(tau_star);
    if (std::abs(tau_star - nearest) <= 1e-9 * std::max(1.0, std::abs(nearest)))
        tau_star = nearest;

    std::vector<long long> taus;
    for (double t : {std::floor(tau_star), std::ceil(tau_star)}) {
        long long tau = std::clamp(static_cast<long long>(t), 1LL, cap);
        if (std::find(taus.begin(), taus.end(), tau) == taus.end()) taus.push_back(tau);
    }

    bool found = false;
    Schedule best;
    double best_obj = 0.0;
    for (long long tau : taus) {
        const long long K = max_feasible_K(tau, params);
        if (K < 1) continue;
        const double obj = surrogate_objective(static_cast<double>(tau),
                                               static_cast<double>(K), constants);
        if (!found || obj < best_obj || (obj == best_obj && tau < best.tau)) {
            best = Schedule{tau, K};
            best_obj = obj;
            found = true;
        }
    }
    if (!found)
        throw InfeasibleBudgetError("round_and_clamp: no feasible integer neighbor", solution);
    return best;
}

const char* kkt_case_name(KktCandidate::Case c) {
    switch (c) {
        case KktCandidate::Case::EnergyBinding: return "energy-binding";
        case KktCandidate::Case::BothBinding: return "both-binding";
    }
    return "?";
}

}  // namespace fedsched
