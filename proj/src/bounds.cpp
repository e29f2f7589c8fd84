#include "fedsched/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace fedsched {

double deviation_envelope(double t, double delta_i, const ConvergenceConstants& c,
                          double tau) {
    return (delta_i + c.grad_f_star) * c.eta * t - tau / c.rho;
}

namespace {

std::optional<double> gap_bound_impl(double T, double tau, const ConvergenceConstants& c,
                                     double delta_like) {
    const double denom =
        c.rho * c.eta * (delta_like + c.grad_f_star) - tau + c.rho * c.eta * c.grad_f_star * T;
    if (!(denom > 0.0)) return std::nullopt;
    return c.epsilon * c.epsilon / denom;
}

}  // namespace

std::optional<double> loss_gap_bound(double T, double tau, const ConvergenceConstants& c) {
    return gap_bound_impl(T, tau, c, c.delta);
}

std::optional<double> loss_gap_bound_for_client(double T, double tau,
                                                const ConvergenceConstants& c,
                                                double delta_i) {
    return gap_bound_impl(T, tau, c, delta_i);
}

double min_trainings_for_gap(double eps_target, const ConvergenceConstants& c, double tau) {
    if (!(eps_target > 0.0))
        throw std::invalid_argument("min_trainings_for_gap: target must be positive");
    const double slope = c.rho * c.eta * c.grad_f_star;
    if (!(slope > 0.0))
        throw std::invalid_argument("min_trainings_for_gap: rho*eta*grad_f_star must be positive");
    return (c.epsilon * c.epsilon / eps_target -
            c.rho * c.eta * (c.delta + c.grad_f_star) + tau) /
           slope;
}

namespace {

// Least-squares fit of target ~ coef * reference; residual relative to ||reference||.
struct Collinearity {
    double coef = 0.0;
    double residual = 0.0;
    bool degenerate = false;
};

Collinearity fit_collinear(std::span<const double> target, std::span<const double> reference) {
    Collinearity r;
    const double ref_sq = squared_norm(reference);
    if (ref_sq <= 0.0) {
        r.degenerate = true;
        r.residual = norm(target);
        return r;
    }
    r.coef = dot(target, reference) / ref_sq;
    double miss = 0.0;
    for (std::size_t j = 0; j < target.size(); ++j) {
        const double d = target[j] - r.coef * reference[j];
        miss += d * d;
    }
    r.residual = std::sqrt(miss / ref_sq);
    return r;
}

void track(TightnessReport::Condition& cond, const Collinearity& fit, double tol) {
    if (fit.degenerate) return;
    ++cond.points;
    cond.max_residual = std::max(cond.max_residual, fit.residual);
    cond.min_coefficient =
        cond.points == 1 ? fit.coef : std::min(cond.min_coefficient, fit.coef);
    cond.satisfied = cond.max_residual <= tol && cond.min_coefficient > 0.0;
}

}  // namespace

TightnessReport check_tightness_conditions(const Trajectory& traj, const Partition& partition,
                                           const LossModel& model, double tol) {
    if (!traj.clients_recorded)
        throw std::invalid_argument("check_tightness_conditions: per-client history required");
    if (traj.virtual_global.empty())
        throw std::invalid_argument("check_tightness_conditions: empty trajectory");

    TightnessReport report;
    const ClientDataset pooled = pool(partition);
    const ParamVector& final_w = traj.final_params;

    // 1. shared initial parameters vs the final global model
    track(report.conditions[0], fit_collinear(traj.initial, final_w), tol);

    // 2./3. per-client gradients and parameters vs their global counterparts
    for (std::size_t t = 0; t < traj.virtual_global.size(); ++t) {
        const ParamVector& wg = traj.virtual_global[t];
        const ParamVector g_global = gradient(model, wg, pooled);
        for (std::size_t i = 0; i < partition.client_count(); ++i) {
            const ParamVector g_i = gradient(model, wg, partition.clients[i]);
            track(report.conditions[1], fit_collinear(g_i, g_global), tol);
            track(report.conditions[2], fit_collinear(traj.client_history[t][i], wg), tol);
        }
    }

    // 4. each global step vs -grad F at the previous point (best-fit step size)
    const ParamVector* prev = &traj.initial;
    for (const ParamVector& cur : traj.virtual_global) {
        const ParamVector g_prev = gradient(model, *prev, pooled);
        ParamVector step = sub(cur, *prev);
        ParamVector neg_grad(g_prev.size());
        for (std::size_t j = 0; j < g_prev.size(); ++j) neg_grad[j] = -g_prev[j];
        track(report.conditions[3], fit_collinear(step, neg_grad), tol);
        prev = &cur;
    }

    return report;
}

DeviationReport verify_local_deviation_bound(const Trajectory& traj,
                                             const Partition& partition,
                                             const LossModel& model,
                                             const ConvergenceConstants& c, double tau) {
    if (!traj.clients_recorded)
        throw std::invalid_argument("verify_local_deviation_bound: per-client history required");

    DeviationReport report;
    const ParamVector& final_w = traj.final_params;
    for (std::size_t t = 0; t < traj.client_history.size(); ++t) {
        for (std::size_t i = 0; i < partition.client_count(); ++i) {
            const ParamVector& w_it = traj.client_history[t][i];
            const double envelope =
                deviation_envelope(static_cast<double>(t + 1), c.delta_i.at(i), c, tau);
            if (envelope > 0.0) {
                ++report.envelope_points;
                const double dev = distance(w_it, final_w);
                if (dev > envelope) {
                    ++report.envelope_violations;
                    report.max_envelope_excess =
                        std::max(report.max_envelope_excess, dev - envelope);
                }
            }

            const double cap = c.delta_i.at(i) + c.grad_f_star;
            if (cap > 0.0) {
                ++report.gradcap_points;
                const double ratio = norm(gradient(model, w_it, partition.clients[i])) / cap;
                report.max_gradcap_ratio = std::max(report.max_gradcap_ratio, ratio);
                if (ratio > 1.0 + 1e-12) ++report.gradcap_violations;
            }
        }
    }
    return report;
}

}  // namespace fedsched
