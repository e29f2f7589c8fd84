#include "fedsched/resource.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fedsched {

double ResourceParams::comm_delay() const {
    if (t_cm > 0.0) return t_cm;
    if (B <= 0.0 || N0 <= 0.0 || Z <= 0.0 || h_i.empty())
        throw std::invalid_argument("comm_delay: neither t_cm nor channel parameters set");
    double worst = 0.0;
    for (double h : h_i) {
        const double snr = P_cm * h / N0;
        const double rate = B * std::log2(1.0 + snr);
        if (!(rate > 0.0))
            throw std::domain_error("comm_delay: zero-rate channel (h_i = 0)");
        worst = std::max(worst, Z / rate);
    }
    return worst;
}

double ResourceParams::train_energy() const {
    if (E_tr > 0.0) return E_tr;
    return kappa * C * D_max * a * a;
}

double ResourceParams::delay_coeff() const {
    return (static_cast<double>(N) / mu) * max_delay_factor(N) + a;
}

void ResourceParams::draw_client_floors(Rng& rng) {
    a_i.resize(N);
    for (double& v : a_i) v = rng.uniform(0.5 * a, a);
}

double max_delay_factor(std::size_t n) {
    if (n < 1) throw std::invalid_argument("max_delay_factor: n must be >= 1");
    if (n <= 60) {
        // The alternating sum cancels ~15 decimal digits near n = 50, so plain
        // doubles cannot reach 1e-12 agreement with the harmonic form; quad
        // precision keeps every term and the cancellation exact enough.
        __float128 sum = 0;
        __float128 binom = 1;  // C(n-1, i-1), updated incrementally
        for (std::size_t i = 1; i <= n; ++i) {
            const __float128 term = binom / (__float128)(i * i);
            sum += (i % 2 == 1) ? term : -term;
            binom = binom * (__float128)(n - i) / (__float128)i;
        }
        return static_cast<double>(sum);
    }
    double harmonic = 0.0;
    for (std::size_t i = n; i >= 1; --i) harmonic += 1.0 / static_cast<double>(i);
    return harmonic / static_cast<double>(n);
}

double expected_training_delay(double tau, const ResourceParams& params) {
    if (tau < 1.0) throw std::invalid_argument("expected_training_delay: tau must be >= 1");
    return params.delay_coeff() * tau;
}

double sample_training_delay(double tau, const ResourceParams& params, Rng& rng) {
    const double scale = tau / params.mu;
    double worst = 0.0;
    for (std::size_t i = 0; i < params.N; ++i) {
        const double floor_i = params.a_i.empty() ? params.a : params.a_i.at(i);
        const double t = floor_i * tau + rng.exponential(scale);
        worst = std::max(worst, t);
    }
    return worst;
}

BudgetUsage budget_usage(const Schedule& schedule, const ResourceParams& params) {
    if (!schedule.valid()) throw std::invalid_argument("budget_usage: invalid schedule");
    const double tau = static_cast<double>(schedule.tau);
    const double K = static_cast<double>(schedule.K);
    BudgetUsage u;
    u.delay_s = params.delay_coeff() * K * tau * tau + params.comm_delay() * K;
    u.energy_J = params.train_energy() * K * tau + params.comm_energy() * K;
    u.delay_ok = u.delay_s <= params.t_tot * (1.0 + 1e-9);
    u.energy_ok = u.energy_J <= params.E_tot * (1.0 + 1e-9);
    return u;
}

bool schedule_fits(double tau, double K, const ResourceParams& params) {
    if (!(tau >= 1.0) || !(K >= 1.0)) return false;
    const double delay = params.delay_coeff() * K * tau * tau + params.comm_delay() * K;
    const double energy = params.train_energy() * K * tau + params.comm_energy() * K;
    return delay <= params.t_tot * (1.0 + 1e-9) && energy <= params.E_tot * (1.0 + 1e-9);
}

long long max_feasible_K(long long tau, const ResourceParams& params) {
    if (tau < 1) return 0;
    const double t = static_cast<double>(tau);
    const double per_round_delay = params.delay_coeff() * t * t + params.comm_delay();
    const double per_round_energy = params.train_energy() * t + params.comm_energy();
    double cap = std::min(params.t_tot / per_round_delay, params.E_tot / per_round_energy);
    if (!(cap >= 1.0)) {
        // A binding construction may land a hair under 1 in floating point.
        return schedule_fits(t, 1.0, params) ? 1 : 0;
    }
    long long K = static_cast<long long>(std::floor(cap * (1.0 + 1e-12)));
    while (K > 1 && !schedule_fits(t, static_cast<double>(K), params)) --K;
    while (schedule_fits(t, static_cast<double>(K + 1), params)) ++K;
    return K;
}

}  // namespace fedsched
