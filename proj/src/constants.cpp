#include "fedsched/constants.hpp"

#include <algorithm>
#include <stdexcept>

namespace fedsched {

ConvergenceConstants estimate_constants(const LossModel& model, const Partition& partition,
                                        const std::vector<ParamVector>& probes) {
    if (probes.empty()) throw std::invalid_argument("estimate_constants: no probes");
    const std::size_t n_clients = partition.client_count();
    const ClientDataset pooled = pool(partition);

    // Evaluate everything once per probe.
    const std::size_t P = probes.size();
    std::vector<double> f_val(P);
    std::vector<ParamVector> g_val(P);
    std::vector<std::vector<ParamVector>> g_client(P);
    for (std::size_t p = 0; p < P; ++p) {
        f_val[p] = loss(model, probes[p], pooled);
        g_val[p] = gradient(model, probes[p], pooled);
        g_client[p].reserve(n_clients);
        for (std::size_t i = 0; i < n_clients; ++i)
            g_client[p].push_back(gradient(model, probes[p], partition.clients[i]));
    }

    ConvergenceConstants c;
    c.delta_i.assign(n_clients, 0.0);

    bool any_pair = false;
    for (std::size_t p = 0; p < P; ++p) {
        for (std::size_t q = p + 1; q < P; ++q) {
            const double d = distance(probes[p], probes[q]);
            if (d == 0.0) continue;  // duplicate probe, zero denominator
            any_pair = true;
            c.rho = std::max(c.rho, std::abs(f_val[p] - f_val[q]) / d);
            c.beta = std::max(c.beta, distance(g_val[p], g_val[q]) / d);
        }
    }
    if (!any_pair && P > 1)
        throw std::invalid_argument("estimate_constants: all probes coincide");

    for (std::size_t p = 0; p < P; ++p) {
        c.grad_f_star = std::max(c.grad_f_star, norm(g_val[p]));
        for (std::size_t i = 0; i < n_clients; ++i)
            c.delta_i[i] = std::max(c.delta_i[i], distance(g_client[p][i], g_val[p]));
    }

    double weighted = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n_clients; ++i) {
        weighted += static_cast<double>(partition.clients[i].rows) * c.delta_i[i];
        total += static_cast<double>(partition.clients[i].rows);
    }
    c.delta = weighted / total;
    return c;
}

std::vector<ParamVector> add_perturbations(std::vector<ParamVector> probes, std::size_t count,
                                           double sigma, Rng& rng) {
    if (probes.empty()) throw std::invalid_argument("add_perturbations: no base probes");
    const std::size_t base = probes.size();
    for (std::size_t k = 0; k < count; ++k) {
        ParamVector p = probes[k % base];
        for (double& v : p) v += rng.normal(0.0, sigma);
        probes.push_back(std::move(p));
    }
    return probes;
}

}  // namespace fedsched
