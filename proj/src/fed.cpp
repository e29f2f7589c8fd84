#include "fedsched/fed.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace fedsched {

ParamVector local_step(const ParamVector& params, const LossModel& model,
                       const ClientDataset& data, double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("local_step: eta must be positive");
    ParamVector g = gradient(model, params, data);
    ParamVector next = params;
    add_scaled(next, -eta, g);
    if (!all_finite(next)) throw std::runtime_error("local_step: non-finite parameters");
    return next;
}

ParamVector aggregate(const std::vector<ParamVector>& client_params,
                      const std::vector<std::size_t>& sizes) {
    if (client_params.empty()) throw std::invalid_argument("aggregate: no clients");
    if (client_params.size() != sizes.size())
        throw std::invalid_argument("aggregate: params/sizes length mismatch");
    const std::size_t dim = client_params.front().size();
    double total = 0.0;
    ParamVector acc(dim, 0.0);
    for (std::size_t i = 0; i < client_params.size(); ++i) {
        if (client_params[i].size() != dim)
            throw std::invalid_argument("aggregate: dimension mismatch");
        if (sizes[i] < 1) throw std::invalid_argument("aggregate: client size must be >= 1");
        add_scaled(acc, static_cast<double>(sizes[i]), client_params[i]);
        total += static_cast<double>(sizes[i]);
    }
    for (double& v : acc) v /= total;
    return acc;
}

double global_loss(const Partition& partition, const LossModel& model,
                   const ParamVector& params) {
    double weighted = 0.0;
    double total = 0.0;
    for (const auto& client : partition.clients) {
        weighted += static_cast<double>(client.rows) * loss(model, params, client);
        total += static_cast<double>(client.rows);
    }
    return weighted / total;
}

Trajectory run_schedule(const Schedule& schedule, const Partition& partition,
                        const LossModel& model, double eta, const ParamVector& initial,
                        const ResourceParams& res, const RunOptions& opts) {
    if (!schedule.valid()) throw std::invalid_argument("run_schedule: invalid schedule");
    if (partition.clients.empty()) throw std::invalid_argument("run_schedule: no clients");

    const std::size_t n_clients = partition.clients.size();
    const auto sizes = partition.sizes();
    const double e_step = res.train_energy();
    const double e_comm = res.comm_energy();
    const double t_comm = res.comm_delay();
    Rng rng(opts.seed);

    Trajectory traj;
    traj.initial = initial;
    traj.planned_rounds = schedule.K;
    traj.clients_recorded = opts.record_clients;

    std::vector<ParamVector> w(n_clients, initial);
    double cum_delay = 0.0;
    double cum_energy = 0.0;

    for (long long k = 1; k <= schedule.K; ++k) {
        if (opts.budget == BudgetMode::Enforce) {
            const double round_tr = opts.delay == DelayAccounting::Expected
                                        ? expected_training_delay(
                                              static_cast<double>(schedule.tau), res)
                                        : sample_training_delay(
                                              static_cast<double>(schedule.tau), res, rng);
            const double round_delay = round_tr * static_cast<double>(schedule.tau) + t_comm;
            const double round_energy = e_step * static_cast<double>(schedule.tau) + e_comm;
            if (cum_delay + round_delay > res.t_tot || cum_energy + round_energy > res.E_tot) {
                traj.truncated = true;
                break;
            }
            cum_delay += round_delay;
            cum_energy += round_energy;
        } else {
            const double tr = opts.delay == DelayAccounting::Expected
                                  ? expected_training_delay(
                                        static_cast<double>(schedule.tau), res)
                                  : sample_training_delay(
                                        static_cast<double>(schedule.tau), res, rng);
            cum_delay += tr * static_cast<double>(schedule.tau) + t_comm;
            cum_energy += e_step * static_cast<double>(schedule.tau) + e_comm;
        }

        for (long long s = 1; s <= schedule.tau; ++s) {
            for (std::size_t i = 0; i < n_clients; ++i)
                w[i] = local_step(w[i], model, partition.clients[i], eta);
            const bool is_agg = (s == schedule.tau);
            if (is_agg) {
                ParamVector avg = aggregate(w, sizes);
                for (auto& wi : w) wi = avg;
            }
            if (opts.record_clients) {
                traj.client_history.push_back(w);
                // at an aggregation step the weighted average is the new common
                // parameter itself
                traj.virtual_global.push_back(is_agg ? w.front() : aggregate(w, sizes));
            }
        }

        traj.global_after_agg.push_back(w.front());
        traj.completed_rounds = k;

        RoundRecord rec;
        rec.round = k;
        rec.loss = global_loss(partition, model, w.front());
        rec.accuracy = opts.eval != nullptr ? accuracy(w.front(), *opts.eval)
                                            : std::numeric_limits<double>::quiet_NaN();
        rec.cum_delay_s = cum_delay;
        rec.cum_energy_J = cum_energy;
        traj.rounds.push_back(rec);
    }

    traj.final_params = traj.global_after_agg.empty() ? initial : traj.global_after_agg.back();
    return traj;
}

ParamVector minimize_pooled(const LossModel& model, const ClientDataset& data, double eta,
                            double grad_tol, long long max_steps) {
    ParamVector w(data.cols, 0.0);
    ParamVector best = w;
    double best_loss = loss(model, w, data);
    for (long long step = 0; step < max_steps; ++step) {
        ParamVector g = gradient(model, w, data);
        if (norm(g) < grad_tol) break;
        add_scaled(w, -eta, g);
        const double f = loss(model, w, data);
        if (f < best_loss) {
            best_loss = f;
            best = w;
        }
    }
    return best;
}

}  // namespace fedsched
