#pragma once

#include <cstddef>
#include <vector>

#include "fedsched/rng.hpp"
#include "fedsched/schedule.hpp"

namespace fedsched {

// Delay and energy constants for a synchronous round-based system with N
// clients reporting to one aggregator.
struct ResourceParams {
    std::size_t N = 5;       // client count
    double mu = 0.2;         // fluctuation rate of computation time (1/s per local step)
    double a = 0.002;        // max deterministic computation time (s per local step)
    std::vector<double> a_i; // per-client floors; empty means all equal to `a`

    double t_cm = 0.0;       // configured upload delay per aggregation (s); 0 = derive
    double P_cm = 1.5;       // communication power (W)

    double E_tr = 0.0;       // configured training energy per local step (J); 0 = derive
    double kappa = 0.0;      // effective switched capacitance
    double C = 0.0;          // CPU cycles per sample
    double D_max = 0.0;      // largest client dataset size

    double B = 0.0;          // bandwidth (Hz), for the derived upload delay
    double N0 = 0.0;         // noise power (W)
    double Z = 0.0;          // parameter payload (bits)
    std::vector<double> h_i; // per-client channel gains

    double t_tot = 0.0;      // delay budget (s)
    double E_tot = 0.0;      // energy budget (J)

    // Upload delay: the configured constant, or the slowest client's
    // Z / (B log2(1 + P_cm h / N0)). Throws on a zero-rate channel.
    double comm_delay() const;

    // Per-step training energy: the configured constant, or kappa*C*D_max*a^2.
    double train_energy() const;

    double comm_energy() const { return P_cm * comm_delay(); }

    // Expected round delay per unit tau^2: (N/mu) * max_delay_factor(N) + a.
    double delay_coeff() const;

    // Uniform per-client floors in [a/2, a]; used when heterogeneity is on.
    void draw_client_floors(Rng& rng);
};

// E[max of n iid unit-mean exponentials] / n, which equals H_n / n.
// Evaluated by the alternating binomial sum sum_{i=1..n} C(n-1,i-1)(-1)^(i-1)/i^2
// for n <= 60 and by the harmonic form above that.
double max_delay_factor(std::size_t n);

// Upper bound on the expected straggler delay of one round of tau local steps:
// (N*tau/mu) * max_delay_factor(N) + a*tau. Exact when all client floors equal a.
double expected_training_delay(double tau, const ResourceParams& params);

// One draw of the round's straggler delay: max over clients of
// a_i*tau + Exp(scale tau/mu).
double sample_training_delay(double tau, const ResourceParams& params, Rng& rng);

struct BudgetUsage {
    double delay_s = 0.0;
    double energy_J = 0.0;
    bool delay_ok = false;
    bool energy_ok = false;
    bool feasible() const { return delay_ok && energy_ok; }
};

// Expected budget usage of a full schedule:
//   delay  = delay_coeff * K * tau^2 + t_cm * K
//   energy = E_tr * K * tau + E_cm * K
BudgetUsage budget_usage(const Schedule& schedule, const ResourceParams& params);

// Shared feasibility predicate for the solver, rounding, and the grid oracle.
// Allows a relative slack of 1e-9 so binding solutions are not rejected.
bool schedule_fits(double tau, double K, const ResourceParams& params);

// Largest K >= 1 such that (tau, K) fits both budgets; 0 if none.
long long max_feasible_K(long long tau, const ResourceParams& params);

}  // namespace fedsched
