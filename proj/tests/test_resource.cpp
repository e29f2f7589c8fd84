#include <doctest.h>

#include <cmath>

#include "fedsched/resource.hpp"
#include "oracles.hpp"

using namespace fedsched;

TEST_CASE("straggler factor matches the harmonic form") {
    CHECK(max_delay_factor(1) == 1.0);
    CHECK(max_delay_factor(2) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(max_delay_factor(5) == doctest::Approx(137.0 / 300.0).epsilon(1e-15));
    for (std::size_t n = 1; n <= 50; ++n) {
        const double want = oracles::harmonic_number(n) / static_cast<double>(n);
        CHECK(std::abs(max_delay_factor(n) - want) / want < 1e-12);
    }
    // past the alternating-sum cutoff the harmonic path takes over seamlessly
    for (std::size_t n : {std::size_t{61}, std::size_t{75}, std::size_t{200}}) {
        const double want = oracles::harmonic_number(n) / static_cast<double>(n);
        CHECK(std::abs(max_delay_factor(n) - want) / want < 1e-12);
    }
    CHECK_THROWS_AS(max_delay_factor(0), std::invalid_argument);
}

TEST_CASE("straggler factor agrees with a Monte-Carlo expected maximum") {
    // E[max of 2 unit-mean exponentials] = 2 * factor(2) = 1.5
    Rng rng(515);
    const int draws = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double m = std::max(rng.exponential(1.0), rng.exponential(1.0));
        sum += m;
        sumsq += m * m;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sumsq / draws - mean * mean) / draws);
    CHECK(std::abs(mean - 2.0 * max_delay_factor(2)) < 3.0 * se);
}

TEST_CASE("expected round delay: plug-in values and exact linearity in tau") {
    ResourceParams r;
    r.N = 1;
    r.mu = 1.0;
    r.a = 0.0;
    CHECK(expected_training_delay(1.0, r) == doctest::Approx(1.0).epsilon(1e-15));

    ResourceParams r5;
    r5.N = 5;
    r5.mu = 0.2;
    r5.a = 2.0;
    const double want = 250.0 * (137.0 / 300.0) + 20.0;  // 134.1666..
    CHECK(expected_training_delay(10.0, r5) == doctest::Approx(want).epsilon(1e-12));
    CHECK(expected_training_delay(20.0, r5) == 2.0 * expected_training_delay(10.0, r5));
    CHECK_THROWS_AS(expected_training_delay(0.5, r5), std::invalid_argument);
}

TEST_CASE("sampled delay: shifted-exponential mean and the floor lower bound") {
    ResourceParams r;
    r.N = 1;
    r.mu = 0.2;
    r.a = 2.0;
    Rng rng(99);
    const int draws = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < draws; ++i) {
        const double t = sample_training_delay(10.0, r, rng);
        CHECK(t >= 20.0);  // the deterministic floor a*tau
        sum += t;
        sumsq += t * t;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sumsq / draws - mean * mean) / draws);
    CHECK(std::abs(mean - 70.0) < 3.0 * se);  // 20 + tau/mu
}

TEST_CASE("Monte-Carlo round maxima respect the expected-delay bound") {
    ResourceParams r;
    r.N = 5;
    r.mu = 0.2;
    r.a = 2.0;
    const double tau = 10.0;
    const double bound = expected_training_delay(tau, r);

    auto mc = [&](const ResourceParams& params, int draws, std::uint64_t seed) {
        Rng rng(seed);
        double sum = 0.0, sumsq = 0.0;
        for (int i = 0; i < draws; ++i) {
            const double t = sample_training_delay(tau, params, rng);
            sum += t;
            sumsq += t * t;
        }
        const double mean = sum / draws;
        return std::pair{mean, std::sqrt((sumsq / draws - mean * mean) / draws)};
    };

    // equal floors: the bound is the exact mean (two-sided agreement)
    auto [mean_eq, se_eq] = mc(r, 100000, 7);
    CHECK(std::abs(mean_eq - bound) < 3.0 * se_eq);

    // heterogeneous floors below a: the bound stays an upper bound
    ResourceParams het = r;
    Rng floor_rng(17);
    het.draw_client_floors(floor_rng);
    for (double f : het.a_i) {
        CHECK(f <= het.a);
        CHECK(f >= 0.5 * het.a);
    }
    auto [mean_het, se_het] = mc(het, 100000, 8);
    CHECK(mean_het <= bound + 3.0 * se_het);
}

TEST_CASE("upload delay: derived rate, configured constant, exact linearity in Z") {
    ResourceParams r;
    r.P_cm = 1.5;
    r.B = 1e6;
    r.N0 = 1.0;
    r.Z = 1e6;
    r.h_i = {2.0};  // P_cm * h / N0 = 3 -> log2(4) = 2 -> rate 2e6
    CHECK(r.comm_delay() == doctest::Approx(0.5).epsilon(1e-12));

    ResourceParams doubled = r;
    doubled.Z = 2e6;
    CHECK(doubled.comm_delay() == 2.0 * r.comm_delay());

    ResourceParams fixed;
    fixed.t_cm = 0.14;
    CHECK(fixed.comm_delay() == 0.14);

    ResourceParams dead = r;
    dead.h_i = {0.0};
    CHECK_THROWS_AS(dead.comm_delay(), std::domain_error);

    ResourceParams unset;
    CHECK_THROWS_AS(unset.comm_delay(), std::invalid_argument);
}

TEST_CASE("training energy: chip-model product or the configured constant") {
    ResourceParams r;
    r.kappa = 1e-28;
    r.C = 1e4;
    r.D_max = 1e3;
    r.a = 2e9;
    CHECK(r.train_energy() == doctest::Approx(4e-3).epsilon(1e-12));

    ResourceParams fixed;
    fixed.E_tr = 10.0;
    CHECK(fixed.train_energy() == 10.0);

    ResourceParams zero;
    zero.kappa = 0.0;
    zero.a = 1.0;
    CHECK(zero.train_energy() == 0.0);
}

TEST_CASE("budget usage: plug-in energy value and the expected-delay expansion") {
    ResourceParams r;
    r.N = 5;
    r.mu = 0.2;
    r.a = 2.0;
    r.t_cm = 0.14;
    r.P_cm = 1.5;
    r.E_tr = 10.0;
    r.t_tot = 1e9;
    r.E_tot = 1e9;
    const Schedule s{2, 10};
    const BudgetUsage u = budget_usage(s, r);
    CHECK(u.energy_J == doctest::Approx(202.1).epsilon(1e-12));

    // delay column equals E(t_tr) * T + t_cm * K
    const double expanded =
        expected_training_delay(2.0, r) * 2.0 * 10.0 + r.comm_delay() * 10.0;
    CHECK(u.delay_s == doctest::Approx(expanded).epsilon(1e-12));

    CHECK_THROWS_AS(budget_usage(Schedule{1, 0}, r), std::invalid_argument);
    const BudgetUsage base = budget_usage(Schedule{1, 1}, r);
    CHECK(base.delay_s > 0.0);
    CHECK(base.energy_J > 0.0);
}

TEST_CASE("budget usage increases strictly in tau and in K") {
    ResourceParams r;
    r.N = 3;
    r.mu = 0.5;
    r.a = 0.2;
    r.t_cm = 0.5;
    r.P_cm = 1.0;
    r.E_tr = 0.3;
    r.t_tot = 1e9;
    r.E_tot = 1e9;
    for (long long tau = 1; tau <= 6; ++tau) {
        for (long long K = 1; K <= 6; ++K) {
            const auto u = budget_usage(Schedule{tau, K}, r);
            const auto du = budget_usage(Schedule{tau + 1, K}, r);
            const auto dk = budget_usage(Schedule{tau, K + 1}, r);
            CHECK(du.delay_s > u.delay_s);
            CHECK(du.energy_J > u.energy_J);
            CHECK(dk.delay_s > u.delay_s);
            CHECK(dk.energy_J > u.energy_J);
        }
    }
}

TEST_CASE("max_feasible_K is the exact feasibility boundary") {
    ResourceParams r;
    r.N = 4;
    r.mu = 2.0;
    r.a = 0.05;
    r.t_cm = 1.0;
    r.P_cm = 1.5;
    r.E_tr = 0.4;
    r.t_tot = 120.0;
    r.E_tot = 55.0;
    for (long long tau = 1; tau <= 12; ++tau) {
        const long long K = max_feasible_K(tau, r);
        if (K == 0) {
            CHECK(!schedule_fits(static_cast<double>(tau), 1.0, r));
            continue;
        }
        CHECK(schedule_fits(static_cast<double>(tau), static_cast<double>(K), r));
        CHECK(!schedule_fits(static_cast<double>(tau), static_cast<double>(K + 1), r));
    }
}
