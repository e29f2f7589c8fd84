#include <doctest.h>

#include <cmath>

#include "fedsched/fed.hpp"
#include "oracles.hpp"

using namespace fedsched;

namespace {

ClientDataset dataset_from(std::vector<std::vector<double>> rows, std::vector<double> ys) {
    ClientDataset d;
    for (std::size_t i = 0; i < rows.size(); ++i)
        d.push_row(std::span<const double>(rows[i]), ys[i]);
    return d;
}

ResourceParams loose_budgets() {
    ResourceParams r;
    r.N = 5;
    r.mu = 1.0;
    r.a = 0.01;
    r.t_cm = 0.1;
    r.P_cm = 1.0;
    r.E_tr = 0.1;
    r.t_tot = 1e12;
    r.E_tot = 1e12;
    return r;
}

}  // namespace

TEST_CASE("local step moves against the gradient") {
    const LossModel m{LossKind::SquaredError};
    // single sample x=(-1,1), y=1: gradient at w=0 is (2,-2)
    auto data = dataset_from({{-1.0, 1.0}}, {1.0});
    auto next = local_step({0.0, 0.0}, m, data, 0.1);
    CHECK(next[0] == doctest::Approx(-0.2).epsilon(1e-15));
    CHECK(next[1] == doctest::Approx(0.2).epsilon(1e-15));

    // perfect fit: zero gradient leaves params unchanged
    auto fit = dataset_from({{1.0, 0.0}}, {3.0});
    auto same = local_step({3.0, 5.0}, m, fit, 0.1);
    CHECK(same == ParamVector{3.0, 5.0});

    // loss 0.5*w^2 in 1D: two samples x=1 and x=0, zero labels
    auto quad = dataset_from({{1.0}, {0.0}}, {0.0, 0.0});
    CHECK(local_step({1.0}, m, quad, 0.1)[0] == doctest::Approx(0.9).epsilon(1e-15));

    CHECK_THROWS_AS(local_step({0.0, 0.0}, m, data, 0.0), std::invalid_argument);
}

TEST_CASE("aggregation is the size-weighted average") {
    CHECK(aggregate({{1.5, -2.0}, {1.5, -2.0}}, {3, 9}) == ParamVector{1.5, -2.0});
    CHECK(aggregate({{0.0}, {4.0}}, {1, 3}) == ParamVector{3.0});
    CHECK(aggregate({{1.0}, {-1.0}}, {2, 2}) == ParamVector{0.0});
    CHECK_THROWS_AS(aggregate({}, {}), std::invalid_argument);
    CHECK_THROWS_AS(aggregate({{1.0}, {1.0, 2.0}}, {1, 1}), std::invalid_argument);
}

TEST_CASE("global loss is the size-weighted client average and equals the pooled loss") {
    // two single-sample clients with losses 0.4 and 0.6
    Partition p;
    p.clients = {dataset_from({{1.0}}, {std::sqrt(0.4)}),
                 dataset_from({{1.0}}, {std::sqrt(0.6)})};
    const LossModel m{LossKind::SquaredError};
    CHECK(global_loss(p, m, {0.0}) == doctest::Approx(0.5).epsilon(1e-12));

    Partition single;
    single.clients = {p.clients[0]};
    CHECK(global_loss(single, m, {0.0}) == loss(m, {0.0}, p.clients[0]));

    auto blobs = make_blobs(90, 4, 2.0, 31);
    auto part = partition_data(blobs, 5, PartitionScheme::LabelSorted, 3);
    ParamVector w(blobs.cols);
    for (std::size_t j = 0; j < w.size(); ++j) w[j] = 0.3 - 0.1 * static_cast<double>(j);
    for (LossKind kind : {LossKind::SquaredError, LossKind::LogLoss, LossKind::Hinge}) {
        const LossModel lm{kind};
        CHECK(std::abs(global_loss(part, lm, w) - loss(lm, w, pool(part))) < 1e-12);
    }
}

TEST_CASE("aggregating every step reproduces centralized gradient descent") {
    auto blobs = make_blobs(120, 5, 2.0, 11);
    for (auto scheme : {PartitionScheme::Iid, PartitionScheme::LabelSorted}) {
        auto part = partition_data(blobs, 4, scheme, 7);
        for (LossKind kind : {LossKind::LogLoss, LossKind::SquaredError}) {
            const LossModel m{kind};
            const double eta = 0.05;
            const long long steps = 50;

            RunOptions opts;
            auto traj = run_schedule(Schedule{1, steps}, part, m, eta,
                                     ParamVector(blobs.cols, 0.0), loose_budgets(), opts);
            auto oracle = oracles::pooled_gd_trajectory(m, pool(part),
                                                        ParamVector(blobs.cols, 0.0), eta,
                                                        steps);
            REQUIRE(traj.global_after_agg.size() == static_cast<std::size_t>(steps));
            double worst = 0.0;
            for (std::size_t s = 0; s < oracle.size(); ++s)
                worst = std::max(worst,
                                 oracles::max_abs_diff(traj.global_after_agg[s], oracle[s]));
            CHECK(worst < 1e-12);
        }
    }
}

TEST_CASE("a single client run is plain gradient descent") {
    auto blobs = make_blobs(40, 3, 2.0, 19);
    Partition part;
    part.clients = {blobs};
    const LossModel m{LossKind::LogLoss};
    RunOptions opts;
    auto traj = run_schedule(Schedule{20, 1}, part, m, 0.1, ParamVector(blobs.cols, 0.0),
                             loose_budgets(), opts);
    auto oracle =
        oracles::pooled_gd_trajectory(m, blobs, ParamVector(blobs.cols, 0.0), 0.1, 20);
    // identical sequence of operations: bit-exact
    CHECK(traj.final_params == oracle.back());
}

TEST_CASE("aggregation of clients with identical data is a no-op") {
    auto blobs = make_blobs(32, 3, 2.0, 23);
    Partition two;
    two.clients = {blobs, blobs};
    Partition one;
    one.clients = {blobs};
    const LossModel m{LossKind::LogLoss};
    RunOptions opts;
    auto t2 = run_schedule(Schedule{3, 8}, two, m, 0.08, ParamVector(blobs.cols, 0.0),
                           loose_budgets(), opts);
    auto t1 = run_schedule(Schedule{3, 8}, one, m, 0.08, ParamVector(blobs.cols, 0.0),
                           loose_budgets(), opts);
    for (std::size_t k = 0; k < t2.global_after_agg.size(); ++k)
        CHECK(oracles::max_abs_diff(t2.global_after_agg[k], t1.global_after_agg[k]) < 1e-13);
}

TEST_CASE("runs are deterministic for a fixed seed, including sampled delays") {
    auto blobs = make_blobs(60, 4, 2.0, 29);
    auto part = partition_data(blobs, 3, PartitionScheme::Iid, 5);
    const LossModel m{LossKind::Hinge};
    ResourceParams res = loose_budgets();
    RunOptions opts;
    opts.delay = DelayAccounting::Sampled;
    opts.seed = 1234;
    auto a = run_schedule(Schedule{2, 6}, part, m, 0.05, ParamVector(blobs.cols, 0.0), res,
                          opts);
    auto b = run_schedule(Schedule{2, 6}, part, m, 0.05, ParamVector(blobs.cols, 0.0), res,
                          opts);
    REQUIRE(a.rounds.size() == b.rounds.size());
    for (std::size_t k = 0; k < a.rounds.size(); ++k) {
        CHECK(a.rounds[k].loss == b.rounds[k].loss);
        CHECK(a.rounds[k].cum_delay_s == b.rounds[k].cum_delay_s);
        CHECK(a.global_after_agg[k] == b.global_after_agg[k]);
    }
}

TEST_CASE("budget enforcement truncates and never exceeds either budget") {
    auto blobs = make_blobs(40, 3, 2.0, 37);
    auto part = partition_data(blobs, 4, PartitionScheme::Iid, 2);
    ResourceParams res;
    res.N = 4;
    res.mu = 1.0;
    res.a = 0.1;
    res.t_cm = 1.0;
    res.P_cm = 1.0;
    res.E_tr = 1.0;
    res.t_tot = 50.0;   // allows a handful of rounds
    res.E_tot = 14.0;   // energy binds first: tau=2 costs 3 J per round
    RunOptions opts;
    opts.budget = BudgetMode::Enforce;
    auto traj = run_schedule(Schedule{2, 100}, part, LossModel{LossKind::LogLoss}, 0.05,
                             ParamVector(blobs.cols, 0.0), res, opts);
    CHECK(traj.truncated);
    CHECK(traj.completed_rounds == 4);  // 4 rounds * 3 J = 12 J; a 5th would hit 15 > 14
    REQUIRE(!traj.rounds.empty());
    double prev_delay = 0.0, prev_energy = 0.0;
    for (const auto& r : traj.rounds) {
        CHECK(r.cum_delay_s >= prev_delay);
        CHECK(r.cum_energy_J >= prev_energy);
        prev_delay = r.cum_delay_s;
        prev_energy = r.cum_energy_J;
    }
    CHECK(traj.rounds.back().cum_delay_s <= res.t_tot);
    CHECK(traj.rounds.back().cum_energy_J <= res.E_tot);
}

TEST_CASE("training on convex losses does not increase the loss") {
    auto blobs = make_blobs(200, 6, 2.0, 41);
    auto part = partition_data(blobs, 5, PartitionScheme::LabelSorted, 13);
    RunOptions opts;
    for (LossKind kind : {LossKind::SquaredError, LossKind::LogLoss, LossKind::Hinge}) {
        const LossModel m{kind};
        const ParamVector w0(blobs.cols, 0.0);
        auto traj = run_schedule(Schedule{4, 10}, part, m, 0.05, w0, loose_budgets(), opts);
        CHECK(traj.rounds.back().loss <= global_loss(part, m, w0));
    }
}

TEST_CASE("per-client recording captures the virtual global average") {
    auto blobs = make_blobs(30, 3, 2.0, 43);
    auto part = partition_data(blobs, 3, PartitionScheme::Iid, 4);
    RunOptions opts;
    opts.record_clients = true;
    auto traj = run_schedule(Schedule{2, 3}, part, LossModel{LossKind::LogLoss}, 0.05,
                             ParamVector(blobs.cols, 0.0), loose_budgets(), opts);
    REQUIRE(traj.client_history.size() == 6);
    REQUIRE(traj.virtual_global.size() == 6);
    // at aggregation steps every client equals the recorded global
    for (std::size_t t : {std::size_t{1}, std::size_t{3}, std::size_t{5}}) {
        for (const auto& wc : traj.client_history[t])
            CHECK(oracles::max_abs_diff(wc, traj.virtual_global[t]) == 0.0);
    }
    CHECK(traj.virtual_global[5] == traj.final_params);
}
