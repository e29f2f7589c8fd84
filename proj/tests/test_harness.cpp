#include <doctest.h>

#include <cmath>

#include "fedsched/harness.hpp"

using namespace fedsched;

namespace {

ExperimentConfig small_config() {
    ExperimentConfig cfg;
    cfg.n_samples = 200;
    cfg.dim = 5;
    cfg.seed = 3;
    cfg.tau = 3;
    return cfg;
}

}  // namespace

TEST_CASE("config round-trips through serialize/parse") {
    ExperimentConfig cfg;
    CHECK(parse_config(serialize_config(cfg)) == cfg);

    cfg.model = "logloss";
    cfg.eta = 0.123456789012345;
    cfg.partition = "label-sorted";
    cfg.h = {0.5, 1.25, 2.0};
    cfg.sweep_taus = {1, 3, 9};
    cfg.heterogeneous_a = true;
    cfg.idx_images = "some path/images.idx";
    CHECK(parse_config(serialize_config(cfg)) == cfg);
}

TEST_CASE("config parser reports unknown keys and bad values with line numbers") {
    CHECK_THROWS_WITH_AS(parse_config("bogus_key = 1\n"),
                         doctest::Contains("unknown key"), std::runtime_error);
    CHECK_THROWS_WITH_AS(parse_config("# fine\neta = banana\n"),
                         doctest::Contains("line 2"), std::runtime_error);
    CHECK_THROWS_AS(parse_config("eta 0.1\n"), std::runtime_error);

    // comments and blank lines are ignored
    auto cfg = parse_config("\n# comment\n  eta = 0.25  # trailing\n");
    CHECK(cfg.eta == 0.25);
}

TEST_CASE("config validation catches cross-field problems") {
    ExperimentConfig cfg;
    cfg.model = "tree";
    CHECK_THROWS_AS(validate_config(cfg), std::runtime_error);
    cfg = ExperimentConfig{};
    cfg.dataset = "idx";
    cfg.idx_images = "/nonexistent/images.idx";
    cfg.idx_labels = "/nonexistent/labels.idx";
    CHECK_THROWS_AS(validate_config(cfg), std::runtime_error);
}

TEST_CASE("metrics CSV: header, one row per aggregation, 9 significant digits") {
    CHECK(metrics_to_csv({}) == "round,tau,K,loss,accuracy,cum_delay_s,cum_energy_J,seed\n");

    MetricsRecord r;
    r.round = 1;
    r.tau = 2;
    r.K = 3;
    r.loss = 0.123456789123;
    r.accuracy = 1.0 / 3.0;
    r.cum_delay_s = 12345.6789123;
    r.cum_energy_J = 1e-7;
    r.seed = 42;
    const std::string csv = metrics_to_csv({r});
    CHECK(csv.find("0.123456789,") != std::string::npos);
    CHECK(csv.find("0.333333333,") != std::string::npos);
    CHECK(csv.find("12345.6789,") != std::string::npos);
    CHECK(csv.find(",42\n") != std::string::npos);

    auto setup = prepare_experiment(small_config());
    auto sim = run_simulate(setup, Schedule{3, 4}, BudgetMode::Ignore);
    CHECK(sim.records.size() == 4);
    for (std::size_t i = 0; i < sim.records.size(); ++i) {
        CHECK(sim.records[i].round == static_cast<long long>(i + 1));
        CHECK(sim.records[i].tau == 3);
        CHECK(sim.records[i].K == 4);
    }
}

TEST_CASE("identical config and seed reproduce byte-identical CSV output") {
    auto cfg = small_config();
    cfg.delay_model = "sampled";
    auto a = metrics_to_csv(run_simulate(prepare_experiment(cfg), Schedule{2, 5}).records);
    auto b = metrics_to_csv(run_simulate(prepare_experiment(cfg), Schedule{2, 5}).records);
    CHECK(a == b);

    auto sweep_a = run_sweep(prepare_experiment(cfg), {1, 2, 4});
    auto sweep_b = run_sweep(prepare_experiment(cfg), {1, 2, 4});
    CHECK(metrics_to_csv(sweep_a.records) == metrics_to_csv(sweep_b.records));
}

TEST_CASE("a single-tau sweep is exactly one simulate run") {
    auto setup = prepare_experiment(small_config());
    auto sweep = run_sweep(setup, {4});
    REQUIRE(sweep.points.size() == 1);
    REQUIRE(sweep.points[0].feasible);
    auto sim = run_simulate(setup, sweep.points[0].schedule, BudgetMode::Enforce, 0);
    CHECK(metrics_to_csv(sweep.records) == metrics_to_csv(sim.records));
}

TEST_CASE("sweep reports infeasible tau values without failing") {
    auto cfg = small_config();
    cfg.t_tot = 30.0;  // tau=40 cannot fit a single round
    auto setup = prepare_experiment(cfg);
    auto sweep = run_sweep(setup, {1, 40});
    REQUIRE(sweep.points.size() == 2);
    CHECK(sweep.points[0].feasible);
    CHECK(!sweep.points[1].feasible);
    CHECK(sweep.summary.find("infeasible") != std::string::npos);
}

TEST_CASE("compare runs stay inside both budgets and tau=1 aggregates most") {
    auto setup = prepare_experiment(small_config());
    auto rep = run_compare(setup);
    REQUIRE(rep.optimized_available);
    REQUIRE(rep.arms.size() == 3);
    for (const auto& rec : rep.records) {
        CHECK(rec.cum_delay_s <= setup.res.t_tot);
        CHECK(rec.cum_energy_J <= setup.res.E_tot);
    }
    // arms: optimized, tau=1, tau=tau_max
    CHECK(rep.arms[1].schedule.tau == 1);
    CHECK(rep.arms[2].schedule.tau == static_cast<long long>(setup.cfg.tau_max));
    CHECK(rep.arms[1].schedule.K >= rep.arms[2].schedule.K);
    // every arm's rows are exactly its aggregation count
    std::size_t expected_rows = 0;
    for (const auto& arm : rep.arms) expected_rows += static_cast<std::size_t>(arm.schedule.K);
    CHECK(rep.records.size() == expected_rows);
}

TEST_CASE("bounds report is deterministic and carries the condition diagnostics") {
    auto cfg = small_config();
    cfg.tau = 2;
    cfg.K = 5;
    auto a = run_bounds(prepare_experiment(cfg));
    auto b = run_bounds(prepare_experiment(cfg));
    CHECK(a.csv == b.csv);
    CHECK(a.summary == b.summary);
    CHECK(a.estimated.rho > 0.0);
    CHECK(a.estimated.grad_f_star > 0.0);
    CHECK(a.csv.find("tightness_1_residual") != std::string::npos);
    CHECK(a.summary.find("deviation envelope at t=0") != std::string::npos);
    // epsilon fell back to the measured gap (config leaves it at 0)
    CHECK(!a.epsilon_from_config);
    CHECK(a.estimated.epsilon >= 0.0);
}

TEST_CASE("solve report prints the candidate table, the units note, and rounds") {
    auto setup = prepare_experiment(small_config());
    auto rep = run_solve(setup);
    CHECK(rep.feasible);
    CHECK(rep.rounded.has_value());
    CHECK(rep.table.find("energy-binding") != std::string::npos);
    CHECK(rep.table.find("both-binding") != std::string::npos);
    CHECK(rep.table.find("note:") != std::string::npos);
    CHECK(rep.table.find("selected:") != std::string::npos);
    CHECK(rep.csv.find("case,tau,K") != std::string::npos);
}

TEST_CASE("solve report on delay-starved budgets marks everything infeasible") {
    auto cfg = small_config();
    // constants and budgets where training delay dwarfs t_tot
    cfg.mu = 0.2;
    cfg.a = 0.002;
    cfg.t_cm = 0.14;
    cfg.P_cm = 1.5;
    cfg.E_tr = 10.0;
    cfg.t_tot = 200.0;
    cfg.E_tot = 1500.0;
    cfg.rho = 0.01;
    cfg.eta = 0.1;
    cfg.grad_f_star = 1000.0;
    cfg.tau_max = 20.0;
    auto rep = run_solve(prepare_experiment(cfg));
    CHECK(!rep.feasible);
    CHECK(rep.table.find("selected: none") != std::string::npos);
    CHECK(rep.table.find("note:") != std::string::npos);
}

TEST_CASE("simulate derives K from the budgets when the config leaves it at 0") {
    auto cfg = small_config();
    cfg.tau = 2;
    cfg.K = 0;
    auto setup = prepare_experiment(cfg);
    auto sim = run_simulate(setup);
    CHECK(sim.schedule.K == max_feasible_K(2, setup.res));
    CHECK(sim.schedule.K >= 1);
}
