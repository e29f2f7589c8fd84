#include "fedsched/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <sstream>

namespace fedsched {

namespace {

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

LossModel model_from_config(const ExperimentConfig& cfg) {
    LossModel m;
    if (cfg.model == "svm")
        m.kind = LossKind::Hinge;
    else if (cfg.model == "logloss")
        m.kind = LossKind::LogLoss;
    else
        m.kind = LossKind::SquaredError;
    m.l2 = cfg.l2;
    return m;
}

std::vector<MetricsRecord> records_from(const Trajectory& traj, const Schedule& s,
                                        std::uint64_t seed) {
    std::vector<MetricsRecord> out;
    out.reserve(traj.rounds.size());
    for (const auto& r : traj.rounds) {
        MetricsRecord rec;
        rec.round = r.round;
        rec.tau = s.tau;
        rec.K = s.K;
        rec.loss = r.loss;
        rec.accuracy = r.accuracy;
        rec.cum_delay_s = r.cum_delay_s;
        rec.cum_energy_J = r.cum_energy_J;
        rec.seed = seed;
        out.push_back(rec);
    }
    return out;
}

}  // namespace

ExperimentSetup prepare_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ExperimentSetup s;
    s.cfg = cfg;
    s.model = model_from_config(cfg);

    ClientDataset full;
    if (cfg.dataset == "synthetic") {
        full = make_blobs(cfg.n_samples, cfg.dim, cfg.separation, cfg.seed);
    } else {
        full = load_idx(cfg.idx_images, cfg.idx_labels, cfg.subset);
        if (s.model.kind != LossKind::SquaredError) map_labels_even_odd(full);
    }

    ClientDataset train;
    if (cfg.holdout > 0.0) {
        auto [tr, ho] = split_holdout(full, cfg.holdout, cfg.seed + 17);
        train = std::move(tr);
        s.holdout = std::move(ho);
    } else {
        train = std::move(full);
    }

    const PartitionScheme scheme =
        cfg.partition == "iid" ? PartitionScheme::Iid : PartitionScheme::LabelSorted;
    s.partition = partition_data(train, cfg.N, scheme, cfg.seed + 31);

    s.initial.assign(train.cols, 0.0);
    if (cfg.init == "gaussian") {
        Rng rng(cfg.seed + 47);
        for (double& v : s.initial) v = rng.normal(0.0, cfg.init_std);
    }

    s.res.N = cfg.N;
    s.res.mu = cfg.mu;
    s.res.a = cfg.a;
    s.res.t_cm = cfg.t_cm;
    s.res.P_cm = cfg.P_cm;
    s.res.E_tr = cfg.E_tr;
    s.res.kappa = cfg.kappa;
    s.res.C = cfg.C;
    s.res.D_max = cfg.D_max;
    s.res.B = cfg.B;
    s.res.N0 = cfg.N0;
    s.res.Z = cfg.Z;
    s.res.h_i = cfg.h;
    s.res.t_tot = cfg.t_tot;
    s.res.E_tot = cfg.E_tot;
    if (cfg.heterogeneous_a) {
        Rng rng(cfg.seed + 59);
        s.res.draw_client_floors(rng);
    }

    s.constants.rho = cfg.rho;
    s.constants.eta = cfg.eta;
    s.constants.grad_f_star = cfg.grad_f_star;
    s.constants.epsilon = cfg.epsilon;
    s.constants.tau_max = cfg.tau_max;
    return s;
}

SimulateReport run_simulate(const ExperimentSetup& setup, std::optional<Schedule> schedule,
                            BudgetMode budget, std::uint64_t seed_offset,
                            bool record_clients) {
    Schedule s;
    if (schedule) {
        s = *schedule;
    } else {
        s.tau = static_cast<long long>(setup.cfg.tau);
        s.K = setup.cfg.K > 0 ? static_cast<long long>(setup.cfg.K)
                              : max_feasible_K(s.tau, setup.res);
        if (s.K < 1)
            throw InfeasibleBudgetError(
                fmt("tau = %lld does not fit the budgets even with K = 1", s.tau), {});
    }

    RunOptions opts;
    opts.budget = budget;
    opts.delay = setup.cfg.delay_model == "sampled" ? DelayAccounting::Sampled
                                                    : DelayAccounting::Expected;
    opts.record_clients = record_clients;
    opts.eval = setup.holdout.rows > 0 ? &setup.holdout : nullptr;
    opts.seed = setup.cfg.seed + seed_offset;

    SimulateReport rep;
    rep.schedule = s;
    rep.trajectory = run_schedule(s, setup.partition, setup.model, setup.cfg.eta,
                                  setup.initial, setup.res, opts);
    rep.records = records_from(rep.trajectory, s, opts.seed);

    std::ostringstream out;
    const auto& t = rep.trajectory;
    out << "schedule tau=" << s.tau << " K=" << s.K << " T=" << s.T() << "\n";
    out << "completed rounds: " << t.completed_rounds << "/" << t.planned_rounds
        << (t.truncated ? " (budget truncation)" : "") << "\n";
    if (!t.rounds.empty()) {
        const auto& last = t.rounds.back();
        out << fmt("final loss %.6f", last.loss);
        if (!std::isnan(last.accuracy)) out << fmt(", accuracy %.4f", last.accuracy);
        out << fmt(", delay %.3f/%.3f s, energy %.3f/%.3f J\n", last.cum_delay_s,
                   setup.res.t_tot, last.cum_energy_J, setup.res.E_tot);
    }
    rep.summary = out.str();
    return rep;
}

SweepReport run_sweep(const ExperimentSetup& setup, const std::vector<long long>& taus) {
    if (taus.empty()) throw std::invalid_argument("run_sweep: no tau values");
    SweepReport rep;
    std::ostringstream out;
    out << "tau sweep under budgets t_tot=" << setup.res.t_tot << " E_tot=" << setup.res.E_tot
        << "\n";
    std::uint64_t run_index = 0;
    for (long long tau : taus) {
        SweepPoint pt;
        pt.tau = tau;
        const long long K = max_feasible_K(tau, setup.res);
        if (K < 1) {
            out << "  tau=" << tau << "  infeasible (no K >= 1 fits the budgets)\n";
            rep.points.push_back(pt);
            ++run_index;
            continue;
        }
        pt.feasible = true;
        pt.schedule = Schedule{tau, K};
        auto sim = run_simulate(setup, pt.schedule, BudgetMode::Enforce, run_index);
        if (!sim.trajectory.rounds.empty()) {
            pt.final_loss = sim.trajectory.rounds.back().loss;
            pt.final_accuracy = sim.trajectory.rounds.back().accuracy;
        }
        rep.records.insert(rep.records.end(), sim.records.begin(), sim.records.end());
        out << fmt("  tau=%-4lld K=%-5lld T=%-6lld final loss %.6f", tau, K,
                   pt.schedule.T(), pt.final_loss);
        if (!std::isnan(pt.final_accuracy)) out << fmt("  accuracy %.4f", pt.final_accuracy);
        out << "\n";
        rep.points.push_back(pt);
        ++run_index;
    }
    rep.summary = out.str();
    return rep;
}

CompareReport run_compare(const ExperimentSetup& setup) {
    CompareReport rep;
    std::ostringstream out;

    std::optional<Schedule> optimized;
    std::string solve_note;
    try {
        TradeoffSolution sol = solve_closed_form(setup.res, setup.constants);
        optimized = round_and_clamp(sol, setup.constants.tau_max, setup.res, setup.constants);
    } catch (const InfeasibleBudgetError& e) {
        solve_note = e.what();
    }

    struct ArmSpec {
        std::string name;
        Schedule schedule;
    };
    std::vector<ArmSpec> specs;
    if (optimized) specs.push_back({"optimized", *optimized});
    const long long tau_base = 1;
    const long long tau_cap = static_cast<long long>(std::floor(setup.constants.tau_max));
    for (long long tau : {tau_base, tau_cap}) {
        const long long K = max_feasible_K(tau, setup.res);
        if (K >= 1) specs.push_back({fmt("baseline tau=%lld", tau), Schedule{tau, K}});
    }

    out << "budgets: t_tot=" << setup.res.t_tot << " s, E_tot=" << setup.res.E_tot << " J\n";
    if (!solve_note.empty()) out << "optimized schedule unavailable: " << solve_note << "\n";

    std::uint64_t run_index = 0;
    for (const auto& spec : specs) {
        auto sim = run_simulate(setup, spec.schedule, BudgetMode::Enforce, run_index++);
        CompareArm arm;
        arm.name = spec.name;
        arm.schedule = spec.schedule;
        if (!sim.trajectory.rounds.empty()) {
            arm.final_loss = sim.trajectory.rounds.back().loss;
            arm.final_accuracy = sim.trajectory.rounds.back().accuracy;
        }
        rep.records.insert(rep.records.end(), sim.records.begin(), sim.records.end());
        out << fmt("  %-18s tau=%-4lld K=%-5lld T=%-6lld final loss %.6f", arm.name.c_str(),
                   arm.schedule.tau, arm.schedule.K, arm.schedule.T(), arm.final_loss);
        if (!std::isnan(arm.final_accuracy)) out << fmt("  accuracy %.4f", arm.final_accuracy);
        out << "\n";
        rep.arms.push_back(arm);
    }
    rep.optimized_available = optimized.has_value();

    if (rep.optimized_available && rep.arms.size() > 1) {
        double best_baseline = rep.arms[1].final_loss;
        for (std::size_t i = 2; i < rep.arms.size(); ++i)
            best_baseline = std::min(best_baseline, rep.arms[i].final_loss);
        out << fmt("optimized vs best baseline: %.6f vs %.6f (%+.2f%%)\n",
                   rep.arms[0].final_loss, best_baseline,
                   100.0 * (rep.arms[0].final_loss - best_baseline) /
                       std::max(best_baseline, 1e-300));
    }
    rep.summary = out.str();
    return rep;
}

BoundsReport run_bounds(const ExperimentSetup& setup) {
    BoundsReport rep;
    Schedule s;
    s.tau = static_cast<long long>(setup.cfg.tau);
    s.K = setup.cfg.K > 0 ? static_cast<long long>(setup.cfg.K)
                          : max_feasible_K(s.tau, setup.res);
    if (s.K < 1) s.K = 1;
    rep.schedule = s;

    auto sim = run_simulate(setup, s, BudgetMode::Ignore, 0, /*record_clients=*/true);
    const Trajectory& traj = sim.trajectory;

    // Probe set: the run itself (initial point, weighted averages at every step,
    // client parameters at aggregation steps) plus random perturbations.
    std::vector<ParamVector> probes;
    probes.push_back(traj.initial);
    for (const auto& w : traj.virtual_global) probes.push_back(w);
    for (std::size_t t = s.tau - 1; t < traj.client_history.size();
         t += static_cast<std::size_t>(s.tau))
        for (const auto& w : traj.client_history[t]) probes.push_back(w);
    Rng rng(setup.cfg.seed + 101);
    probes = add_perturbations(std::move(probes), 20, 0.5, rng);

    rep.estimated = estimate_constants(setup.model, setup.partition, probes);
    rep.estimated.eta = setup.cfg.eta;
    rep.estimated.tau_max = setup.cfg.tau_max;

    const ClientDataset pooled = pool(setup.partition);
    const ParamVector w_star =
        minimize_pooled(setup.model, pooled, setup.cfg.eta, 1e-8, 200000);
    rep.measured_gap =
        loss(setup.model, traj.final_params, pooled) - loss(setup.model, w_star, pooled);

    rep.epsilon_from_config = setup.cfg.epsilon > 0.0;
    rep.estimated.epsilon =
        rep.epsilon_from_config ? setup.cfg.epsilon : std::max(rep.measured_gap, 0.0);

    const double T = static_cast<double>(traj.completed_rounds * s.tau);
    const double tau = static_cast<double>(s.tau);
    rep.gap_bound = loss_gap_bound(T, tau, rep.estimated);
    rep.min_trainings = min_trainings_for_gap(setup.cfg.eps_target, rep.estimated, tau);
    rep.tightness = check_tightness_conditions(traj, setup.partition, setup.model);
    rep.deviation =
        verify_local_deviation_bound(traj, setup.partition, setup.model, rep.estimated, tau);

    std::ostringstream out;
    out << "bound report for tau=" << s.tau << " K=" << s.K << " (T=" << s.T() << ")\n";
    out << fmt("estimated constants: rho=%.6g beta=%.6g grad_f_star=%.6g delta=%.6g\n",
               rep.estimated.rho, rep.estimated.beta, rep.estimated.grad_f_star,
               rep.estimated.delta);
    out << "  per-client delta_i:";
    for (double d : rep.estimated.delta_i) out << fmt(" %.6g", d);
    out << "\n";
    out << fmt("measured gap F(w(T)) - F(w*) = %.6g; epsilon %s = %.6g\n", rep.measured_gap,
               rep.epsilon_from_config ? "(config)" : "(measured)", rep.estimated.epsilon);
    if (rep.gap_bound)
        out << fmt("loss-gap bound at T=%g: %.6g\n", T, *rep.gap_bound);
    else
        out << fmt("loss-gap bound at T=%g: not applicable (nonpositive denominator)\n", T);
    out << fmt("steps needed for gap <= %g: %.1f\n", setup.cfg.eps_target, rep.min_trainings);
    out << fmt("deviation envelope at t=0 evaluates to -tau/rho = %.6g (negative by "
               "construction; only positive values bound anything)\n",
               -tau / rep.estimated.rho);
    static const char* cond_names[4] = {"initial vs final", "client vs global gradients",
                                        "client vs averaged parameters",
                                        "steps vs negative gradient"};
    for (std::size_t i = 0; i < 4; ++i) {
        const auto& c = rep.tightness.conditions[i];
        out << fmt("tightness %zu (%s): %s  max residual %.3g, min coefficient %.3g\n", i + 1,
                   cond_names[i], c.satisfied ? "holds" : "fails", c.max_residual,
                   c.min_coefficient);
    }
    out << fmt("deviation envelope: %lld/%lld points violated (max excess %.3g)\n",
               rep.deviation.envelope_violations, rep.deviation.envelope_points,
               rep.deviation.max_envelope_excess);
    out << fmt("gradient cap: %lld/%lld points violated (max ratio %.6g)\n",
               rep.deviation.gradcap_violations, rep.deviation.gradcap_points,
               rep.deviation.max_gradcap_ratio);
    out << "estimated constants are maxima over probes (lower bounds of the true\n"
           "suprema), so envelope violations are diagnostics, not errors\n";
    rep.summary = out.str();

    std::string csv = "key,value\n";
    auto kv = [&csv](const std::string& k, double v) {
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%.9g", v);
        csv += k + "," + buf + "\n";
    };
    kv("tau", static_cast<double>(s.tau));
    kv("K", static_cast<double>(s.K));
    kv("T", T);
    kv("rho", rep.estimated.rho);
    kv("beta", rep.estimated.beta);
    kv("grad_f_star", rep.estimated.grad_f_star);
    kv("delta", rep.estimated.delta);
    for (std::size_t i = 0; i < rep.estimated.delta_i.size(); ++i)
        kv("delta_" + std::to_string(i + 1), rep.estimated.delta_i[i]);
    kv("epsilon", rep.estimated.epsilon);
    kv("measured_gap", rep.measured_gap);
    kv("gap_bound", rep.gap_bound ? *rep.gap_bound : std::nan(""));
    kv("min_trainings", rep.min_trainings);
    for (std::size_t i = 0; i < 4; ++i) {
        kv("tightness_" + std::to_string(i + 1) + "_residual",
           rep.tightness.conditions[i].max_residual);
        kv("tightness_" + std::to_string(i + 1) + "_satisfied",
           rep.tightness.conditions[i].satisfied ? 1.0 : 0.0);
    }
    kv("envelope_points", static_cast<double>(rep.deviation.envelope_points));
    kv("envelope_violations", static_cast<double>(rep.deviation.envelope_violations));
    kv("gradcap_points", static_cast<double>(rep.deviation.gradcap_points));
    kv("gradcap_violations", static_cast<double>(rep.deviation.gradcap_violations));
    rep.csv = csv;
    return rep;
}

SolveReport run_solve(const ExperimentSetup& setup) {
    SolveReport rep;
    try {
        rep.solution = solve_closed_form(setup.res, setup.constants);
        rep.feasible = true;
    } catch (const InfeasibleBudgetError& e) {
        rep.solution = e.solution;
        rep.feasible = false;
    }
    if (rep.feasible) {
        try {
            rep.rounded = round_and_clamp(rep.solution, setup.constants.tau_max, setup.res,
                                          setup.constants);
        } catch (const InfeasibleBudgetError&) {
        }
    }

    std::ostringstream out;
    out << fmt("candidate table (objective coefficient rho*eta*grad_f_star = %.6g)\n",
               rep.solution.objective_coeff);
    out << fmt("  %-15s %-12s %-12s %-13s %-9s %-10s %-10s %s\n", "case", "tau", "K",
               "objective", "feasible", "delay_use", "energy_use", "reject_reason");
    for (const auto& c : rep.solution.candidates) {
        out << fmt("  %-15s %-12.6g %-12.6g %-13.6g %-9s %-10.4g %-10.4g %s\n",
                   kkt_case_name(c.kkt_case), c.tau, c.K, c.objective,
                   c.feasible ? "yes" : "no", 1.0 + c.delay_residual,
                   1.0 + c.energy_residual, c.reject_reason.c_str());
    }
    if (rep.feasible) {
        const auto& sel = rep.solution.selected_candidate();
        out << fmt("selected: %s tau=%.6g K=%.6g objective=%.6g\n",
                   kkt_case_name(sel.kkt_case), sel.tau, sel.K, sel.objective);
        if (rep.rounded) {
            const BudgetUsage u = budget_usage(*rep.rounded, setup.res);
            out << fmt("rounded:  tau=%lld K=%lld T=%lld (delay %.4g/%.4g s, energy "
                       "%.4g/%.4g J)\n",
                       rep.rounded->tau, rep.rounded->K, rep.rounded->T(), u.delay_s,
                       setup.res.t_tot, u.energy_J, setup.res.E_tot);
        } else {
            out << "rounded:  no feasible integer neighbor\n";
        }
    } else {
        out << "selected: none (no candidate satisfies both budgets; delay_use/energy_use\n"
               "          show how far each candidate overshoots its budget)\n";
    }
    out << "note: tau*/K* depend on the units of a (seconds per local step) and E_tr\n"
           "      (joules per local step); schedules quoted under other unit conventions\n"
           "      are not comparable without converting these inputs first.\n";
    rep.table = out.str();

    std::string csv = "case,tau,K,discriminant,objective,feasible,delay_use,energy_use\n";
    for (const auto& c : rep.solution.candidates) {
        char buf[256];
        std::snprintf(buf, sizeof(buf), "%s,%.9g,%.9g,%.9g,%.9g,%d,%.9g,%.9g\n",
                      kkt_case_name(c.kkt_case), c.tau, c.K, c.discriminant, c.objective,
                      c.feasible ? 1 : 0, 1.0 + c.delay_residual, 1.0 + c.energy_residual);
        csv += buf;
    }
    rep.csv = csv;
    return rep;
}

}  // namespace fedsched
