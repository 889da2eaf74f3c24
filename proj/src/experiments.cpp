#include "edg/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"

#include "edg/errors.hpp"
#include "edg/finite_gibbs.hpp"
#include "edg/flux_contraction.hpp"
#include "edg/meanfield.hpp"
#include "edg/rng.hpp"
#include "edg/state_metrics.hpp"
#include "edg/variational_mf.hpp"

namespace edg {

namespace fs = std::filesystem;

bool CommandResult::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

std::ofstream open_out(const RunContext& ctx, const std::string& name, CommandResult& res) {
    std::ofstream f(fs::path(ctx.out_dir) / name);
    if (!f) throw Error("cannot write '" + (fs::path(ctx.out_dir) / name).string() + "'");
    f.precision(17);
    res.outputs.push_back(name);
    return f;
}

std::vector<double> uniform_grid(double T, int n) {
    std::vector<double> g;
    for (int i = 0; i <= n; ++i) g.push_back(T * i / n);
    return g;
}

std::size_t index_of_time(const std::vector<double>& grid, double t) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (std::abs(grid[i] - t) < std::abs(grid[best] - t)) best = i;
    if (std::abs(grid[best] - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw RangeError("output time " + fmt(t) + " missing from grid");
    return best;
}

ClusterDistribution initial_from_config(const Config& cfg, const WeightTable& wt, int M) {
    const std::string type = cfg.str("init", "type", "equilibrium");
    if (type == "delta") {
        const long k = cfg.integer("init", "size", 1);
        if (k < 0 || k > M) throw ConfigError("init.size outside the window", 0, "init.size");
        return ClusterDistribution::delta(static_cast<int>(k), M);
    }
    if (type == "equilibrium" || type == "perturbed_equilibrium") {
        const double rho = cfg.num("init", "rho", 1.0);
        std::vector<double> p = equilibrium_capped(wt, rho).omega.p();
        p.resize(static_cast<std::size_t>(M) + 1, 0.0);
        if (type == "perturbed_equilibrium") {
            const double a = cfg.num("init", "amplitude", 0.3);
            for (std::size_t k = 0; k < p.size(); ++k) p[k] *= 1.0 + a * std::cos(1.3 * k);
        }
        double s = 0.0;
        for (double v : p) s += v;
        for (double& v : p) v /= s;
        return ClusterDistribution(std::move(p));
    }
    throw ConfigError("unknown init.type '" + type + "'", 0, "init.type");
}

}  // namespace

KernelSpec kernel_from_config(const Config& cfg, int m_max) {
    const std::string fam = cfg.str("kernel", "family", "constant");
    m_max = static_cast<int>(cfg.integer("kernel", "m_max", m_max));
    if (fam == "constant") return KernelSpec::constant(cfg.num("kernel", "value", 1.0), m_max);
    if (fam == "product_power") return KernelSpec::product_power(cfg.num("kernel", "alpha", 0.5), m_max);
    if (fam == "weight_driven_power")
        return KernelSpec::weight_driven_power(cfg.num("kernel", "gamma", 3.0), m_max);
    throw ConfigError("unknown kernel.family '" + fam + "'", 0, "kernel.family");
}

Perturbation perturbation_from_config(const Config& cfg) {
    const std::string type = cfg.str("perturbation", "type", "none");
    if (type == "none") return Perturbation::none();
    if (type == "constant") return Perturbation::constant(cfg.num("perturbation", "amplitude"));
    if (type == "oscillating")
        return Perturbation::oscillating(cfg.num("perturbation", "amplitude"),
                                         cfg.num("perturbation", "frequency", 1.0));
    throw ConfigError("unknown perturbation.type '" + type + "'", 0, "perturbation.type");
}

MicroState lattice_state(long N, long L, int M) {
    if (L < 1 || N < 0) throw RangeError("lattice_state: bad (N, L)");
    const long q = N / L, r = N % L;
    if (q + (r > 0 ? 1 : 0) > M) throw RangeError("lattice_state: window too small");
    std::vector<long> n(static_cast<std::size_t>(M) + 1, 0);
    n[q] += L - r;
    if (r > 0) n[q + 1] += r;
    return MicroState::from_counts(std::move(n));
}

std::vector<ChaosRow> chaos_table(const KernelSpec& kernel, const Perturbation& pert, const ChaosParams& p) {
    if (p.Ls.empty()) throw EmptyError("chaos_table: empty L schedule");
    std::vector<double> times = p.times.empty() ? std::vector<double>{0.0, p.T} : p.times;
    EdgSystem sys{kernel, pert, p.M, ClusterDistribution::delta(p.rho, p.M)};
    sys.check();
    const Trajectory ode = integrate(sys, p.T, p.tol, times, false);
    std::vector<std::vector<double>> ode_tail;
    for (double t : times) ode_tail.push_back(tail(ode.at(index_of_time(ode.t, t))));

    std::vector<ChaosRow> rows;
    for (long L : p.Ls) {
        const MicroState s0 = lattice_state(p.rho * L, L, p.M);
        SimOptions opt;
        opt.output_times = times;
        opt.record_counts = false;
        const auto runs = run_ensemble(s0, kernel, pert, p.T, mix64(p.seed + static_cast<std::uint64_t>(L)), p.R,
                                       opt, p.threads);
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            const auto& ref = ode_tail[ti];
            std::vector<std::vector<double>> tails;
            for (const auto& r : runs) tails.push_back(tail(ClusterDistribution(r.traj.c.at(ti))));
            std::vector<double> mean(ref.size(), 0.0);
            for (const auto& tv : tails)
                for (std::size_t k = 0; k < ref.size(); ++k) mean[k] += tv[k] / p.R;
            ChaosRow row;
            row.L = L;
            row.t = times[ti];
            std::vector<double> sgn(ref.size());
            for (std::size_t k = 0; k < ref.size(); ++k) {
                row.d_ex += std::abs(mean[k] - ref[k]);
                sgn[k] = mean[k] > ref[k] ? 1.0 : (mean[k] < ref[k] ? -1.0 : 0.0);
            }
            std::vector<double> y(tails.size(), 0.0);
            double ybar = 0.0;
            for (std::size_t r = 0; r < tails.size(); ++r) {
                double spread = 0.0;
                for (std::size_t k = 0; k < ref.size(); ++k) {
                    y[r] += sgn[k] * (tails[r][k] - ref[k]);
                    spread += std::abs(tails[r][k] - ref[k]);
                }
                ybar += y[r] / p.R;
                row.spread += spread / p.R;
            }
            double var = 0.0;
            for (double v : y) var += (v - ybar) * (v - ybar);
            row.se = p.R > 1 ? std::sqrt(var / (p.R - 1) / p.R) : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

bool chaos_decreasing(const std::vector<ChaosRow>& rows, double t, double sigmas, std::string* detail) {
    std::vector<ChaosRow> at;
    for (const auto& r : rows)
        if (std::abs(r.t - t) < 1e-12) at.push_back(r);
    bool ok = at.size() >= 2;
    std::ostringstream os;
    for (std::size_t i = 0; i + 1 < at.size(); ++i) {
        const double diff = at[i].d_ex - at[i + 1].d_ex;
        const double s = std::hypot(at[i].se, at[i + 1].se);
        const bool pass = diff > sigmas * s;
        ok = ok && pass;
        os << "L " << at[i].L << "->" << at[i + 1].L << ": drop " << fmt(diff) << " vs " << fmt(sigmas * s)
           << (pass ? " ok; " : " FAIL; ");
    }
    if (detail) *detail = os.str();
    return ok;
}

std::vector<CondenseRow> condense_table(double gamma, const CondenseParams& p) {
    if (p.Ls.empty()) throw EmptyError("condense_table: empty L schedule");
    std::vector<double> times = p.times.empty() ? std::vector<double>{0.0, p.T} : p.times;
    std::vector<CondenseRow> rows;
    for (long L : p.Ls) {
        const long N = std::lround(p.rho * L);
        const int M = static_cast<int>(std::max<long>(N, p.M0));
        const KernelSpec kernel = KernelSpec::weight_driven_power(gamma, M);
        const Perturbation none = Perturbation::none();
        SimOptions opt;
        opt.output_times = times;
        opt.record_counts = false;
        const std::uint64_t seed = mix64(p.seed + static_cast<std::uint64_t>(L));
        std::vector<SimResult> runs;
        if (p.init == "lattice") {
            runs = run_ensemble(lattice_state(N, L, M), kernel, none, p.T, seed, p.R, opt, p.threads);
        } else if (p.init == "canonical") {
            const WeightTable wt = weights(kernel);
            for (int r = 0; r < p.R; ++r) {
                StreamRng rng(seed, 1'000'000 + static_cast<std::uint64_t>(r));
                MicroState s = sample_canonical(wt, static_cast<int>(N), static_cast<int>(L), rng);
                s.n.resize(static_cast<std::size_t>(M) + 1, 0);
                runs.push_back(simulate(s, kernel, none, p.T, seed, static_cast<std::uint64_t>(r), opt));
            }
        } else {
            throw ConfigError("unknown condensation init '" + p.init + "'", 0, "scale.init");
        }
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            CondenseRow row;
            row.L = L;
            row.rho = static_cast<double>(N) / L;
            row.t = times[ti];
            std::vector<double> m(runs.size());
            for (std::size_t r = 0; r < runs.size(); ++r) {
                const auto& c = runs[r].traj.c.at(ti);
                for (int k = 1; k <= std::min(p.M0, M); ++k) m[r] += k * c[k];
                int top = 0;
                for (int k = M; k >= 0; --k)
                    if (c[k] > 0.0) {
                        top = k;
                        break;
                    }
                row.max_cluster_fraction += static_cast<double>(top) / N / runs.size();
            }
            double mean = 0.0, var = 0.0;
            for (double v : m) mean += v / m.size();
            for (double v : m) var += (v - mean) * (v - mean);
            row.truncated_moment = mean;
            row.se = m.size() > 1 ? std::sqrt(var / (m.size() - 1) / m.size()) : 0.0;
            rows.push_back(row);
        }
    }
    return rows;
}

CommandResult cmd_solve(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    CommandResult res;
    const int M = static_cast<int>(cfg.integer("scale", "M", 40));
    const double T = cfg.num("scale", "T", 10.0);
    const double tol = cfg.num("scale", "tol", 1e-11);
    const int nout = static_cast<int>(cfg.integer("scale", "outputs", 200));
    const KernelSpec kernel = kernel_from_config(cfg, M);
    const Perturbation pert = perturbation_from_config(cfg);
    const WeightTable wt = weights(kernel);
    EdgSystem sys{kernel, pert, M, initial_from_config(cfg, wt, M)};
    sys.check();
    const Trajectory traj = integrate(sys, T, tol, uniform_grid(T, nout), true);
    {
        auto f = open_out(ctx, "trajectory.csv", res);
        write_trajectory_csv(f, traj);
    }
    double drift0 = 0.0, drift1 = 0.0;
    const auto c0 = traj.at(0);
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const auto c = traj.at(i);
        drift0 = std::max(drift0, std::abs(c.mom0() - c0.mom0()));
        drift1 = std::max(drift1, std::abs(c.mom1() - c0.mom1()));
    }
    res.checks.push_back({"mass_conserved", drift0 <= 1e-8, "max drift " + fmt(drift0)});
    res.checks.push_back({"moment_conserved", drift1 <= 1e-8, "max drift " + fmt(drift1)});

    const double rho = c0.mom1() / c0.mom0();
    std::vector<double> ref = equilibrium_capped(wt, rho).omega.p();
    ref.resize(static_cast<std::size_t>(M) + 1, 0.0);
    const FunctionalReport rep = edf_total(sys, wt, traj, ClusterDistribution(ref));
    {
        auto f = open_out(ctx, "edf_report.json", res);
        f << rep.to_json() << '\n';
    }
    const bool fin = rep.total.finite();
    const double tot = fin ? rep.total.value() : INFINITY;
    res.checks.push_back({"edf_zero", fin && std::abs(tot) <= 10.0 * rep.quad_error,
                          "total " + fmt(tot) + " quad " + fmt(rep.quad_error)});

    if (cfg.flag("picard", "enabled", false)) {
        const double M_ball = cfg.num("picard", "M_ball");
        const double T_step = cfg.num("picard", "T_step");
        const double Tp = cfg.num("picard", "T", std::min(T, 1.0));
        const int nodes = static_cast<int>(cfg.integer("picard", "nodes", 33));
        const PicardResult pr = picard_solve(sys, M_ball, T_step, Tp, nodes);
        const Trajectory ref_traj = integrate(sys, Tp, tol, pr.traj.t, false);
        double worst_factor = 0.0, bound = 0.0, diff = 0.0, radius = 0.0;
        for (const auto& w : pr.windows) {
            for (double f : w.factors) worst_factor = std::max(worst_factor, f);
            bound = std::max(bound, w.bound);
            radius = std::max(radius, w.ball_radius_used);
        }
        for (std::size_t i = 0; i < pr.traj.size(); ++i)
            diff = std::max(diff, d_ex(pr.traj.at(i), ref_traj.at(index_of_time(ref_traj.t, pr.traj.t[i]))));
        const double comb = 10.0 * pr.quad_error + 10.0 * tol;
        res.checks.push_back({"picard_factor", worst_factor <= bound,
                              "worst " + fmt(worst_factor) + " bound " + fmt(bound)});
        res.checks.push_back({"picard_ball", radius <= M_ball, "radius " + fmt(radius) + " ball " + fmt(M_ball)});
        res.checks.push_back({"picard_vs_rk", diff <= comb, "sup d_ex " + fmt(diff) + " tol " + fmt(comb)});
    }
    return res;
}

CommandResult cmd_simulate(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    CommandResult res;
    const long L = cfg.integer("scale", "L");
    const long N = cfg.integer("scale", "N", L);
    const int M = static_cast<int>(cfg.integer("scale", "M", N));
    const double T = cfg.num("scale", "T", 1.0);
    const int R = static_cast<int>(cfg.integer("scale", "replicas", 1));
    const int nout = static_cast<int>(cfg.integer("scale", "outputs", 10));
    const KernelSpec kernel = kernel_from_config(cfg, M);
    const Perturbation pert = perturbation_from_config(cfg);
    const std::string init = cfg.str("init", "type", "lattice");
    MicroState s0;
    if (init == "lattice") {
        s0 = lattice_state(N, L, M);
    } else if (init == "canonical") {
        StreamRng rng(ctx.seed, 0xffffffffULL);
        s0 = sample_canonical(weights(kernel), static_cast<int>(N), static_cast<int>(L), rng);
        s0.n.resize(static_cast<std::size_t>(M) + 1, 0);
    } else {
        throw ConfigError("unknown init.type '" + init + "'", 0, "init.type");
    }
    SimOptions opt;
    opt.output_times = uniform_grid(T, nout);
    opt.check_invariants = cfg.flag("scale", "check_invariants", true);
    const auto runs = run_ensemble(s0, kernel, pert, T, ctx.seed, R, opt, ctx.threads);
    Trajectory mean;
    for (std::size_t ti = 0; ti < opt.output_times.size(); ++ti) {
        std::vector<ClusterDistribution> ms;
        for (const auto& r : runs) ms.emplace_back(r.traj.c.at(ti));
        mean.t.push_back(opt.output_times[ti]);
        mean.c.push_back(ensemble_mean(ms).mean.p());
    }
    {
        auto f = open_out(ctx, "ensemble_mean.csv", res);
        write_trajectory_csv(f, mean);
    }
    {
        auto f = open_out(ctx, "runs.csv", res);
        f << "replica,proposals,accepted,max_cluster_final,N_final,L_final\n";
        for (std::size_t r = 0; r < runs.size(); ++r)
            f << r << ',' << runs[r].proposals << ',' << runs[r].accepted << ',' << runs[r].max_cluster_final << ','
              << runs[r].final_state.N << ',' << runs[r].final_state.L << '\n';
    }
    bool ok = true;
    for (const auto& r : runs) {
        r.final_state.check();
        ok = ok && r.final_state.N == N && r.final_state.L == L;
    }
    res.checks.push_back({"integer_conservation", ok, std::to_string(R) + " replicas"});
    return res;
}

CommandResult cmd_chaos(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    CommandResult res;
    ChaosParams p;
    p.Ls = cfg.int_list("scale", "L");
    p.R = static_cast<int>(cfg.integer("scale", "replicas", 64));
    p.rho = static_cast<int>(cfg.integer("scale", "rho", 1));
    p.M = static_cast<int>(cfg.integer("scale", "M", 40));
    p.T = cfg.num("scale", "T", 1.0);
    p.times = uniform_grid(p.T, static_cast<int>(cfg.integer("scale", "outputs", 4)));
    p.seed = ctx.seed;
    p.threads = ctx.threads;
    const KernelSpec kernel = kernel_from_config(cfg, p.M);
    const Perturbation pert = perturbation_from_config(cfg);
    const auto rows = chaos_table(kernel, pert, p);
    {
        auto f = open_out(ctx, "chaos.csv", res);
        f << "L,t,d_ex,stderr,spread\n";
        for (const auto& r : rows) f << r.L << ',' << r.t << ',' << r.d_ex << ',' << r.se << ',' << r.spread << '\n';
    }
    std::string detail;
    const bool dec = chaos_decreasing(rows, p.T, cfg.num("scale", "sigmas", 3.0), &detail);
    res.checks.push_back({"error_decreasing_in_L", dec, detail});
    bool spread_ok = true;
    double prev = INFINITY;
    for (const auto& r : rows)
        if (std::abs(r.t - p.T) < 1e-12) {
            spread_ok = spread_ok && r.spread < prev;
            prev = r.spread;
        }
    res.checks.push_back({"spread_decreasing_in_L", spread_ok, "member d_ex at t = T"});
    return res;
}

CommandResult cmd_condense(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    CommandResult res;
    const double gamma = cfg.num("kernel", "gamma", 3.0);
    CondenseParams p;
    p.Ls = cfg.int_list("scale", "L");
    p.rho = cfg.num("scale", "rho", 1.2);
    p.T = cfg.num("scale", "T", 20.0);
    p.M0 = static_cast<int>(cfg.integer("scale", "M0", 50));
    p.R = static_cast<int>(cfg.integer("scale", "replicas", 4));
    p.init = cfg.str("scale", "init", "canonical");
    p.times = uniform_grid(p.T, static_cast<int>(cfg.integer("scale", "outputs", 4)));
    p.seed = ctx.seed;
    p.threads = ctx.threads;
    const double control = cfg.num("scale", "control_rho", 0.5);
    const double slack = cfg.num("scale", "slack", 0.1);

    const long Lmax = *std::max_element(p.Ls.begin(), p.Ls.end());
    const WeightTable wt = weights(KernelSpec::weight_driven_power(gamma, static_cast<int>(std::max(2000L, Lmax))));
    if (!wt.rho_c.finite()) throw SupercriticalError("condense: rho_c is infinite for this kernel", INFINITY);
    const double rho_c = wt.rho_c.value();
    if (p.rho <= rho_c)
        throw SupercriticalError("condense: configured rho " + fmt(p.rho) + " is not above rho_c", rho_c);

    const auto rows = condense_table(gamma, p);
    CondenseParams pc = p;
    pc.rho = control;
    pc.Ls = {Lmax};
    const auto crows = condense_table(gamma, pc);
    {
        auto f = open_out(ctx, "condense.csv", res);
        f << "L,rho,t,truncated_moment,stderr,max_cluster_fraction\n";
        for (const std::vector<CondenseRow>* rs : {&rows, &crows})
            for (const auto& r : *rs)
                f << r.L << ',' << r.rho << ',' << r.t << ',' << r.truncated_moment << ',' << r.se << ','
                  << r.max_cluster_fraction << '\n';
    }
    const auto& last = rows.back();
    const double rel = std::abs(last.truncated_moment - rho_c) / rho_c;
    res.checks.push_back({"truncated_moment_near_rho_c", rel <= slack,
                          "moment " + fmt(last.truncated_moment) + " rho_c " + fmt(rho_c) + " rel " + fmt(rel)});
    const double crel = std::abs(crows.back().truncated_moment - control) / control;
    res.checks.push_back({"subcritical_control", crel <= 0.02,
                          "moment " + fmt(crows.back().truncated_moment) + " rel " + fmt(crel)});
    return res;
}

namespace {

WeightTable tilted(const WeightTable& w, const std::string& kind, double a) {
    std::vector<double> v(w.w.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        double lt = 0.0;
        if (kind == "sin") lt = a * std::sin(static_cast<double>(k));
        else if (kind == "decay") lt = a / (1.0 + k);
        else if (kind != "none") throw ConfigError("unknown tilt.kind '" + kind + "'", 0, "tilt.kind");
        v[k] = w.w[k] * std::exp(lt);
    }
    return WeightTable::from_values(std::move(v), w.phi_c);
}

}  // namespace

CommandResult cmd_gamma(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    CommandResult res;
    const int window = static_cast<int>(cfg.integer("scale", "window", 400));
    const double rho = cfg.num("scale", "rho", 1.0);
    const auto Ns = cfg.int_list("scale", "N");
    const auto Ls = cfg.has("scale", "L") ? cfg.int_list("scale", "L") : Ns;
    if (Ns.size() != Ls.size()) throw ConfigError("scale.N and scale.L differ in length", 0, "scale.L");
    const double budget = cfg.num("scale", "budget", 1e6);
    std::vector<std::pair<int, int>> sched;
    for (std::size_t i = 0; i < Ns.size(); ++i) {
        if (Ns[i] > window) throw ConfigError("scale.window must cover every N", 0, "scale.window");
        sched.emplace_back(static_cast<int>(Ns[i]), static_cast<int>(Ls[i]));
    }
    const WeightTable w = weights(kernel_from_config(cfg, window));
    const WeightTable wt = tilted(w, cfg.str("tilt", "kind", "sin"), cfg.num("tilt", "amplitude", 0.25));
    const auto rows = gamma_table(wt, w, rho, sched, budget);
    const auto idrows = gamma_table(w, w, rho, sched, budget);
    {
        auto f = open_out(ctx, "gamma.csv", res);
        write_gamma_csv(f, rows);
    }
    {
        auto f = open_out(ctx, "gamma_identity.csv", res);
        write_gamma_csv(f, idrows);
    }
    const double g0 = rows.front().gap, g1 = rows.back().gap;
    res.checks.push_back({"gap_halved", g1 < 0.5 * g0, "first " + fmt(g0) + " last " + fmt(g1)});
    double idmax = 0.0;
    for (const auto& r : idrows) idmax = std::max({idmax, std::abs(r.value), std::abs(r.limit)});
    res.checks.push_back({"identity_zero", idmax <= 1e-12, "max " + fmt(idmax)});
    const double a0 = std::abs(rows.front().A - rows.front().minus_inf_Jbar);
    const double a1 = std::abs(rows.back().A - rows.back().minus_inf_Jbar);
    res.checks.push_back({"A_trend", a1 < a0, "first " + fmt(a0) + " last " + fmt(a1)});
    return res;
}

CommandResult cmd_edp(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    CommandResult res;
    const auto Ns = cfg.int_list("scale", "N");
    const auto Ls = cfg.int_list("scale", "L");
    const double T = cfg.num("scale", "T", 2.0);
    const double tol = cfg.num("scale", "tol", 1e-12);
    const long Nmax = *std::max_element(Ns.begin(), Ns.end());
    const KernelSpec kernel = kernel_from_config(cfg, static_cast<int>(Nmax));
    const Perturbation pert = perturbation_from_config(cfg);
    const WeightTable wt = weights(kernel);
    auto f = open_out(ctx, "edp.csv", res);
    f << "N,L,states,total,quad_error,total_2J,chain_residual,stationary_max,mass_error,dbc_residual,pass\n";
    bool all = true;
    std::ostringstream fails;
    for (long N : Ns) {
        for (long L : Ls) {
            const StateSpace sp = enumerate(static_cast<int>(N), static_cast<int>(L));
            const GibbsMeasure g = gibbs(sp, wt);
            std::vector<double> C0(sp.size());
            double s = 0.0;
            for (std::size_t i = 0; i < C0.size(); ++i) s += C0[i] = 1.0 + 0.8 * std::cos(1.3 * i);
            for (double& v : C0) v /= s;
            MasterTrajectory mt = solve_fke(sp, kernel, pert, C0, T, tol);
            const auto rep = finite_edf(sp, g, wt, kernel, pert, mt);
            MasterTrajectory m2 = mt;
            for (auto& J : m2.J)
                for (double& v : J) v *= 2.0;
            const auto rep2 = finite_edf(sp, g, wt, kernel, pert, m2);
            double mass = 0.0;
            for (const auto& C : mt.C) {
                double m = 0.0;
                for (double v : C) m += v;
                mass = std::max(mass, std::abs(m - 1.0));
            }
            double stat = 0.0, dbc = 0.0;
            if (pert.is_zero()) {
                const auto ms = solve_fke(sp, kernel, pert, g.pi, T, tol);
                stat = finite_edf(sp, g, wt, kernel, pert, ms).max_abs_term;
                dbc = lifted_dbc_check(sp, g, kernel, pert).max_residual;
            }
            const double tot = rep.total.to_double();
            const bool ok = std::abs(tot) <= 10.0 * rep.quad_error && rep2.total.to_double() > 0.0 &&
                            mass <= 1e-10 && stat <= 1e-10 && (!pert.is_zero() ? true : dbc <= 1e-12);
            if (!ok) fails << "(" << N << "," << L << ") ";
            all = all && ok;
            f << N << ',' << L << ',' << sp.size() << ',' << tot << ',' << rep.quad_error << ','
              << rep2.total.to_double() << ',' << rep.chain_rule_residual << ',' << stat << ',' << mass << ',' << dbc
              << ',' << (ok ? 1 : 0) << '\n';
        }
    }
    res.checks.push_back({"edf_zero_finite", all, all ? "all (N, L) pass" : "failing: " + fails.str()});
    return res;
}

CommandResult cmd_contraction(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    CommandResult res;
    const int problems = static_cast<int>(cfg.integer("scale", "problems", 100));
    const int channels = static_cast<int>(cfg.integer("scale", "channels", 8));
    StreamRng rng(ctx.seed, 7);
    auto f = open_out(ctx, "contraction.csv", res);
    f << "problem,channel,theta,j_net,closed_form,numeric,gap\n";
    double worst = 0.0, lowest = 0.0;
    for (int q = 0; q < problems; ++q) {
        NetFluxProblem p;
        for (int c = 0; c < channels; ++c) {
            const double th = c == 0 && q % 10 == 0 ? 0.0 : std::exp(4.0 * rng.uniform() - 2.0);
            p.theta.push_back(th);
            p.j_net.push_back(th == 0.0 ? 0.0 : th * (6.0 * rng.uniform() - 3.0));
        }
        const auto r = contraction_oracle(p);
        worst = std::max(worst, r.max_gap);
        lowest = std::min(lowest, r.min_signed);
        for (int c = 0; c < channels; ++c)
            f << q << ',' << c << ',' << p.theta[c] << ',' << p.j_net[c] << ',' << r.closed[c] << ',' << r.numeric[c]
              << ',' << std::abs(r.numeric[c] - r.closed[c]) << '\n';
    }
    res.checks.push_back({"oracle_gap", worst <= 1e-8, "max gap " + fmt(worst)});
    res.checks.push_back({"lower_bound", lowest >= -1e-10, "min signed " + fmt(lowest)});
    const auto ow = optimal_oneway({{1.0}, {0.75}});
    const bool exact = ow.j[0] == 2.0 && ow.j_dagger[0] == 0.5;
    res.checks.push_back({"closed_form_example", exact, "j " + fmt(ow.j[0]) + " j_dagger " + fmt(ow.j_dagger[0])});
    return res;
}

CommandResult cmd_validate_kernel(const RunContext& ctx) {
    const Config& cfg = ctx.cfg;
    CommandResult res;
    const int M = static_cast<int>(cfg.integer("scale", "M", 200));
    const KernelSpec kernel = kernel_from_config(cfg, M);
    const Perturbation pert = perturbation_from_config(cfg);
    const AssumptionReport a = validate_assumptions(kernel, pert);
    const WeightTable wt = weights(kernel);
    const double dbc = kernel_dbc_residual(kernel, wt);
    nlohmann::json j;
    j["schema_version"] = 1;
    j["kernel"] = kernel.describe();
    j["perturbation"] = pert.label();
    j["K1"] = {{"pass", a.k1_pass}, {"C", a.c_k1}};
    j["K2"] = {{"pass", a.k2_pass}, {"C", a.c_k2}};
    j["Ku"] = {{"pass", a.ku_pass}, {"C_first", a.c_ku_first}, {"C_second", a.c_ku_second}};
    j["positive"] = a.positive_pass;
    j["Kc"] = {{"pass", a.kc_pass}, {"ratio", a.phi_c_ratio_estimate}, {"drift", a.phi_c_ratio_drift}};
    j["BDA"] = {{"pass", a.bda_pass}, {"residual", a.bda_residual}};
    j["perturbation_bounds"] = {{"pass", a.perturbation_pass},
                                {"sup", a.perturbation_sup_observed},
                                {"lipschitz", a.perturbation_lip_observed}};
    j["dbc_residual"] = dbc;
    j["phi_c"] = wt.phi_c;
    j["rho_c"] = wt.rho_c.finite() ? nlohmann::json(wt.rho_c.value()) : nlohmann::json(wt.rho_c.str());
    {
        auto f = open_out(ctx, "kernel_report.json", res);
        f << j.dump(2) << '\n';
    }
    res.checks.push_back({"assumptions", a.all_pass(), "see kernel_report.json"});
    res.checks.push_back({"kernel_dbc", dbc <= 1e-12, "residual " + fmt(dbc)});
    return res;
}

int run_command(const RunContext& ctx) {
    fs::create_directories(ctx.out_dir);
    CommandResult res;
    if (ctx.command == "solve") res = cmd_solve(ctx);
    else if (ctx.command == "simulate") res = cmd_simulate(ctx);
    else if (ctx.command == "chaos") res = cmd_chaos(ctx);
    else if (ctx.command == "condense") res = cmd_condense(ctx);
    else if (ctx.command == "gamma") res = cmd_gamma(ctx);
    else if (ctx.command == "edp") res = cmd_edp(ctx);
    else if (ctx.command == "contraction") res = cmd_contraction(ctx);
    else if (ctx.command == "validate-kernel") res = cmd_validate_kernel(ctx);
    else throw ConfigError("unknown command '" + ctx.command + "'", 0, "command");

    {
        std::ofstream f(fs::path(ctx.out_dir) / "checks.csv");
        f << "check,pass,detail\n";
        for (const auto& c : res.checks) f << c.name << ',' << (c.pass ? 1 : 0) << ",\"" << c.detail << "\"\n";
    }
    nlohmann::json m;
    m["schema_version"] = 1;
    m["command"] = ctx.command;
    m["seed"] = ctx.seed;
    m["threads"] = ctx.threads;
    std::ostringstream h;
    h << std::hex << ctx.cfg.hash();
    m["config_hash"] = h.str();
    m["config"] = ctx.cfg.text();
    m["version"] = "0.1.0";
    m["compiler"] = __VERSION__;
    m["outputs"] = res.outputs;
    m["all_pass"] = res.all_pass();
    {
        std::ofstream f(fs::path(ctx.out_dir) / "manifest.json");
        f << m.dump(2) << '\n';
    }
    for (const auto& c : res.checks) std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    return res.all_pass() ? 0 : 1;
}

}  // namespace edg
