// One line per acceptance criterion: "criterion N: PASS|FAIL: detail".
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "gen.hpp"
#include "edg/equilibrium.hpp"
#include "edg/experiments.hpp"
#include "edg/finite_gibbs.hpp"
#include "edg/flux_contraction.hpp"
#include "edg/meanfield.hpp"
#include "edg/particle.hpp"
#include "edg/state_metrics.hpp"
#include "edg/variational_mf.hpp"

using namespace edg;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

int threads() { return static_cast<int>(std::max(1u, std::thread::hardware_concurrency())); }

std::vector<double> grid(double T, int n) {
    std::vector<double> g;
    for (int i = 1; i < n; ++i) g.push_back(T * i / n);
    return g;
}

std::vector<double> perturbed_equilibrium(const WeightTable& wt, double rho, int M, double a) {
    std::vector<double> p = equilibrium_capped(wt, rho).omega.p();
    p.resize(M + 1, 0.0);
    double s = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) s += p[k] *= 1.0 + a * std::cos(1.3 * k);
    for (double& v : p) v /= s;
    return p;
}

ClusterDistribution reference(const WeightTable& wt, double rho, int M) {
    std::vector<double> r = equilibrium_capped(wt, rho).omega.p();
    r.resize(M + 1, 0.0);
    return ClusterDistribution(r);
}

Outcome conservation() {
    const int M = 40;
    double drift = 0.0;
    for (const auto& K : {KernelSpec::constant(1.0, M), KernelSpec::product_power(0.5, M)}) {
        const auto wt = weights(K);
        EdgSystem sys{K, Perturbation::none(), M, ClusterDistribution(perturbed_equilibrium(wt, 1.0, M, 0.3))};
        const auto tr = integrate(sys, 10.0, 1e-11, grid(10.0, 200));
        const auto c0 = tr.at(0);
        for (std::size_t i = 0; i < tr.size(); ++i) {
            const auto c = tr.at(i);
            drift = std::max({drift, std::abs(c.mom0() - c0.mom0()), std::abs(c.mom1() - c0.mom1())});
        }
    }
    bool exact = true;
    std::vector<long> n(41, 0);
    n[1] = 300;
    const auto s0 = MicroState::from_counts(n);
    SimOptions opt;
    opt.check_invariants = true;
    for (int r = 0; r < 4; ++r) {
        const auto res = simulate(s0, KernelSpec::product_power(0.5, 40), Perturbation::oscillating(0.3, 1.0),
                                  5.0, 1, r, opt);
        exact = exact && res.final_state.N == 300 && res.final_state.L == 300;
    }
    return {drift <= 1e-8 && exact, "ODE moment drift " + num(drift) + ", particle integer conservation " +
                                        (exact ? "exact" : "violated")};
}

Outcome detailed_balance() {
    double kernel_res = 0.0;
    for (const auto& K : {KernelSpec::constant(1.0, 60), KernelSpec::product_power(0.5, 60),
                          KernelSpec::product_power(1.0, 60), KernelSpec::weight_driven_power(3.0, 60)})
        kernel_res = std::max(kernel_res, kernel_dbc_residual(K, weights(K)));
    double lifted = 0.0;
    for (int N = 2; N <= 12; ++N)
        for (int L = 2; L <= 8; ++L) {
            const auto sp = enumerate(N, L);
            for (const auto& K : {KernelSpec::constant(1.0, N), KernelSpec::product_power(0.5, N),
                                  KernelSpec::weight_driven_power(3.0, N)}) {
                const auto g = gibbs(sp, weights(K));
                lifted = std::max(lifted, lifted_dbc_check(sp, g, K, Perturbation::none()).max_residual);
            }
        }
    return {kernel_res <= 1e-12 && lifted <= 1e-12,
            "kernel residual " + num(kernel_res) + ", lifted residual " + num(lifted)};
}

Outcome edp_mean_field() {
    const int M = 40;
    const auto K = KernelSpec::product_power(0.5, M);
    const auto wt = weights(K);
    double worst = 0.0, min_pos = INFINITY;
    bool ok = true;
    for (const auto& pert : {Perturbation::none(), Perturbation::oscillating(0.3, 2.0)}) {
        EdgSystem sys{K, pert, M, ClusterDistribution(perturbed_equilibrium(wt, 1.0, M, 0.3))};
        const auto ref = reference(wt, 1.0, M);
        const auto tr = integrate(sys, 5.0, 1e-12, grid(5.0, 500), true);
        const auto rep = edf_total(sys, wt, tr, ref);
        const double ratio = std::abs(rep.total.value()) / rep.quad_error;
        worst = std::max(worst, ratio);
        ok = ok && ratio <= 10.0;
        const auto law = [&](double t, const std::vector<double>& c) { return expected_flux(sys, t, c).scaled(1.1); };
        const auto tr2 = integrate_continuity(sys, law, 5.0, 1e-12, grid(5.0, 500));
        const auto rep2 = edf_total(sys, wt, tr2, ref);
        ok = ok && rep2.total.finite() && rep2.total.value() > 10.0 * rep2.quad_error;
        min_pos = std::min(min_pos, rep2.total.value());
    }
    return {ok, "max |total|/quad " + num(worst) + ", min total at +10% flux " + num(min_pos)};
}

std::vector<double> tilted_start(std::size_t n) {
    std::vector<double> C(n);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += C[i] = 1.0 + 0.8 * std::cos(1.3 * i);
    for (double& x : C) x /= s;
    return C;
}

Outcome edp_finite() {
    double worst = 0.0, stat = 0.0;
    for (int N = 4; N <= 8; ++N)
        for (int L = 3; L <= 6; ++L) {
            const auto sp = enumerate(N, L);
            const auto K = KernelSpec::product_power(0.5, N);
            const auto wt = weights(K);
            const auto g = gibbs(sp, wt);
            for (const auto& pert : {Perturbation::none(), Perturbation::oscillating(0.3, 2.0)}) {
                const auto tr = solve_fke(sp, K, pert, tilted_start(sp.size()), 2.0);
                const auto rep = finite_edf(sp, g, wt, K, pert, tr);
                worst = std::max(worst, rep.total.finite() ? std::abs(rep.total.value()) / rep.quad_error : INFINITY);
            }
            const auto st = solve_fke(sp, K, Perturbation::none(), g.pi, 1.0);
            stat = std::max(stat, finite_edf(sp, g, wt, K, Perturbation::none(), st).max_abs_term);
        }
    return {worst <= 10.0 && stat <= 1e-10, "max |total|/quad " + num(worst) + ", stationary terms " + num(stat)};
}

Outcome chain_rule() {
    const int M = 30;
    const auto K = KernelSpec::product_power(0.5, M);
    const auto wt = weights(K);
    const auto ref = reference(wt, 1.0, M);
    double worst = 0.0;
    for (const auto& pert : {Perturbation::none(), Perturbation::oscillating(0.3, 2.0)}) {
        EdgSystem sys{K, pert, M, ClusterDistribution(perturbed_equilibrium(wt, 1.0, M, 0.3))};
        const auto tr = integrate(sys, 3.0, 1e-12, grid(3.0, 600), true);
        const auto cr = chain_rule_check(sys, wt, tr, ref);
        worst = std::max(worst, cr.residual / cr.quad_error);
    }
    EdgSystem sys{K, Perturbation::none(), M, ClusterDistribution(perturbed_equilibrium(wt, 1.0, M, 0.3))};
    const auto law = [&](double t, const std::vector<double>& c) {
        FluxField f = expected_flux(sys, t, c);
        for (int k = 1; k <= M; ++k)
            for (int l1 = 0; l1 < M; ++l1) f.at(k, l1) *= 1.0 + 0.3 * std::sin(t) * std::cos(0.7 * k + 1.1 * l1);
        return f;
    };
    const auto tr = integrate_continuity(sys, law, 3.0, 1e-12, grid(3.0, 600));
    const auto cr = chain_rule_check(sys, wt, tr, ref);
    const double syn = cr.residual / cr.quad_error;
    return {worst <= 10.0 && syn <= 10.0, "ODE residual/quad " + num(worst) + ", synthetic pair " + num(syn)};
}

Outcome contraction() {
    NetFluxProblem p;
    for (int i = 0; i < 100; ++i) {
        gen::Gen g(61, i);
        const double th = i % 10 == 9 ? 0.0 : std::exp(g.uniform(-2, 2));
        p.theta.push_back(th);
        p.j_net.push_back(th == 0.0 ? 0.0 : th * g.uniform(-3, 3));
    }
    const auto rep = contraction_oracle(p);
    const auto ow = optimal_oneway(NetFluxProblem{{1.0}, {0.75}});
    const bool exact = ow.j[0] == 2.0 && ow.j_dagger[0] == 0.5;
    return {rep.max_gap <= 1e-8 && exact,
            "max gap " + num(rep.max_gap) + ", closed form j=" + num(ow.j[0]) + " j_dagger=" + num(ow.j_dagger[0])};
}

Outcome metric() {
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        gen::Gen g(71, i);
        const int M = g.integer(1, 40);
        const ClusterDistribution a(i % 2 ? g.positive_dist(M) : g.sparse_dist(M)), b(g.positive_dist(M));
        worst = std::max(worst, std::abs(d_ex(a, b) - w1_oracle(a, b)));
    }
    bool jump = true;
    for (int i = 0; i < 200; ++i) {
        gen::Gen g(72, i);
        const int M = 20;
        auto p = g.positive_dist(M);
        const int k = g.integer(1, M), j = g.integer(0, M - 1);
        if (k - 1 == j) continue;
        // dyadic m
        const double cap = std::min({p[k], p[j]});
        const double m = std::ldexp(1.0, static_cast<int>(std::floor(std::log2(cap))) - 2);
        auto q = p;
        q[k - 1] += m;
        q[j + 1] += m;
        q[k] -= m;
        q[j] -= m;
        const double d = d_ex(ClusterDistribution(q), ClusterDistribution(p));
        jump = jump && std::abs(d - 2.0 * m) <= 1e-15 * (1.0 + 2.0 * m) * 4;
    }
    return {worst <= 1e-10 && jump, "max |d_ex - W1| " + num(worst) + ", single jump " + (jump ? "2|m|" : "mismatch")};
}

Outcome counting() {
    double worst = 0.0;
    for (int N = 1; N <= 40; ++N)
        for (int L = 2; L <= 20; ++L) worst = std::max(worst, counting_inequality(enumerate(N, L)).max_ratio);
    // Hardy-Ramanujan envelope: log p(N) < pi sqrt(2N/3)
    const double env = M_PI * std::sqrt(2.0 / 3.0);
    double top = 0.0;
    for (int N = 10; N <= 60; ++N) top = std::max(top, std::log(count_states(N, N)) / std::sqrt(N));
    return {worst <= 1.0 && top <= env, "max ratio " + num(worst) + ", max log|V|/sqrt(N) " + num(top) +
                                            " vs " + num(env)};
}

Outcome gamma_trend() {
    const int window = 400;
    const auto w = weights(KernelSpec::constant(1.0, window));
    std::vector<double> v(w.w.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = w.w[k] * std::exp(0.25 * std::sin(static_cast<double>(k)));
    const auto wt = WeightTable::from_values(v, w.phi_c);
    const auto rows = gamma_table(wt, w, 1.0, {{5, 5}, {10, 10}, {20, 20}, {40, 40}});
    const double g0 = rows.front().gap, g1 = rows.back().gap;
    return {g1 < 0.5 * g0, "gap L=5 " + num(g0) + ", L=40 " + num(g1)};
}

Outcome chaos() {
    ChaosParams p;
    p.Ls = {50, 100, 200, 400};
    p.R = 64;
    p.rho = 1;
    p.M = 40;
    p.T = 1.0;
    p.times = {0.0, 1.0};
    p.seed = 1;
    p.threads = threads();
    const auto rows = chaos_table(KernelSpec::constant(1.0, p.M), Perturbation::none(), p);
    std::string detail;
    const bool ok = chaos_decreasing(rows, 1.0, 3.0, &detail);
    std::ostringstream os;
    for (const auto& r : rows)
        if (r.t == 1.0) os << "L=" << r.L << " d_ex " << num(r.d_ex) << " se " << num(r.se) << "; ";
    return {ok, os.str()};
}

Outcome condensation() {
    CondenseParams p;
    p.Ls = {100, 200, 400, 800};
    p.rho = 1.2;
    p.T = 20.0;
    p.M0 = 50;
    p.R = 16;
    p.init = "canonical";
    p.times = {0.0, 20.0};
    p.seed = 7;
    p.threads = threads();
    const double rho_c = weights(KernelSpec::weight_driven_power(3.0, 2000)).rho_c.value();
    const auto rows = condense_table(3.0, p);
    CondenseParams pc = p;
    pc.rho = 0.5;
    pc.Ls = {800};
    const auto crows = condense_table(3.0, pc);
    const double rel = std::abs(rows.back().truncated_moment - rho_c) / rho_c;
    const double crel = std::abs(crows.back().truncated_moment - 0.5) / 0.5;
    return {rel <= 0.1 && crel <= 0.02, "moment " + num(rows.back().truncated_moment) + " vs rho_c " + num(rho_c) +
                                            " (rel " + num(rel) + "), control rel " + num(crel)};
}

Outcome picard() {
    const int M = 40;
    const auto K = KernelSpec::product_power(0.5, M);
    const auto wt = weights(K);
    EdgSystem sys{K, Perturbation::none(), M, ClusterDistribution(perturbed_equilibrium(wt, 1.0, M, 0.3))};
    const double tol = 1e-11;
    const auto pr = picard_solve(sys, 2.0, 0.01, 0.2, 33);
    const auto rk = integrate(sys, 0.2, tol, pr.traj.t, false);
    double worst = 0.0, bound = 0.0, diff = 0.0;
    for (const auto& w : pr.windows) {
        for (double f : w.factors) worst = std::max(worst, f);
        bound = std::max(bound, w.bound);
    }
    for (std::size_t i = 0; i < pr.traj.size(); ++i) {
        const auto it = std::find(rk.t.begin(), rk.t.end(), pr.traj.t[i]);
        diff = std::max(diff, d_ex(pr.traj.at(i), rk.at(static_cast<std::size_t>(it - rk.t.begin()))));
    }
    const double comb = 10.0 * pr.quad_error + 10.0 * tol;
    return {worst <= bound && diff <= comb, "worst factor " + num(worst) + " bound " + num(bound) +
                                                ", sup d_ex " + num(diff) + " tol " + num(comb)};
}

}  // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria = {
        conservation, detailed_balance, edp_mean_field, edp_finite, chain_rule, contraction,
        metric,       counting,         gamma_trend,    chaos,      condensation, picard};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("criterion %zu: %s: %s [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed == 0 ? 0 : 1;
}
