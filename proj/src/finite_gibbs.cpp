#include "edg/finite_gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <tuple>

#include "json.hpp"

#include "edg/errors.hpp"
#include "edg/ode.hpp"
#include "edg/variational_mf.hpp"

namespace edg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Neumaier-compensated log-sum-exp.
double log_sum_exp(const std::vector<double>& x) {
    double m = kNegInf;
    for (double v : x) m = std::max(m, v);
    if (m == kNegInf) return kNegInf;
    double s = 0.0, comp = 0.0;
    for (double v : x) {
        const double e = std::exp(v - m);
        const double t = s + e;
        comp += std::abs(s) >= std::abs(e) ? (s - t) + e : (e - t) + s;
        s = t;
    }
    return m + std::log(s + comp);
}

void partitions(int remaining, int max_part, int parts_left, std::vector<int>& counts,
                std::vector<std::vector<int>>& out) {
    if (remaining == 0) {
        out.push_back(counts);
        return;
    }
    if (parts_left == 0) return;
    for (int p = std::min(remaining, max_part); p >= 1; --p) {
        ++counts[p];
        --counts[0];
        partitions(remaining - p, p, parts_left - 1, counts, out);
        --counts[p];
        ++counts[0];
    }
}

double edge_base_rate(const std::vector<int>& n, int L, int k, int l1) {
    const double nl = static_cast<double>(n[l1]) - (k == l1 ? 1.0 : 0.0);
    return static_cast<double>(n[k]) * nl / static_cast<double>(L - 1);
}

double kernel_at(const KernelSpec& kernel, const Perturbation& pert, double t, int k, int l1) {
    return forward_kernel(kernel, pert, t, k, l1);
}

}  // namespace

ClusterDistribution StateSpace::empirical(std::size_t i) const {
    std::vector<double> p(states[i].size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = static_cast<double>(states[i][k]) / L;
    return ClusterDistribution(std::move(p));
}

double count_states(int N, int L) {
    if (N < 0 || L < 1) throw RangeError("count_states: need N >= 0 and L >= 1");
    // partitions of N into at most L parts = partitions with parts <= L
    std::vector<double> dp(static_cast<std::size_t>(N) + 1, 0.0);
    dp[0] = 1.0;
    for (int part = 1; part <= std::min(N, L); ++part)
        for (int n = part; n <= N; ++n) dp[n] += dp[n - part];
    return dp[N];
}

StateSpace enumerate(int N, int L, double budget) {
    if (N < 1 || L < 1) throw RangeError("enumerate: need N >= 1 and L >= 1");
    const double count = count_states(N, L);
    if (count > budget)
        throw SizeError("enumerate: " + std::to_string(static_cast<long long>(count)) +
                        " states exceed the budget; use smaller N or L");
    StateSpace sp;
    sp.N = N;
    sp.L = L;
    std::vector<int> counts(static_cast<std::size_t>(N) + 1, 0);
    counts[0] = L;
    partitions(N, N, L, counts, sp.states);
    std::sort(sp.states.begin(), sp.states.end());
    for (std::size_t i = 0; i < sp.states.size(); ++i) sp.index.emplace(sp.states[i], static_cast<int>(i));

    std::map<std::tuple<int, int, int>, int> edge_id;
    if (L >= 2) {
        for (std::size_t s = 0; s < sp.states.size(); ++s) {
            const auto& n = sp.states[s];
            for (int k = 1; k <= N; ++k) {
                if (n[k] == 0) continue;
                for (int l1 = 0; l1 < N; ++l1) {
                    if (k == l1 + 1) continue;
                    if (n[l1] - (k == l1 ? 1 : 0) <= 0) continue;
                    std::vector<int> m = n;
                    --m[k];
                    --m[l1];
                    ++m[k - 1];
                    ++m[l1 + 1];
                    const int to = sp.index.at(m);
                    edge_id[{static_cast<int>(s), k, l1}] = static_cast<int>(sp.edges.size());
                    sp.edges.push_back({static_cast<int>(s), k, l1, to});
                }
            }
        }
    }
    sp.reverse.resize(sp.edges.size());
    for (std::size_t e = 0; e < sp.edges.size(); ++e) {
        const Edge& ed = sp.edges[e];
        sp.reverse[e] = edge_id.at({ed.to, ed.l1 + 1, ed.k - 1});
    }
    return sp;
}

GibbsMeasure gibbs(const StateSpace& space, const WeightTable& wt) {
    if (wt.M() < space.N) throw RangeError("gibbs: weight table shorter than N");
    GibbsMeasure g;
    const std::size_t S = space.size();
    std::vector<double> lw(S);
    const double lf = std::lgamma(space.L + 1.0);
    for (std::size_t s = 0; s < S; ++s) {
        const auto& n = space.states[s];
        double v = lf;
        for (std::size_t k = 0; k < n.size(); ++k) {
            if (n[k] == 0) continue;
            if (wt.logw[k] == kNegInf) throw SupportError("gibbs: zero weight on an occupied size");
            v += -std::lgamma(n[k] + 1.0) + n[k] * wt.logw[k];
        }
        lw[s] = v;
    }
    g.log_z = log_sum_exp(lw);
    g.a_nl = g.log_z / space.L;
    g.log_pi.resize(S);
    g.pi.resize(S);
    for (std::size_t s = 0; s < S; ++s) {
        g.log_pi[s] = lw[s] - g.log_z;
        g.pi[s] = std::exp(g.log_pi[s]);
    }
    return g;
}

double kappa_L(const std::vector<int>& n, int L, int k, int l1, double K) {
    if (L < 2) return 0.0;
    const double nl = static_cast<double>(n[l1]) - (k == l1 ? 1.0 : 0.0);
    if (n[k] <= 0 || nl <= 0.0) return 0.0;
    return static_cast<double>(n[k]) * nl * K / (static_cast<double>(L) * (L - 1));
}

DbcReport lifted_dbc_check(const StateSpace& space, const GibbsMeasure& g, const KernelSpec& kernel,
                           const Perturbation& pert, double t) {
    DbcReport r;
    for (std::size_t e = 0; e < space.edges.size(); ++e) {
        const Edge& ed = space.edges[e];
        const double lhs = g.pi[ed.from] * kappa_L(space.states[ed.from], space.L, ed.k, ed.l1,
                                                   kernel_at(kernel, pert, t, ed.k, ed.l1));
        const int l = ed.l1 + 1;
        const double rhs = g.pi[ed.to] * kappa_L(space.states[ed.to], space.L, l, ed.k - 1,
                                                 kernel_at(kernel, pert, t, l, ed.k - 1));
        const double res = std::abs(lhs - rhs) / (lhs + rhs + 1e-300);
        if (res > r.max_residual) {
            r.max_residual = res;
            r.worst_edge = static_cast<int>(e);
        }
    }
    return r;
}

GeneratorChecks generator_checks(const StateSpace& space, const GibbsMeasure& g,
                                 const KernelSpec& kernel, const Perturbation& pert, double t) {
    const std::size_t S = space.size();
    // dense Q(c -> c'), small spaces only
    std::vector<double> Q(S * S, 0.0);
    for (const Edge& ed : space.edges) {
        const double q = edge_base_rate(space.states[ed.from], space.L, ed.k, ed.l1) *
                         kernel_at(kernel, pert, t, ed.k, ed.l1);
        Q[ed.from * S + ed.to] += q;
        Q[ed.from * S + ed.from] -= q;
    }
    GeneratorChecks c;
    for (std::size_t a = 0; a < S; ++a) {
        double row = 0.0, scale = 0.0;
        for (std::size_t b = 0; b < S; ++b) {
            row += Q[a * S + b];
            scale += std::abs(Q[a * S + b]);
        }
        c.max_column_sum = std::max(c.max_column_sum, std::abs(row) / std::max(scale, 1.0));
        for (std::size_t b = a + 1; b < S; ++b) {
            const double x = g.pi[a] * Q[a * S + b], y = g.pi[b] * Q[b * S + a];
            if (x == 0.0 && y == 0.0) continue;
            c.max_dbc_residual = std::max(c.max_dbc_residual, std::abs(x - y) / (x + y));
        }
    }
    return c;
}

std::vector<double> finite_flux(const StateSpace& space, const KernelSpec& kernel,
                                const Perturbation& pert, double t, const std::vector<double>& C) {
    std::vector<double> J(space.edges.size());
    for (std::size_t e = 0; e < J.size(); ++e) {
        const Edge& ed = space.edges[e];
        J[e] = C[ed.from] * kappa_L(space.states[ed.from], space.L, ed.k, ed.l1,
                                    kernel_at(kernel, pert, t, ed.k, ed.l1));
    }
    return J;
}

MasterTrajectory solve_fke(const StateSpace& space, const KernelSpec& kernel, const Perturbation& pert,
                           const std::vector<double>& C0, double T, double tol) {
    if (C0.size() != space.size()) throw RangeError("solve_fke: C0 has the wrong length");
    double mass = 0.0;
    for (double v : C0) {
        if (v < 0.0) throw PositivityError("solve_fke: negative initial probability");
        mass += v;
    }
    if (std::abs(mass - 1.0) > 1e-10) throw RangeError("solve_fke: C0 is not a probability vector");

    const std::size_t E = space.edges.size();
    std::vector<double> base(E);
    for (std::size_t e = 0; e < E; ++e) {
        const Edge& ed = space.edges[e];
        base[e] = edge_base_rate(space.states[ed.from], space.L, ed.k, ed.l1) * kernel.at(ed.k, ed.l1);
    }
    const bool pz = pert.is_zero();
    OdeRhs f = [&](double t, const std::vector<double>& y, std::vector<double>& dy) {
        std::fill(dy.begin(), dy.end(), 0.0);
        for (std::size_t e = 0; e < E; ++e) {
            const Edge& ed = space.edges[e];
            double q = base[e];
            if (!pz) q *= std::exp(pert(t, ed.k, ed.l1));
            const double flow = q * y[ed.from];
            dy[ed.to] += flow;
            dy[ed.from] -= flow;
        }
    };
    OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol;
    const int nodes = 256;
    for (int i = 1; i < nodes; ++i) opt.stops.push_back(T * i / nodes);
    if (T > 0.0) opt.h_max = T / nodes;
    MasterTrajectory mt;
    if (T <= 0.0) {
        mt.t = {0.0};
        mt.C = {C0};
    } else {
        OdeResult r = dopri5(f, 0.0, T, C0, opt);
        mt.t = std::move(r.t);
        mt.C = std::move(r.y);
    }
    mt.J.reserve(mt.t.size());
    for (std::size_t i = 0; i < mt.t.size(); ++i) mt.J.push_back(finite_flux(space, kernel, pert, mt.t[i], mt.C[i]));
    return mt;
}

std::string FiniteFunctionalReport::to_json() const {
    auto ext = [](ExtReal x) -> nlohmann::json {
        if (x.finite()) return x.value();
        return x.str();
    };
    nlohmann::json j;
    j["schema_version"] = 1;
    j["energy_start"] = ext(energy_start);
    j["energy_end"] = ext(energy_end);
    j["R_integral"] = ext(R_integral);
    j["D_integral"] = D_integral;
    j["total"] = ext(total);
    j["quad_error"] = quad_error;
    j["max_abs_term"] = max_abs_term;
    j["chain_rule_b_integral"] = ext(chain_rule_b_integral);
    j["chain_rule_residual"] = chain_rule_residual;
    return j.dump(2);
}

namespace {

ExtReal trap(const std::vector<double>& t, const std::vector<ExtReal>& f, std::size_t stride) {
    ExtReal acc(0.0);
    std::size_t i = 0;
    while (i + 1 < t.size()) {
        const std::size_t j = std::min(i + stride, t.size() - 1);
        acc += ExtReal(0.5 * (t[j] - t[i])) * (f[i] + f[j]);
        i = j;
    }
    return acc;
}

double halving(const std::vector<double>& t, const std::vector<ExtReal>& f) {
    const ExtReal a = trap(t, f, 1), b = trap(t, f, 2);
    if (!a.finite() || !b.finite()) return 0.0;
    return std::abs(a.value() - b.value()) / 3.0;
}

}  // namespace

FiniteFunctionalReport finite_edf(const StateSpace& space, const GibbsMeasure& g,
                                  const WeightTable& wt, const KernelSpec& kernel,
                                  const Perturbation& pert, const MasterTrajectory& traj) {
    if (traj.t.empty() || traj.J.size() != traj.t.size())
        throw InconsistentPairError("finite_edf: trajectory carries no flux record");
    if (wt.M() < space.N) throw RangeError("finite_edf: weight table shorter than N");
    const double L = space.L;
    const std::size_t n = traj.t.size();
    FiniteFunctionalReport rep;
    std::vector<ExtReal> rv(n), dv(n), bv(n);
    auto energy_at = [&](std::size_t i) { return ExtReal(0.5 / L) * relative_entropy(traj.C[i], g.pi); };
    for (std::size_t i = 0; i < n; ++i) {
        const double t = traj.t[i];
        const auto& C = traj.C[i];
        const auto& J = traj.J[i];
        ExtReal R(0.0), B(0.0);
        double D = 0.0, nu_sum = 0.0, nud_sum = 0.0;
        for (std::size_t e = 0; e < space.edges.size(); ++e) {
            const Edge& ed = space.edges[e];
            const int l = ed.l1 + 1;
            const double K = kernel_at(kernel, pert, t, ed.k, ed.l1);
            const double nu = C[ed.from] * kappa_L(space.states[ed.from], space.L, ed.k, ed.l1, K);
            const double Kd =
                K * std::exp(wt.logw[ed.k] + wt.logw[ed.l1] - wt.logw[l] - wt.logw[ed.k - 1]);
            const double nud = C[ed.to] * kappa_L(space.states[ed.to], space.L, l, ed.k - 1, Kd);
            const double th = std::sqrt(nu * nud);
            R += phi_persp(J[e], th);
            D += nu - th;
            B += B_fn(nu, nud, J[e]);
            nu_sum += nu;
            nud_sum += nud;
        }
        rv[i] = R;
        dv[i] = ExtReal(D);
        bv[i] = ExtReal(0.5) * B;
        rep.nu_total_max = std::max(rep.nu_total_max, nu_sum);
        rep.nu_dagger_total_max = std::max(rep.nu_dagger_total_max, nud_sum);
        const ExtReal E = energy_at(i);
        double m = std::abs(D);
        if (E.finite()) m = std::max(m, std::abs(E.value()));
        if (R.finite()) m = std::max(m, std::abs(R.value()));
        rep.max_abs_term = std::max(rep.max_abs_term, m);
    }
    rep.energy_start = energy_at(0);
    rep.energy_end = energy_at(n - 1);
    rep.R_integral = trap(traj.t, rv, 1);
    const ExtReal dint = trap(traj.t, dv, 1);
    rep.D_integral = dint.value();
    rep.total = rep.energy_end - rep.energy_start + rep.R_integral + dint;
    double eps = 0.0;
    if (rep.energy_start.finite() && rep.energy_end.finite())
        eps = 1e-14 * (1.0 + std::abs(rep.energy_start.value()) + std::abs(rep.energy_end.value()));
    rep.quad_error = halving(traj.t, rv) + halving(traj.t, dv) + eps;
    rep.chain_rule_b_integral = trap(traj.t, bv, 1);
    const ExtReal dE = rep.energy_end - rep.energy_start;
    if (dE.finite() && rep.chain_rule_b_integral.finite())
        rep.chain_rule_residual = std::abs(dE.value() - rep.chain_rule_b_integral.value());
    else
        rep.chain_rule_residual = std::numeric_limits<double>::infinity();
    return rep;
}

double counting_defect(const std::vector<int>& n, int L) {
    double v = std::lgamma(L + 1.0);
    for (int x : n) {
        if (x == 0) continue;
        v += -std::lgamma(x + 1.0) + x * std::log(static_cast<double>(x) / L);
    }
    return v;
}

CountingReport counting_inequality(const StateSpace& space) {
    CountingReport r;
    r.rhs = (std::sqrt(2.0 * space.N) + 1.0) * (1.0 + std::log(static_cast<double>(space.L)));
    for (const auto& n : space.states) r.max_lhs = std::max(r.max_lhs, std::abs(counting_defect(n, space.L)));
    r.max_ratio = r.max_lhs / r.rhs;
    return r;
}

DecompositionReport entropy_decomposition_check(const StateSpace& space, const GibbsMeasure& g,
                                                const WeightTable& wt, const std::vector<double>& C) {
    if (C.size() != space.size()) throw RangeError("entropy_decomposition_check: C has the wrong length");
    const ExtReal ent = relative_entropy(C, g.pi);
    if (!ent.finite()) throw AbsoluteContinuityError("entropy_decomposition_check: C is not << Pi");
    DecompositionReport r;
    const double L = space.L;
    r.lhs = ent.value() / L;
    double max_defect = 0.0;
    for (std::size_t s = 0; s < space.size(); ++s) {
        const auto& n = space.states[s];
        max_defect = std::max(max_defect, std::abs(counting_defect(n, space.L)));
        if (C[s] == 0.0) continue;
        double J = 0.0;
        for (std::size_t k = 0; k < n.size(); ++k) {
            if (n[k] == 0) continue;
            const double c = n[k] / L;
            J += c * (std::log(c) - wt.logw[k]);
        }
        r.J_integral += C[s] * J;
    }
    r.A = g.a_nl;
    r.residual = std::abs(r.lhs - r.J_integral - r.A);
    r.bound = (std::log(static_cast<double>(space.size())) + max_defect) / L;
    return r;
}

std::vector<GammaRow> gamma_table(const WeightTable& wtilde, const WeightTable& w, double rho,
                                  const std::vector<std::pair<int, int>>& schedule, double budget) {
    if (schedule.empty()) throw EmptyError("gamma_table: empty schedule");
    for (const auto& [N, L] : schedule)
        if (count_states(N, L) > budget)
            throw SizeError("gamma_table: (N=" + std::to_string(N) + ", L=" + std::to_string(L) +
                            ") exceeds the enumeration budget; try N <= 40");
    const ClusterDistribution a = equilibrium_capped(wtilde, rho).omega;
    const ClusterDistribution b = equilibrium_capped(w, rho).omega;
    const int Mw = std::max(a.M(), b.M());
    const ExtReal lim = relative_entropy(a.padded(Mw).p(), b.padded(Mw).p());
    const double limit = lim.to_double();
    const double minus_inf = -inf_Jbar(w, rho);

    std::vector<GammaRow> rows;
    for (const auto& [N, L] : schedule) {
        const StateSpace sp = enumerate(N, L, budget);
        const GibbsMeasure gt = gibbs(sp, wtilde);
        const GibbsMeasure g = gibbs(sp, w);
        GammaRow row;
        row.N = N;
        row.L = L;
        row.value = relative_entropy(gt.pi, g.pi).to_double() / L;
        row.limit = limit;
        row.gap = std::abs(row.value - limit);
        row.A = g.a_nl;
        row.minus_inf_Jbar = minus_inf;
        rows.push_back(row);
    }
    return rows;
}

void write_gamma_csv(std::ostream& os, const std::vector<GammaRow>& rows) {
    os.precision(17);
    os << "N,L,value,limit,gap,A_NL,minus_inf_Jbar\n";
    for (const auto& r : rows)
        os << r.N << ',' << r.L << ',' << r.value << ',' << r.limit << ',' << r.gap << ',' << r.A << ','
           << r.minus_inf_Jbar << '\n';
}

namespace {

MicroState to_micro(const std::vector<int>& n) {
    std::vector<long> v(n.begin(), n.end());
    return MicroState::from_counts(std::move(v));
}

}  // namespace

Projection recovery_project(const ClusterDistribution& c, int N, int L, double budget) {
    const StateSpace sp = enumerate(N, L, budget);
    const int M = std::max(c.M(), N);
    const ClusterDistribution cp = c.padded(M);
    Projection best;
    best.distance = std::numeric_limits<double>::infinity();
    int arg = -1;
    for (std::size_t s = 0; s < sp.size(); ++s) {
        const double d = l11_distance(sp.empirical(s).padded(M), cp);
        if (d < best.distance - 1e-14 * (1.0 + best.distance) || arg < 0) {
            best.distance = d;
            arg = static_cast<int>(s);
        }
    }
    best.state = to_micro(sp.states[arg]);
    return best;
}

Projection recovery_construct(const ClusterDistribution& c, int N, int L, double eps) {
    if (!(eps > 0.0)) throw RangeError("recovery_construct: eps must be positive");
    if (N < 0 || L < 1) throw RangeError("recovery_construct: bad (N, L)");
    const double bound = 15.0 * eps;
    std::vector<double> p = c.p();
    const int Mc = c.M();
    const double rho = c.mom1();
    const double g = 1.0 - p[0];
    if (g > 0.0) {
        if (eps > g) throw InfeasibleError("recovery_construct: eps exceeds the non-zero mass", bound);
        double shift = 0.0;
        for (int k = 1; k <= Mc; ++k) {
            shift += eps / g * p[k] / k;
            p[k] *= 1.0 - eps / (g * k);
        }
        p[0] += shift;
    }
    int Me = 0;
    double acc = 0.0;
    while (Me < Mc && acc < rho - 2.0 * eps) {
        ++Me;
        acc += Me * p[Me];
    }
    for (int k = Me + 1; k <= Mc; ++k) {
        p[0] += p[k];
        p[k] = 0.0;
    }
    std::vector<long> n(static_cast<std::size_t>(std::max(N, Me)) + 1, 0);
    long used = 0, Ne = 0;
    for (int k = 1; k <= Me; ++k) {
        n[k] = static_cast<long>(std::floor(L * p[k]));
        used += n[k];
        Ne += k * n[k];
    }
    if (used > L || Ne > N) throw InfeasibleError("recovery_construct: floor exceeds (N, L)", bound);
    n[0] = L - used;
    if (Ne < N) {
        if (n[0] == 0) throw InfeasibleError("recovery_construct: no empty cluster to correct", bound);
        if (static_cast<std::size_t>(N - Ne) >= n.size()) n.resize(static_cast<std::size_t>(N - Ne) + 1, 0);
        --n[0];
        ++n[N - Ne];
    }
    n.resize(static_cast<std::size_t>(N) + 1);
    Projection pr;
    pr.state = MicroState::from_counts(std::move(n));
    const int M = std::max(Mc, N);
    pr.distance = l11_distance(pr.state.empirical().padded(M), c.padded(M));
    pr.bound = bound;
    if (pr.distance > bound)
        throw InfeasibleError("recovery_construct: distance " + std::to_string(pr.distance) +
                                  " exceeds the 15 eps radius",
                              bound);
    return pr;
}

MicroState sample_canonical(const WeightTable& wt, int N, int L, StreamRng& rng) {
    if (N < 0 || L < 1) throw RangeError("sample_canonical: bad (N, L)");
    if (wt.M() < N) throw RangeError("sample_canonical: weight table shorter than N");
    const std::size_t W = static_cast<std::size_t>(N) + 1;
    // z[j][n] = Z_j(n) / scale_j with Z_j(n) = sum_k w(k) Z_{j-1}(n-k)
    std::vector<std::vector<double>> z(static_cast<std::size_t>(L) + 1, std::vector<double>(W, 0.0));
    z[0][0] = 1.0;
    for (int j = 1; j <= L; ++j) {
        auto& cur = z[j];
        const auto& prev = z[j - 1];
        for (std::size_t n = 0; n < W; ++n) {
            double s = 0.0;
            for (std::size_t k = 0; k <= n; ++k) s += wt.w[k] * prev[n - k];
            cur[n] = s;
        }
        const double mx = *std::max_element(cur.begin(), cur.end());
        if (!(mx > 0.0) || !std::isfinite(mx)) throw OverflowError("sample_canonical: partition table degenerate");
        for (double& v : cur) v /= mx;
    }
    if (!(z[L][N] > 0.0)) throw SupportError("sample_canonical: no admissible configuration");
    std::vector<long> counts(W, 0);
    int rem = N;
    std::vector<double> pk(W);
    for (int j = L; j >= 1; --j) {
        double tot = 0.0;
        for (int k = 0; k <= rem; ++k) {
            pk[k] = wt.w[k] * z[j - 1][rem - k];
            tot += pk[k];
        }
        double u = rng.uniform() * tot;
        int pick = rem;
        for (int k = 0; k <= rem; ++k) {
            u -= pk[k];
            if (u <= 0.0 && pk[k] > 0.0) {
                pick = k;
                break;
            }
        }
        ++counts[pick];
        rem -= pick;
    }
    return MicroState::from_counts(std::move(counts));
}

void write_state_space_csv(std::ostream& os, const StateSpace& space, const GibbsMeasure& g) {
    os.precision(17);
    os << "index";
    for (int k = 0; k <= space.N; ++k) os << ",n_" << k;
    os << ",pi\n";
    for (std::size_t s = 0; s < space.size(); ++s) {
        os << s;
        for (int v : space.states[s]) os << ',' << v;
        os << ',' << g.pi[s] << '\n';
    }
}

}  // namespace edg
