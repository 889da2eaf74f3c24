#include "edg/variational_mf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"

#include "edg/errors.hpp"

namespace edg {

double phi(double x) {
    if (x < 0.0) throw RangeError("phi: negative argument");
    if (x == 0.0) return 1.0;
    return x * std::log(x) - x + 1.0;
}

double phi_star(double r) { return std::expm1(r); }

ExtReal phi_persp(double a, double b) {
    if (a < 0.0 || b < 0.0) throw RangeError("phi_persp: negative argument");
    if (a == 0.0) return ExtReal(b);
    if (b == 0.0) return ExtReal::pos_inf();
    return ExtReal(a * std::log(a / b) - a + b);
}

double psi_star(double s) { return std::exp(s) + std::exp(-s) - 2.0; }

double psi(double r) { return r * std::asinh(r / 2.0) - std::sqrt(4.0 + r * r) + 2.0; }

double D_pair(double u, double v) { return u - std::sqrt(u * v); }

ExtReal A_fn(double u, double v) {
    if (u < 0.0 || v < 0.0) throw RangeError("A: negative argument");
    if (u == 0.0 && v == 0.0) return ExtReal(0.0);
    if (u == 0.0) return ExtReal::pos_inf();
    if (v == 0.0) return ExtReal::neg_inf();
    return ExtReal(std::log(v) - std::log(u));
}

ExtReal B_fn(double u, double v, double w) { return A_fn(u, v) * ExtReal(w); }

double log_m(double x, double m) {
    if (x <= 0.0) return -m;
    return std::clamp(std::log(x), -m, m);
}

ExtReal energy(const ClusterDistribution& c, const ClusterDistribution& ref) {
    return ExtReal(0.5) * relative_entropy(c.p(), ref.p());
}

FluxField kappa_dagger(const EdgSystem& sys, const WeightTable& wt, double t,
                       const std::vector<double>& c) {
    const int M = sys.M;
    if (wt.M() < M) throw RangeError("kappa_dagger: weight table shorter than window");
    FluxField f(M);
    const bool pz = sys.pert.is_zero();
    for (int k = 1; k <= M; ++k) {
        if (c[k - 1] == 0.0) continue;
        for (int l1 = 0; l1 < M; ++l1) {
            const int l = l1 + 1;
            if (c[l] == 0.0) continue;
            double K = sys.kernel.at(k, l1);
            if (!pz) K *= std::exp(sys.pert(t, k, l1));
            const double r = std::exp(wt.logw[k] + wt.logw[l1] - wt.logw[l] - wt.logw[k - 1]);
            f.at(k, l1) = K * r * c[l] * c[k - 1];
        }
    }
    return f;
}

FluxField theta(const EdgSystem& sys, const WeightTable& wt, double t, const std::vector<double>& c) {
    const FluxField ka = expected_flux(sys, t, c);
    const FluxField kd = kappa_dagger(sys, wt, t, c);
    FluxField th(sys.M);
    for (std::size_t i = 0; i < th.data().size(); ++i)
        th.data()[i] = std::sqrt(ka.data()[i] * kd.data()[i]);
    return th;
}

ExtReal dissipation_R(const FluxField& j, const FluxField& th) {
    ExtReal s(0.0);
    for (std::size_t i = 0; i < j.data().size(); ++i) {
        s += phi_persp(j.data()[i], th.data()[i]);
        if (s.is_pos_inf()) return s;
    }
    return s;
}

DReport dissipation_D(const EdgSystem& sys, const WeightTable& wt, double t,
                      const std::vector<double>& c) {
    const FluxField ka = expected_flux(sys, t, c);
    const FluxField kd = kappa_dagger(sys, wt, t, c);
    DReport r;
    double hell = 0.0, half = 0.0;
    for (std::size_t i = 0; i < ka.data().size(); ++i) {
        const double a = ka.data()[i], b = kd.data()[i];
        const double g = std::sqrt(a * b);
        r.d += a - g;
        if (g > 0.0) r.d_minus += a - g;
        const double s = std::sqrt(a) - std::sqrt(b);
        hell += 0.5 * s * s;
        half += 0.5 * (a - b);
    }
    r.d_hellinger = hell + half;
    return r;
}

ExtReal fisher_F(const EdgSystem& sys, const WeightTable& wt, double t, const std::vector<double>& c) {
    const FluxField ka = expected_flux(sys, t, c);
    const FluxField kd = kappa_dagger(sys, wt, t, c);
    ExtReal s(0.0);
    for (std::size_t i = 0; i < ka.data().size(); ++i)
        s += B_fn(ka.data()[i], kd.data()[i], ka.data()[i]);
    return ExtReal(-0.5) * s;
}

double rstar_identity(const EdgSystem& sys, const WeightTable& wt, const ClusterDistribution& ref,
                      double t, const std::vector<double>& c) {
    const int M = sys.M;
    std::vector<double> lu(M + 1);
    for (int k = 0; k <= M; ++k) {
        if (!(c[k] > 0.0) || !(ref[k] > 0.0)) throw RangeError("rstar_identity needs positive densities");
        lu[k] = std::log(c[k] / ref[k]);
    }
    const FluxField th = theta(sys, wt, t, c);
    double s = 0.0;
    for (int k = 1; k <= M; ++k) {
        for (int l1 = 0; l1 < M; ++l1) {
            const int l = l1 + 1;
            const double grad = lu[k - 1] + lu[l] - lu[k] - lu[l1];
            s += std::expm1(-0.5 * grad) * th(k, l1);
        }
    }
    return s;
}

std::string FunctionalReport::to_json() const {
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
    j["continuity_residual"] = continuity_residual;
    return j.dump(2);
}

namespace {

// trapezoid over nodes 0, s, 2s, ... with the final interval closed at the last node
ExtReal trapezoid(const std::vector<double>& t, const std::vector<ExtReal>& f, std::size_t stride) {
    ExtReal acc(0.0);
    std::size_t i = 0;
    const std::size_t n = t.size();
    while (i + 1 < n) {
        std::size_t j = std::min(i + stride, n - 1);
        const double h = t[j] - t[i];
        if (h > 0.0) acc += ExtReal(0.5 * h) * (f[i] + f[j]);
        i = j;
    }
    return acc;
}

double halving_error(const std::vector<double>& t, const std::vector<ExtReal>& f) {
    const ExtReal a = trapezoid(t, f, 1), b = trapezoid(t, f, 2);
    if (!a.finite() || !b.finite()) return 0.0;
    return std::abs(a.value() - b.value()) / 3.0;
}

}  // namespace

double continuity_residual(const Trajectory& traj, double abs_floor) {
    double worst = 0.0;
    for (std::size_t i = 0; i + 1 < traj.size(); ++i) {
        const double h = traj.t[i + 1] - traj.t[i];
        const auto fa = continuity_rhs(traj.j[i]);
        const auto fb = continuity_rhs(traj.j[i + 1]);
        double res = 0.0, scale = 0.0;
        for (std::size_t k = 0; k < fa.size(); ++k) {
            const double dc = traj.c[i + 1][k] - traj.c[i][k];
            const double q = 0.5 * h * (fa[k] + fb[k]);
            res += std::abs(dc - q);
            scale += std::abs(dc) + std::abs(q);
        }
        worst = std::max(worst, std::max(0.0, res - abs_floor) / std::max(scale, 1e-300));
    }
    return worst;
}

FunctionalReport edf_total(const EdgSystem& sys, const WeightTable& wt, const Trajectory& traj,
                           const ClusterDistribution& ref, double ctol) {
    if (traj.size() == 0 || traj.j.size() != traj.size())
        throw InconsistentPairError("edf_total: trajectory carries no flux record");
    FunctionalReport rep;
    rep.continuity_residual = continuity_residual(traj);
    if (rep.continuity_residual > ctol)
        throw InconsistentPairError("edf_total: (c, j) violates the continuity equation");
    rep.energy_start = energy(traj.at(0), ref);
    rep.energy_end = energy(traj.at(traj.size() - 1), ref);
    std::vector<ExtReal> rv(traj.size()), dv(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const FluxField th = theta(sys, wt, traj.t[i], traj.c[i]);
        rv[i] = dissipation_R(traj.j[i], th);
        dv[i] = ExtReal(dissipation_D(sys, wt, traj.t[i], traj.c[i]).d);
    }
    rep.R_integral = trapezoid(traj.t, rv, 1);
    const ExtReal dint = trapezoid(traj.t, dv, 1);
    rep.D_integral = dint.value();
    rep.total = rep.energy_end - rep.energy_start + rep.R_integral + dint;
    double eps = 0.0;
    if (rep.energy_start.finite() && rep.energy_end.finite())
        eps = 1e-14 * (1.0 + std::abs(rep.energy_start.value()) + std::abs(rep.energy_end.value()));
    rep.quad_error = halving_error(traj.t, rv) + halving_error(traj.t, dv) + eps;
    return rep;
}

ChainRuleReport chain_rule_check(const EdgSystem& sys, const WeightTable& wt,
                                 const Trajectory& traj, const ClusterDistribution& ref) {
    ChainRuleReport rep;
    rep.energy_change = energy(traj.at(traj.size() - 1), ref) - energy(traj.at(0), ref);
    std::vector<ExtReal> bv(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        const FluxField ka = expected_flux(sys, traj.t[i], traj.c[i]);
        const FluxField kd = kappa_dagger(sys, wt, traj.t[i], traj.c[i]);
        ExtReal s(0.0);
        const auto& jd = traj.j[i].data();
        for (std::size_t q = 0; q < jd.size(); ++q) s += B_fn(ka.data()[q], kd.data()[q], jd[q]);
        bv[i] = ExtReal(0.5) * s;
    }
    rep.b_integral = trapezoid(traj.t, bv, 1);
    if (rep.energy_change.finite() && rep.b_integral.finite()) {
        rep.residual = std::abs(rep.energy_change.value() - rep.b_integral.value());
        rep.quad_error = halving_error(traj.t, bv) +
                         1e-14 * (1.0 + std::abs(energy(traj.at(0), ref).to_double()));
    } else {
        rep.residual = rep.energy_change == rep.b_integral ? 0.0
                                                           : std::numeric_limits<double>::infinity();
    }
    return rep;
}

EqualityReport equality_condition(double u, double v, double j, double K) {
    if (u < 0.0 || v < 0.0 || j < 0.0) throw RangeError("equality_condition: negative input");
    if (!(K > 0.0)) throw RangeError("equality_condition: Kscale must be positive");
    EqualityReport r;
    r.lhs = ExtReal(-0.5) * B_fn(u, v, j);
    r.rhs = phi_persp(j, K * std::sqrt(u * v)) + ExtReal(K * D_pair(u, v));
    if (!r.lhs.finite() || !r.rhs.finite()) {
        r.verdict = Verdict::InfiniteCase;
        return r;
    }
    const double gap = r.rhs.value() - r.lhs.value();
    const double scale = 1.0 + std::abs(r.rhs.value()) + std::abs(r.lhs.value());
    r.verdict = std::abs(gap) <= 1e-12 * scale ? Verdict::EqualityHolds : Verdict::StrictInequality;
    return r;
}

}  // namespace edg
