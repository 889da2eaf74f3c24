#include "edg/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "edg/errors.hpp"

namespace edg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// log a_n = n log(phi) + log w_n, with phi = 0 handled as the n = 0 atom only
std::vector<double> log_terms(const WeightTable& wt, double phi) {
    const int M = wt.M();
    std::vector<double> la(M + 1, kNegInf);
    if (phi == 0.0) {
        la[0] = wt.logw[0];
        return la;
    }
    const double lp = std::log(phi);
    for (int n = 0; n <= M; ++n) la[n] = n * lp + wt.logw[n];
    return la;
}

double log_sum_exp(const std::vector<double>& la) {
    double mx = kNegInf;
    for (double x : la) mx = std::max(mx, x);
    if (mx == kNegInf) return kNegInf;
    double s = 0.0;
    for (double x : la) s += std::exp(x - mx);
    return mx + std::log(s);
}

// first two scaled moments of exp(la), sharing a common scale exp(mx)
void scaled_moments(const std::vector<double>& la, double& mx, double& s0, double& s1) {
    mx = kNegInf;
    for (double x : la) mx = std::max(mx, x);
    s0 = s1 = 0.0;
    for (std::size_t n = 0; n < la.size(); ++n) {
        const double e = std::exp(la[n] - mx);
        s0 += e;
        s1 += static_cast<double>(n) * e;
    }
}

void analyse_tail(WeightTable& wt) {
    const int M = wt.M();
    wt.lambda_c = ExtReal(std::log(wt.phi_c));
    const auto la = log_terms(wt, wt.phi_c);
    const int H = std::max(1, M / 2);
    if (M < 4 || !std::isfinite(la[M]) || !std::isfinite(la[H])) {
        wt.tail_exponent = std::numeric_limits<double>::infinity();
    } else {
        wt.tail_exponent = -(la[M] - la[H]) / std::log(static_cast<double>(M) / H);
    }
    double mx, s0, s1;
    scaled_moments(la, mx, s0, s1);
    wt.rho_c_truncated = s1 / s0;
    const double s = wt.tail_exponent;
    if (!(s > 1.0)) {
        wt.z_at_lambda_c = ExtReal::pos_inf();
        wt.rho_c = ExtReal::pos_inf();
        wt.rho_c_tail_bound = 0.0;
        return;
    }
    const double Md = M;
    // a_n ~ C n^{-s} beyond the window; C scaled by exp(-mx)
    const double c_scaled = std::isfinite(s) ? std::exp(la[M] - mx + s * std::log(Md)) : 0.0;
    double t0 = 0.0, b0 = 0.0;
    if (std::isfinite(s)) {
        t0 = c_scaled * std::pow(Md + 0.5, 1.0 - s) / (s - 1.0);
        b0 = c_scaled * std::pow(Md, 1.0 - s) / (s - 1.0);
    }
    wt.z_at_lambda_c = ExtReal(std::exp(mx) * (s0 + t0));
    if (!(s > 2.0)) {
        wt.rho_c = ExtReal::pos_inf();
        return;
    }
    double t1 = 0.0, b1 = 0.0;
    if (std::isfinite(s)) {
        t1 = c_scaled * std::pow(Md + 0.5, 2.0 - s) / (s - 2.0);
        b1 = c_scaled * std::pow(Md, 2.0 - s) / (s - 2.0);
    }
    const double est = (s1 + t1) / (s0 + t0);
    wt.rho_c = ExtReal(est);
    const double lo = s1 / (s0 + b0);
    const double hi = (s1 + b1) / s0;
    wt.rho_c_tail_bound = std::max(std::abs(est - lo), std::abs(hi - est));
}

}  // namespace

WeightTable WeightTable::from_values(std::vector<double> w, double phi_c) {
    if (w.size() < 2) throw RangeError("weight table needs sizes 0 and 1");
    if (!(w[0] > 0.0) || !(w[1] > 0.0))
        throw PositivityError("weight table: w(0), w(1) must be positive");
    // normalize to w(0) = w(1) = 1 via the scaling w -> g e^{lambda k} w
    const double g = 1.0 / w[0];
    const double r = w[0] / w[1];
    WeightTable wt;
    const int M = static_cast<int>(w.size()) - 1;
    wt.w.resize(M + 1);
    wt.logw.resize(M + 1);
    for (int n = 0; n <= M; ++n) {
        if (w[n] < 0.0) throw PositivityError("weight table: negative weight");
        if (w[n] == 0.0) {
            wt.w[n] = 0.0;
            wt.logw[n] = kNegInf;
        } else {
            wt.logw[n] = std::log(g) + n * std::log(r) + std::log(w[n]);
            wt.w[n] = std::exp(wt.logw[n]);
        }
    }
    wt.w[0] = wt.w[1] = 1.0;
    wt.logw[0] = wt.logw[1] = 0.0;
    if (phi_c > 0.0) {
        wt.phi_c = phi_c / r;
        wt.phi_c_estimated = false;
    } else {
        if (M < 2 || !(wt.w[M] > 0.0)) throw PositivityError("weight table: cannot estimate phi_c");
        wt.phi_c = std::exp(wt.logw[M - 1] - wt.logw[M]);
        wt.phi_c_estimated = true;
    }
    analyse_tail(wt);
    return wt;
}

WeightTable weights(const KernelSpec& spec) {
    const int M = spec.m_max();
    WeightTable wt;
    wt.w.assign(M + 1, 1.0);
    wt.logw.assign(M + 1, 0.0);
    double acc = 0.0;
    for (int k = 2; k <= M; ++k) {
        const double num = spec.at(1, k - 1);
        const double den = spec.at(k, 0);
        if (!(den > 0.0) || !(num > 0.0))
            throw PositivityError("weights: Kbar(k,0) and Kbar(1,k-1) must be positive");
        acc += std::log(num) - std::log(den);
        wt.logw[k] = acc;
        wt.w[k] = std::exp(acc);
    }
    if (auto pc = spec.phi_c_exact()) {
        wt.phi_c = *pc;
        wt.phi_c_estimated = false;
    } else {
        wt.phi_c = M >= 2 ? std::exp(wt.logw[M - 1] - wt.logw[M]) : 1.0;
        wt.phi_c_estimated = true;
    }
    analyse_tail(wt);
    return wt;
}

double log_partition(const WeightTable& wt, double phi) {
    if (phi < 0.0) throw RangeError("partition_function: phi must be >= 0");
    return log_sum_exp(log_terms(wt, phi));
}

PartitionValue partition_function(const WeightTable& wt, double phi) {
    PartitionValue pv;
    pv.log_z = log_partition(wt, phi);
    if (pv.log_z > 700.0) throw OverflowError("partition_function: Z overflows a double");
    pv.z = std::exp(pv.log_z);
    const int M = wt.M();
    if (phi == 0.0) {
        pv.tail_certified = true;
        return pv;
    }
    if (phi < wt.phi_c) {
        // geometric majorant from the largest term ratio over the upper half
        const auto la = log_terms(wt, phi);
        double r = 0.0;
        for (int n = M / 2; n < M; ++n)
            if (std::isfinite(la[n]) && std::isfinite(la[n + 1])) r = std::max(r, std::exp(la[n + 1] - la[n]));
        if (r < 1.0) {
            pv.tail_bound = std::exp(la[M] - pv.log_z) * r / (1.0 - r);
            pv.tail_certified = true;
        }
    }
    return pv;
}

double density_of_fugacity(const WeightTable& wt, double phi) {
    if (phi < 0.0) throw RangeError("density_of_fugacity: phi must be >= 0");
    if (phi == 0.0) return 0.0;
    double mx, s0, s1;
    scaled_moments(log_terms(wt, phi), mx, s0, s1);
    return s1 / s0;
}

double fugacity_of_density(const WeightTable& wt, double rho) {
    if (rho < 0.0) throw RangeError("fugacity_of_density: rho must be >= 0");
    if (rho == 0.0) return 0.0;
    const double rho_c = wt.rho_c.to_double();
    const double top = density_of_fugacity(wt, wt.phi_c);
    if (rho > rho_c || rho > top) {
        throw SupercriticalError("fugacity_of_density: density beyond the equilibrium range of "
                                 "the table",
                                 std::min(rho_c, top));
    }
    double lo = 0.0, hi = wt.phi_c;
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (density_of_fugacity(wt, mid) < rho)
            lo = mid;
        else
            hi = mid;
    }
    const double flo = density_of_fugacity(wt, lo), fhi = density_of_fugacity(wt, hi);
    const double phi = std::abs(flo - rho) <= std::abs(fhi - rho) ? lo : hi;
    if (std::abs(density_of_fugacity(wt, phi) - rho) > 1e-10 * std::max(1.0, rho))
        throw RangeError("fugacity_of_density: bisection did not reach 1e-10");
    return phi;
}

EquilibriumMeasure equilibrium_at_fugacity(const WeightTable& wt, double phi) {
    const auto la = log_terms(wt, phi);
    const double lz = log_sum_exp(la);
    std::vector<double> p(la.size());
    for (std::size_t n = 0; n < la.size(); ++n) p[n] = std::isfinite(la[n]) ? std::exp(la[n] - lz) : 0.0;
    EquilibriumMeasure eq;
    eq.omega = ClusterDistribution(std::move(p));
    eq.phi = phi;
    eq.rho = eq.omega.mom1();
    return eq;
}

EquilibriumMeasure equilibrium(const WeightTable& wt, double rho) {
    return equilibrium_at_fugacity(wt, fugacity_of_density(wt, rho));
}

EquilibriumMeasure equilibrium_capped(const WeightTable& wt, double rho) {
    const double top = density_of_fugacity(wt, wt.phi_c);
    if (wt.rho_c.finite() && rho >= std::min(wt.rho_c.value(), top))
        return equilibrium_at_fugacity(wt, wt.phi_c);
    return equilibrium(wt, rho);
}

ExtReal relative_entropy(const std::vector<double>& c, const std::vector<double>& ref) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] <= 0.0) continue;
        if (k >= ref.size() || ref[k] <= 0.0) return ExtReal::pos_inf();
        s += c[k] * std::log(c[k] / ref[k]);
    }
    return ExtReal(s);
}

ExtReal rate_J(const WeightTable& wt, const ClusterDistribution& c) {
    double s = 0.0;
    for (std::size_t k = 0; k < c.size(); ++k) {
        if (c[k] <= 0.0) continue;
        if (static_cast<int>(k) > wt.M() || wt.w[k] <= 0.0) return ExtReal::pos_inf();
        s += c[k] * (std::log(c[k]) - wt.logw[k]);
    }
    return ExtReal(s);
}

double inf_Jbar(const WeightTable& wt, double rho) {
    const auto eq = equilibrium_capped(wt, rho);
    const double r = eq.rho;
    const double lam = eq.phi > 0.0 ? std::log(eq.phi) : 0.0;
    const double lz = log_partition(wt, eq.phi);
    double v = (r > 0.0 ? lam * r : 0.0) - lz;
    if (rho > r && wt.lambda_c.finite()) v += wt.lambda_c.value() * (rho - r);
    return v;
}

ExtReal gamma_rate_function(const WeightTable& wt, const ClusterDistribution& c, double rho) {
    for (std::size_t k = 0; k < c.size(); ++k)
        if (c[k] > 0.0 && (static_cast<int>(k) > wt.M() || wt.w[k] <= 0.0)) return ExtReal::pos_inf();
    const double mom = c.mom1();
    const double tol = 1e-12 * std::max(1.0, rho);
    if (mom > rho + tol) return ExtReal::pos_inf();
    const double defect = std::max(0.0, rho - mom);

    if (wt.lambda_c.is_pos_inf()) {
        if (defect > tol) return ExtReal::pos_inf();
        return relative_entropy(c.p(), equilibrium(wt, rho).omega.p());
    }
    const bool condensed = wt.rho_c.finite() &&
                           rho >= std::min(wt.rho_c.value(), density_of_fugacity(wt, wt.phi_c));
    if (condensed) {
        return relative_entropy(c.p(), equilibrium_at_fugacity(wt, wt.phi_c).omega.p());
    }
    const auto eq = equilibrium(wt, rho);
    const ExtReal ent = relative_entropy(c.p(), eq.omega.p());
    const double lam = eq.phi > 0.0 ? std::log(eq.phi) : -std::numeric_limits<double>::infinity();
    // (lambda_c - lambda(rho)) * defect with (+inf) * 0 = 0
    const ExtReal gap = std::isfinite(lam) ? ExtReal(wt.lambda_c.value() - lam) : ExtReal::pos_inf();
    return ent + gap * ExtReal(defect > tol ? defect : 0.0);
}

void write_equilibrium_csv(std::ostream& os, const WeightTable& wt, const EquilibriumMeasure& eq) {
    os.precision(17);
    os << "k,w_k,omega_k\n";
    for (int k = 0; k <= wt.M(); ++k) {
        os << k << ',' << wt.w[k] << ',' << (k < static_cast<int>(eq.omega.size()) ? eq.omega[k] : 0.0)
           << '\n';
    }
}

}  // namespace edg

namespace edg {

double kernel_dbc_residual(const KernelSpec& spec, const WeightTable& wt) {
    const int M = std::min(spec.m_max(), wt.M());
    double worst = 0.0;
    for (int k = 1; k <= M; ++k) {
        for (int l = 1; l <= M; ++l) {
            const double a = std::exp(wt.logw[k] + wt.logw[l - 1]) * spec.at(k, l - 1);
            const double b = std::exp(wt.logw[l] + wt.logw[k - 1]) * spec.at(l, k - 1);
            if (a == 0.0 && b == 0.0) continue;
            worst = std::max(worst, std::abs(a - b) / (a + b));
        }
    }
    return worst;
}

}  // namespace edg
