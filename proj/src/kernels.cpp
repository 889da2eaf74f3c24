#include "edg/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edg/equilibrium.hpp"
#include "edg/errors.hpp"

namespace edg {

KernelSpec KernelSpec::constant(double value, int m_max) {
    if (m_max < 1) throw RangeError("kernel: m_max must be >= 1");
    if (!(value > 0.0)) throw PositivityError("constant kernel needs a positive value");
    KernelSpec s;
    s.family_ = KernelFamily::Constant;
    s.value_ = value;
    s.m_max_ = m_max;
    s.phi_c_exact_ = 1.0;
    return s;
}

KernelSpec KernelSpec::product(std::vector<double> a, std::vector<double> b, int m_max,
                               double alpha) {
    if (m_max < 1) throw RangeError("kernel: m_max must be >= 1");
    if (static_cast<int>(a.size()) < m_max + 1 || static_cast<int>(b.size()) < m_max + 1)
        throw RangeError("product kernel: sequences must cover 0..m_max");
    for (int i = 0; i <= m_max; ++i)
        if (a[i] < 0.0 || b[i] < 0.0) throw PositivityError("product kernel: negative factor");
    KernelSpec s;
    s.family_ = KernelFamily::Product;
    s.a_ = std::move(a);
    s.b_ = std::move(b);
    s.a_.resize(m_max + 1);
    s.b_.resize(m_max + 1);
    s.m_max_ = m_max;
    s.alpha_ = alpha;
    return s;
}

KernelSpec KernelSpec::product_power(double alpha, int m_max) {
    std::vector<double> a(m_max + 1), b(m_max + 1);
    for (int i = 0; i <= m_max; ++i) {
        a[i] = std::pow(static_cast<double>(i), alpha);
        b[i] = std::pow(static_cast<double>(i) + 1.0, alpha);
    }
    KernelSpec s = product(std::move(a), std::move(b), m_max, alpha);
    s.phi_c_exact_ = 1.0;
    return s;
}

KernelSpec KernelSpec::weight_driven(std::vector<double> target_w, int m_max, double gamma) {
    if (m_max < 1) throw RangeError("kernel: m_max must be >= 1");
    if (static_cast<int>(target_w.size()) < m_max + 2)
        throw RangeError("weight-driven kernel: target weights must cover 0..m_max+1");
    if (target_w[0] != 1.0 || target_w[1] != 1.0)
        throw RangeError("weight-driven kernel: w(0) = w(1) = 1 required");
    KernelSpec s;
    s.family_ = KernelFamily::WeightDriven;
    s.m_max_ = m_max;
    s.gamma_ = gamma;
    s.ratio_.resize(m_max + 1);
    for (int j = 0; j <= m_max; ++j) {
        if (!(target_w[j] > 0.0) || !(target_w[j + 1] > 0.0))
            throw PositivityError("weight-driven kernel: target weights must be positive");
        s.ratio_[j] = target_w[j + 1] / target_w[j];
    }
    target_w.resize(m_max + 2);
    s.target_w_ = std::move(target_w);
    return s;
}

KernelSpec KernelSpec::weight_driven_power(double gamma, int m_max) {
    std::vector<double> w(m_max + 2);
    w[0] = 1.0;
    for (int n = 1; n <= m_max + 1; ++n) w[n] = std::pow(static_cast<double>(n), -gamma);
    KernelSpec s = weight_driven(std::move(w), m_max, gamma);
    s.phi_c_exact_ = 1.0;
    return s;
}

double KernelSpec::operator()(int k, int j) const {
    if (k < 1 || k > m_max_ || j < 0 || j > m_max_) {
        std::ostringstream os;
        os << "kernel index (" << k << "," << j << ") outside [1," << m_max_ << "]x[0," << m_max_
           << "]";
        throw RangeError(os.str());
    }
    return at(k, j);
}

std::string KernelSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (family_) {
        case KernelFamily::Constant: os << "constant(value=" << value_; break;
        case KernelFamily::Product: {
            os << "product(alpha=" << alpha_ << ",a=[";
            for (double x : a_) os << x << ' ';
            os << "],b=[";
            for (double x : b_) os << x << ' ';
            os << ']';
            break;
        }
        case KernelFamily::WeightDriven: {
            os << "weight_driven(gamma=" << gamma_ << ",w=[";
            for (double x : target_w_) os << x << ' ';
            os << ']';
            break;
        }
    }
    os << ",m_max=" << m_max_ << ')';
    return os.str();
}

Perturbation Perturbation::none() { return Perturbation{}; }

Perturbation Perturbation::constant(double c) {
    Perturbation p;
    p.fn_ = [c](double, int, int) { return c; };
    p.sup_ = std::abs(c);
    p.lip_ = 0.0;
    p.zero_ = c == 0.0;
    std::ostringstream os;
    os.precision(17);
    os << "constant(" << c << ")";
    p.label_ = os.str();
    return p;
}

Perturbation Perturbation::oscillating(double amp, double freq) {
    Perturbation p;
    p.fn_ = [amp, freq](double t, int k, int l) {
        const double gk = static_cast<double>(k) / (k + 1.0);
        const double gl = static_cast<double>(l) / (l + 1.0);
        return amp * std::cos(freq * t) * (gk - gl);
    };
    p.sup_ = std::abs(amp);
    p.lip_ = std::abs(amp);
    p.zero_ = amp == 0.0;
    std::ostringstream os;
    os.precision(17);
    os << "oscillating(amp=" << amp << ",freq=" << freq << ")";
    p.label_ = os.str();
    return p;
}

Perturbation Perturbation::custom(Fn fn, double sup_norm, double lipschitz, std::string label) {
    Perturbation p;
    p.fn_ = std::move(fn);
    p.sup_ = sup_norm;
    p.lip_ = lipschitz;
    p.zero_ = false;
    p.label_ = std::move(label);
    return p;
}

double Perturbation::operator()(double t, int k, int l) const {
    return zero_ ? 0.0 : fn_(t, k, l);
}

double forward_kernel(const KernelSpec& spec, const Perturbation& pert, double t, int k, int l) {
    const double kb = spec(k, l);
    if (pert.is_zero()) return kb;
    return kb * std::exp(pert(t, k, l));
}

double backward_kernel(const KernelSpec& spec, const Perturbation& pert, const WeightTable& wt,
                       double t, int k, int l) {
    if (l < 1 || k < 1) throw RangeError("backward_kernel needs k, l >= 1");
    if (l > wt.M() || k > wt.M() + 1) throw RangeError("backward_kernel: weights too short");
    const double num = forward_kernel(spec, pert, t, k, l - 1);
    const double wn = wt.w[k] * wt.w[l - 1];
    const double wd = wt.w[l] * wt.w[k - 1];
    if (wd == 0.0) {
        if (num * wn != 0.0)
            throw AbsoluteContinuityError("backward_kernel: zero weight in denominator");
        return 0.0;
    }
    if (wt.w[k] > 0 && wt.w[l - 1] > 0 && wt.w[l] > 0 && wt.w[k - 1] > 0)
        return num * std::exp(wt.logw[k] + wt.logw[l - 1] - wt.logw[l] - wt.logw[k - 1]);
    return num * wn / wd;
}

namespace {

// indices sampled along one axis: all of them for small windows, else a dense
// head plus a geometric tail
std::vector<int> sample_axis(int lo, int hi) {
    std::vector<int> out;
    if (hi - lo <= 240) {
        for (int i = lo; i <= hi; ++i) out.push_back(i);
        return out;
    }
    for (int i = lo; i <= lo + 120; ++i) out.push_back(i);
    double x = lo + 120;
    while (x < hi) {
        x *= 1.03;
        out.push_back(std::min(hi, static_cast<int>(x)));
    }
    out.push_back(hi);
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool non_growing(double full, double half) {
    return std::isfinite(full) && full <= 1.25 * half + 1e-300;
}

}  // namespace

AssumptionReport validate_assumptions(const KernelSpec& spec, const Perturbation& pert,
                                      const std::function<double(double)>& m_in) {
    const auto m = m_in ? m_in : [](double x) { return std::sqrt(x + 1.0); };
    AssumptionReport r;
    const int M = spec.m_max();
    const int H = std::max(1, M / 2);
    const auto ks = sample_axis(1, M);

    double k1_half = 0, k2_half = 0, ku1_half = 0, ku2_half = 0;
    for (int k : ks) {
        for (int l : ks) {
            const double v = spec.at(k, l - 1);
            const bool half = k <= H && l <= H;
            const double q1 = v / (static_cast<double>(k) * l);
            const double q2 = v / (m(k) * m(l));
            r.c_k1 = std::max(r.c_k1, q1);
            r.c_k2 = std::max(r.c_k2, q2);
            // uniqueness differences, channel (l, k) vs (l, k-1) and (l+1, k-1) vs (l, k-1)
            const double d1 = std::abs(spec.at(l, k) - spec.at(l, k - 1)) / l;
            r.c_ku_first = std::max(r.c_ku_first, d1);
            double d2 = 0.0;
            if (l + 1 <= M) d2 = std::abs(spec.at(l + 1, k - 1) - spec.at(l, k - 1)) / k;
            r.c_ku_second = std::max(r.c_ku_second, d2);
            if (half) {
                k1_half = std::max(k1_half, q1);
                k2_half = std::max(k2_half, q2);
                ku1_half = std::max(ku1_half, d1);
                ku2_half = std::max(ku2_half, d2);
            }
            // BDA identity
            const double lhs = v * spec.at(l, 0) * spec.at(1, k - 1);
            const double rhs = spec.at(l, k - 1) * spec.at(k, 0) * spec.at(1, l - 1);
            const double den = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
            r.bda_residual = std::max(r.bda_residual, std::abs(lhs - rhs) / den);
        }
    }
    const double Md = M;
    const bool m_sublinear = m(Md) / Md < m(1.0) && m(2 * Md) / (2 * Md) < m(Md) / Md;
    r.k1_pass = non_growing(r.c_k1, k1_half);
    r.k2_pass = m_sublinear && non_growing(r.c_k2, k2_half);
    r.ku_pass = non_growing(r.c_ku_first, ku1_half) && non_growing(r.c_ku_second, ku2_half);

    r.positive_pass = true;
    for (int l = 1; l <= M; ++l)
        if (!(spec.at(l, 0) > 0.0) || !(spec.at(1, l - 1) > 0.0)) r.positive_pass = false;

    if (r.positive_pass) {
        r.phi_c_ratio_estimate = spec.at(M, 0) / spec.at(1, M - 1);
        const double prev = M >= 2 ? spec.at(M - 1, 0) / spec.at(1, M - 2) : r.phi_c_ratio_estimate;
        r.phi_c_ratio_drift = std::abs(r.phi_c_ratio_estimate - prev);
        r.kc_pass = std::isfinite(r.phi_c_ratio_estimate) && r.phi_c_ratio_estimate > 0.0;
    }
    r.bda_pass = r.bda_residual <= 1e-12;

    // perturbation: declared bounds against sampled values
    r.perturbation_pass = true;
    if (!pert.is_zero()) {
        const double ts[] = {0.0, 0.37, 1.1, 2.9, 7.3};
        const auto ls = sample_axis(0, M);
        for (double t : ts) {
            for (int k : ks) {
                for (int l : ls) {
                    r.perturbation_sup_observed =
                        std::max(r.perturbation_sup_observed, std::abs(pert(t, k, l)));
                    if (l >= 1) {
                        const double a = std::abs(pert(t, l, k) - pert(t, l, k - 1)) * k;
                        r.perturbation_lip_observed = std::max(r.perturbation_lip_observed, a);
                        if (l + 1 <= M) {
                            const double b =
                                std::abs(pert(t, l + 1, k - 1) - pert(t, l, k - 1)) * l;
                            r.perturbation_lip_observed = std::max(r.perturbation_lip_observed, b);
                        }
                    }
                }
            }
        }
        r.perturbation_pass =
            r.perturbation_sup_observed <= pert.sup_norm() * (1 + 1e-12) + 1e-15 &&
            r.perturbation_lip_observed <= pert.lipschitz() * (1 + 1e-12) + 1e-15;
    }
    return r;
}

double picard_kernel_constant(const KernelSpec& spec, const Perturbation& pert) {
    const auto r = validate_assumptions(spec, pert);
    const double cb = pert.lipschitz();
    const double base = std::max({r.c_k1, r.c_ku_first + r.c_k1 * cb, r.c_ku_second + r.c_k1 * cb});
    return base * std::exp(pert.sup_norm());
}

}  // namespace edg
