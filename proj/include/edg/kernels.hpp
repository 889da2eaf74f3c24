#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace edg {

struct WeightTable;

enum class KernelFamily { Constant, Product, WeightDriven };

/**
 * Reversible base kernel Kbar(k, j) for k >= 1, j >= 0, tabulated up to m_max.
 *
 * Channel (k, j) moves one particle from a cluster of size k to a cluster of
 * size j. Values outside [1, m_max] x [0, m_max] raise RangeError.
 */
class KernelSpec {
public:
    /// Kbar == value.
    static KernelSpec constant(double value, int m_max);
    /// Kbar(k, j) = a[k] * b[j]; a and b must cover 0..m_max.
    static KernelSpec product(std::vector<double> a, std::vector<double> b, int m_max,
                              double alpha = 0.0);
    /// a(k) = k^alpha, b(j) = (j+1)^alpha.
    static KernelSpec product_power(double alpha, int m_max);
    /// Target weights w(0..m_max+1) with w(0) = w(1) = 1.
    static KernelSpec weight_driven(std::vector<double> target_w, int m_max, double gamma = 0.0);
    /// w(n) = n^{-gamma}.
    static KernelSpec weight_driven_power(double gamma, int m_max);

    KernelFamily family() const { return family_; }
    int m_max() const { return m_max_; }
    double alpha() const { return alpha_; }
    double gamma() const { return gamma_; }
    double value() const { return value_; }

    /// Kbar(k, j), range checked.
    double operator()(int k, int j) const;
    /// Kbar(k, j) without range checks, for inner loops.
    double at(int k, int j) const {
        switch (family_) {
            case KernelFamily::Constant: return value_;
            case KernelFamily::Product: return a_[k] * b_[j];
            default: return ratio_[j];
        }
    }

    /// Known limit of Kbar(k,0)/Kbar(1,k-1), if the family has one in closed form.
    std::optional<double> phi_c_exact() const { return phi_c_exact_; }
    /// Stable textual description, used in manifests.
    std::string describe() const;

private:
    KernelFamily family_ = KernelFamily::Constant;
    int m_max_ = 0;
    double value_ = 1.0;
    double alpha_ = 0.0;
    double gamma_ = 0.0;
    std::vector<double> a_, b_;
    std::vector<double> ratio_;  // WeightDriven: w(j+1)/w(j)
    std::vector<double> target_w_;
    std::optional<double> phi_c_exact_;
};

/**
 * Bounded perturbation b_t(k, l) of the reversible kernel.
 *
 * The declared sup norm and Lipschitz constant are used by the thinning
 * simulator and by validate_assumptions; custom functions must honour them.
 */
class Perturbation {
public:
    using Fn = std::function<double(double, int, int)>;

    static Perturbation none();
    /// b_t == c.
    static Perturbation constant(double c);
    /// b_t(k, l) = amp * cos(freq * t) * (k/(k+1) - l/(l+1)).
    static Perturbation oscillating(double amp, double freq);
    static Perturbation custom(Fn fn, double sup_norm, double lipschitz, std::string label);

    double operator()(double t, int k, int l) const;
    bool is_zero() const { return zero_; }
    double sup_norm() const { return sup_; }
    double lipschitz() const { return lip_; }
    const std::string& label() const { return label_; }

private:
    Fn fn_;
    double sup_ = 0.0;
    double lip_ = 0.0;
    bool zero_ = true;
    std::string label_ = "none";
};

/// K_t(k, l) = Kbar(k, l) exp(b_t(k, l)).
double forward_kernel(const KernelSpec& spec, const Perturbation& pert, double t, int k, int l);

/// Kdagger_t(l, k-1) = K_t(k, l-1) w_k w_{l-1} / (w_l w_{k-1}), for k, l >= 1.
double backward_kernel(const KernelSpec& spec, const Perturbation& pert, const WeightTable& wt,
                       double t, int k, int l);

struct AssumptionReport {
    bool k1_pass = false;
    double c_k1 = 0.0;  ///< sup Kbar(k,l-1)/(k l)
    bool k2_pass = false;
    double c_k2 = 0.0;  ///< sup Kbar(k,l-1)/(m(k) m(l))
    bool ku_pass = false;
    double c_ku_first = 0.0;   ///< sup |Kbar(l,k)-Kbar(l,k-1)|/l
    double c_ku_second = 0.0;  ///< sup |Kbar(l+1,k-1)-Kbar(l,k-1)|/k
    bool positive_pass = false;
    bool kc_pass = false;
    double phi_c_ratio_estimate = 0.0;  ///< Kbar(M,0)/Kbar(1,M-1)
    double phi_c_ratio_drift = 0.0;     ///< change of that ratio between M-1 and M
    bool bda_pass = false;
    double bda_residual = 0.0;  ///< max relative residual of the BDA identity
    bool perturbation_pass = false;
    double perturbation_sup_observed = 0.0;
    double perturbation_lip_observed = 0.0;

    bool all_pass() const {
        return k1_pass && k2_pass && ku_pass && positive_pass && kc_pass && bda_pass &&
               perturbation_pass;
    }
};

/// Report-only check of the kernel assumptions on the tabulated range.
/// `m` defaults to m(x) = sqrt(x + 1).
AssumptionReport validate_assumptions(const KernelSpec& spec, const Perturbation& pert,
                                      const std::function<double(double)>& m = {});

/// Constant C_K of the Picard contraction bound: max of the growth and
/// uniqueness constants, times exp(|b|_inf).
double picard_kernel_constant(const KernelSpec& spec, const Perturbation& pert);

}  // namespace edg
