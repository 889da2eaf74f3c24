#pragma once

#include <vector>

#include "edg/extreal.hpp"

namespace edg {

/// Nonnegative vector over cluster sizes 0..M with cached moments.
class ClusterDistribution {
public:
    ClusterDistribution() = default;
    explicit ClusterDistribution(std::vector<double> p);

    static ClusterDistribution delta(int k, int M);

    int M() const { return static_cast<int>(p_.size()) - 1; }
    std::size_t size() const { return p_.size(); }
    double operator[](std::size_t k) const { return p_[k]; }
    const std::vector<double>& p() const { return p_; }
    double mom0() const { return mom0_; }
    double mom1() const { return mom1_; }
    bool normalized(double tol = 1e-12) const;

    /// Zero-padded copy on 0..M (M >= current window).
    ClusterDistribution padded(int M) const;

private:
    std::vector<double> p_;
    double mom0_ = 0.0;
    double mom1_ = 0.0;
};

/// t_k = sum_{n >= k} p_n for k = 1..M; entry 0 of the result is t_1.
std::vector<double> tail(const ClusterDistribution& mu);

/// l1 distance of tail vectors.
double d_ex(const ClusterDistribution& mu, const ClusterDistribution& nu);

struct DexReport {
    double d_ex = 0.0;
    bool moments_equal = false;
    ExtReal d_f;  ///< d_ex/2 on equal first moments, +inf otherwise
};
DexReport d_ex_report(const ClusterDistribution& mu, const ClusterDistribution& nu,
                      double moment_tol = 1e-12);

/// Wasserstein-1 via the quantile coupling; independent of the tail formula.
double w1_oracle(const ClusterDistribution& mu, const ClusterDistribution& nu);

/// sum (1+k)|mu_k|.
double l11_norm(const ClusterDistribution& mu);
double l11_distance(const ClusterDistribution& mu, const ClusterDistribution& nu);
double l1_distance(const ClusterDistribution& mu, const ClusterDistribution& nu);

}  // namespace edg
