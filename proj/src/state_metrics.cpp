#include "edg/state_metrics.hpp"

#include <algorithm>
#include <cmath>

#include "edg/errors.hpp"

namespace edg {

ClusterDistribution::ClusterDistribution(std::vector<double> p) : p_(std::move(p)) {
    if (p_.empty()) throw EmptyError("ClusterDistribution needs at least size 0");
    for (std::size_t k = 0; k < p_.size(); ++k) {
        mom0_ += p_[k];
        mom1_ += static_cast<double>(k) * p_[k];
    }
}

ClusterDistribution ClusterDistribution::delta(int k, int M) {
    if (k < 0 || k > M) throw RangeError("delta outside window");
    std::vector<double> p(M + 1, 0.0);
    p[k] = 1.0;
    return ClusterDistribution(std::move(p));
}

bool ClusterDistribution::normalized(double tol) const {
    return std::abs(mom0_ - 1.0) <= tol &&
           std::all_of(p_.begin(), p_.end(), [](double x) { return x >= 0.0; });
}

ClusterDistribution ClusterDistribution::padded(int M) const {
    if (M < this->M()) throw RangeError("padded: target window smaller than current");
    std::vector<double> q(p_);
    q.resize(M + 1, 0.0);
    return ClusterDistribution(std::move(q));
}

std::vector<double> tail(const ClusterDistribution& mu) {
    const int M = mu.M();
    std::vector<double> t(M, 0.0);
    double acc = 0.0;
    for (int k = M; k >= 1; --k) {
        acc += mu[k];
        t[k - 1] = acc;
    }
    return t;
}

namespace {

void common_window(const ClusterDistribution& mu, const ClusterDistribution& nu,
                   ClusterDistribution& a, ClusterDistribution& b) {
    const int M = std::max(mu.M(), nu.M());
    a = mu.M() == M ? mu : mu.padded(M);
    b = nu.M() == M ? nu : nu.padded(M);
}

}  // namespace

double d_ex(const ClusterDistribution& mu, const ClusterDistribution& nu) {
    ClusterDistribution a, b;
    common_window(mu, nu, a, b);
    // running tail difference, accumulated from the top
    double acc = 0.0, out = 0.0;
    for (int k = a.M(); k >= 1; --k) {
        acc += a[k] - b[k];
        out += std::abs(acc);
    }
    return out;
}

DexReport d_ex_report(const ClusterDistribution& mu, const ClusterDistribution& nu,
                      double moment_tol) {
    DexReport r;
    r.d_ex = d_ex(mu, nu);
    const double scale = std::max({1.0, std::abs(mu.mom1()), std::abs(nu.mom1())});
    r.moments_equal = std::abs(mu.mom1() - nu.mom1()) <= moment_tol * scale;
    r.d_f = r.moments_equal ? ExtReal(0.5 * r.d_ex) : ExtReal::pos_inf();
    return r;
}

double w1_oracle(const ClusterDistribution& mu, const ClusterDistribution& nu) {
    const double scale = std::max(std::abs(mu.mom0()), std::abs(nu.mom0()));
    if (std::abs(mu.mom0() - nu.mom0()) > 1e-12 * std::max(1.0, scale))
        throw RangeError("w1_oracle: mass mismatch");
    for (double x : mu.p())
        if (x < 0) throw RangeError("w1_oracle: negative mass");
    for (double x : nu.p())
        if (x < 0) throw RangeError("w1_oracle: negative mass");
    // Walk both quantile functions on [0, mass] and integrate |F^-1 - G^-1|.
    std::size_t i = 0, j = 0;
    double ri = mu.size() ? mu[0] : 0.0;
    double rj = nu.size() ? nu[0] : 0.0;
    double cost = 0.0;
    while (i < mu.size() && j < nu.size()) {
        if (ri <= 0.0) {
            if (++i < mu.size()) ri = mu[i];
            continue;
        }
        if (rj <= 0.0) {
            if (++j < nu.size()) rj = nu[j];
            continue;
        }
        const double m = std::min(ri, rj);
        cost += m * std::abs(static_cast<double>(i) - static_cast<double>(j));
        ri -= m;
        rj -= m;
    }
    return cost;
}

double l11_norm(const ClusterDistribution& mu) {
    double s = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) s += (1.0 + static_cast<double>(k)) * std::abs(mu[k]);
    return s;
}

double l11_distance(const ClusterDistribution& mu, const ClusterDistribution& nu) {
    ClusterDistribution a, b;
    common_window(mu, nu, a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        s += (1.0 + static_cast<double>(k)) * std::abs(a[k] - b[k]);
    return s;
}

double l1_distance(const ClusterDistribution& mu, const ClusterDistribution& nu) {
    ClusterDistribution a, b;
    common_window(mu, nu, a, b);
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += std::abs(a[k] - b[k]);
    return s;
}

}  // namespace edg
