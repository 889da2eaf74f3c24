#include "edg/flux_contraction.hpp"

#include <algorithm>
#include <cmath>

#include "edg/errors.hpp"
#include "edg/variational_mf.hpp"

namespace edg {

void NetFluxProblem::check() const {
    if (theta.size() != j_net.size()) throw RangeError("NetFluxProblem: length mismatch");
    for (std::size_t i = 0; i < theta.size(); ++i) {
        if (!std::isfinite(theta[i]) || !std::isfinite(j_net[i]))
            throw RangeError("NetFluxProblem: non-finite entry");
        if (theta[i] < 0.0) throw RangeError("NetFluxProblem: negative theta");
    }
}

ExtReal r_net(const NetFluxProblem& p) {
    p.check();
    double s = 0.0;
    for (std::size_t i = 0; i < p.theta.size(); ++i) {
        if (p.theta[i] == 0.0) {
            if (p.j_net[i] != 0.0) return ExtReal::pos_inf();
            continue;
        }
        s += 0.5 * psi(2.0 * p.j_net[i] / p.theta[i]) * p.theta[i];
    }
    return ExtReal(s);
}

OneWayFlux optimal_oneway(const NetFluxProblem& p) {
    p.check();
    OneWayFlux f;
    f.j.resize(p.theta.size());
    f.j_dagger.resize(p.theta.size());
    for (std::size_t i = 0; i < p.theta.size(); ++i) {
        const double th = p.theta[i];
        if (th == 0.0) {
            f.j[i] = std::max(0.0, 2.0 * p.j_net[i]);
            f.j_dagger[i] = std::max(0.0, -2.0 * p.j_net[i]);
            continue;
        }
        const double h = p.j_net[i] / th;
        const double g = std::hypot(h, 1.0) + h;
        f.j[i] = th * g;
        f.j_dagger[i] = th / g;
    }
    return f;
}

ExtReal pair_share(double j, double j_dagger, double theta) {
    return ExtReal(0.5) * (phi_persp(j, theta) + phi_persp(j_dagger, theta));
}

OracleReport contraction_oracle(const NetFluxProblem& p, double xtol) {
    p.check();
    OracleReport r;
    const std::size_t n = p.theta.size();
    r.numeric.resize(n);
    r.closed.resize(n);
    r.min_signed = 0.0;
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double th = p.theta[i], jn = p.j_net[i];
        if (th == 0.0) {
            if (jn != 0.0) throw AbsoluteContinuityError("contraction_oracle: theta = 0 with net flux");
            r.numeric[i] = r.closed[i] = 0.0;
            continue;
        }
        const double h = jn / th;
        r.closed[i] = 0.5 * psi(2.0 * h) * th;
        auto f = [&](double j) { return pair_share(j, j - 2.0 * jn, th).value(); };
        double a = std::max(0.0, 2.0 * jn);
        double b = a + th * (2.0 * std::abs(h) + 2.0) + 1.0;
        double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
        double f1 = f(x1), f2 = f(x2);
        const double tol = xtol * (1.0 + th);
        while (b - a > tol) {
            if (f1 <= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - inv_phi * (b - a);
                f1 = f(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + inv_phi * (b - a);
                f2 = f(x2);
            }
        }
        r.numeric[i] = std::min({f1, f2, f(0.5 * (a + b))});
        const double d = r.numeric[i] - r.closed[i];
        r.max_gap = std::max(r.max_gap, std::abs(d));
        r.min_signed = i == 0 ? d : std::min(r.min_signed, d);
    }
    return r;
}

}  // namespace edg
