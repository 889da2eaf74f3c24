#include "edg/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edg/errors.hpp"

namespace edg {

namespace {

// Dormand-Prince tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdeResult dopri5(const OdeRhs& f, double t0, double T, std::vector<double> y0,
                 const OdeOptions& opt) {
    OdeResult res;
    const std::size_t n = y0.size();
    res.t.push_back(t0);
    res.y.push_back(y0);
    if (T <= t0) return res;

    std::vector<double> stops;
    for (double s : opt.stops)
        if (s > t0 && s < T) stops.push_back(s);
    stops.push_back(T);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n);
    auto& y = y0;
    double t = t0;
    f(t, y, k1);
    ++res.rhs_evals;

    auto err_norm = [&](const std::vector<double>& a, const std::vector<double>& b,
                        const std::vector<double>& e) {
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt.atol + opt.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
            m = std::max(m, std::abs(e[i]) / sc);
        }
        return m;
    };

    double h = opt.h0;
    if (h <= 0.0) {
        double d0 = 0.0, d1 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double sc = opt.atol + opt.rtol * std::abs(y[i]);
            d0 = std::max(d0, std::abs(y[i]) / sc);
            d1 = std::max(d1, std::abs(k1[i]) / sc);
        }
        h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        h = std::min(h, T - t0);
    }
    h = std::min(h, opt.h_max);
    const double h_min = opt.h_min_rel * std::max(1.0, std::abs(T));
    double err_prev = 1e-4;
    std::size_t next_stop = 0;
    std::vector<double> err(n);

    for (long step = 0; step < opt.max_steps; ++step) {
        const double target = stops[next_stop];
        bool hits = false;
        if (t + h >= target - 1e-14 * std::max(1.0, std::abs(target))) {
            h = target - t;
            hits = true;
        }
        if (h < h_min && !hits) {
            std::ostringstream os;
            os << "step size underflow at t=" << t << " (h=" << h << "): system too stiff";
            throw StiffnessError(os.str());
        }
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
        f(t + c2 * h, ytmp, k2);
        for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        f(t + c3 * h, ytmp, k3);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        f(t + c4 * h, ytmp, k4);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        f(t + c5 * h, ytmp, k5);
        for (std::size_t i = 0; i < n; ++i)
            ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        f(t + h, ytmp, k6);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        f(t + h, ynew, k7);
        res.rhs_evals += 6;
        for (std::size_t i = 0; i < n; ++i)
            err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        const double en = err_norm(y, ynew, err);

        if (en <= 1.0 || (hits && h < h_min)) {
            t = hits ? target : t + h;
            y.swap(ynew);
            k1.swap(k7);
            res.t.push_back(t);
            res.y.push_back(y);
            if (hits) {
                if (++next_stop == stops.size()) return res;
            }
            // PI controller
            const double fac = en == 0.0 ? 5.0
                                         : std::clamp(0.9 * std::pow(en, -0.7 / 5) *
                                                          std::pow(err_prev, 0.4 / 5),
                                                      0.2, 5.0);
            err_prev = std::max(en, 1e-4);
            h = std::min(h * fac, opt.h_max);
        } else {
            ++res.rejected;
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
        }
    }
    throw StiffnessError("dopri5: maximum number of steps exceeded");
}

}  // namespace edg
