#include "edg/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "edg/errors.hpp"
#include "edg/ode.hpp"

namespace edg {

void EdgSystem::check() const {
    if (M < 1) throw RangeError("EdgSystem: M must be >= 1");
    if (kernel.m_max() < M) throw RangeError("EdgSystem: kernel table shorter than window");
    if (c0.M() != M) throw RangeError("EdgSystem: initial state must live on 0..M");
}

double FluxField::total() const {
    double s = 0.0;
    for (double x : v_) s += x;
    return s;
}

FluxField FluxField::scaled(double a) const {
    FluxField f(*this);
    for (double& x : f.v_) x *= a;
    return f;
}

std::vector<double> continuity_rhs(const FluxField& j) {
    const int M = j.M();
    std::vector<double> out(M + 1, 0.0);
    for (int k = 1; k <= M; ++k) {
        for (int l1 = 0; l1 < M; ++l1) {
            const double f = j(k, l1);
            if (f == 0.0) continue;
            out[k - 1] += f;
            out[l1 + 1] += f;
            out[k] -= f;
            out[l1] -= f;
        }
    }
    return out;
}

FluxField expected_flux(const EdgSystem& sys, double t, const std::vector<double>& c) {
    const int M = sys.M;
    FluxField f(M);
    const bool pz = sys.pert.is_zero();
    for (int k = 1; k <= M; ++k) {
        if (c[k] == 0.0) continue;
        for (int l1 = 0; l1 < M; ++l1) {
            if (c[l1] == 0.0) continue;
            double K = sys.kernel.at(k, l1);
            if (!pz) K *= std::exp(sys.pert(t, k, l1));
            f.at(k, l1) = K * c[k] * c[l1];
        }
    }
    return f;
}

void edg_rhs_into(const EdgSystem& sys, double t, const std::vector<double>& c,
                  std::vector<double>& out) {
    const int M = sys.M;
    out.assign(M + 1, 0.0);
    const bool pz = sys.pert.is_zero();
    for (int k = 1; k <= M; ++k) {
        const double ck = c[k];
        if (ck == 0.0) continue;
        for (int l1 = 0; l1 < M; ++l1) {
            const double cl = c[l1];
            if (cl == 0.0) continue;
            double K = sys.kernel.at(k, l1);
            if (!pz) K *= std::exp(sys.pert(t, k, l1));
            const double f = K * ck * cl;
            out[k - 1] += f;
            out[l1 + 1] += f;
            out[k] -= f;
            out[l1] -= f;
        }
    }
}

std::vector<double> edg_rhs(const EdgSystem& sys, double t, const std::vector<double>& c) {
    if (static_cast<int>(c.size()) != sys.M + 1) throw RangeError("edg_rhs: state size mismatch");
    std::vector<double> out;
    edg_rhs_into(sys, t, c, out);
    return out;
}

namespace {

OdeOptions make_options(double tol, const std::vector<double>& stops) {
    if (!(tol > 0.0)) throw RangeError("integrate: tol must be positive");
    OdeOptions opt;
    opt.rtol = tol;
    opt.atol = tol;
    opt.stops = stops;
    return opt;
}

}  // namespace

Trajectory integrate(const EdgSystem& sys, double T, double tol, const std::vector<double>& stops,
                     bool record_flux) {
    sys.check();
    OdeRhs f = [&sys](double t, const std::vector<double>& y, std::vector<double>& dy) {
        edg_rhs_into(sys, t, y, dy);
    };
    auto res = dopri5(f, 0.0, T, sys.c0.p(), make_options(tol, stops));
    Trajectory tr;
    tr.t = std::move(res.t);
    tr.c = std::move(res.y);
    if (record_flux) {
        tr.j.reserve(tr.t.size());
        for (std::size_t i = 0; i < tr.t.size(); ++i) tr.j.push_back(expected_flux(sys, tr.t[i], tr.c[i]));
    }
    return tr;
}

Trajectory integrate_continuity(const EdgSystem& sys, const FluxLaw& law, double T, double tol,
                                const std::vector<double>& stops) {
    sys.check();
    OdeRhs f = [&law](double t, const std::vector<double>& y, std::vector<double>& dy) {
        dy = continuity_rhs(law(t, y));
    };
    auto res = dopri5(f, 0.0, T, sys.c0.p(), make_options(tol, stops));
    Trajectory tr;
    tr.t = std::move(res.t);
    tr.c = std::move(res.y);
    tr.j.reserve(tr.t.size());
    for (std::size_t i = 0; i < tr.t.size(); ++i) tr.j.push_back(law(tr.t[i], tr.c[i]));
    return tr;
}

namespace {

double sup_dex(const std::vector<std::vector<double>>& a, const std::vector<std::vector<double>>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, d_ex(ClusterDistribution(a[i]), ClusterDistribution(b[i])));
    return m;
}

struct PicardRun {
    std::vector<double> t;
    std::vector<std::vector<double>> c;
    std::vector<PicardWindow> windows;
};

PicardRun picard_run(const EdgSystem& sys, double M_ball, double T_step, double T, int nodes,
                     double tol, int max_iter, double ck) {
    PicardRun run;
    std::vector<double> cbar = sys.c0.p();
    run.t.push_back(0.0);
    run.c.push_back(cbar);
    const int M = sys.M;
    double t0 = 0.0;
    while (t0 < T - 1e-15 * std::max(1.0, T)) {
        const double t1 = std::min(T, t0 + T_step);
        const double h = (t1 - t0) / (nodes - 1);
        std::vector<double> ts(nodes);
        for (int i = 0; i < nodes; ++i) ts[i] = t0 + h * i;
        ts.back() = t1;
        std::vector<std::vector<double>> X(nodes, cbar), Xn(nodes, cbar), Q(nodes);
        PicardWindow win;
        win.t0 = t0;
        win.t1 = t1;
        win.bound = 4.0 * ck * M_ball * T_step;
        double prev = -1.0;
        bool converged = false;
        for (int it = 0; it < max_iter; ++it) {
            for (int i = 0; i < nodes; ++i) edg_rhs_into(sys, ts[i], X[i], Q[i]);
            Xn[0] = cbar;
            for (int i = 1; i < nodes; ++i) {
                const double hi = ts[i] - ts[i - 1];
                for (int k = 0; k <= M; ++k) Xn[i][k] = Xn[i - 1][k] + 0.5 * hi * (Q[i - 1][k] + Q[i][k]);
            }
            const double d = sup_dex(Xn, X);
            win.increments.push_back(d);
            X.swap(Xn);
            if (prev > 1e3 * tol) {
                const double q = d / prev;
                win.factors.push_back(q);
                if (q >= 1.0) {
                    std::ostringstream os;
                    os << "picard_solve: observed contraction factor " << q << " >= 1 on window ["
                       << t0 << "," << t1 << "]";
                    throw StepTooLargeError(os.str());
                }
            }
            prev = d;
            if (d <= tol) {
                converged = true;
                break;
            }
        }
        if (!converged) throw StepTooLargeError("picard_solve: no convergence within max_iter");
        for (int i = 0; i < nodes; ++i) {
            double r = 0.0;
            for (int k = 0; k <= M; ++k) r += (k + 1.0) * std::abs(X[i][k] - cbar[k]);
            win.ball_radius_used = std::max(win.ball_radius_used, r);
        }
        for (int i = 1; i < nodes; ++i) {
            run.t.push_back(ts[i]);
            run.c.push_back(X[i]);
        }
        run.windows.push_back(std::move(win));
        cbar = X.back();
        t0 = t1;
    }
    return run;
}

}  // namespace

PicardResult picard_solve(const EdgSystem& sys, double M_ball, double T_step, double T, int nodes,
                          double tol, int max_iter) {
    sys.check();
    if (!(M_ball > 0.0)) throw RangeError("picard_solve: ball radius must be positive");
    if (nodes < 3 || nodes % 2 == 0) throw RangeError("picard_solve: nodes must be odd and >= 3");
    PicardResult out;
    out.c_k = picard_kernel_constant(sys.kernel, sys.pert);
    if (T <= 0.0) {
        out.traj.t = {0.0};
        out.traj.c = {sys.c0.p()};
        return out;
    }
    if (!(T_step > 0.0) || 4.0 * out.c_k * M_ball * T_step >= 1.0) {
        std::ostringstream os;
        os << "picard_solve: window " << T_step << " violates T_step < 1/(4 C_K M_ball) = "
           << 1.0 / (4.0 * out.c_k * M_ball);
        throw StepTooLargeError(os.str());
    }
    auto fine = picard_run(sys, M_ball, T_step, T, nodes, tol, max_iter, out.c_k);
    auto coarse = picard_run(sys, M_ball, T_step, T, (nodes - 1) / 2 + 1, tol, max_iter, out.c_k);
    // coarse nodes coincide with every other fine node
    double diff = 0.0;
    for (std::size_t i = 0; i < coarse.t.size(); ++i) {
        const std::size_t fi = 2 * i;
        diff = std::max(diff, d_ex(ClusterDistribution(fine.c[fi]), ClusterDistribution(coarse.c[i])));
    }
    out.quad_error = diff / 3.0;
    out.traj.t = std::move(fine.t);
    out.traj.c = std::move(fine.c);
    out.windows = std::move(fine.windows);
    for (std::size_t i = 0; i < out.traj.t.size(); ++i)
        out.traj.j.push_back(expected_flux(sys, out.traj.t[i], out.traj.c[i]));
    return out;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os.precision(17);
    if (traj.c.empty()) return;
    const std::size_t n = traj.c.front().size();
    os << "t";
    for (std::size_t k = 0; k < n; ++k) os << ",c_" << k;
    os << ",mom0,mom1\n";
    for (std::size_t i = 0; i < traj.t.size(); ++i) {
        os << traj.t[i];
        double m0 = 0.0, m1 = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            os << ',' << traj.c[i][k];
            m0 += traj.c[i][k];
            m1 += static_cast<double>(k) * traj.c[i][k];
        }
        os << ',' << m0 << ',' << m1 << '\n';
    }
}

void write_flux_csv(std::ostream& os, const Trajectory& traj) {
    os.precision(17);
    os << "t,k,l_minus_1,value\n";
    for (std::size_t i = 0; i < traj.j.size(); ++i) {
        const auto& f = traj.j[i];
        for (int k = 1; k <= f.M(); ++k)
            for (int l1 = 0; l1 < f.M(); ++l1)
                if (f(k, l1) != 0.0) os << traj.t[i] << ',' << k << ',' << l1 << ',' << f(k, l1) << '\n';
    }
}

}  // namespace edg
