#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "edg/kernels.hpp"
#include "edg/state_metrics.hpp"

namespace edg {

/// Truncated EDG system on sizes 0..M. Channels creating a size above M are dropped.
struct EdgSystem {
    KernelSpec kernel;
    Perturbation pert;
    int M = 0;
    ClusterDistribution c0;

    /// Throws RangeError when the kernel table or c0 does not cover 0..M.
    void check() const;
};

/// Flux over channels (k, j), k = 1..M, j = 0..M-1: one particle from size k to size j.
class FluxField {
public:
    FluxField() = default;
    explicit FluxField(int M) : M_(M), v_(static_cast<std::size_t>(M) * M, 0.0) {}

    int M() const { return M_; }
    double operator()(int k, int j) const { return v_[idx(k, j)]; }
    double& at(int k, int j) { return v_[idx(k, j)]; }
    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }
    double total() const;
    FluxField scaled(double a) const;

private:
    std::size_t idx(int k, int j) const { return static_cast<std::size_t>(k - 1) * M_ + j; }
    int M_ = 0;
    std::vector<double> v_;
};

/// Time grid, states and per-channel fluxes of a path.
struct Trajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> c;
    std::vector<FluxField> j;  ///< empty when fluxes were not recorded

    std::size_t size() const { return t.size(); }
    ClusterDistribution at(std::size_t i) const { return ClusterDistribution(c[i]); }
};

/// Flux law (t, c) -> j used to drive the continuity equation.
using FluxLaw = std::function<FluxField(double, const std::vector<double>&)>;

/// Exchange divergence: returns sum_{k,j} j(k,j) gamma^{k,j}, i.e. dc/dt.
std::vector<double> continuity_rhs(const FluxField& j);

/// kappa_t[c](k, j) = K_t(k, j) c_k c_j.
FluxField expected_flux(const EdgSystem& sys, double t, const std::vector<double>& c);

/// Qc: right-hand side of the truncated EDG system.
std::vector<double> edg_rhs(const EdgSystem& sys, double t, const std::vector<double>& c);
void edg_rhs_into(const EdgSystem& sys, double t, const std::vector<double>& c,
                  std::vector<double>& out);

/// Adaptive Dormand-Prince integration of the EDG system, recording kappa on the grid.
Trajectory integrate(const EdgSystem& sys, double T, double tol,
                     const std::vector<double>& stops = {}, bool record_flux = true);

/// Integrates dc/dt = div(law(t, c)) and records the law on the grid.
Trajectory integrate_continuity(const EdgSystem& sys, const FluxLaw& law, double T, double tol,
                                const std::vector<double>& stops = {});

struct PicardWindow {
    double t0 = 0.0, t1 = 0.0;
    std::vector<double> factors;    ///< ratios of successive sup-d_ex increments
    std::vector<double> increments; ///< sup_t d_ex(F^{m+1}, F^m)
    double bound = 0.0;             ///< 4 C_K M_ball T_step
    double ball_radius_used = 0.0;  ///< sup_t sum (k+1)|c_k - cbar_k|
};

struct PicardResult {
    Trajectory traj;
    std::vector<PicardWindow> windows;
    double c_k = 0.0;
    double quad_error = 0.0;  ///< sup_t d_ex between the fine and the half-resolution solve
};

/// Fixed point of F(c)(t) = cbar + int_0^t Qc, composite trapezoid on `nodes` points per
/// window, restarted on consecutive windows of length T_step.
PicardResult picard_solve(const EdgSystem& sys, double M_ball, double T_step, double T,
                          int nodes = 33, double tol = 1e-14, int max_iter = 200);

/// CSV: t, c_0..c_M, mom0, mom1.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
/// Long format CSV: t, k, l_minus_1, value (nonzero entries only).
void write_flux_csv(std::ostream& os, const Trajectory& traj);

}  // namespace edg
