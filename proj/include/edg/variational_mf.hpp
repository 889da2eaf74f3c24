#pragma once

#include <string>
#include <vector>

#include "edg/equilibrium.hpp"
#include "edg/extreal.hpp"
#include "edg/meanfield.hpp"

namespace edg {

// Convex pair and friends.
double phi(double x);        ///< x log x - x + 1, phi(0) = 1
double phi_star(double r);   ///< e^r - 1
ExtReal phi_persp(double a, double b);  ///< b phi(a/b) with the boundary cases
double psi_star(double s);   ///< e^s + e^{-s} - 2
double psi(double r);        ///< Legendre dual of psi_star
double D_pair(double u, double v);  ///< u - sqrt(uv)

ExtReal A_fn(double u, double v);            ///< log v - log u, A(0,0) = 0
ExtReal B_fn(double u, double v, double w);  ///< A(u,v) w with 0 * inf = 0

/// max(min(log x, m), -m)
double log_m(double x, double m);

/// 1/2 Ent(c | ref).
ExtReal energy(const ClusterDistribution& c, const ClusterDistribution& ref);

/// kappa_dagger[c](k, l-1) = Kdagger_t(l, k-1) c_l c_{k-1}.
FluxField kappa_dagger(const EdgSystem& sys, const WeightTable& wt, double t,
                       const std::vector<double>& c);
/// sqrt(kappa kappa_dagger), channelwise.
FluxField theta(const EdgSystem& sys, const WeightTable& wt, double t, const std::vector<double>& c);

/// sum phi(j | theta).
ExtReal dissipation_R(const FluxField& j, const FluxField& th);

struct DReport {
    double d = 0.0;           ///< sum kappa - sqrt(kappa kappa_dagger)
    double d_hellinger = 0.0; ///< Hellinger^2 + 1/2 sum (kappa - kappa_dagger)
    double d_minus = 0.0;     ///< same sum restricted to theta > 0
};
DReport dissipation_D(const EdgSystem& sys, const WeightTable& wt, double t,
                      const std::vector<double>& c);

/// -1/2 sum B(kappa, kappa_dagger, kappa).
ExtReal fisher_F(const EdgSystem& sys, const WeightTable& wt, double t, const std::vector<double>& c);

/// sum (e^zeta - 1) theta with zeta = -1/2 grad log(c / ref); needs c > 0.
double rstar_identity(const EdgSystem& sys, const WeightTable& wt, const ClusterDistribution& ref,
                      double t, const std::vector<double>& c);

struct FunctionalReport {
    ExtReal energy_start, energy_end;
    ExtReal R_integral;
    double D_integral = 0.0;
    ExtReal total;
    double quad_error = 0.0;
    double continuity_residual = 0.0;

    std::string to_json() const;
};

/// E(c_T) - E(c_0) + int (R + D) dt on the trajectory grid; j defaults to the recorded flux.
/// Throws InconsistentPairError when (c, j) misses the continuity equation.
FunctionalReport edf_total(const EdgSystem& sys, const WeightTable& wt, const Trajectory& traj,
                           const ClusterDistribution& ref, double ctol = 0.1);

struct ChainRuleReport {
    ExtReal energy_change;
    ExtReal b_integral;  ///< int 1/2 sum B(kappa, kappa_dagger, j) dt
    double residual = 0.0;
    double quad_error = 0.0;
};
ChainRuleReport chain_rule_check(const EdgSystem& sys, const WeightTable& wt,
                                 const Trajectory& traj, const ClusterDistribution& ref);

/// Relative consistency error of (c, j) with the continuity equation, per grid interval.
double continuity_residual(const Trajectory& traj, double abs_floor = 1e-6);

enum class Verdict { EqualityHolds, StrictInequality, InfiniteCase };
struct EqualityReport {
    Verdict verdict = Verdict::EqualityHolds;
    ExtReal lhs;  ///< -1/2 B(u, v, j)
    ExtReal rhs;  ///< phi(j | K sqrt(uv)) + K D(u, v)
};
EqualityReport equality_condition(double u, double v, double j, double K);

}  // namespace edg
