#pragma once

#include <iosfwd>
#include <vector>

#include "edg/extreal.hpp"
#include "edg/kernels.hpp"
#include "edg/state_metrics.hpp"

namespace edg {

/**
 * Detailed-balance weights w(0..M) with w(0) = w(1) = 1, plus the critical data
 * of the equilibrium family.
 *
 * rho_c and Z(phi_c) include an integral-comparison tail estimate fitted to
 * the local power-law exponent of phi_c^n w(n) at the end of the table.
 */
struct WeightTable {
    std::vector<double> w;
    std::vector<double> logw;  ///< -inf where w == 0
    double phi_c = 1.0;
    bool phi_c_estimated = false;
    ExtReal lambda_c;        ///< log phi_c
    ExtReal z_at_lambda_c;   ///< Z(phi_c), +inf when the series diverges
    double tail_exponent = 0.0;
    ExtReal rho_c;           ///< sup of equilibrium first moments
    double rho_c_truncated = 0.0;  ///< window-only value rho(phi_c)
    double rho_c_tail_bound = 0.0;

    int M() const { return static_cast<int>(w.size()) - 1; }

    /// Table from explicit values; phi_c <= 0 means "estimate from the tail".
    static WeightTable from_values(std::vector<double> w, double phi_c = -1.0);
};

struct EquilibriumMeasure {
    ClusterDistribution omega;
    double phi = 0.0;
    double rho = 0.0;
};

struct PartitionValue {
    double z = 0.0;
    double log_z = 0.0;
    double tail_bound = 0.0;     ///< bound on the discarded tail, relative to z
    bool tail_certified = false; ///< false at or beyond phi_c
};

WeightTable weights(const KernelSpec& spec);

double log_partition(const WeightTable& wt, double phi);
PartitionValue partition_function(const WeightTable& wt, double phi);

/// rho(phi) on the table window.
double density_of_fugacity(const WeightTable& wt, double phi);
/// Phi(rho) by bisection, |rho(Phi) - rho| <= 1e-10.
double fugacity_of_density(const WeightTable& wt, double rho);

EquilibriumMeasure equilibrium_at_fugacity(const WeightTable& wt, double phi);
EquilibriumMeasure equilibrium(const WeightTable& wt, double rho);
/// Measure used as the reference at density rho: omega^{min(rho, rho_c)}.
EquilibriumMeasure equilibrium_capped(const WeightTable& wt, double rho);

/// Ent(c | ref), natural log, 0 log 0 = 0; +inf when c charges a null site of ref.
ExtReal relative_entropy(const std::vector<double>& c, const std::vector<double>& ref);

/// sum c_k log(c_k / w_k).
ExtReal rate_J(const WeightTable& wt, const ClusterDistribution& c);
/// inf_c Jbar(c, rho) attained at omega^{min(rho, rho_c)}.
double inf_Jbar(const WeightTable& wt, double rho);

/// Normalized Gamma-limit rate function Fbar(c, rho).
ExtReal gamma_rate_function(const WeightTable& wt, const ClusterDistribution& c, double rho);

/// CSV with columns k, w_k, omega_k.
void write_equilibrium_csv(std::ostream& os, const WeightTable& wt, const EquilibriumMeasure& eq);

}  // namespace edg

namespace edg {

/// max over k, l >= 1 of |w_k w_{l-1} Kbar(k,l-1) - w_l w_{k-1} Kbar(l,k-1)| / (sum of both).
double kernel_dbc_residual(const KernelSpec& spec, const WeightTable& wt);

}  // namespace edg
