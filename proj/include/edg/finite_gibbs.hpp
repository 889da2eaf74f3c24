#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "edg/equilibrium.hpp"
#include "edg/extreal.hpp"
#include "edg/kernels.hpp"
#include "edg/particle.hpp"
#include "edg/rng.hpp"
#include "edg/state_metrics.hpp"

namespace edg {

/// Edge c -> c' = c + gamma^{k, l1} / L of the lifted chain.
struct Edge {
    int from;
    int k;
    int l1;
    int to;
};

/**
 * States of V^{N,L}: count vectors over sizes 0..N, sorted lexicographically.
 * Channels that leave the state unchanged (k = l1 + 1) carry no edge.
 */
struct StateSpace {
    int N = 0;
    int L = 0;
    std::vector<std::vector<int>> states;
    std::map<std::vector<int>, int> index;
    std::vector<Edge> edges;
    std::vector<int> reverse;  ///< flip map S on edge indices

    std::size_t size() const { return states.size(); }
    ClusterDistribution empirical(std::size_t i) const;
};

/// Number of partitions of N into at most L parts (double, exact below 2^53).
double count_states(int N, int L);

/// Throws SizeError when count_states(N, L) exceeds `budget`.
StateSpace enumerate(int N, int L, double budget = 1e6);

struct GibbsMeasure {
    std::vector<double> pi;
    std::vector<double> log_pi;
    double log_z = 0.0;  ///< L * A_{N,L}
    double A() const { return a_nl; }
    double a_nl = 0.0;
};

/// Pi(c) proportional to L!/prod n_k! prod w(k)^{n_k}, in log space.
GibbsMeasure gibbs(const StateSpace& space, const WeightTable& wt);

/// kappa^L[c](k, l1) = n_k (n_{l1} - delta) K / (L (L-1)) for an explicit kernel value.
double kappa_L(const std::vector<int>& n, int L, int k, int l1, double K);

struct DbcReport {
    double max_residual = 0.0;
    int worst_edge = -1;
};
/// max over edges of |Pi(c) kappa^L[c](k,l-1) - Pi(c') kappa^L[c'](l,k-1)| / (lhs + rhs + eps),
/// both sides with the forward kernel at time t.
DbcReport lifted_dbc_check(const StateSpace& space, const GibbsMeasure& g, const KernelSpec& kernel,
                           const Perturbation& pert, double t = 0.0);

struct GeneratorChecks {
    double max_column_sum = 0.0;
    double max_dbc_residual = 0.0;
};
GeneratorChecks generator_checks(const StateSpace& space, const GibbsMeasure& g,
                                 const KernelSpec& kernel, const Perturbation& pert, double t = 0.0);

struct MasterTrajectory {
    std::vector<double> t;
    std::vector<std::vector<double>> C;
    std::vector<std::vector<double>> J;  ///< nu^L[C_t] per edge
};

/// Forward Kolmogorov equation on the enumerated space, integrated with dopri5.
MasterTrajectory solve_fke(const StateSpace& space, const KernelSpec& kernel, const Perturbation& pert,
                           const std::vector<double>& C0, double T, double tol = 1e-11);

/// nu^L[C](e) for every edge at time t.
std::vector<double> finite_flux(const StateSpace& space, const KernelSpec& kernel,
                                const Perturbation& pert, double t, const std::vector<double>& C);

struct FiniteFunctionalReport {
    ExtReal energy_start, energy_end;
    ExtReal R_integral;
    double D_integral = 0.0;
    ExtReal total;
    double quad_error = 0.0;
    double max_abs_term = 0.0;  ///< largest |E|, |R|, |D| node value, for the stationary check
    ExtReal chain_rule_b_integral;
    double chain_rule_residual = 0.0;
    double nu_total_max = 0.0;       ///< sup_t sum_e nu / C-mass
    double nu_dagger_total_max = 0.0;

    std::string to_json() const;
};

/// Finite EDF along (C, J); J defaults to the recorded flux of the trajectory.
FiniteFunctionalReport finite_edf(const StateSpace& space, const GibbsMeasure& g,
                                  const WeightTable& wt, const KernelSpec& kernel,
                                  const Perturbation& pert, const MasterTrajectory& traj);

struct CountingReport {
    double max_ratio = 0.0;
    double max_lhs = 0.0;
    double rhs = 0.0;
};
/// |log L! - sum log n_k! + sum n_k log(n_k/L)| against (sqrt(2N)+1)(1+log L).
CountingReport counting_inequality(const StateSpace& space);
/// log L! - sum log n_k! + sum n_k log(n_k / L) for one state.
double counting_defect(const std::vector<int>& n, int L);

struct DecompositionReport {
    double lhs = 0.0;  ///< (1/L) Ent(C | Pi)
    double J_integral = 0.0;
    double A = 0.0;
    double residual = 0.0;  ///< |lhs - J_integral - A|
    double bound = 0.0;     ///< (log |V| + max defect) / L
};
DecompositionReport entropy_decomposition_check(const StateSpace& space, const GibbsMeasure& g,
                                                const WeightTable& wt, const std::vector<double>& C);

struct GammaRow {
    int N = 0, L = 0;
    double value = 0.0;  ///< (1/L) Ent(Pi_tilde | Pi)
    double limit = 0.0;
    double gap = 0.0;
    double A = 0.0;
    double minus_inf_Jbar = 0.0;
};
std::vector<GammaRow> gamma_table(const WeightTable& wtilde, const WeightTable& w, double rho,
                                  const std::vector<std::pair<int, int>>& schedule,
                                  double budget = 1e6);
void write_gamma_csv(std::ostream& os, const std::vector<GammaRow>& rows);

struct Projection {
    MicroState state;
    double distance = 0.0;  ///< l11 distance to the input
    double bound = 0.0;     ///< certified radius, when built by the construction
};
/// Nearest lattice state in l11, ties broken by the lexicographically smallest count vector.
Projection recovery_project(const ClusterDistribution& c, int N, int L, double budget = 1e6);
/// Explicit construction: shift mass to size 0, truncate, floor, add one correction atom.
Projection recovery_construct(const ClusterDistribution& c, int N, int L, double eps);

/// Exact draw from the canonical measure Pi^{N,L}_w; states live on sizes 0..N.
MicroState sample_canonical(const WeightTable& wt, int N, int L, StreamRng& rng);

/// index, counts, Pi.
void write_state_space_csv(std::ostream& os, const StateSpace& space, const GibbsMeasure& g);

}  // namespace edg
