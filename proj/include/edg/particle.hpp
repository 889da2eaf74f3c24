#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edg/kernels.hpp"
#include "edg/meanfield.hpp"
#include "edg/state_metrics.hpp"

namespace edg {

/// Occupation counts n_k over sizes 0..M of the lifted chain.
struct MicroState {
    std::vector<long> n;
    long N = 0;
    long L = 0;

    int M() const { return static_cast<int>(n.size()) - 1; }
    /// Throws RangeError unless sum n = L and sum k n_k = N.
    void check() const;
    ClusterDistribution empirical() const;
    static MicroState from_counts(std::vector<long> n);
};

struct JumpEvent {
    double t;
    int k;
    int l1;
};

/// Per-channel cumulative jump counts, optionally with the full event log.
struct JumpRecord {
    int M = 0;
    long L = 0;
    double T = 0.0;
    std::vector<long> counts;      ///< (k-1)*M + l1
    std::vector<JumpEvent> events; ///< filled when requested

    long count(int k, int l1) const { return counts[static_cast<std::size_t>(k - 1) * M + l1]; }
};

/// Chain rate of channel (k, l1): n_k (n_{l1} - delta) K_t(k, l1) / (L - 1); zero past the window.
double channel_rate(const MicroState& s, const KernelSpec& kernel, const Perturbation& pert, double t,
                    int k, int l1);
double total_rate(const MicroState& s, const KernelSpec& kernel, const Perturbation& pert, double t);
/// 2 C_K exp(|b|) (N/L)(N/L+1) L/(L-1) L.
double total_rate_bound(const MicroState& s, double c_k1, double b_sup);

struct SimOptions {
    std::vector<double> output_times;  ///< sorted, within [0, T]
    bool record_events = false;
    bool record_counts = true;         ///< dense per-channel counters
    bool check_invariants = false;     ///< integer conservation check after every jump
};

struct SimResult {
    Trajectory traj;  ///< empirical measures at output times, no fluxes
    JumpRecord record;
    MicroState final_state;
    long proposals = 0;
    long accepted = 0;
    long max_cluster_final = 0;
};

/// Exact-in-law SSA with thinning against K_bar exp(|b|_inf). Window M = state0.M().
SimResult simulate(const MicroState& state0, const KernelSpec& kernel, const Perturbation& pert,
                   double T, std::uint64_t seed, std::uint64_t stream = 0,
                   const SimOptions& opt = {});

struct EnsembleMean {
    ClusterDistribution mean;
    std::vector<double> stderr_vec;
};
EnsembleMean ensemble_mean(const std::vector<ClusterDistribution>& measures);

/// counts in [a, b) / (L (b - a)); needs the event log.
FluxField empirical_flux_rate(const JumpRecord& rec, double a, double b);

/// Runs R members with streams 0..R-1 on `threads` workers; results ordered by stream.
std::vector<SimResult> run_ensemble(const MicroState& state0, const KernelSpec& kernel,
                                    const Perturbation& pert, double T, std::uint64_t seed, int R,
                                    const SimOptions& opt, int threads);

/// FNV-1a over the kernel and perturbation descriptions.
std::uint64_t kernel_config_hash(const KernelSpec& kernel, const Perturbation& pert);
std::string manifest_json(std::uint64_t seed, long N, long L, double T, const KernelSpec& kernel,
                          const Perturbation& pert, int replicas = 1);

}  // namespace edg
