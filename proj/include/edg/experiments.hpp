#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edg/config.hpp"
#include "edg/equilibrium.hpp"
#include "edg/kernels.hpp"
#include "edg/particle.hpp"

namespace edg {

struct Check {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct CommandResult {
    std::vector<Check> checks;
    std::vector<std::string> outputs;  ///< files written, relative to the output directory
    bool all_pass() const;
};

struct RunContext {
    Config cfg;
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    int threads = 1;
    std::string command;
};

/// [kernel] family = constant | product_power | weight_driven_power, with value / alpha / gamma.
KernelSpec kernel_from_config(const Config& cfg, int m_max);
/// [perturbation] type = none | constant | oscillating, with amplitude / frequency.
Perturbation perturbation_from_config(const Config& cfg);

/// Clusters of sizes floor(N/L) and floor(N/L) + 1 only.
MicroState lattice_state(long N, long L, int M);

struct ChaosParams {
    std::vector<long> Ls;
    int R = 64;
    int rho = 1;  ///< initial data delta_rho, N = rho L
    int M = 40;
    double T = 1.0;
    std::vector<double> times;  ///< output grid, includes 0 and T
    std::uint64_t seed = 1;
    int threads = 1;
    double tol = 1e-11;
};
struct ChaosRow {
    long L = 0;
    double t = 0.0;
    double d_ex = 0.0;   ///< d_ex(ensemble mean, ODE)
    double se = 0.0;     ///< standard error of d_ex, linearized at the ensemble mean
    double spread = 0.0; ///< mean over members of d_ex(member, ODE)
};
std::vector<ChaosRow> chaos_table(const KernelSpec& kernel, const Perturbation& pert, const ChaosParams& p);
/// At time t: d_ex(L_i) - d_ex(L_{i+1}) > sigmas * sqrt(se_i^2 + se_{i+1}^2) for consecutive schedule entries.
bool chaos_decreasing(const std::vector<ChaosRow>& rows, double t, double sigmas, std::string* detail = nullptr);

struct CondenseParams {
    std::vector<long> Ls;
    double rho = 1.2;
    double T = 20.0;
    int M0 = 50;
    int R = 4;
    std::string init = "canonical";  ///< canonical | lattice
    std::vector<double> times;
    std::uint64_t seed = 1;
    int threads = 1;
};
struct CondenseRow {
    long L = 0;
    double rho = 0.0;
    double t = 0.0;
    double truncated_moment = 0.0;
    double se = 0.0;
    double max_cluster_fraction = 0.0;
};
/// WeightDriven power kernel of exponent gamma, window N = round(rho L) per schedule entry.
std::vector<CondenseRow> condense_table(double gamma, const CondenseParams& p);

CommandResult cmd_solve(const RunContext& ctx);
CommandResult cmd_simulate(const RunContext& ctx);
CommandResult cmd_chaos(const RunContext& ctx);
CommandResult cmd_condense(const RunContext& ctx);
CommandResult cmd_gamma(const RunContext& ctx);
CommandResult cmd_edp(const RunContext& ctx);
CommandResult cmd_contraction(const RunContext& ctx);
CommandResult cmd_validate_kernel(const RunContext& ctx);

/// Dispatches by name, writes manifest.json and checks.csv. Returns the process exit code.
int run_command(const RunContext& ctx);

}  // namespace edg
