#pragma once

#include <functional>
#include <limits>
#include <vector>

namespace edg {

using OdeRhs = std::function<void(double, const std::vector<double>&, std::vector<double>&)>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    double h0 = 0.0;  ///< 0 picks a starting step automatically
    double h_max = std::numeric_limits<double>::infinity();
    double h_min_rel = 1e-14;  ///< underflow threshold relative to max(1, |T|)
    long max_steps = 50'000'000;
    std::vector<double> stops;  ///< times that must appear on the grid
};

struct OdeResult {
    std::vector<double> t;
    std::vector<std::vector<double>> y;
    long rejected = 0;
    long rhs_evals = 0;
};

/// Dormand-Prince 5(4) with PI step control. Throws StiffnessError on step underflow.
OdeResult dopri5(const OdeRhs& f, double t0, double T, std::vector<double> y0,
                 const OdeOptions& opt = {});

}  // namespace edg
