#pragma once

#include <vector>

#include "edg/extreal.hpp"

namespace edg {

/// Per-channel reference theta >= 0 and signed net flux.
struct NetFluxProblem {
    std::vector<double> theta;
    std::vector<double> j_net;

    /// Throws RangeError on length mismatch, negative theta or non-finite entries.
    void check() const;
};

/// sum over channels of psi(2h) theta / 2 with h = j_net / theta; +inf when theta = 0 carries net flux.
ExtReal r_net(const NetFluxProblem& p);

struct OneWayFlux {
    std::vector<double> j;
    std::vector<double> j_dagger;
};
/// j = theta g, j_dagger = theta / g, g = sqrt(h^2 + 1) + h.
OneWayFlux optimal_oneway(const NetFluxProblem& p);

/// Channel share (phi(j|theta) + phi(j_dagger|theta)) / 2 of a one-way pair.
ExtReal pair_share(double j, double j_dagger, double theta);

struct OracleReport {
    double max_gap = 0.0;
    double min_signed = 0.0;  ///< min over channels of (numeric min - closed form)
    std::vector<double> numeric;
    std::vector<double> closed;
};
/// Golden-section minimization of the channel share over j >= max(0, 2 j_net), j_dagger = j - 2 j_net.
OracleReport contraction_oracle(const NetFluxProblem& p, double xtol = 1e-11);

}  // namespace edg
