#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "edg/rng.hpp"
#include "edg/state_metrics.hpp"

namespace gen {

/// Property-test source: each case gets its own stream, so failures replay by case index.
struct Gen {
    explicit Gen(std::uint64_t seed, std::uint64_t cs = 0) : rng(seed, cs) {}
    edg::StreamRng rng;

    double uniform(double a, double b) { return a + (b - a) * rng.uniform(); }
    int integer(int a, int b) { return a + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(b - a + 1)); }

    /// Probability vector on 0..M with every entry positive.
    std::vector<double> positive_dist(int M) {
        std::vector<double> p(M + 1);
        double s = 0.0;
        for (auto& v : p) s += v = 0.05 + rng.uniform();
        for (auto& v : p) v /= s;
        return p;
    }

    /// Probability vector on 0..M with some zero entries.
    std::vector<double> sparse_dist(int M) {
        std::vector<double> p(M + 1, 0.0);
        double s = 0.0;
        for (auto& v : p)
            if (rng.uniform() < 0.6) s += v = rng.uniform();
        if (s == 0.0) {
            p[0] = 1.0;
            return p;
        }
        for (auto& v : p) v /= s;
        return p;
    }

    /// Pair of positive distributions on 0..M with equal mass and equal first moment.
    std::pair<std::vector<double>, std::vector<double>> equal_moment_pair(int M) {
        std::vector<double> a = positive_dist(M);
        std::vector<double> b = a;
        // a random combination of exchange moves keeps both moments
        for (int r = 0; r < 6; ++r) {
            const int k = integer(1, M), j = integer(0, M - 1);
            if (k - 1 == j) continue;
            const double m = uniform(0.0, 1.0) * std::min(b[k], b[j]) * 0.5;
            b[k] -= m;
            b[j] -= m;
            b[k - 1] += m;
            b[j + 1] += m;
        }
        return {a, b};
    }
};

}  // namespace gen
