#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "edg/equilibrium.hpp"
#include "edg/errors.hpp"
#include "edg/finite_gibbs.hpp"
#include "edg/particle.hpp"
#include "edg/rng.hpp"

using namespace edg;

namespace {

MicroState uniform_ones(long L, int M) {
    std::vector<long> n(M + 1, 0);
    n[1] = L;
    return MicroState::from_counts(n);
}

// Plain Gillespie with exact rates, time-independent kernel only.
MicroState plain_ssa(MicroState s, const KernelSpec& kernel, const Perturbation& pert, double T,
                     StreamRng& rng) {
    const int M = s.M();
    double t = 0.0;
    std::vector<double> r(static_cast<std::size_t>(M) * M);
    for (;;) {
        double tot = 0.0;
        for (int k = 1; k <= M; ++k)
            for (int l1 = 0; l1 < M; ++l1) tot += r[(k - 1) * M + l1] = channel_rate(s, kernel, pert, 0.0, k, l1);
        if (tot <= 0.0) return s;
        t += rng.exponential(tot);
        if (t > T) return s;
        double u = rng.uniform() * tot;
        std::size_t i = 0;
        while (i + 1 < r.size() && u >= r[i]) u -= r[i++];
        const int k = static_cast<int>(i) / M + 1, l1 = static_cast<int>(i) % M;
        --s.n[k];
        ++s.n[k - 1];
        --s.n[l1];
        ++s.n[l1 + 1];
    }
}

}  // namespace

TEST_CASE("channel rates") {
    const auto K = KernelSpec::constant(1.0, 2);
    const auto s = MicroState::from_counts({2, 1, 1});
    const auto p = Perturbation::none();
    CHECK(s.L == 4);
    CHECK(s.N == 3);
    CHECK(channel_rate(s, K, p, 0.0, 1, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(channel_rate(s, K, p, 0.0, 1, 1) == 0.0);
    CHECK(channel_rate(s, K, p, 0.0, 2, 0) == doctest::Approx(2.0 / 3.0));
    CHECK(channel_rate(s, K, p, 0.0, 2, 1) == doctest::Approx(1.0 / 3.0));
    CHECK(channel_rate(s, K, p, 0.0, 1, 2) == 0.0);
    CHECK(channel_rate(s, K, Perturbation::constant(0.5), 0.0, 2, 1) == doctest::Approx(std::exp(0.5) / 3.0));
    CHECK_THROWS_AS(MicroState::from_counts({0, 0}), RangeError);
}

TEST_CASE("integer conservation and determinism") {
    const auto K = KernelSpec::product_power(0.5, 30);
    const auto p = Perturbation::oscillating(0.4, 3.0);
    const auto s0 = uniform_ones(200, 30);
    SimOptions opt;
    opt.check_invariants = true;
    opt.output_times = {0.0, 0.5, 1.0};
    const auto a = simulate(s0, K, p, 1.0, 11, 0, opt);
    const auto b = simulate(s0, K, p, 1.0, 11, 0, opt);
    const auto c = simulate(s0, K, p, 1.0, 11, 1, opt);
    a.final_state.check();
    CHECK(a.final_state.N == 200);
    CHECK(a.final_state.n == b.final_state.n);
    CHECK(a.accepted == b.accepted);
    CHECK(a.accepted != c.accepted);
    CHECK(a.traj.t.size() == 3);
    for (const auto& ci : a.traj.c) CHECK(ClusterDistribution(ci).mom1() == doctest::Approx(1.0).epsilon(1e-14));

    const auto e1 = run_ensemble(s0, K, p, 0.5, 5, 6, opt, 1);
    const auto e2 = run_ensemble(s0, K, p, 0.5, 5, 6, opt, 3);
    for (int r = 0; r < 6; ++r) CHECK(e1[r].final_state.n == e2[r].final_state.n);
}

TEST_CASE("total rate bound") {
    const auto K = KernelSpec::product_power(1.0, 40);
    const auto p = Perturbation::oscillating(0.3, 1.0);
    const auto rep = validate_assumptions(K, p);
    for (int cs = 0; cs < 20; ++cs) {
        StreamRng rng(17, cs);
        std::vector<long> n(41, 0);
        long N = 0;
        for (int i = 0; i < 60; ++i) {
            const int k = static_cast<int>(rng.uniform() * 6);
            ++n[k];
            N += k;
        }
        const auto s = MicroState::from_counts(n);
        const double bound = total_rate_bound(s, rep.c_k1, p.sup_norm());
        CHECK(total_rate(s, K, p, 0.37 * cs) >= 0.0);
        CHECK(total_rate(s, K, p, 0.37 * cs) <= bound * (1 + 1e-12));
    }
}

TEST_CASE("ensemble mean") {
    ClusterDistribution a({0.5, 0.5, 0.0}), b({0.5, 0.0, 0.5});
    const auto one = ensemble_mean({a});
    CHECK(one.mean.p() == a.p());
    const auto two = ensemble_mean({a, b});
    CHECK(two.mean[0] == doctest::Approx(0.5));
    CHECK(two.mean[1] == doctest::Approx(0.25));
    CHECK(two.mean[2] == doctest::Approx(0.25));
    CHECK(two.stderr_vec[0] == doctest::Approx(0.0));
    CHECK(two.stderr_vec[1] > 0.0);
}

TEST_CASE("empirical flux rate matches the integrated chain rate") {
    const auto K = KernelSpec::constant(1.0, 30);
    const auto p = Perturbation::none();
    const long L = 2000;
    const auto s0 = uniform_ones(L, 30);
    SimOptions opt;
    opt.record_events = true;
    for (int i = 0; i <= 200; ++i) opt.output_times.push_back(0.01 * i);
    const auto res = simulate(s0, K, p, 2.0, 3, 0, opt);

    JumpRecord none;
    none.M = 30;
    none.L = L;
    none.T = 1.0;
    none.counts.assign(900, 0);
    CHECK(empirical_flux_rate(none, 0.0, 1.0).total() == 0.0);

    const auto f = empirical_flux_rate(res.record, 0.0, 2.0);
    // trapezoid over recorded empirical measures of the mean-field flux with the finite-L correction
    double integ = 0.0;
    const auto rate_at = [&](std::size_t i) {
        std::vector<long> n(31);
        for (int k = 0; k <= 30; ++k) n[k] = std::lround(res.traj.c[i][k] * L);
        return total_rate(MicroState::from_counts(n), K, p, 0.0) / L;
    };
    for (std::size_t i = 1; i < res.traj.t.size(); ++i)
        integ += 0.5 * (res.traj.t[i] - res.traj.t[i - 1]) * (rate_at(i) + rate_at(i - 1));
    const double emp = f.total() * 2.0;
    CHECK(std::abs(emp - integ) / integ < 0.05);
}

TEST_CASE("long-run occupation matches the canonical Gibbs measure") {
    const int N = 4, L = 3;
    const auto K = KernelSpec::constant(1.0, N);
    const auto space = enumerate(N, L);
    const auto g = gibbs(space, weights(K));
    std::vector<long> n0(N + 1, 0);
    n0[1] = 2;
    n0[2] = 1;
    SimOptions opt;
    const double T = 4000.0;
    for (int i = 1; i <= 8000; ++i) opt.output_times.push_back(T * i / 8000);
    const auto res = simulate(MicroState::from_counts(n0), K, Perturbation::none(), T, 21, 0, opt);
    std::vector<double> freq(space.size(), 0.0);
    for (const auto& c : res.traj.c) {
        std::vector<int> n(N + 1);
        for (int k = 0; k <= N; ++k) n[k] = static_cast<int>(std::lround(c[k] * L));
        freq[space.index.at(n)] += 1.0 / res.traj.c.size();
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < freq.size(); ++i) tv += 0.5 * std::abs(freq[i] - g.pi[i]);
    CHECK(tv < 0.03);
}

TEST_CASE("thinning agrees in law with plain SSA") {
    const auto K = KernelSpec::product_power(0.5, 20);
    const auto p = Perturbation::constant(-0.7);
    const auto s0 = uniform_ones(20, 20);
    const int R = 600;
    double m1 = 0.0, v1 = 0.0, m2 = 0.0, v2 = 0.0;
    for (int r = 0; r < R; ++r) {
        const double a = simulate(s0, K, p, 1.5, 99, r).final_state.n[0];
        StreamRng rng(98, r);
        const double b = plain_ssa(s0, K, p, 1.5, rng).n[0];
        m1 += a;
        v1 += a * a;
        m2 += b;
        v2 += b * b;
    }
    m1 /= R;
    m2 /= R;
    v1 = v1 / R - m1 * m1;
    v2 = v2 / R - m2 * m2;
    CHECK(std::abs(m1 - m2) < 4.0 * std::sqrt((v1 + v2) / R));
}

TEST_CASE("manifest and config hash") {
    const auto K = KernelSpec::constant(1.0, 5);
    CHECK(kernel_config_hash(K, Perturbation::none()) == kernel_config_hash(K, Perturbation::none()));
    CHECK(kernel_config_hash(K, Perturbation::none()) != kernel_config_hash(K, Perturbation::constant(0.1)));
    const auto m = manifest_json(3, 10, 5, 1.0, K, Perturbation::none());
    CHECK(m.find("\"seed\"") != std::string::npos);
}
