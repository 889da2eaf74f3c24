#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "json.hpp"

#include "../gen.hpp"
#include "edg/errors.hpp"
#include "edg/finite_gibbs.hpp"

using namespace edg;

namespace {

double log_multinomial(const std::vector<int>& n, int L) {
    double r = std::lgamma(L + 1.0);
    for (int x : n) r -= std::lgamma(x + 1.0);
    return r;
}

std::vector<double> oracle_pi(const StateSpace& sp, const std::vector<double>& w) {
    std::vector<double> p(sp.size());
    double s = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i) {
        double lp = log_multinomial(sp.states[i], sp.L);
        for (std::size_t k = 0; k < sp.states[i].size(); ++k) lp += sp.states[i][k] * std::log(w[k]);
        s += p[i] = std::exp(lp);
    }
    for (double& x : p) x /= s;
    return p;
}

std::vector<double> tilted_start(const StateSpace& sp) {
    std::vector<double> C(sp.size());
    double s = 0.0;
    for (std::size_t i = 0; i < C.size(); ++i) s += C[i] = 1.0 + 0.8 * std::cos(1.3 * i);
    for (double& x : C) x /= s;
    return C;
}

}  // namespace

TEST_CASE("enumeration") {
    const auto sp = enumerate(4, 3);
    CHECK(sp.size() == 4);
    CHECK(count_states(4, 3) == 4.0);
    CHECK(enumerate(1, 5).size() == 1);
    CHECK(count_states(10, 10) == 42.0);
    CHECK_THROWS_AS(enumerate(60, 60, 1e3), SizeError);
    for (std::size_t i = 0; i < sp.size(); ++i) {
        int L = 0, N = 0;
        for (std::size_t k = 0; k < sp.states[i].size(); ++k) {
            L += sp.states[i][k];
            N += static_cast<int>(k) * sp.states[i][k];
        }
        CHECK(L == 3);
        CHECK(N == 4);
        CHECK(sp.index.at(sp.states[i]) == static_cast<int>(i));
    }
    for (std::size_t e = 0; e < sp.edges.size(); ++e) {
        CHECK(sp.reverse[sp.reverse[e]] == static_cast<int>(e));
        CHECK(sp.edges[sp.reverse[e]].from == sp.edges[e].to);
        CHECK(sp.edges[e].k != sp.edges[e].l1 + 1);
    }
}

TEST_CASE("Gibbs measure against the multinomial oracle") {
    const auto sp = enumerate(4, 3);
    const std::vector<double> ones(5, 1.0);
    const auto g = gibbs(sp, WeightTable::from_values(ones, 1.0));
    // multinomial counts 3, 6, 3, 3 over 15 arrangements
    std::vector<double> sorted = g.pi;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted[0] == doctest::Approx(3.0 / 15));
    CHECK(sorted[3] == doctest::Approx(6.0 / 15));

    for (int cs = 0; cs < 20; ++cs) {
        gen::Gen gg(41, cs);
        const int N = gg.integer(2, 9), L = gg.integer(2, 6);
        const auto space = enumerate(N, L);
        std::vector<double> w(N + 1);
        for (double& x : w) x = gg.uniform(0.2, 3.0);
        const auto gm = gibbs(space, WeightTable::from_values(w, 1.0));
        const auto o = oracle_pi(space, w);
        double s = 0.0;
        for (std::size_t i = 0; i < o.size(); ++i) {
            CHECK(gm.pi[i] == doctest::Approx(o[i]).epsilon(1e-12));
            s += gm.pi[i];
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-14));
        const double gam = gg.uniform(0.5, 2.0), lam = gg.uniform(-1.0, 1.0);
        std::vector<double> w2(w);
        for (std::size_t k = 0; k < w2.size(); ++k) w2[k] *= gam * std::exp(lam * k);
        const auto g2 = gibbs(space, WeightTable::from_values(w2, 1.0));
        for (std::size_t i = 0; i < o.size(); ++i) CHECK(g2.pi[i] == doctest::Approx(gm.pi[i]).epsilon(1e-11));
    }
    std::vector<double> wz(5, 1.0);
    wz[4] = 0.0;
    CHECK_THROWS_AS(gibbs(sp, WeightTable::from_values(wz, 1.0)), SupportError);
}

TEST_CASE("lifted detailed balance") {
    const int N = 8, L = 5;
    const auto sp = enumerate(N, L);
    for (const auto& K : {KernelSpec::constant(1.3, N), KernelSpec::product_power(0.5, N),
                          KernelSpec::weight_driven_power(1.5, N)}) {
        const auto g = gibbs(sp, weights(K));
        CHECK(lifted_dbc_check(sp, g, K, Perturbation::none()).max_residual <= 1e-12);
        const auto gc = generator_checks(sp, g, K, Perturbation::none());
        CHECK(gc.max_column_sum <= 1e-12);
        CHECK(gc.max_dbc_residual <= 1e-12);
        CHECK(lifted_dbc_check(sp, g, K, Perturbation::oscillating(0.3, 1.0), 0.7).max_residual > 1e-3);
    }
}

TEST_CASE("forward Kolmogorov equation") {
    const int N = 7, L = 4;
    const auto sp = enumerate(N, L);
    const auto K = KernelSpec::product_power(0.5, N);
    const auto g = gibbs(sp, weights(K));
    const auto tr = solve_fke(sp, K, Perturbation::none(), tilted_start(sp), 40.0);
    for (const auto& C : tr.C) {
        double s = 0.0;
        for (double x : C) {
            s += x;
            CHECK(x >= -1e-12);
        }
        CHECK(s == doctest::Approx(1.0).epsilon(1e-10));
    }
    double tv = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i) tv += 0.5 * std::abs(tr.C.back()[i] - g.pi[i]);
    CHECK(tv <= 1e-6);

    const auto st = solve_fke(sp, K, Perturbation::none(), g.pi, 2.0);
    for (std::size_t i = 0; i < sp.size(); ++i) CHECK(st.C.back()[i] == doctest::Approx(g.pi[i]).epsilon(1e-9));
    CHECK_THROWS(solve_fke(sp, K, Perturbation::none(), std::vector<double>(sp.size(), 1.0), 1.0));
}

TEST_CASE("finite EDF") {
    const int N = 7, L = 4;
    const auto sp = enumerate(N, L);
    const auto K = KernelSpec::product_power(0.5, N);
    const auto wt = weights(K);
    const auto g = gibbs(sp, wt);
    for (const auto& pert : {Perturbation::none(), Perturbation::oscillating(0.3, 2.0)}) {
        const auto tr = solve_fke(sp, K, pert, tilted_start(sp), 2.0);
        const auto rep = finite_edf(sp, g, wt, K, pert, tr);
        CHECK(std::abs(rep.total.value()) <= 10.0 * rep.quad_error);
        CHECK(rep.chain_rule_residual <= 10.0 * rep.quad_error);
        CHECK(rep.nu_total_max > 0.0);
        const double c_k1 = validate_assumptions(K, pert).c_k1;
        const double rho = static_cast<double>(N) / L;
        const double nu_bound = 2.0 * c_k1 * std::exp(pert.sup_norm()) * rho * (rho + 1.0) * L / (L - 1.0);
        CHECK(rep.nu_total_max <= nu_bound);
        CHECK(rep.nu_dagger_total_max <= nu_bound);
        CHECK(nlohmann::json::parse(rep.to_json()).contains("total"));

        auto doubled = tr;
        for (auto& J : doubled.J)
            for (double& x : J) x *= 2.0;
        const auto r2 = finite_edf(sp, g, wt, K, pert, doubled);
        CHECK(r2.total.value() > 10.0 * r2.quad_error);
    }
    const auto st = solve_fke(sp, K, Perturbation::none(), g.pi, 1.0);
    const auto rs = finite_edf(sp, g, wt, K, Perturbation::none(), st);
    CHECK(rs.max_abs_term <= 1e-9);
}

TEST_CASE("counting inequality and entropy decomposition") {
    CHECK(counting_defect({0, 5}, 5) == doctest::Approx(0.0).scale(1.0));
    CHECK(counting_defect({3}, 3) == doctest::Approx(0.0).scale(1.0));
    for (const auto& [N, L] : std::vector<std::pair<int, int>>{{6, 4}, {12, 8}, {20, 10}}) {
        const auto sp = enumerate(N, L);
        const auto cr = counting_inequality(sp);
        CHECK(cr.max_ratio <= 1.0);
        CHECK(cr.rhs == doctest::Approx((std::sqrt(2.0 * N) + 1.0) * (1.0 + std::log(L))));
        const auto K = KernelSpec::product_power(0.5, N);
        const auto wt = weights(K);
        const auto g = gibbs(sp, wt);
        const auto dr = entropy_decomposition_check(sp, g, wt, tilted_start(sp));
        CHECK(dr.residual <= dr.bound);
    }
}

TEST_CASE("gamma table identity") {
    const int M = 60;
    const auto w = weights(KernelSpec::product_power(0.5, M));
    const auto rows = gamma_table(w, w, 1.0, {{6, 6}, {10, 10}});
    for (const auto& r : rows) {
        CHECK(r.value == doctest::Approx(0.0).scale(1.0));
        CHECK(r.limit == doctest::Approx(0.0).scale(1.0));
    }
    std::ostringstream os;
    write_gamma_csv(os, rows);
    CHECK(os.str().rfind("N,L,value,limit,gap,A_NL,minus_inf_Jbar\n", 0) == 0);
    CHECK_THROWS_AS(gamma_table(w, w, 1.0, {{80, 80}}, 1e4), SizeError);
}

TEST_CASE("recovery sequence") {
    const auto lattice = MicroState::from_counts({1, 2, 0, 1});
    const auto p = recovery_project(lattice.empirical(), 5, 4);
    CHECK(p.distance == 0.0);
    CHECK(p.state.n == std::vector<long>{1, 2, 0, 1, 0, 0});

    const auto wt = weights(KernelSpec::product_power(0.5, 200));
    const auto om = equilibrium(wt, 1.0).omega;
    const double d_first = recovery_project(om, 4, 4).distance;
    const double d_last = recovery_project(om, 32, 32).distance;
    CHECK(d_last < 0.5 * d_first);
    for (int L : {2000, 20000}) {
        const auto pc = recovery_construct(om, L, L, 0.05);
        CHECK(pc.distance <= pc.bound);
        CHECK(pc.state.N == L);
        CHECK(pc.state.L == L);
    }
    CHECK_THROWS_AS(recovery_construct(om, 3, 2, 0.01), InfeasibleError);
}

TEST_CASE("canonical sampler against Pi") {
    const int N = 6, L = 4;
    const auto sp = enumerate(N, L);
    const auto wt = weights(KernelSpec::product_power(0.5, 50));
    const auto g = gibbs(sp, wt);
    StreamRng rng(5, 0);
    const int R = 40000;
    std::vector<double> f(sp.size(), 0.0);
    for (int r = 0; r < R; ++r) {
        const auto s = sample_canonical(wt, N, L, rng);
        std::vector<int> n(s.n.begin(), s.n.end());
        n.resize(N + 1);
        f[sp.index.at(n)] += 1.0 / R;
    }
    double chi2 = 0.0;
    for (std::size_t i = 0; i < sp.size(); ++i) chi2 += R * (f[i] - g.pi[i]) * (f[i] - g.pi[i]) / g.pi[i];
    const double dof = sp.size() - 1.0;
    CHECK(chi2 < dof + 5.0 * std::sqrt(2.0 * dof));
}

TEST_CASE("state space csv") {
    const auto sp = enumerate(4, 3);
    const auto g = gibbs(sp, WeightTable::from_values(std::vector<double>(5, 1.0), 1.0));
    std::ostringstream os;
    write_state_space_csv(os, sp, g);
    CHECK(os.str().rfind("index,n_0,n_1,n_2,n_3,n_4,pi\n", 0) == 0);
}
