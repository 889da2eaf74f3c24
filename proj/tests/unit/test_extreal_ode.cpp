#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "edg/errors.hpp"
#include "edg/extreal.hpp"
#include "edg/ode.hpp"

using namespace edg;

TEST_CASE("extended reals") {
    const ExtReal p = ExtReal::pos_inf(), n = ExtReal::neg_inf();
    CHECK((ExtReal(0.0) * p).value() == 0.0);
    CHECK((ExtReal(0.0) * n).value() == 0.0);
    CHECK((ExtReal(-2.0) * p).is_neg_inf());
    CHECK((p + ExtReal(3.0)).is_pos_inf());
    CHECK_THROWS_AS(p + n, RangeError);
    CHECK_THROWS_AS(p.value(), RangeError);
    CHECK(std::isinf(p.to_double()));
    CHECK(n < ExtReal(-1e300));
    CHECK(ExtReal(1e300) < p);
    CHECK(-p == n);
    CHECK((ExtReal(1.5) + ExtReal(2.0)).value() == 3.5);
}

TEST_CASE("dopri5 accuracy and stop times") {
    OdeRhs f = [](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy.assign(2, 0.0);
        dy[0] = y[1];
        dy[1] = -y[0];
    };
    OdeOptions opt;
    opt.rtol = opt.atol = 1e-12;
    opt.stops = {0.5, 1.0, 2.0};
    const auto r = dopri5(f, 0.0, 3.0, {1.0, 0.0}, opt);
    CHECK(r.t.front() == 0.0);
    CHECK(r.t.back() == 3.0);
    for (double s : opt.stops) CHECK(std::find(r.t.begin(), r.t.end(), s) != r.t.end());
    for (std::size_t i = 0; i < r.t.size(); ++i) CHECK(r.y[i][0] == doctest::Approx(std::cos(r.t[i])).epsilon(1e-9));
}

TEST_CASE("dopri5 local order") {
    // fixed step runs via h_max with loose tolerances: error ratio under halving close to 2^5
    OdeRhs f = [](double t, const std::vector<double>& y, std::vector<double>& dy) {
        dy.assign(1, -y[0] + std::sin(t));
    };
    const auto err = [&](double h) {
        OdeOptions o;
        o.rtol = o.atol = 1.0;
        o.h0 = h;
        o.h_max = h;
        const auto r = dopri5(f, 0.0, 1.0, {1.0}, o);
        const double exact = 1.5 * std::exp(-1.0) + 0.5 * (std::sin(1.0) - std::cos(1.0));
        return std::abs(r.y.back()[0] - exact);
    };
    const double ratio = err(0.1) / err(0.05);
    CHECK(ratio > 16.0);
}

TEST_CASE("stiffness guard") {
    OdeRhs f = [](double, const std::vector<double>& y, std::vector<double>& dy) {
        dy.assign(1, y[0] * y[0]);
    };
    CHECK_THROWS_AS(dopri5(f, 0.0, 2.0, {1.0}), StiffnessError);
}
