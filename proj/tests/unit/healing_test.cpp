#include <doctest.h>

#include "common.hpp"
#include "nonbloch/error.hpp"
#include "nonbloch/healing.hpp"
#include "nonbloch/roots.hpp"

using namespace nonbloch;
using namespace testing;

namespace {

LaurentSymbol fig6a() { return preset("fig6a").symbol.entry(0, 0); }

// roots of beta^q (h - E) inside the unit circle, minus the q-fold pole
int winding_by_roots(const LaurentSymbol& h, cplx e) {
    const auto poly = h.cleared_polynomial(e);
    int inside = 0;
    for (cplx r : polynomial_roots(poly))
        if (std::abs(r) < 1.0) ++inside;
    return inside - h.q();
}

HealingOptions quick() {
    HealingOptions o;
    o.cells = 200;
    o.t_end = 20.0;
    return o;
}

}  // namespace

TEST_SUITE("healing") {

TEST_CASE("winding numbers") {
    CHECK(winding(fig6a(), cplx(-1.0, 0.05)) == 1);
    CHECK(winding(fig6a(), cplx(100.0, 0.0)) == 0);
    CHECK(winding(fig6a(), cplx(0.0, 100.0)) == 0);
}

TEST_CASE("winding agrees with the root count") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    const LaurentSymbol h = fig6a();
    int done = 0;
    for (int j = 0; j < 64; ++j) {
        const cplx e(u(rng), u(rng));
        try {
            CHECK(winding(h, e) == winding_by_roots(h, e));
            ++done;
        } catch (const ModuleError&) {
        }
    }
    CHECK(done >= 60);
}

TEST_CASE("E0 on the PBC curve is refused") {
    const LaurentSymbol h = fig6a();
    CHECK_THROWS_WITH_AS(winding(h, h(cplx(0.7, 0.0))), "E0 on PBC spectrum", ModuleError);
}

TEST_CASE("SIBC state solves the bulk equation") {
    const auto s = build_sibc(fig6a(), cplx(-1.0, 0.05), 200);
    CHECK(s.residual < 1e-8);
    CHECK(s.psi0.norm() == doctest::Approx(1.0).epsilon(1e-12));
    for (cplx b : s.betas) CHECK(std::abs(b) < 1.0);
}

TEST_CASE("no pulse, no deviation") {
    auto o = quick();
    o.gamma = 0.0;
    const auto r = run_healing(fig6a(), cplx(-1.0, 0.05), o);
    for (double e : r.epsilon) CHECK(e == 0.0);
}

TEST_CASE("state is stationary before the pulse") {
    const auto r = run_healing(fig6a(), cplx(-1.0, 0.05), quick());
    bool after = false;
    for (std::size_t j = 0; j < r.times.size(); ++j) {
        if (r.times[j] < 2.0) CHECK(r.epsilon[j] <= 1e-6);
        if (r.times[j] > 4.0 && r.epsilon[j] > 1e-6) after = true;
    }
    CHECK(after);
}

TEST_CASE("threshold of fig6a") {
    const auto th = healing_threshold(fig6a());
    CHECK(std::abs(th.lambda_tot) < 1e-6);
}

}  // TEST_SUITE
