#include <doctest.h>

#include <cmath>

#include "common.hpp"
#include "nonbloch/dynamics.hpp"
#include "nonbloch/error.hpp"
#include "nonbloch/lattice.hpp"
#include "nonbloch/propagator.hpp"
#include "nonbloch/saddle.hpp"

using namespace nonbloch;
using namespace testing;

TEST_SUITE("dynamics") {

TEST_CASE("one-way hopping: the edge only feels the loss") {
    // strictly upper triangular hopping plus -i kappa
    const double kappa = 0.3;
    const LaurentSymbol h({{1, 1.0}, {0, cplx(0.0, -kappa)}});
    const auto H = assemble(h, 30, Boundary::open);
    const auto tr = evolve(H, delta_state(30, 0), 0, 0.05, 200);
    for (std::size_t j = 0; j < tr.times.size(); ++j)
        CHECK(tr.log_amp_x0[j] == doctest::Approx(-kappa * tr.times[j]).epsilon(1e-9));
}

TEST_CASE("flat band: lambda = mu = -kappa") {
    LyapunovOptions o;
    o.cells = 40;
    o.lambda_curve = false;
    const auto r = analyze_lyapunov(LaurentSymbol::constant(cplx(0.0, -0.3)), o).report;
    CHECK(r.lambda_pred == doctest::Approx(-0.3));
    CHECK(r.mu_pred == doctest::Approx(-0.3).epsilon(1e-12));
    CHECK(r.lambda_fit.slope == doctest::Approx(-0.3).epsilon(1e-9));
    CHECK(r.mu_fit.slope == doctest::Approx(-0.3).epsilon(1e-9));
    CHECK(r.lambda_tot_fit.slope == doctest::Approx(-0.3).epsilon(1e-9));
}

TEST_CASE("Hermitian chain conserves the norm") {
    std::mt19937 rng(7);
    const auto H = assemble(random_hermitian(rng), 40, Boundary::open);
    const auto tr = evolve(H, delta_state(40, 3), 3, 0.1, 300);
    for (double n : tr.log_norm) CHECK(std::abs(n) < 1e-10);
}

TEST_CASE("spectral and Taylor backends agree") {
    const auto H = assemble(fig2a(), 12, Boundary::open);
    const auto spec = spectrum(H);
    const auto psi0 = delta_state(12, 0);
    const auto a = evolve(H, psi0, 0, 0.1, 100);
    const auto b = evolve_spectral(H, spec, psi0, 0, 0.1, 100);
    REQUIRE(a.times.size() == b.times.size());
    for (std::size_t j = 0; j < a.times.size(); ++j) {
        CHECK(std::abs(std::exp(a.log_amp_x0[j]) - std::exp(b.log_amp_x0[j])) < 1e-6);
        CHECK(std::abs(std::exp(a.log_norm[j]) - std::exp(b.log_norm[j])) < 1e-6);
    }
}

TEST_CASE("fit_log_series") {
    std::vector<double> t, y;
    for (int j = 1; j <= 200; ++j) {
        t.push_back(0.1 * j);
        y.push_back(-0.4 * t.back() - 1.5 * std::log(t.back()) + 0.7);
    }
    const auto f = fit_log_series(t, y, 2.0, 20.0, -1.5);
    CHECK(f.slope == doctest::Approx(-0.4).epsilon(1e-10));
    CHECK(f.intercept == doctest::Approx(0.7).epsilon(1e-8));
    CHECK_THROWS_WITH_AS(fit_log_series(t, y, 1.0, 1.5), "insufficient trace", ModuleError);
}

TEST_CASE("point P does not depend on the grid") {
    const auto a = find_P(fig2a(), 4096);
    const auto b = find_P(fig2a(), 16384);
    REQUIRE(a);
    REQUIRE(b);
    CHECK(std::abs(a->k - b->k) < 1e-6);
    CHECK(std::abs(a->P - b->P) < 1e-6);
    CHECK(a->v > 0.0);
}

TEST_CASE("lambda(v) slope is -Im k of the dominant saddle") {
    const LaurentSymbol h = fig4e();
    const double v = 0.3, dv = 1e-4;
    const double fd = (lambda_at(h, v + dv) - lambda_at(h, v - dv)) / (2.0 * dv);
    const auto c = classify(h, v, Contour::bz());
    CHECK(std::abs(fd - dlambda_dv_check(c.dominant().saddle)) < 1e-4);
}

TEST_CASE("fig2a: lambda peaks at the point P") {
    const LaurentSymbol h = fig2a();
    const auto P = find_P(h);
    REQUIRE(P);
    CHECK(std::abs(lambda_at(h, P->v) - P->P.imag()) < 1e-4);
    std::vector<double> grid;
    for (int j = 0; j <= 120; ++j) grid.push_back(3.0 * j / 120.0);
    const auto curve = lambda_of_v(h, grid);
    CHECK(curve.v_peak == doctest::Approx(P->v).epsilon(1e-3));
    CHECK(curve.lambda_peak == doctest::Approx(P->P.imag()).epsilon(1e-4));
}

TEST_CASE("cosine band velocities and crossover time") {
    const auto v = bulk_velocities(cosine());
    CHECK(v.v_plus == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(v.v_minus == doctest::Approx(-2.0).epsilon(1e-10));
    CHECK(crossover_theory(v, 51) == doctest::Approx(50.0).epsilon(1e-10));
}

TEST_CASE("peak sites follow the maxima") {
    EvolutionTrace tr;
    tr.log_profiles = {{0.0, -1.0, -2.0}, {-3.0, 1.0, 0.0}, {-1.0, -1.0, 5.0}};
    CHECK(peak_sites(tr) == std::vector<int>{0, 1, 2});
}

}  // TEST_SUITE

TEST_SUITE("dynamics") {

TEST_CASE("lambda fit converges with lattice size") {
    LyapunovOptions o;
    o.lambda_curve = false;
    double gap[2];
    int i = 0;
    for (int cells : {100, 200}) {
        o.cells = cells;
        const auto r = analyze_lyapunov(fig2a(), o).report;
        gap[i++] = std::abs(r.lambda_fit.slope - r.lambda_pred);
    }
    CHECK(gap[1] <= gap[0]);
}

}  // TEST_SUITE
