#include <doctest.h>

#include <random>

#include "common.hpp"
#include "nonbloch/error.hpp"
#include "nonbloch/roots.hpp"
#include "nonbloch/lattice.hpp"
#include "nonbloch/saddle.hpp"
#include "nonbloch/thimble.hpp"

using namespace nonbloch;
using namespace testing;

TEST_SUITE("saddle") {

TEST_CASE("fig2 presets have four saddles") {
    for (const auto& h : {fig2a(), fig2b()}) {
        const auto s = find_saddles(h);
        CHECK(s.size() == 4);
        for (const auto& p : s) CHECK(std::abs(h.derivative()(p.k)) <= 1e-12 * h.scale());
    }
}

TEST_CASE("cosine band saddles at 0 and pi") {
    auto s = find_saddles(cosine());
    REQUIRE(s.size() == 2);
    std::sort(s.begin(), s.end(), [](const auto& a, const auto& b) { return a.k.re() < b.k.re(); });
    CHECK(std::abs(s[0].k.value()) < 1e-12);
    CHECK(std::abs(s[1].k.value() - cplx(std::numbers::pi, 0.0)) < 1e-12);
    CHECK(std::abs(s[0].S - 2.0) < 1e-12);
    CHECK(std::abs(s[1].S + 2.0) < 1e-12);
}

TEST_CASE("fig4e saddles at v = 0.7 match a multi-start Newton oracle") {
    // numpy Newton from a 20 x 20 seed grid on f'(k) = v.
    const std::vector<cplx> oracle_k = {{3.141592653589793, 1.0786029226687082},
                                        {1.354331257092314, 0.3995634987962988},
                                        {4.928854050087272, 0.3995634987962988},
                                        {3.141592653589793, -0.14312886487319962}};
    const std::vector<cplx> oracle_S = {{-2.199114857512855, -0.007366912891921484},
                                        {-3.9745626150873834, -0.4829130082735966},
                                        {-0.42366709993832696, -0.4829130082735966},
                                        {-2.199114857512855, -0.5728905544305986}};
    const LaurentSymbol h = fig4e();
    const auto s = find_saddles(h, 0.7);
    REQUIRE(s.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        bool found = false;
        for (const auto& p : s)
            if (std::abs(p.k.beta() - std::exp(I * oracle_k[i])) < 1e-9) {
                found = true;
                CHECK(std::abs(p.S - oracle_S[i]) < 1e-9);
                CHECK(std::abs(h.derivative()(p.k) - 0.7) <= 1e-10);
            }
        CHECK(found);
    }
}

TEST_CASE("unidirectional hopping is rejected") {
    CHECK_THROWS_WITH_AS(find_saddles(LaurentSymbol({{1, 1.0}, {2, 0.5}})), "saddle method inapplicable",
                         ModuleError);
    CHECK_THROWS_WITH_AS(find_saddles(LaurentSymbol({{-1, 1.0}, {0, 0.5}})), "saddle method inapplicable",
                         ModuleError);
}

TEST_CASE("root completeness") {
    std::mt19937 rng(21);
    for (int trial = 0; trial < 20; ++trial) {
        const LaurentSymbol h = random_symbol(rng);
        const auto poly = h.derivative().cleared_polynomial();
        auto roots = polynomial_roots(poly);
        // Rebuild the monic polynomial from its roots.
        std::vector<cplx> rebuilt = {1.0};
        for (auto r : roots) {
            std::vector<cplx> next(rebuilt.size() + 1, 0.0);
            for (std::size_t j = 0; j < rebuilt.size(); ++j) {
                next[j + 1] += rebuilt[j];
                next[j] -= r * rebuilt[j];
            }
            rebuilt = next;
        }
        const cplx lead = poly.back();
        REQUIRE(rebuilt.size() == poly.size());
        for (std::size_t j = 0; j < poly.size(); ++j) CHECK(std::abs(rebuilt[j] - poly[j] / lead) < 1e-8);
    }
}

TEST_CASE("saddle geometry on random symbols") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> kr(0.0, two_pi), ki(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const LaurentSymbol h = random_symbol(rng);
        const LaurentSymbol d = h.derivative();
        // Cauchy-Riemann: grad Re h = (Re h', -Im h'), grad Im h = (Im h', Re h').
        const cplx k(kr(rng), ki(rng));
        const cplx g = d(k);
        const double dot = g.real() * g.imag() + (-g.imag()) * g.real();
        CHECK(std::abs(dot) <= 1e-9 * std::max(1.0, std::norm(g)));
        // Numerical Hessian of Im h at each saddle: indefinite.
        for (const auto& s : find_saddles(h)) {
            if (s.degenerate) continue;
            const double e = 1e-4;
            auto im = [&](double a, double b) { return h(s.k.value() + cplx(a, b)).imag(); };
            const double hxx = (im(e, 0) - 2 * im(0, 0) + im(-e, 0)) / (e * e);
            const double hyy = (im(0, e) - 2 * im(0, 0) + im(0, -e)) / (e * e);
            const double hxy = (im(e, e) - im(e, -e) - im(-e, e) + im(-e, -e)) / (4 * e * e);
            CHECK(hxx * hyy - hxy * hxy < 0.0);
        }
    }
}

TEST_CASE("contributing saddles never exceed point O") {
    std::mt19937 rng(1234);
    int checked = 0;
    for (int trial = 0; trial < 50; ++trial) {
        const LaurentSymbol h = random_symbol(rng);
        ThimbleClassification c;
        try {
            c = classify(h, 0.0, Contour::bz());
        } catch (const ModuleError&) {
            continue;
        }
        if (c.non_generic) continue;
        const double im_o = point_O_limit(h).imag();
        for (const auto& s : c.saddles)
            if (s.n_sigma != 0) CHECK(s.saddle.S.imag() <= im_o + 1e-9);
        ++checked;
    }
    CHECK(checked >= 40);
}

TEST_CASE("dlambda/dv") {
    SaddlePoint s;
    s.k = Momentum(1.0, 0.0);
    CHECK(dlambda_dv_check(s) == 0.0);
}

TEST_CASE("multiband saddles") {
    SUBCASE("split model: branch saddles are those of A and B, shifted by -i kappa/2") {
        const auto r = find_saddles_multiband(preset("figS3b").symbol);
        const LaurentSymbol a({{1, 0.2}, {-1, 0.6}, {0, cplx(0.0, -1.0)}});
        const LaurentSymbol b({{1, cplx(0.2, 0.8)}, {-1, 0.3}, {0, cplx(0.0, -1.0)}});
        std::vector<SaddlePoint> expect = find_saddles(a);
        for (const auto& s : find_saddles(b)) expect.push_back(s);
        CHECK(r.saddles.size() == expect.size());
        for (const auto& e : expect) {
            double best = 1e300;
            for (const auto& s : r.saddles) best = std::min(best, std::abs(s.S - e.S));
            CHECK(best < 1e-8);
        }
        // Stationary points of det h are different objects.
        for (const auto& k : det_saddle_momenta(preset("figS3b").symbol)) {
            double best = 1e300;
            for (const auto& e : expect) best = std::min(best, std::abs(k.beta() - e.k.beta()));
            CHECK(best > 1e-3);
        }
    }
    SUBCASE("chiral model: branch saddles sit at the det saddles") {
        const MultibandSymbol h = preset("figS3a").symbol;
        const auto r = find_saddles_multiband(h);
        REQUIRE(!r.saddles.empty());
        const auto det = det_saddle_momenta(h);
        for (const auto& s : r.saddles) {
            double best = 1e300;
            for (const auto& k : det) best = std::min(best, std::abs(k.beta() - s.k.beta()));
            CHECK(best < 1e-6);
        }
    }
    SUBCASE("identical diagonal bands duplicate the single-band saddles") {
        MultibandSymbol h(2);
        h.entry(0, 0) = fig2a();
        h.entry(1, 1) = fig2a();
        const auto r = find_saddles_multiband(h);
        CHECK(r.saddles.size() == 2 * find_saddles(fig2a()).size());
    }
}

}  // TEST_SUITE
