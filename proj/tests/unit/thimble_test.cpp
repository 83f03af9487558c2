#include <doctest.h>

#include "common.hpp"
#include "nonbloch/error.hpp"
#include "nonbloch/lattice.hpp"
#include "nonbloch/saddle.hpp"
#include "nonbloch/thimble.hpp"

using namespace nonbloch;
using namespace testing;

namespace {

Contour gbz_of(const LaurentSymbol& h) {
    SpectrumOptions o;
    o.vectors = false;
    return Contour::gbz(spectrum(assemble(h, 140, Boundary::open), o).gbz);
}

JoinedCurve synthetic(double offset, double amplitude) {
    JoinedCurve c;
    for (int i = 0; i <= 3999; ++i) {
        const double s = 0.1 + (two_pi - 0.2) * i / 3999.0;
        c.s.push_back(s);
        c.k.push_back(cplx(s, offset + amplitude * std::sin(3.0 * s)));
        c.tangent.push_back(cplx(1.0, 3.0 * amplitude * std::cos(3.0 * s)) /
                            std::abs(cplx(1.0, 3.0 * amplitude * std::cos(3.0 * s))));
    }
    return c;
}

}  // namespace

TEST_SUITE("thimble") {

TEST_CASE("fig2b: every saddle contributes and S1 dominates") {
    const auto c = classify(fig2b(), 0.0, Contour::bz());
    REQUIRE(c.saddles.size() == 4);
    CHECK(c.dominant_index == 0);
    CHECK(c.saddles[0].crossings.size() == 1);
    for (const auto& s : c.saddles) CHECK(s.n_sigma == 1);
    CHECK(!c.non_generic);
}

TEST_CASE("fig4e: A1 has no net crossing") {
    const auto c = classify(fig4e(), 0.0, Contour::bz());
    REQUIRE(c.saddles.size() == 4);
    CHECK(c.saddles[0].n_sigma == 0);
    CHECK((c.dominant_index == 1 || c.dominant_index == 2));
    CHECK(c.saddles[1].saddle.S.imag() == doctest::Approx(c.saddles[2].saddle.S.imag()).epsilon(1e-10));
}

TEST_CASE("fig2a dominant saddle") {
    const auto c = classify(fig2a(), 0.0, Contour::bz());
    CHECK(c.dominant().saddle.S.imag() == doctest::Approx(-0.647265).epsilon(1e-5));
}

TEST_CASE("BZ and GBZ give the same classification") {
    for (const auto& h : {fig2a(), fig2b(), fig4e()}) {
        const auto bz = classify(h, 0.0, Contour::bz());
        const auto gbz = classify(h, 0.0, gbz_of(h));
        REQUIRE(bz.saddles.size() == gbz.saddles.size());
        for (std::size_t i = 0; i < bz.saddles.size(); ++i) CHECK(bz.saddles[i].n_sigma == gbz.saddles[i].n_sigma);
        CHECK(bz.dominant_index == gbz.dominant_index);
    }
}

TEST_CASE("n_sigma is insensitive to the seed offset") {
    for (const auto& h : {fig2a(), fig2b()}) {
        FlowOptions o;
        o.seed_offset = 2e-5;
        const auto a = classify(h, 0.0, Contour::bz());
        const auto b = classify(h, 0.0, Contour::bz(), o);
        for (std::size_t i = 0; i < a.saddles.size(); ++i) CHECK(a.saddles[i].n_sigma == b.saddles[i].n_sigma);
    }
}

TEST_CASE("thimble decomposition reproduces the BZ integral") {
    for (const auto& h : {fig2a(), fig2b()}) {
        const auto c = classify(h, 0.0, Contour::bz());
        const Contour gbz = gbz_of(h);
        for (double t : {1.0, 2.0, 5.0}) {
            const cplx bz = bz_propagator(h, t);
            CHECK(std::abs(thimble_propagator(h, c, t) - bz) <= 1e-6 * std::abs(bz));
            const cplx g = gbz.integrate([&](cplx k) { return std::exp(-I * h(k) * t); }) / two_pi;
            CHECK(std::abs(g - bz) <= 1e-8 * std::abs(bz));
        }
    }
}

TEST_CASE("ascent flows are monotone with constant Re h") {
    const LaurentSymbol h = fig2b();
    for (const auto& s : find_saddles(h)) {
        const auto f = trace_flows(s, h, 0.0);
        for (const FlowPath* p : {&f.ascent_minus, &f.ascent_plus}) {
            REQUIRE(p->k.size() > 10);
            for (std::size_t j = 1; j < p->k.size(); ++j) {
                CHECK(h(p->k[j]).imag() >= h(p->k[j - 1]).imag() - 1e-9);
                const double re0 = s.S.real();
                if (std::abs(h(p->k[j]).imag() - s.S.imag()) < 20.0)
                    CHECK(std::abs(h(p->k[j]).real() - re0) <= 1e-6 * std::max(1.0, std::abs(s.S)));
            }
        }
    }
}

TEST_CASE("cosine band: ascent leaves at 45 degrees") {
    // real h'' at a real saddle, so Im f grows fastest along the diagonals
    for (const auto& s : find_saddles(cosine())) {
        const auto f = trace_flows(s, cosine(), 0.0);
        CHECK(std::abs(std::cos(2.0 * f.ascent_angle)) < 1e-9);
    }
}

TEST_CASE("degenerate saddle is refused") {
    // beta^3 h'(beta) has a double root at beta = 1.
    const LaurentSymbol h({{2, 1.0}, {-1, 8.0}, {-2, -3.0}});
    const auto saddles = find_saddles(h);
    bool seen = false;
    for (const auto& s : saddles)
        if (s.degenerate) {
            seen = true;
            CHECK_THROWS_WITH_AS(trace_flows(s, h, 0.0), "Morse assumption violated", ModuleError);
        }
    CHECK(seen);
}

TEST_CASE("intersections of a synthetic path") {
    const auto x = count_intersections(synthetic(0.0, 0.5), Contour::bz());
    // Im k = 0.5 sin 3s vanishes at s = j pi / 3, j = 1..5.
    REQUIRE(x.size() == 5);
    for (int j = 0; j < 5; ++j) {
        CHECK(std::abs(x[j].point.real() - (j + 1) * std::numbers::pi / 3.0) < 1e-8);
        CHECK(x[j].sign == (j % 2 == 0 ? 1 : -1) * x[0].sign);
    }
    CHECK(count_intersections(synthetic(1.0, 0.5), Contour::bz()).empty());
}

}  // TEST_SUITE
