#include <doctest.h>

#include <algorithm>
#include <random>

#include "common.hpp"
#include "nonbloch/error.hpp"
#include "nonbloch/healing.hpp"
#include "nonbloch/lattice.hpp"

using namespace nonbloch;
using namespace testing;

namespace {

std::vector<double> sorted_real(const std::vector<cplx>& v) {
    std::vector<double> r;
    for (auto z : v) r.push_back(z.real());
    std::sort(r.begin(), r.end());
    return r;
}

}  // namespace

TEST_SUITE("lattice") {

TEST_CASE("periodic cosine chain") {
    const SpectrumSet s = spectrum(assemble(cosine(), 6, Boundary::periodic));
    const auto e = sorted_real(s.energies());
    const std::vector<double> expect = {-2, -1, -1, 1, 1, 2};
    REQUIRE(e.size() == 6);
    for (int i = 0; i < 6; ++i) CHECK(e[i] == doctest::Approx(expect[i]).epsilon(1e-12));
}

TEST_CASE("periodic assembly reproduces eval on the discrete BZ") {
    std::mt19937 rng(3);
    for (int trial = 0; trial < 3; ++trial) {
        const LaurentSymbol h = random_symbol(rng);
        SpectrumOptions o;
        o.vectors = false;
        const auto e = spectrum(assemble(h, 40, Boundary::periodic), o).energies();
        for (int j = 0; j < 40; ++j) {
            const cplx target = h(two_pi * j / 40.0);
            double best = 1e300;
            for (auto z : e) best = std::min(best, std::abs(z - target));
            CHECK(best < 1e-9);
        }
    }
}

TEST_CASE("short lattices are rejected") {
    CHECK_THROWS_WITH_AS(assemble(fig2a(), 4, Boundary::open), "lattice shorter than hopping range", ModuleError);
}

TEST_CASE("point O of the fig2 presets") {
    SpectrumOptions o;
    o.vectors = false;
    // Independent dense eigensolve (numpy.linalg.eigvals, L = 140).
    CHECK(spectrum(assemble(fig2a(), 140, Boundary::open), o).point_O.imag() ==
          doctest::Approx(-0.04599798859948556).epsilon(1e-6));
    CHECK(spectrum(assemble(fig2b(), 140, Boundary::open), o).point_O.imag() ==
          doctest::Approx(-0.1573492345).epsilon(1e-5));
}

TEST_CASE("open spectrum collapses inside the periodic loop") {
    SpectrumOptions o;
    o.vectors = false;
    const LaurentSymbol h = fig2a();
    const auto s = spectrum(assemble(h, 140, Boundary::open), o);
    // Winding of the PBC loop around every OBC eigenvalue is nonzero.
    for (const auto& e : s.obc) CHECK(winding(h, e.energy) != 0);
}

TEST_CASE("eigen-triples: residuals, biorthogonality, completeness") {
    const auto h = assemble(fig2b(), 60, Boundary::open);
    const SpectrumSet s = spectrum(h);
    const int n = static_cast<int>(s.obc.size());
    REQUIRE(n == 60);
    Eigen::MatrixXcd L(n, n), R(n, n);
    const Eigen::MatrixXcd dense = h.dense();
    for (int i = 0; i < n; ++i) {
        L.col(i) = s.obc[i].left;
        R.col(i) = s.obc[i].right;
        CHECK((dense * R.col(i) - s.obc[i].energy * R.col(i)).norm() <= 1e-8 * h.norm());
    }
    const Eigen::MatrixXcd overlap = L.adjoint() * R;
    CHECK((overlap - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-7);
    CHECK((R * L.adjoint() - Eigen::MatrixXcd::Identity(n, n)).cwiseAbs().maxCoeff() < 1e-6);
    double top = -1e300;
    for (const auto& e : s.obc) top = std::max(top, e.energy.imag());
    CHECK(s.point_O.imag() == top);
}

TEST_CASE("Hermitian symbols: real spectrum, unit-circle GBZ") {
    std::mt19937 rng(5);
    const LaurentSymbol h = random_hermitian(rng);
    const SpectrumSet s = spectrum(assemble(h, 80, Boundary::open));
    for (const auto& e : s.obc) CHECK(std::abs(e.energy.imag()) < 1e-10);
    REQUIRE(!s.gbz.empty());
    for (auto b : s.gbz) CHECK(std::abs(std::abs(b) - 1.0) < 1e-6);
}

TEST_CASE("GBZ points solve h(beta) = E with matching middle moduli") {
    const LaurentSymbol h = fig2a();
    const SpectrumSet s = spectrum(assemble(h, 140, Boundary::open));
    REQUIRE(s.gbz.size() == 2 * s.obc.size());
    for (std::size_t i = 0; i < s.obc.size(); ++i) {
        const cplx b1 = s.gbz[2 * i], b2 = s.gbz[2 * i + 1];
        CHECK(std::abs(h.at_beta(b1) - s.obc[i].energy) < 1e-8);
        CHECK(std::abs(h.at_beta(b2) - s.obc[i].energy) < 1e-8);
        CHECK(std::abs(std::abs(b1) - std::abs(b2)) < 0.05);
    }
}

TEST_CASE("fig2a GBZ lies inside the unit circle, as the eigenvectors decay") {
    const SpectrumSet s = spectrum(assemble(fig2a(), 140, Boundary::open));
    double top = 0.0;
    for (auto b : s.gbz) top = std::max(top, std::abs(b));
    CHECK(top < 1.0);
    // Oracle: every right eigenvector decays away from x = 0 (slope of
    // ln|psi(x)| over the bulk).
    for (const auto& e : s.obc) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        int m = 0;
        for (int x = 10; x < 130; ++x) {
            const double y = std::log(std::abs(e.right[x]) + 1e-300);
            sx += x, sy += y, sxx += double(x) * x, sxy += x * y;
            ++m;
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        CHECK(slope < 0.0);
    }
}

TEST_CASE("fig4e GBZ is inside the unit circle") {
    const SpectrumSet s = spectrum(assemble(fig4e(), 140, Boundary::open));
    for (auto b : s.gbz) CHECK(std::abs(b) < 1.0);
}

TEST_CASE("unidirectional hopping has no GBZ") {
    const LaurentSymbol h({{1, 1.0}, {0, 0.2}});
    SpectrumSet s;
    s.obc.push_back({cplx(0.2, 0.0), {}, {}, false});
    CHECK_THROWS_WITH_AS(gbz_from_obc(h, s), "GBZ degenerate: unidirectional hopping", ModuleError);
}

TEST_CASE("pbc curve") {
    const auto single = pbc_curve(MultibandSymbol(fig2a()), 64);
    REQUIRE(single.size() == 64);
    for (const auto& p : single) CHECK(std::abs(p.energies[0] - fig2a()(p.k)) < 1e-13);

    const LaurentSymbol a({{1, 0.2}, {-1, 0.6}});
    const LaurentSymbol b({{1, cplx(0.2, 0.8)}, {-1, 0.3}});
    const auto two = pbc_curve(preset("figS3b").symbol, 128);
    for (const auto& p : two) {
        const cplx ea = a(p.k) - cplx(0.0, 1.0), eb = b(p.k) - cplx(0.0, 1.0);
        for (auto e : p.energies) CHECK(std::min(std::abs(e - ea), std::abs(e - eb)) < 1e-10);
    }
}

}  // TEST_SUITE

TEST_SUITE("lattice") {

TEST_CASE("L -> infinity point O bounds the finite lattices") {
    for (const auto& h : {fig2a(), fig4e()}) {
        const double lim = point_O_limit(h).imag();
        SpectrumOptions o;
        o.vectors = false;
        const double o60 = spectrum(assemble(h, 60, Boundary::open), o).point_O.imag();
        const double o140 = spectrum(assemble(h, 140, Boundary::open), o).point_O.imag();
        CHECK(o60 < o140);
        CHECK(o140 < lim);
        CHECK(lim - o140 < 5e-3);
    }
    CHECK_THROWS_WITH_AS(point_O_limit(LaurentSymbol({{1, 1.0}, {0, 0.2}})),
                         "GBZ degenerate: unidirectional hopping", ModuleError);
}

}  // TEST_SUITE
