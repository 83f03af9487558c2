#include <doctest.h>

#include <random>

#include "common.hpp"

using namespace nonbloch;
using namespace testing;

TEST_SUITE("symbol") {

TEST_CASE("eval at k = 0 sums the coefficients") {
    CHECK(std::abs(fig2b()(0.0) - cplx(0.0, 0.4)) < 1e-14);
}

TEST_CASE("cosine band vanishes at pi/2") {
    CHECK(std::abs(cosine()(std::numbers::pi / 2)) < 1e-15);
}

TEST_CASE("eval matches a 30-digit term-by-term sum") {
    // mpmath, 30 digits, h(1.3 + 0.2i) for the fig2a hoppings.
    const cplx oracle(-1.9706786950345997, -0.61352041306293952);
    CHECK(std::abs(fig2a()(cplx(1.3, 0.2)) - oracle) < 1e-13);
}

TEST_CASE("derivative coefficients") {
    const LaurentSymbol d = cosine().derivative();
    CHECK(d.coeff(1) == cplx(0.0, 1.0));
    CHECK(d.coeff(-1) == cplx(0.0, -1.0));
    CHECK(d.coeff(0) == cplx(0.0, 0.0));
    CHECK(LaurentSymbol::constant(cplx(0.0, -0.35)).derivative().is_zero());
}

TEST_CASE("derivative matches central differences") {
    const LaurentSymbol h = fig2a();
    const LaurentSymbol d = h.derivative();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> kr(0.0, two_pi), ki(-1.0, 1.0);
    const double step = 1e-5;
    for (int i = 0; i < 100; ++i) {
        const cplx k(kr(rng), ki(rng));
        const cplx fd = (h(k + step) - h(k - step)) / (2.0 * step);
        CHECK(std::abs(d(k) - fd) <= 1e-7 * std::max(1.0, std::abs(d(k))));
    }
}

TEST_CASE("degree range and exact algebra") {
    const LaurentSymbol h = fig2a();
    CHECK(h.max_power() == 2);
    CHECK(h.min_power() == -2);
    const LaurentSymbol d = h.derivative();
    CHECK(d.max_power() == 2);
    CHECK(d.min_power() == -2);
    CHECK(d.coeff(0) == cplx(0.0, 0.0));
    const LaurentSymbol sq = h * h;
    const cplx k(0.4, -0.3);
    CHECK(std::abs(sq(k) - h(k) * h(k)) < 1e-12);
}

TEST_CASE("Hermitian symbols are real on the real axis") {
    std::mt19937 rng(11);
    for (int s = 0; s < 10; ++s) {
        const LaurentSymbol h = random_hermitian(rng);
        for (int j = 0; j < 16; ++j) CHECK(std::abs(h(two_pi * j / 16.0).imag()) < 1e-13);
    }
}

TEST_CASE("momentum is wrapped to [0, 2pi)") {
    CHECK(Momentum(cplx(-0.5, 1.0)).re() == doctest::Approx(two_pi - 0.5));
    CHECK(Momentum(cplx(7.0, 0.0)).re() == doctest::Approx(7.0 - two_pi));
    CHECK(wrap_momentum(two_pi) == 0.0);
}

TEST_CASE("char_poly of a single band is h - E") {
    const LaurentSymbol f = char_poly(MultibandSymbol(fig2a()), cplx(0.3, -0.2));
    const cplx beta = std::polar(0.9, 0.7);
    CHECK(std::abs(f.at_beta(beta) - (fig2a().at_beta(beta) - cplx(0.3, -0.2))) < 1e-13);
}

TEST_CASE("char_poly of the split model factors into its two branches") {
    const MultibandSymbol h = preset("figS3b").symbol;
    const LaurentSymbol a({{1, 0.2}, {-1, 0.6}});
    const LaurentSymbol b({{1, cplx(0.2, 0.8)}, {-1, 0.3}});
    for (double k : {0.0, 0.9, 2.2, 4.0}) {
        const cplx ea = a(k) - cplx(0.0, 1.0), eb = b(k) - cplx(0.0, 1.0);  // kappa/2 = 1
        CHECK(std::abs(char_poly(h, ea)(k)) < 1e-12);
        CHECK(std::abs(char_poly(h, eb)(k)) < 1e-12);
    }
}

TEST_CASE("chiral model eigenvalues match a dense 2x2 solve") {
    const MultibandSymbol h = preset("figS3a").symbol;
    for (double k : {0.1, 1.4, 3.0, 5.5}) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(h(k));
        const Eigen::MatrixXcd m = h(k);
        // ±√(R+ R−) − iκ with R± the off-diagonal entries.
        const cplx root = std::sqrt(m(0, 1) * m(1, 0));
        const cplx shift = m(0, 0);
        for (int i = 0; i < 2; ++i) {
            const cplx e = es.eigenvalues()[i];
            CHECK(std::min(std::abs(e - (shift + root)), std::abs(e - (shift - root))) < 1e-12);
            CHECK(std::abs(char_poly(h, e)(k)) < 1e-12);
        }
    }
}

}  // TEST_SUITE
