#include "nonbloch/roots.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace nonbloch {

std::pair<cplx, cplx> horner(std::span<const cplx> ascending, cplx z) {
    cplx p = 0.0;
    cplx dp = 0.0;
    for (auto it = ascending.rbegin(); it != ascending.rend(); ++it) {
        dp = dp * z + p;
        p = p * z + *it;
    }
    return {p, dp};
}

std::vector<cplx> polynomial_roots(std::span<const cplx> ascending) {
    std::size_t hi = ascending.size();
    while (hi > 0 && ascending[hi - 1] == cplx(0.0)) --hi;
    if (hi == 0) throw std::invalid_argument("polynomial_roots: zero polynomial");
    std::size_t lo = 0;
    while (ascending[lo] == cplx(0.0)) ++lo;

    std::vector<cplx> roots(lo, cplx(0.0));
    const std::span<const cplx> core = ascending.subspan(lo, hi - lo);
    const auto degree = static_cast<Eigen::Index>(core.size() - 1);
    if (degree == 0) return roots;

    // Companion matrix of the monic polynomial.
    const cplx lead = core.back();
    Eigen::MatrixXcd companion = Eigen::MatrixXcd::Zero(degree, degree);
    for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < degree; ++i)
        companion(i, degree - 1) = -core[static_cast<std::size_t>(i)] / lead;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(companion, false);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("polynomial_roots: companion eigensolver failed");

    for (Eigen::Index i = 0; i < degree; ++i) {
        cplx z = solver.eigenvalues()(i);
        for (int iter = 0; iter < 4; ++iter) {
            const auto [p, dp] = horner(core, z);
            if (dp == cplx(0.0)) break;
            const cplx step = p / dp;
            const cplx next = z - step;
            // Keep the polish only when it does not increase the residual
            // (clustered roots make Newton unreliable).
            if (std::abs(horner(core, next).first) > std::abs(p)) break;
            z = next;
            if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(z))) break;
        }
        roots.push_back(z);
    }
    return roots;
}

std::vector<cplx> symbol_roots(const LaurentSymbol& sym, cplx energy) {
    auto poly = sym.cleared_polynomial(energy);
    auto roots = polynomial_roots(poly);
    std::erase_if(roots, [](cplx z) { return z == cplx(0.0); });
    std::sort(roots.begin(), roots.end(),
              [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    return roots;
}

}  // namespace nonbloch
