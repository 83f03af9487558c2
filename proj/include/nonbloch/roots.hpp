#pragma once

#include <span>
#include <vector>

#include "nonbloch/symbol.hpp"

namespace nonbloch {

/// All roots of Σ a_j z^j (ascending coefficients) counted with multiplicity.
/// Leading zeros are trimmed; trailing zeros produce exact roots at z = 0.
/// Roots come from the companion-matrix eigenvalues and are polished by a
/// few Newton steps on the original polynomial.
std::vector<cplx> polynomial_roots(std::span<const cplx> ascending);

/// p(z) and p'(z) by Horner's rule.
std::pair<cplx, cplx> horner(std::span<const cplx> ascending, cplx z);

/// Roots of h(β) = E for a single-band symbol, sorted by ascending modulus.
/// β = 0 never appears (the β^q clearing factor is divided out exactly).
std::vector<cplx> symbol_roots(const LaurentSymbol& sym, cplx energy);

}  // namespace nonbloch
