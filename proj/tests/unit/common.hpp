#pragma once

#include <random>

#include "nonbloch/presets.hpp"
#include "nonbloch/symbol.hpp"

namespace testing {

using nonbloch::cplx;
using nonbloch::LaurentSymbol;

inline LaurentSymbol fig2a() { return nonbloch::preset("fig2a").symbol.entry(0, 0); }
inline LaurentSymbol fig2b() { return nonbloch::preset("fig2b").symbol.entry(0, 0); }
inline LaurentSymbol fig4e() { return nonbloch::preset("fig4e").symbol.entry(0, 0); }
inline LaurentSymbol cosine() { return LaurentSymbol({{1, 1.0}, {-1, 1.0}}); }

/// Random p = q = 2 symbol with O(1) complex hoppings.
inline LaurentSymbol random_symbol(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::map<int, cplx> c;
    for (int n = -2; n <= 2; ++n) c[n] = cplx(u(rng), u(rng));
    c[2] += cplx(0.3, 0.0);
    c[-2] += cplx(0.3, 0.0);
    return LaurentSymbol(c);
}

/// Random Hermitian symbol (c_{-n} = conj c_n, real c_0).
inline LaurentSymbol random_hermitian(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const cplx c1(u(rng), u(rng)), c2(u(rng) + 0.3, u(rng));
    return LaurentSymbol({{1, c1}, {-1, std::conj(c1)}, {2, c2}, {-2, std::conj(c2)}, {0, u(rng)}});
}

}  // namespace testing
