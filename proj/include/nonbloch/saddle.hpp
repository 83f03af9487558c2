#pragma once

#include <string>
#include <vector>

#include "nonbloch/symbol.hpp"

namespace nonbloch {

/// Stationary point of f(k) = E(k) − k·v on one energy branch.
struct SaddlePoint {
    Momentum k;
    cplx S{0.0, 0.0};       ///< E(k_s) − k_s·v
    cplx energy{0.0, 0.0};  ///< E(k_s)
    double v = 0.0;
    cplx h2{0.0, 0.0};      ///< d²E/dk² at k_s
    int band = 0;
    bool degenerate = false;
    int multiplicity = 1;
};

/// All p + q stationary points of h(k) − kv, sorted by descending Im(S)
/// (ties by ascending Re(S)); index 0 is "S_1".
std::vector<SaddlePoint> find_saddles(const LaurentSymbol& sym, double v = 0.0);

struct MultibandSaddleResult {
    std::vector<SaddlePoint> saddles;
    std::vector<std::string> warnings;
};

/// Branch saddles of a multiband symbol, i.e. solutions of
/// f(β, E) = 0 and ∂_k f + v ∂_E f = 0 with f = det[h(β) − E].
/// Decoupled diagonal blocks are handled separately; 1×1 blocks use the
/// single-band polynomial route. `seed` drives the order in which grid
/// seeds are visited.
MultibandSaddleResult find_saddles_multiband(const MultibandSymbol& sym, double v = 0.0,
                                             unsigned seed = 1);

/// Stationary points of the scalar Laurent polynomial Q(k) = det h(k)
/// (the "det-saddles"), as plain momenta.
std::vector<Momentum> det_saddle_momenta(const MultibandSymbol& sym);

/// dλ/dv at the dominant saddle, −Im(k_s).
double dlambda_dv_check(const SaddlePoint& s);

/// Degeneracy threshold applied to |h''(k_s)| relative to the symbol scale.
inline constexpr double degeneracy_threshold = 1e-8;

}  // namespace nonbloch
