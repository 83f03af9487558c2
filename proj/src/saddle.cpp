#include "nonbloch/saddle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "nonbloch/error.hpp"
#include "nonbloch/lattice.hpp"
#include "nonbloch/roots.hpp"

namespace nonbloch {

namespace {

void sort_saddles(std::vector<SaddlePoint>& out) {
    std::stable_sort(out.begin(), out.end(), [](const SaddlePoint& a, const SaddlePoint& b) {
        if (std::abs(a.S.imag() - b.S.imag()) > 1e-9) return a.S.imag() > b.S.imag();
        return a.S.real() < b.S.real();
    });
}

}  // namespace

std::vector<SaddlePoint> find_saddles(const LaurentSymbol& sym, double v) {
    if (sym.p() < 1 || sym.q() < 1) {
        std::ostringstream params;
        params << "p=" << sym.p() << ", q=" << sym.q();
        throw ModuleError("saddle", "find_saddles", "saddle method inapplicable", params.str());
    }
    const LaurentSymbol d1 = sym.derivative();
    const LaurentSymbol d2 = d1.derivative();
    const auto poly = d1.cleared_polynomial(v);
    const auto betas = polynomial_roots(poly);
    const double scale = std::max(sym.scale(), 1e-300);

    std::vector<SaddlePoint> raw;
    for (const cplx& beta : betas) {
        if (std::abs(beta) < 1e-12)
            throw ModuleError("saddle", "find_saddles", "spurious root at beta = 0 after clearing",
                              "v=" + std::to_string(v));
        cplx k = -I * std::log(beta);
        for (int it = 0; it < 50; ++it) {
            const cplx g = d1(k) - v;
            if (std::abs(g) <= 1e-13 * scale) break;
            const cplx gp = d2(k);
            if (gp == cplx(0.0)) break;
            const cplx step = g / gp;
            k -= step;
            if (std::abs(step) < 1e-15) break;
        }
        SaddlePoint s;
        s.k = Momentum(k);
        s.v = v;
        s.energy = sym(s.k.value());
        s.S = s.energy - s.k.value() * v;
        s.h2 = d2(s.k.value());
        s.degenerate = std::abs(s.h2) < degeneracy_threshold * scale;
        raw.push_back(s);
    }
    // Merge coincident roots.
    std::vector<SaddlePoint> out;
    for (const auto& s : raw) {
        bool merged = false;
        for (auto& o : out) {
            // a double root comes back split by ~sqrt(eps), so a close pair
            // with tiny h'' on both sides counts as coincident too
            const double gap = std::abs(o.k.beta() - s.k.beta());
            const bool flat = std::abs(o.h2) < 1e-5 * scale && std::abs(s.h2) < 1e-5 * scale;
            if (gap < 1e-8 || (gap < 1e-6 && flat)) {
                ++o.multiplicity;
                o.degenerate = true;
                merged = true;
                break;
            }
        }
        if (!merged) out.push_back(s);
    }
    sort_saddles(out);
    return out;
}

namespace {

struct BranchSystem {
    BivariateLaurent f, fk, fe, fkk, fke, fee;
    explicit BranchSystem(const MultibandSymbol& block) {
        f = block.characteristic();
        fk = f.derivative_k();
        fe = f.derivative_energy();
        fkk = fk.derivative_k();
        fke = fk.derivative_energy();
        fee = fe.derivative_energy();
    }
};

}  // namespace

MultibandSaddleResult find_saddles_multiband(const MultibandSymbol& sym, double v, unsigned seed) {
    if (sym.bands() > 4)
        throw std::invalid_argument("multiband saddles limited to at most 4 bands");
    MultibandSaddleResult result;
    const auto blocks = sym.blocks();
    const double scale = std::max(sym.scale(), 1e-300);

    for (const auto& block : blocks) {
        if (block.size() == 1) {
            const LaurentSymbol& e = sym.entry(block[0], block[0]);
            try {
                for (auto s : find_saddles(e, v)) {
                    s.band = block[0];
                    result.saddles.push_back(s);
                }
            } catch (const ModuleError& err) {
                result.warnings.push_back("band " + std::to_string(block[0]) + ": " + err.what());
            }
            continue;
        }
        const MultibandSymbol sub = sym.sub_block(block);
        const BranchSystem sys(sub);
        std::vector<std::pair<int, int>> seeds;
        constexpr int grid = 40;
        for (int a = 0; a < grid; ++a)
            for (int b = 0; b < grid; ++b) seeds.emplace_back(a, b);
        std::mt19937 rng(seed);
        std::shuffle(seeds.begin(), seeds.end(), rng);

        std::vector<SaddlePoint> found;
        for (const auto& [a, b] : seeds) {
            const cplx k0(two_pi * a / grid, -2.0 + 4.0 * b / (grid - 1));
            const Eigen::VectorXcd e0 = sub.band_energies(k0);
            for (Eigen::Index m = 0; m < e0.size(); ++m) {
                cplx k = k0;
                cplx E = e0(m);
                bool ok = false;
                for (int it = 0; it < 60; ++it) {
                    const cplx beta = std::exp(I * k);
                    if (!std::isfinite(std::abs(beta)) || std::abs(k.imag()) > 8.0) break;
                    const cplx F1 = sys.f(beta, E);
                    const cplx F2 = sys.fk(beta, E) + v * sys.fe(beta, E);
                    const double res = std::max(std::abs(F1), std::abs(F2));
                    if (res <= 1e-12 * std::pow(scale, sub.bands())) {
                        ok = true;
                        break;
                    }
                    const cplx j11 = sys.fk(beta, E);
                    const cplx j12 = sys.fe(beta, E);
                    const cplx j21 = sys.fkk(beta, E) + v * sys.fke(beta, E);
                    const cplx j22 = sys.fke(beta, E) + v * sys.fee(beta, E);
                    const cplx det = j11 * j22 - j12 * j21;
                    if (det == cplx(0.0)) break;
                    cplx dk = (F1 * j22 - j12 * F2) / det;
                    cplx dE = (j11 * F2 - F1 * j21) / det;
                    const double len = std::max(std::abs(dk), std::abs(dE));
                    if (len > 0.5) {
                        dk *= 0.5 / len;
                        dE *= 0.5 / len;
                    }
                    k -= dk;
                    E -= dE;
                }
                if (!ok) continue;
                const cplx beta = std::exp(I * k);
                const cplx fe = sys.fe(beta, E);
                // Band touchings solve both equations trivially; they are not branch saddles.
                if (std::abs(fe) < 1e-6 * std::pow(scale, sub.bands() - 1)) continue;
                const cplx F1 = sys.f(beta, E);
                const cplx F2 = sys.fk(beta, E) + v * fe;
                if (std::max(std::abs(F1), std::abs(F2)) > 1e-10) continue;
                SaddlePoint s;
                s.k = Momentum(k);
                s.v = v;
                s.energy = E;
                s.S = E - s.k.value() * v;
                const cplx e1 = -sys.fk(beta, E) / fe;
                s.h2 = -(sys.fkk(beta, E) + 2.0 * sys.fke(beta, E) * e1 + sys.fee(beta, E) * e1 * e1) / fe;
                s.degenerate = std::abs(s.h2) < degeneracy_threshold * scale;
                bool dup = false;
                for (const auto& o : found) {
                    const cplx dk = o.k.beta() - s.k.beta();
                    if (std::abs(dk) < 1e-6 && std::abs(o.energy - s.energy) < 1e-6) {
                        dup = true;
                        break;
                    }
                }
                if (!dup) found.push_back(s);
            }
        }
        if (found.empty())
            result.warnings.push_back("no convergent seeds for block of size " +
                                      std::to_string(block.size()));
        // Band label: nearest PBC band at the real part of k_s after
        // continuing E to the real axis.
        const auto pbc = pbc_curve(sub, 512);
        for (auto& s : found) {
            cplx E = s.energy;
            const double kr = s.k.re();
            constexpr int legs = 64;
            for (int j = 1; j <= legs; ++j) {
                const cplx k(kr, s.k.im() * (1.0 - static_cast<double>(j) / legs));
                const cplx beta = std::exp(I * k);
                for (int it = 0; it < 20; ++it) {
                    const cplx fe = sys.fe(beta, E);
                    if (fe == cplx(0.0)) break;
                    const cplx step = sys.f(beta, E) / fe;
                    E -= step;
                    if (std::abs(step) < 1e-14) break;
                }
            }
            const auto idx = static_cast<std::size_t>(std::lround(kr / two_pi * 512.0)) % pbc.size();
            const auto& bands = pbc[idx].energies;
            int best = 0;
            for (std::size_t m = 1; m < bands.size(); ++m)
                if (std::abs(bands[m] - E) < std::abs(bands[static_cast<std::size_t>(best)] - E))
                    best = static_cast<int>(m);
            s.band = block[static_cast<std::size_t>(best)];
            result.saddles.push_back(s);
        }
    }
    sort_saddles(result.saddles);
    return result;
}

std::vector<Momentum> det_saddle_momenta(const MultibandSymbol& sym) {
    const LaurentSymbol q = sym.characteristic().at_energy(0.0);
    std::vector<Momentum> out;
    for (const auto& s : find_saddles(q, 0.0)) out.push_back(s.k);
    return out;
}

double dlambda_dv_check(const SaddlePoint& s) { return -s.k.im(); }

}  // namespace nonbloch
