#include "nonbloch/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "nonbloch/error.hpp"
#include "nonbloch/roots.hpp"

namespace nonbloch {

CsrMatrix CsrMatrix::plus_diagonal(const std::vector<cplx>& diagonal) const {
    CsrMatrix out;
    out.size = size;
    out.row_ptr.push_back(0);
    for (int r = 0; r < size; ++r) {
        bool placed = false;
        const cplx d = diagonal.at(static_cast<std::size_t>(r));
        for (int j = row_ptr[static_cast<std::size_t>(r)]; j < row_ptr[static_cast<std::size_t>(r) + 1]; ++j) {
            cplx v = val[static_cast<std::size_t>(j)];
            const int c = col[static_cast<std::size_t>(j)];
            if (c == r) {
                v += d;
                placed = true;
            } else if (!placed && c > r && d != cplx(0.0)) {
                out.col.push_back(r);
                out.val.push_back(d);
                placed = true;
            }
            out.col.push_back(c);
            out.val.push_back(v);
        }
        if (!placed && d != cplx(0.0)) {
            out.col.push_back(r);
            out.val.push_back(d);
        }
        out.row_ptr.push_back(static_cast<int>(out.col.size()));
    }
    return out;
}

Eigen::VectorXcd CsrMatrix::apply(const Eigen::VectorXcd& v) const {
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(size);
    for (int r = 0; r < size; ++r) {
        cplx s = 0.0;
        for (int j = row_ptr[static_cast<std::size_t>(r)]; j < row_ptr[static_cast<std::size_t>(r) + 1]; ++j)
            s += val[static_cast<std::size_t>(j)] * v(col[static_cast<std::size_t>(j)]);
        out(r) = s;
    }
    return out;
}

double CsrMatrix::inf_norm() const {
    double best = 0.0;
    for (int r = 0; r < size; ++r) {
        double s = 0.0;
        for (int j = row_ptr[static_cast<std::size_t>(r)]; j < row_ptr[static_cast<std::size_t>(r) + 1]; ++j)
            s += std::abs(val[static_cast<std::size_t>(j)]);
        best = std::max(best, s);
    }
    return best;
}

LatticeHamiltonian::LatticeHamiltonian(MultibandSymbol symbol, int cells, Boundary boundary)
    : symbol_(std::move(symbol)), cells_(cells), boundary_(boundary) {
    const int range = std::max(symbol_.max_power(), -symbol_.min_power());
    if (cells_ <= 2 * range) {
        std::ostringstream params;
        params << "L=" << cells_ << ", hopping range=" << range;
        throw ModuleError("lattice", "assemble", "lattice shorter than hopping range",
                          params.str());
    }
    const int m = symbol_.bands();
    const int n = cells_ * m;
    sparse_.size = n;
    sparse_.row_ptr.push_back(0);
    for (int x = 0; x < cells_; ++x) {
        for (int a = 0; a < m; ++a) {
            std::map<int, cplx> row;
            for (int b = 0; b < m; ++b) {
                for (const auto& [power, c] : symbol_.entry(a, b).coeffs()) {
                    int y = x + power;
                    if (boundary_ == Boundary::periodic) {
                        y = ((y % cells_) + cells_) % cells_;
                    } else if (y < 0 || y >= cells_) {
                        continue;
                    }
                    row[y * m + b] += c;
                }
            }
            for (const auto& [cidx, v] : row) {
                if (v == cplx(0.0)) continue;
                sparse_.col.push_back(cidx);
                sparse_.val.push_back(v);
            }
            sparse_.row_ptr.push_back(static_cast<int>(sparse_.col.size()));
        }
    }
}

Eigen::MatrixXcd LatticeHamiltonian::dense(double gauge_radius) const {
    const int n = dimension();
    const int m = bands();
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
    const double log_r = std::log(gauge_radius);
    for (int r = 0; r < n; ++r) {
        for (int j = sparse_.row_ptr[static_cast<std::size_t>(r)]; j < sparse_.row_ptr[static_cast<std::size_t>(r) + 1]; ++j) {
            const int c = sparse_.col[static_cast<std::size_t>(j)];
            // (S⁻¹ H S)_{rc} = r^{x_c - x_r} H_{rc}
            const double scale =
                gauge_radius == 1.0 ? 1.0 : std::exp(log_r * static_cast<double>(c / m - r / m));
            out(r, c) = sparse_.val[static_cast<std::size_t>(j)] * scale;
        }
    }
    return out;
}

double LatticeHamiltonian::norm() const {
    double s = 0.0;
    for (const cplx& v : sparse_.val) s += std::norm(v);
    return std::sqrt(s);
}

LatticeHamiltonian assemble(const MultibandSymbol& sym, int cells, Boundary boundary) {
    return LatticeHamiltonian(sym, cells, boundary);
}

std::vector<cplx> SpectrumSet::energies() const {
    std::vector<cplx> out;
    out.reserve(obc.size());
    for (const auto& e : obc) out.push_back(e.energy);
    return out;
}

double loop_area_proxy(const std::vector<cplx>& loop) {
    if (loop.size() < 3) return 0.0;
    cplx centroid = 0.0;
    for (const cplx& z : loop) centroid += z;
    centroid /= static_cast<double>(loop.size());
    double area = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i) {
        const cplx a = loop[i] - centroid;
        const cplx b = loop[(i + 1) % loop.size()] - centroid;
        area += std::abs(a.real() * b.imag() - a.imag() * b.real());
    }
    return 0.5 * area;
}

double similarity_radius(const MultibandSymbol& sym, int cells) {
    const double bound = std::min(2.0, 300.0 / std::max(1, cells));
    auto cost = [&](double log_r) {
        const auto curve = pbc_curve(sym.rescaled(std::exp(log_r)), 128);
        double total = 0.0;
        for (int b = 0; b < sym.bands(); ++b) {
            std::vector<cplx> loop;
            loop.reserve(curve.size());
            for (const auto& s : curve) loop.push_back(s.energies[static_cast<std::size_t>(b)]);
            total += loop_area_proxy(loop);
        }
        return total;
    };
    constexpr int coarse = 81;
    double best_x = 0.0;
    double best = cost(0.0);
    for (int i = 0; i < coarse; ++i) {
        const double x = -bound + 2.0 * bound * i / (coarse - 1);
        const double c = cost(x);
        if (c < best - 1e-12 * std::max(1.0, best)) {
            best = c;
            best_x = x;
        }
    }
    // Golden-section refinement inside the neighbouring grid cells.
    const double h = 2.0 * bound / (coarse - 1);
    double a = std::max(-bound, best_x - h);
    double b = std::min(bound, best_x + h);
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = cost(c);
    double fd = cost(d);
    for (int it = 0; it < 40; ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = cost(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = cost(d);
        }
    }
    const double x = 0.5 * (a + b);
    return std::exp(cost(x) <= best ? x : best_x);
}

std::vector<PbcSample> pbc_curve(const MultibandSymbol& sym, int samples) {
    const int m = sym.bands();
    std::vector<PbcSample> out;
    out.reserve(static_cast<std::size_t>(samples));
    std::vector<int> perm(static_cast<std::size_t>(m));
    for (int j = 0; j < samples; ++j) {
        const double k = two_pi * j / samples;
        const Eigen::VectorXcd ev = sym.band_energies(k);
        std::vector<cplx> e(ev.data(), ev.data() + ev.size());
        if (out.empty()) {
            std::sort(e.begin(), e.end(), [](cplx a, cplx b) {
                return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
            });
        } else if (m > 1) {
            const auto& prev = out.back().energies;
            std::iota(perm.begin(), perm.end(), 0);
            std::vector<int> best_perm = perm;
            double best = std::numeric_limits<double>::infinity();
            do {
                double d = 0.0;
                for (int b = 0; b < m; ++b)
                    d += std::abs(e[static_cast<std::size_t>(perm[static_cast<std::size_t>(b)])] -
                                  prev[static_cast<std::size_t>(b)]);
                if (d < best) {
                    best = d;
                    best_perm = perm;
                }
            } while (std::next_permutation(perm.begin(), perm.end()));
            std::vector<cplx> tracked(static_cast<std::size_t>(m));
            for (int b = 0; b < m; ++b)
                tracked[static_cast<std::size_t>(b)] = e[static_cast<std::size_t>(best_perm[static_cast<std::size_t>(b)])];
            e = std::move(tracked);
        }
        out.push_back({k, std::move(e)});
    }
    return out;
}

namespace {

/// Pair adjoint eigenvalues μ_m with right eigenvalues E_n through
/// conj(μ_m) ≈ E_n; among candidates within `tie` of the closest one, the
/// vector with the largest overlap wins.
std::vector<int> pair_left_vectors(const Eigen::VectorXcd& right_vals,
                                   const Eigen::VectorXcd& adjoint_vals,
                                   const Eigen::MatrixXcd& overlaps, double tie) {
    const Eigen::Index n = right_vals.size();
    std::vector<int> assignment(static_cast<std::size_t>(n), -1);
    std::vector<bool> used(static_cast<std::size_t>(n), false);
    struct Candidate {
        double distance;
        Eigen::Index right;
        Eigen::Index left;
    };
    std::vector<Candidate> cands;
    cands.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index l = 0; l < n; ++l)
            cands.push_back({std::abs(std::conj(adjoint_vals(l)) - right_vals(r)), r, l});
    std::sort(cands.begin(), cands.end(),
              [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; });
    for (std::size_t i = 0; i < cands.size(); ++i) {
        const auto& c = cands[i];
        if (assignment[static_cast<std::size_t>(c.right)] >= 0 || used[static_cast<std::size_t>(c.left)]) continue;
        // Ties: look ahead for equally close candidates for the same right vector.
        Eigen::Index best_left = c.left;
        double best_overlap = std::abs(overlaps(c.left, c.right));
        for (std::size_t j = i + 1; j < cands.size() && cands[j].distance <= c.distance + tie; ++j) {
            if (cands[j].right != c.right || used[static_cast<std::size_t>(cands[j].left)]) continue;
            const double ov = std::abs(overlaps(cands[j].left, c.right));
            if (ov > best_overlap) {
                best_overlap = ov;
                best_left = cands[j].left;
            }
        }
        assignment[static_cast<std::size_t>(c.right)] = static_cast<int>(best_left);
        used[static_cast<std::size_t>(best_left)] = true;
    }
    return assignment;
}

}  // namespace

SpectrumSet spectrum(const LatticeHamiltonian& h, const SpectrumOptions& options) {
    SpectrumSet out;
    const int n = h.dimension();
    const int m = h.bands();
    double r = 1.0;
    if (options.gauge_radius) {
        r = *options.gauge_radius;
    } else if (h.boundary() == Boundary::open) {
        r = similarity_radius(h.symbol(), h.cells());
    }
    out.gauge_radius = r;
    const Eigen::MatrixXcd gauged = h.dense(r);

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> right(gauged, options.vectors);
    if (right.info() != Eigen::Success) {
        throw ModuleError("lattice", "spectrum", "eigensolver did not converge",
                          "indices=[0," + std::to_string(n - 1) + "]");
    }
    const Eigen::VectorXcd energies = right.eigenvalues();

    if (options.vectors) {
        Eigen::ComplexEigenSolver<Eigen::MatrixXcd> left(gauged.adjoint(), true);
        if (left.info() != Eigen::Success) {
            throw ModuleError("lattice", "spectrum", "adjoint eigensolver did not converge",
                              "indices=[0," + std::to_string(n - 1) + "]");
        }
        const Eigen::MatrixXcd& vr = right.eigenvectors();
        const Eigen::MatrixXcd& vl = left.eigenvectors();
        const Eigen::MatrixXcd overlaps = vl.adjoint() * vr;
        const double scale = std::max(1.0, gauged.cwiseAbs().rowwise().sum().maxCoeff());
        const auto pairing = pair_left_vectors(energies, left.eigenvalues(), overlaps, 1e-10 * scale);

        // Undo the gauge: ψ_R = S φ_R, ψ_L = S⁻¹ φ_L.
        Eigen::VectorXd s(n);
        for (int i = 0; i < n; ++i) s(i) = std::exp(std::log(r) * static_cast<double>(i / m));

        const double hnorm = h.norm();
        std::vector<int> failed;
        out.obc.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            EigenTriple t;
            t.energy = energies(i);
            Eigen::VectorXcd psi_r = s.cwiseProduct(vr.col(i));
            const double rn = psi_r.norm();
            const double overlap_scale = 1.0 / rn;
            psi_r *= overlap_scale;
            Eigen::VectorXcd psi_l = s.cwiseInverse().cwiseProduct(vl.col(pairing[static_cast<std::size_t>(i)]));
            const cplx ov = psi_l.dot(psi_r);  // ⟨ψ_L|ψ_R⟩
            psi_l /= std::conj(ov);
            const double residual = (h.sparse().apply(psi_r) - t.energy * psi_r).norm();
            if (!(residual <= options.residual_tolerance * std::max(1.0, hnorm))) failed.push_back(i);
            t.right = std::move(psi_r);
            t.left = std::move(psi_l);
            out.obc.push_back(std::move(t));
        }
        if (!failed.empty()) {
            std::ostringstream idx;
            idx << "indices=[";
            for (std::size_t i = 0; i < failed.size(); ++i) idx << (i ? "," : "") << failed[i];
            idx << "]";
            throw ModuleError("lattice", "spectrum", "eigenpair residual above tolerance", idx.str());
        }
    } else {
        out.obc.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) out.obc.push_back({energies(i), {}, {}, false});
    }

    // Near-defective pairs are flagged, not repaired.
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && std::abs(energies(i) - energies(j)) < 1e-10) {
                out.obc[static_cast<std::size_t>(i)].near_defective = true;
                out.near_defective.push_back(i);
                break;
            }
        }
    }

    auto top = std::max_element(out.obc.begin(), out.obc.end(), [](const auto& a, const auto& b) {
        return a.energy.imag() < b.energy.imag();
    });
    out.point_O = top->energy;

    out.pbc = pbc_curve(h.symbol(), options.pbc_samples);
    if (h.bands() == 1 && h.boundary() == Boundary::open) {
        const LaurentSymbol& sym = h.symbol().entry(0, 0);
        if (sym.p() > 0 && sym.q() > 0) out.gbz = gbz_from_obc(sym, out);
    }
    return out;
}

std::vector<cplx> gbz_from_obc(const LaurentSymbol& sym, const SpectrumSet& spec) {
    if (sym.p() == 0 || sym.q() == 0) {
        throw ModuleError("lattice", "gbz_from_obc", "GBZ degenerate: unidirectional hopping",
                          "p=" + std::to_string(sym.p()) + ", q=" + std::to_string(sym.q()));
    }
    const auto q = static_cast<std::size_t>(sym.q());
    std::vector<cplx> out;
    out.reserve(2 * spec.obc.size());
    for (const auto& e : spec.obc) {
        const auto roots = symbol_roots(sym, e.energy);
        out.push_back(roots[q - 1]);
        out.push_back(roots[q]);
    }
    return out;
}

namespace {

// Is β one of an equal-modulus middle pair of h(β') = h(β)?
bool middle_pair(const LaurentSymbol& sym, cplx beta, cplx energy, double tol) {
    const auto r = symbol_roots(sym, energy);
    const auto q = static_cast<std::size_t>(sym.q());
    if (q == 0 || r.size() <= q) return false;
    const double a = std::abs(r[q - 1]), b = std::abs(r[q]), m = std::abs(beta);
    return std::abs(a - b) <= tol * b && std::abs(m - a) <= tol * b;
}

// best Im E among middle GBZ pairs at relative angle phi, or -inf
double gbz_top(const LaurentSymbol& sym, double phi, cplx* best) {
    const cplx w = std::exp(I * phi);
    std::map<int, cplx> diff;
    for (const auto& [n, c] : sym.coeffs())
        if (n != 0) diff[n] = c * (1.0 - std::pow(w, n));
    const auto poly = LaurentSymbol(diff).cleared_polynomial();
    double top = -std::numeric_limits<double>::infinity();
    for (cplx beta : polynomial_roots(poly)) {
        if (std::abs(beta) < 1e-14) continue;
        const cplx e = sym.at_beta(beta);
        if (e.imag() > top && middle_pair(sym, beta, e, 1e-7)) {
            top = e.imag();
            if (best) *best = e;
        }
    }
    return top;
}

}  // namespace

cplx point_O_limit(const LaurentSymbol& sym, int samples) {
    if (sym.p() == 0 || sym.q() == 0)
        throw ModuleError("lattice", "point_O_limit", "GBZ degenerate: unidirectional hopping");
    double top = -std::numeric_limits<double>::infinity();
    cplx best{0.0, top};
    // arc ends: double roots of h(β) = E sitting in the middle
    const auto dpoly = sym.derivative().cleared_polynomial();
    for (cplx beta : polynomial_roots(dpoly)) {
        if (std::abs(beta) < 1e-14) continue;
        const cplx e = sym.at_beta(beta);
        if (e.imag() > top && middle_pair(sym, beta, e, 1e-6)) {
            top = e.imag();
            best = e;
        }
    }
    // interior of the arcs, φ ∈ (0, π] covers every unordered pair
    std::vector<double> m(static_cast<std::size_t>(samples) + 1);
    for (int j = 1; j <= samples; ++j) m[j] = gbz_top(sym, std::numbers::pi * j / samples, nullptr);
    m[0] = -std::numeric_limits<double>::infinity();
    const auto j = static_cast<int>(std::max_element(m.begin(), m.end()) - m.begin());
    if (std::isfinite(m[j])) {
        double lo = std::numbers::pi * std::max(j - 1, 1) / samples;
        double hi = std::numbers::pi * std::min(j + 1, samples) / samples;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
            const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
            if (gbz_top(sym, m1, nullptr) > gbz_top(sym, m2, nullptr)) hi = m2; else lo = m1;
        }
        cplx e;
        for (double phi : {0.5 * (lo + hi), std::numbers::pi * j / samples}) {
            const double v = gbz_top(sym, phi, &e);
            if (v > top) {
                top = v;
                best = e;
            }
        }
    }
    if (!std::isfinite(top)) throw ModuleError("lattice", "point_O_limit", "no GBZ point found");
    return best;
}

}  // namespace nonbloch
