#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "nonbloch/symbol.hpp"

namespace nonbloch {

enum class Boundary { open, periodic };

/// Compressed sparse rows, the form used by the propagators.
struct CsrMatrix {
    int size = 0;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<cplx> val;

    /// Copy with `diagonal` added to the main diagonal (entries are created
    /// where needed).
    CsrMatrix plus_diagonal(const std::vector<cplx>& diagonal) const;
    Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
    /// Max absolute row sum (the induced ∞-norm).
    double inf_norm() const;
};

/// Finite real-space Hamiltonian of `cells` unit cells with `bands` orbitals
/// each. Site x (0-based) and orbital a map to index x * bands + a, and the
/// Laurent coefficient c_n^{ab} sits at H[(x,a), (x+n,b)] so that plane waves
/// e^{ikx} reproduce h(k).
class LatticeHamiltonian {
public:
    LatticeHamiltonian(MultibandSymbol symbol, int cells, Boundary boundary);

    int cells() const { return cells_; }
    int bands() const { return symbol_.bands(); }
    int dimension() const { return cells_ * symbol_.bands(); }
    Boundary boundary() const { return boundary_; }
    const MultibandSymbol& symbol() const { return symbol_; }

    const CsrMatrix& sparse() const { return sparse_; }
    /// Dense matrix, optionally in the similarity gauge S⁻¹ H S with
    /// S = diag(r^x). The gauge leaves the spectrum unchanged.
    Eigen::MatrixXcd dense(double gauge_radius = 1.0) const;
    /// Frobenius norm of the (ungauged) matrix.
    double norm() const;

private:
    MultibandSymbol symbol_;
    int cells_;
    Boundary boundary_;
    CsrMatrix sparse_;
};

LatticeHamiltonian assemble(const MultibandSymbol& sym, int cells, Boundary boundary);

struct EigenTriple {
    cplx energy;
    Eigen::VectorXcd right;  ///< unit norm
    Eigen::VectorXcd left;   ///< scaled so that ⟨left|right⟩ = 1
    bool near_defective = false;
};

struct PbcSample {
    double k;
    std::vector<cplx> energies;  ///< one per band, continuity-tracked
};

struct SpectrumSet {
    std::vector<EigenTriple> obc;
    std::vector<PbcSample> pbc;
    cplx point_O{0.0, 0.0};
    std::vector<cplx> gbz;  ///< GBZ points β (single band with two-sided hopping)
    double gauge_radius = 1.0;
    std::vector<int> near_defective;  ///< indices flagged by the gap test

    std::vector<cplx> energies() const;
};

struct SpectrumOptions {
    bool vectors = true;
    int pbc_samples = 512;
    /// Fixed similarity gauge; chosen automatically when empty.
    std::optional<double> gauge_radius;
    double residual_tolerance = 1e-8;
};

SpectrumSet spectrum(const LatticeHamiltonian& h, const SpectrumOptions& options = {});

/// GBZ points from the OBC eigenvalues: for each E_n the two middle-modulus
/// roots of h(β) = E_n.
std::vector<cplx> gbz_from_obc(const LaurentSymbol& sym, const SpectrumSet& spectrum);

/// Top of the OBC continuum as L → ∞: max Im E over the GBZ pairs
/// h(β) = h(βe^{iφ}) whose moduli are the middle two, plus the arc ends at
/// branch points (double middle roots). Single band with p, q ≥ 1.
cplx point_O_limit(const LaurentSymbol& sym, int samples = 2048);

/// Per-band eigenvalues of h(k) on a uniform real grid of `samples` points,
/// bands matched between neighbouring k by minimal total distance.
std::vector<PbcSample> pbc_curve(const MultibandSymbol& sym, int samples);

/// Similarity gauge r that makes the PBC loop of h(rβ) as small as possible
/// (a proxy for how far the lattice is from normal). Bounded so that r^cells
/// stays representable.
double similarity_radius(const MultibandSymbol& sym, int cells);

/// Enclosed-area proxy of a closed curve (fan of triangles about its centroid).
double loop_area_proxy(const std::vector<cplx>& loop);

}  // namespace nonbloch
