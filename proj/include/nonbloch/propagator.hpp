#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "nonbloch/double_double.hpp"
#include "nonbloch/lattice.hpp"

namespace nonbloch {

enum class Precision { standard, extended };

/// Complex number over an arbitrary real type (std::complex is only
/// specified for the built-in floating types).
template <class R>
struct Cx {
    R re{};
    R im{};
};

/// Time stepper for dψ/dt = −iHψ by truncated Taylor series on a sparse
/// matrix. The state is stored as ψ = e^{log_scale} · data, and data is
/// renormalized whenever its magnitude leaves [1e−100, 1e100], so the
/// represented amplitude may over- or underflow double without harm.
template <class R>
class TaylorStepper {
public:
    TaylorStepper(CsrMatrix matrix, const Eigen::VectorXcd& psi0, double tolerance);

    void advance(double h);
    /// ψ / e^{log_scale} rounded to double.
    Eigen::VectorXcd scaled_state() const;
    double log_scale() const { return log_scale_; }
    double log_norm() const;
    /// ln|ψ_i|, −inf for an exact zero.
    double log_abs(int i) const;
    void replace_matrix(CsrMatrix matrix) { matrix_ = std::move(matrix); }

private:
    void apply(const std::vector<Cx<R>>& in, std::vector<Cx<R>>& out) const;
    void rescale();

    CsrMatrix matrix_;
    std::vector<Cx<R>> state_;
    std::vector<Cx<R>> term_;
    std::vector<Cx<R>> next_;
    double log_scale_ = 0.0;
    double tolerance_;
};

extern template class TaylorStepper<double>;
extern template class TaylorStepper<DoubleDouble>;

/// Sampled evolution at t_j = j·dt. Amplitudes are stored as logarithms so
/// that no sample is ever infinite.
struct EvolutionTrace {
    std::vector<double> times;
    int x0 = 0;                      ///< monitored site (0-based)
    std::vector<double> log_amp_x0;  ///< ln|ψ_{x0}(t)|
    std::vector<double> log_norm;    ///< ln‖ψ(t)‖
    std::vector<double> snapshot_times;
    std::vector<std::vector<double>> log_profiles;  ///< ln|ψ_x(t)| per snapshot, per site
};

enum class Backend { taylor, spectral };

struct EvolveOptions {
    Backend backend = Backend::taylor;
    Precision precision = Precision::extended;
    /// Relative truncation threshold of each Taylor step; 0 picks a value
    /// matched to the precision.
    double tolerance = 0.0;
    /// Keep a site profile every this many samples (0 = none).
    int snapshot_stride = 0;
};

/// ψ(t) = e^{−iHt} ψ0 sampled on the uniform grid {0, dt, ..., steps·dt}.
/// For multiband lattices x0 indexes the flattened basis.
EvolutionTrace evolve(const LatticeHamiltonian& h, const Eigen::VectorXcd& psi0, int x0,
                      double dt, int steps, const EvolveOptions& options = {});

/// Spectral backend: ψ(t) = Σ e^{−iE_n t} |R_n⟩⟨L_n|ψ0⟩.
EvolutionTrace evolve_spectral(const LatticeHamiltonian& h, const SpectrumSet& spec,
                               const Eigen::VectorXcd& psi0, int x0, double dt, int steps,
                               int snapshot_stride = 0);

/// Unit vector on basis index i.
Eigen::VectorXcd delta_state(int dimension, int i);

}  // namespace nonbloch
