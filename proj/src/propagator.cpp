#include "nonbloch/propagator.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "nonbloch/error.hpp"

namespace nonbloch {

namespace {

inline double abs2(const Cx<double>& z) { return z.re * z.re + z.im * z.im; }
inline double abs2(const Cx<DoubleDouble>& z) {
    const double a = to_double(z.re);
    const double b = to_double(z.im);
    return a * a + b * b;
}

template <class R>
Cx<R> from_cplx(cplx z) {
    return {R(z.real()), R(z.imag())};
}

}  // namespace

template <class R>
TaylorStepper<R>::TaylorStepper(CsrMatrix matrix, const Eigen::VectorXcd& psi0, double tolerance)
    : matrix_(std::move(matrix)), tolerance_(tolerance) {
    if (psi0.size() != matrix_.size)
        throw std::invalid_argument("initial state dimension does not match the Hamiltonian");
    state_.resize(static_cast<std::size_t>(matrix_.size));
    for (int i = 0; i < matrix_.size; ++i) state_[static_cast<std::size_t>(i)] = from_cplx<R>(psi0(i));
    term_ = state_;
    next_ = state_;
    rescale();
}

template <class R>
void TaylorStepper<R>::apply(const std::vector<Cx<R>>& in, std::vector<Cx<R>>& out) const {
    const int n = matrix_.size;
    for (int r = 0; r < n; ++r) {
        R sr{};
        R si{};
        for (int j = matrix_.row_ptr[static_cast<std::size_t>(r)]; j < matrix_.row_ptr[static_cast<std::size_t>(r) + 1]; ++j) {
            const cplx a = matrix_.val[static_cast<std::size_t>(j)];
            const Cx<R>& b = in[static_cast<std::size_t>(matrix_.col[static_cast<std::size_t>(j)])];
            if (a.imag() == 0.0) {
                sr += b.re * a.real();
                si += b.im * a.real();
            } else if (a.real() == 0.0) {
                sr -= b.im * a.imag();
                si += b.re * a.imag();
            } else {
                sr += b.re * a.real() - b.im * a.imag();
                si += b.re * a.imag() + b.im * a.real();
            }
        }
        out[static_cast<std::size_t>(r)] = {sr, si};
    }
}

template <class R>
void TaylorStepper<R>::advance(double h) {
    if (h == 0.0) return;
    const double hn = std::abs(h) * std::max(matrix_.inf_norm(), 1e-300);
    const int substeps = std::max(1, static_cast<int>(std::ceil(hn / 1.0)));
    const double sub = h / substeps;
    const std::size_t n = state_.size();
    for (int s = 0; s < substeps; ++s) {
        term_ = state_;
        double state_max = 0.0;
        for (const auto& z : state_) state_max = std::max(state_max, abs2(z));
        if (state_max == 0.0) return;
        int small = 0;
        for (int order = 1; order <= 80; ++order) {
            apply(term_, next_);
            // term ← (−i·sub/order) · H · term
            const double f = sub / order;
            double term_max = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const Cx<R>& z = next_[i];
                term_[i] = {z.im * f, -(z.re * f)};
                state_[i].re += term_[i].re;
                state_[i].im += term_[i].im;
                term_max = std::max(term_max, abs2(term_[i]));
            }
            if (term_max <= tolerance_ * tolerance_ * state_max) {
                if (++small == 2) break;
            } else {
                small = 0;
            }
        }
        rescale();
    }
}

template <class R>
void TaylorStepper<R>::rescale() {
    double m = 0.0;
    for (const auto& z : state_) m = std::max(m, abs2(z));
    if (m == 0.0 || !std::isfinite(m)) {
        if (!std::isfinite(m))
            throw ModuleError("dynamics", "evolve", "non-finite amplitude during propagation");
        return;
    }
    const double lm = 0.5 * std::log(m);
    if (lm > -230.0 && lm < 230.0) return;
    // Scale by a power of two so the rescaling itself is exact.
    const int e = static_cast<int>(std::lround(lm / std::log(2.0)));
    const double f = std::ldexp(1.0, -e);
    for (auto& z : state_) {
        z.re = z.re * f;
        z.im = z.im * f;
    }
    log_scale_ += e * std::log(2.0);
}

template <class R>
Eigen::VectorXcd TaylorStepper<R>::scaled_state() const {
    Eigen::VectorXcd out(static_cast<Eigen::Index>(state_.size()));
    for (std::size_t i = 0; i < state_.size(); ++i)
        out(static_cast<Eigen::Index>(i)) = cplx(to_double(state_[i].re), to_double(state_[i].im));
    return out;
}

template <class R>
double TaylorStepper<R>::log_norm() const {
    double m = 0.0;
    for (const auto& z : state_) m = std::max(m, abs2(z));
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (const auto& z : state_) s += abs2(z) / m;
    return log_scale_ + 0.5 * std::log(m) + 0.5 * std::log(s);
}

template <class R>
double TaylorStepper<R>::log_abs(int i) const {
    const auto& z = state_.at(static_cast<std::size_t>(i));
    const double a = abs2(z);
    if (a == 0.0) return -std::numeric_limits<double>::infinity();
    return log_scale_ + 0.5 * std::log(a);
}

template class TaylorStepper<double>;
template class TaylorStepper<DoubleDouble>;

namespace {

template <class R>
EvolutionTrace run_taylor(const LatticeHamiltonian& h, const Eigen::VectorXcd& psi0, int x0,
                          double dt, int steps, double tolerance, int snapshot_stride) {
    TaylorStepper<R> stepper(h.sparse(), psi0, tolerance);
    EvolutionTrace out;
    out.x0 = x0;
    const int n = h.dimension();
    auto record = [&](int j) {
        const double t = j * dt;
        out.times.push_back(t);
        out.log_amp_x0.push_back(stepper.log_abs(x0));
        out.log_norm.push_back(stepper.log_norm());
        if (snapshot_stride > 0 && j % snapshot_stride == 0) {
            out.snapshot_times.push_back(t);
            std::vector<double> prof(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) prof[static_cast<std::size_t>(i)] = stepper.log_abs(i);
            out.log_profiles.push_back(std::move(prof));
        }
    };
    record(0);
    for (int j = 1; j <= steps; ++j) {
        stepper.advance(dt);
        record(j);
    }
    return out;
}

void check_request(const LatticeHamiltonian& h, const Eigen::VectorXcd& psi0, int x0, double dt,
                   int steps) {
    if (psi0.size() != h.dimension())
        throw std::invalid_argument("initial state dimension does not match the Hamiltonian");
    if (x0 < 0 || x0 >= h.dimension()) throw std::invalid_argument("monitored site out of range");
    if (!(dt > 0.0) || steps < 0) throw std::invalid_argument("time grid must have dt > 0");
    if (std::abs(psi0.norm() - 1.0) > 1e-9) throw std::invalid_argument("initial state not normalized");
}

}  // namespace

EvolutionTrace evolve(const LatticeHamiltonian& h, const Eigen::VectorXcd& psi0, int x0, double dt,
                      int steps, const EvolveOptions& options) {
    check_request(h, psi0, x0, dt, steps);
    if (options.backend == Backend::spectral) {
        const SpectrumSet spec = spectrum(h);
        return evolve_spectral(h, spec, psi0, x0, dt, steps, options.snapshot_stride);
    }
    if (options.precision == Precision::extended) {
        const double tol = options.tolerance > 0.0 ? options.tolerance : 1e-30;
        return run_taylor<DoubleDouble>(h, psi0, x0, dt, steps, tol, options.snapshot_stride);
    }
    const double tol = options.tolerance > 0.0 ? options.tolerance : 1e-17;
    return run_taylor<double>(h, psi0, x0, dt, steps, tol, options.snapshot_stride);
}

EvolutionTrace evolve_spectral(const LatticeHamiltonian& h, const SpectrumSet& spec,
                               const Eigen::VectorXcd& psi0, int x0, double dt, int steps,
                               int snapshot_stride) {
    check_request(h, psi0, x0, dt, steps);
    const auto n = static_cast<Eigen::Index>(spec.obc.size());
    if (n != h.dimension())
        throw ModuleError("dynamics", "evolve", "spectral backend needs the full eigen-decomposition");
    Eigen::MatrixXcd right(h.dimension(), n);
    Eigen::VectorXcd weights(n);
    Eigen::VectorXcd energies(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& e = spec.obc[static_cast<std::size_t>(i)];
        if (e.right.size() == 0) throw ModuleError("dynamics", "evolve", "spectrum lacks eigenvectors");
        right.col(i) = e.right;
        weights(i) = e.left.dot(psi0);
        energies(i) = e.energy;
    }
    EvolutionTrace out;
    out.x0 = x0;
    for (int j = 0; j <= steps; ++j) {
        const double t = j * dt;
        // Factor out the fastest growth so that exponentials stay finite.
        const double shift = energies.imag().maxCoeff() * t;
        Eigen::VectorXcd phase(n);
        for (Eigen::Index i = 0; i < n; ++i)
            phase(i) = std::exp(-I * energies(i) * t - shift) * weights(i);
        const Eigen::VectorXcd psi = right * phase;
        out.times.push_back(t);
        out.log_amp_x0.push_back(shift + std::log(std::abs(psi(x0))));
        out.log_norm.push_back(shift + std::log(psi.norm()));
        if (snapshot_stride > 0 && j % snapshot_stride == 0) {
            out.snapshot_times.push_back(t);
            std::vector<double> prof(static_cast<std::size_t>(psi.size()));
            for (Eigen::Index i = 0; i < psi.size(); ++i)
                prof[static_cast<std::size_t>(i)] = shift + std::log(std::abs(psi(i)));
            out.log_profiles.push_back(std::move(prof));
        }
    }
    return out;
}

Eigen::VectorXcd delta_state(int dimension, int i) {
    if (i < 0 || i >= dimension) throw std::invalid_argument("delta_state index out of range");
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dimension);
    v(i) = 1.0;
    return v;
}

}  // namespace nonbloch
