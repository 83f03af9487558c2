#pragma once

#include <complex>
#include <map>
#include <numbers>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nonbloch {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// Reduce a real momentum to [0, 2π).
double wrap_momentum(double k_r);

/// Complex momentum on the cylinder; the real part is always kept in [0, 2π).
class Momentum {
public:
    Momentum() = default;
    explicit Momentum(cplx k) : value_(wrap_momentum(k.real()), k.imag()) {}
    Momentum(double k_r, double k_i) : Momentum(cplx(k_r, k_i)) {}

    cplx value() const { return value_; }
    double re() const { return value_.real(); }
    double im() const { return value_.imag(); }
    cplx beta() const { return std::exp(I * value_); }

private:
    cplx value_{0.0, 0.0};
};

/// Bloch symbol h(k) = Σ c_n e^{ink}, stored sparsely by integer power n.
class LaurentSymbol {
public:
    LaurentSymbol() = default;
    explicit LaurentSymbol(std::map<int, cplx> coeffs);

    /// The nearest/next-nearest-neighbour family
    /// h(k) = t1L e^{ik} + t1R e^{-ik} + t2L e^{2ik} + t2R e^{-2ik} - iκ.
    static LaurentSymbol from_hoppings(cplx t1_left, cplx t1_right, cplx t2_left,
                                       cplx t2_right, double kappa);
    static LaurentSymbol constant(cplx c) { return LaurentSymbol({{0, c}}); }

    cplx operator()(cplx k) const;
    cplx operator()(const Momentum& k) const { return (*this)(k.value()); }
    /// h as a function of β = e^{ik}.
    cplx at_beta(cplx beta) const;

    bool is_zero() const { return coeffs_.empty(); }
    /// Largest nonzero power p (≥ 0 unless the symbol is zero).
    int max_power() const;
    /// Smallest nonzero power −q.
    int min_power() const;
    int p() const { return std::max(0, max_power()); }
    int q() const { return std::max(0, -min_power()); }
    /// Largest |c_n|.
    double scale() const;

    cplx coeff(int n) const;
    const std::map<int, cplx>& coeffs() const { return coeffs_; }

    /// dh/dk as a new symbol, {n: i n c_n}.
    LaurentSymbol derivative() const;
    /// Coefficients of β^q (h(β) − E), ascending in β, length p + q + 1.
    std::vector<cplx> cleared_polynomial(cplx energy = 0.0) const;

    /// h(k − i ln r), i.e. β → rβ.
    LaurentSymbol rescaled(double r) const;

    LaurentSymbol& operator+=(const LaurentSymbol& other);
    LaurentSymbol& operator-=(const LaurentSymbol& other);
    LaurentSymbol& operator*=(cplx s);
    friend LaurentSymbol operator+(LaurentSymbol a, const LaurentSymbol& b) { return a += b; }
    friend LaurentSymbol operator-(LaurentSymbol a, const LaurentSymbol& b) { return a -= b; }
    friend LaurentSymbol operator*(LaurentSymbol a, cplx s) { return a *= s; }
    friend LaurentSymbol operator*(cplx s, LaurentSymbol a) { return a *= s; }
    friend LaurentSymbol operator*(const LaurentSymbol& a, const LaurentSymbol& b);
    friend bool operator==(const LaurentSymbol& a, const LaurentSymbol& b) = default;

private:
    void prune();
    std::map<int, cplx> coeffs_;
};

inline cplx eval(const LaurentSymbol& sym, cplx k) { return sym(k); }
inline LaurentSymbol derivative_k(const LaurentSymbol& sym) { return sym.derivative(); }

/// Polynomial in E whose coefficients are Laurent polynomials in β:
/// f(β, E) = Σ_{n,j} a_{n,j} β^n E^j.
class BivariateLaurent {
public:
    using Key = std::pair<int, int>;  // (β power, E power)

    BivariateLaurent() = default;
    explicit BivariateLaurent(std::map<Key, cplx> coeffs);
    static BivariateLaurent from_symbol(const LaurentSymbol& s);
    /// The monomial −E.
    static BivariateLaurent minus_energy();

    cplx operator()(cplx beta, cplx energy) const;
    /// Specialize E, returning a Laurent polynomial in β.
    LaurentSymbol at_energy(cplx energy) const;

    /// k-derivative, i.e. iβ ∂/∂β.
    BivariateLaurent derivative_k() const;
    BivariateLaurent derivative_energy() const;

    int energy_degree() const;
    const std::map<Key, cplx>& coeffs() const { return coeffs_; }

    BivariateLaurent& operator+=(const BivariateLaurent& other);
    friend BivariateLaurent operator+(BivariateLaurent a, const BivariateLaurent& b) {
        return a += b;
    }
    friend BivariateLaurent operator-(const BivariateLaurent& a, const BivariateLaurent& b);
    friend BivariateLaurent operator*(const BivariateLaurent& a, const BivariateLaurent& b);

private:
    void prune();
    std::map<Key, cplx> coeffs_;
};

/// m × m matrix of Laurent symbols (multiband Bloch Hamiltonian).
class MultibandSymbol {
public:
    MultibandSymbol() = default;
    explicit MultibandSymbol(int bands);
    /// Implicit promotion of a single band.
    MultibandSymbol(const LaurentSymbol& single);  // NOLINT(google-explicit-constructor)

    int bands() const { return bands_; }
    const LaurentSymbol& entry(int row, int col) const;
    LaurentSymbol& entry(int row, int col);

    Eigen::MatrixXcd operator()(cplx k) const;
    Eigen::MatrixXcd at_beta(cplx beta) const;
    /// Eigenvalues of h(k), unsorted.
    Eigen::VectorXcd band_energies(cplx k) const;

    int max_power() const;
    int min_power() const;
    double scale() const;

    /// det[h(β) − E·I] as an exact bivariate polynomial (cofactor expansion).
    BivariateLaurent characteristic() const;
    /// Decoupled diagonal blocks, as lists of band indices.
    std::vector<std::vector<int>> blocks() const;
    MultibandSymbol sub_block(const std::vector<int>& indices) const;
    MultibandSymbol rescaled(double r) const;

    bool is_single_band() const { return bands_ == 1; }

private:
    int bands_ = 0;
    std::vector<LaurentSymbol> entries_;
};

/// det[h(β) − E·I] as a Laurent polynomial in β for fixed E.
LaurentSymbol char_poly(const MultibandSymbol& sym, cplx energy);

}  // namespace nonbloch
