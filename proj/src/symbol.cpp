#include "nonbloch/symbol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace nonbloch {

double wrap_momentum(double k_r) {
    double w = std::fmod(k_r, two_pi);
    if (w < 0.0) w += two_pi;
    if (w >= two_pi) w -= two_pi;
    return w;
}

LaurentSymbol::LaurentSymbol(std::map<int, cplx> coeffs) : coeffs_(std::move(coeffs)) {
    for (const auto& [n, c] : coeffs_) {
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw std::invalid_argument("Laurent coefficient for power " + std::to_string(n) +
                                        " is not finite");
    }
    prune();
}

LaurentSymbol LaurentSymbol::from_hoppings(cplx t1_left, cplx t1_right, cplx t2_left,
                                           cplx t2_right, double kappa) {
    return LaurentSymbol({{1, t1_left},
                          {-1, t1_right},
                          {2, t2_left},
                          {-2, t2_right},
                          {0, cplx(0.0, -kappa)}});
}

void LaurentSymbol::prune() {
    std::erase_if(coeffs_, [](const auto& kv) { return kv.second == cplx(0.0, 0.0); });
}

cplx LaurentSymbol::operator()(cplx k) const {
    cplx sum = 0.0;
    for (const auto& [n, c] : coeffs_) sum += c * std::exp(I * static_cast<double>(n) * k);
    return sum;
}

cplx LaurentSymbol::at_beta(cplx beta) const {
    cplx sum = 0.0;
    for (const auto& [n, c] : coeffs_) sum += c * std::pow(beta, n);
    return sum;
}

int LaurentSymbol::max_power() const { return coeffs_.empty() ? 0 : coeffs_.rbegin()->first; }
int LaurentSymbol::min_power() const { return coeffs_.empty() ? 0 : coeffs_.begin()->first; }

double LaurentSymbol::scale() const {
    double s = 0.0;
    for (const auto& [n, c] : coeffs_) s = std::max(s, std::abs(c));
    return s;
}

cplx LaurentSymbol::coeff(int n) const {
    auto it = coeffs_.find(n);
    return it == coeffs_.end() ? cplx(0.0) : it->second;
}

LaurentSymbol LaurentSymbol::derivative() const {
    std::map<int, cplx> out;
    for (const auto& [n, c] : coeffs_)
        if (n != 0) out[n] = I * static_cast<double>(n) * c;
    return LaurentSymbol(std::move(out));
}

std::vector<cplx> LaurentSymbol::cleared_polynomial(cplx energy) const {
    const int lo = std::min(0, min_power());
    const int hi = std::max(0, max_power());
    std::vector<cplx> poly(static_cast<std::size_t>(hi - lo + 1), cplx(0.0));
    for (const auto& [n, c] : coeffs_) poly[static_cast<std::size_t>(n - lo)] += c;
    poly[static_cast<std::size_t>(-lo)] -= energy;
    return poly;
}

LaurentSymbol LaurentSymbol::rescaled(double r) const {
    std::map<int, cplx> out;
    for (const auto& [n, c] : coeffs_) out[n] = c * std::pow(r, n);
    return LaurentSymbol(std::move(out));
}

LaurentSymbol& LaurentSymbol::operator+=(const LaurentSymbol& other) {
    for (const auto& [n, c] : other.coeffs_) coeffs_[n] += c;
    prune();
    return *this;
}

LaurentSymbol& LaurentSymbol::operator-=(const LaurentSymbol& other) {
    for (const auto& [n, c] : other.coeffs_) coeffs_[n] -= c;
    prune();
    return *this;
}

LaurentSymbol& LaurentSymbol::operator*=(cplx s) {
    for (auto& [n, c] : coeffs_) c *= s;
    prune();
    return *this;
}

LaurentSymbol operator*(const LaurentSymbol& a, const LaurentSymbol& b) {
    std::map<int, cplx> out;
    for (const auto& [n, c] : a.coeffs_)
        for (const auto& [m, d] : b.coeffs_) out[n + m] += c * d;
    return LaurentSymbol(std::move(out));
}

// ---------------------------------------------------------------------------

BivariateLaurent::BivariateLaurent(std::map<Key, cplx> coeffs) : coeffs_(std::move(coeffs)) {
    prune();
}

BivariateLaurent BivariateLaurent::from_symbol(const LaurentSymbol& s) {
    std::map<Key, cplx> out;
    for (const auto& [n, c] : s.coeffs()) out[{n, 0}] = c;
    return BivariateLaurent(std::move(out));
}

BivariateLaurent BivariateLaurent::minus_energy() {
    return BivariateLaurent(std::map<Key, cplx>{{Key{0, 1}, cplx(-1.0)}});
}

void BivariateLaurent::prune() {
    std::erase_if(coeffs_, [](const auto& kv) { return kv.second == cplx(0.0, 0.0); });
}

cplx BivariateLaurent::operator()(cplx beta, cplx energy) const {
    cplx sum = 0.0;
    for (const auto& [key, c] : coeffs_)
        sum += c * std::pow(beta, key.first) * std::pow(energy, key.second);
    return sum;
}

LaurentSymbol BivariateLaurent::at_energy(cplx energy) const {
    std::map<int, cplx> out;
    for (const auto& [key, c] : coeffs_) out[key.first] += c * std::pow(energy, key.second);
    return LaurentSymbol(std::move(out));
}

BivariateLaurent BivariateLaurent::derivative_k() const {
    std::map<Key, cplx> out;
    for (const auto& [key, c] : coeffs_)
        if (key.first != 0) out[key] = I * static_cast<double>(key.first) * c;
    return BivariateLaurent(std::move(out));
}

BivariateLaurent BivariateLaurent::derivative_energy() const {
    std::map<Key, cplx> out;
    for (const auto& [key, c] : coeffs_)
        if (key.second != 0) out[{key.first, key.second - 1}] = static_cast<double>(key.second) * c;
    return BivariateLaurent(std::move(out));
}

int BivariateLaurent::energy_degree() const {
    int d = 0;
    for (const auto& [key, c] : coeffs_) d = std::max(d, key.second);
    return d;
}

BivariateLaurent& BivariateLaurent::operator+=(const BivariateLaurent& other) {
    for (const auto& [key, c] : other.coeffs_) coeffs_[key] += c;
    prune();
    return *this;
}

BivariateLaurent operator-(const BivariateLaurent& a, const BivariateLaurent& b) {
    auto out = a.coeffs_;
    for (const auto& [key, c] : b.coeffs_) out[key] -= c;
    return BivariateLaurent(std::move(out));
}

BivariateLaurent operator*(const BivariateLaurent& a, const BivariateLaurent& b) {
    std::map<BivariateLaurent::Key, cplx> out;
    for (const auto& [ka, ca] : a.coeffs_)
        for (const auto& [kb, cb] : b.coeffs_)
            out[{ka.first + kb.first, ka.second + kb.second}] += ca * cb;
    return BivariateLaurent(std::move(out));
}

// ---------------------------------------------------------------------------

MultibandSymbol::MultibandSymbol(int bands)
    : bands_(bands), entries_(static_cast<std::size_t>(bands * bands)) {
    if (bands < 1) throw std::invalid_argument("multiband symbol needs at least one band");
}

MultibandSymbol::MultibandSymbol(const LaurentSymbol& single) : MultibandSymbol(1) {
    entries_[0] = single;
}

const LaurentSymbol& MultibandSymbol::entry(int row, int col) const {
    return entries_.at(static_cast<std::size_t>(row * bands_ + col));
}

LaurentSymbol& MultibandSymbol::entry(int row, int col) {
    return entries_.at(static_cast<std::size_t>(row * bands_ + col));
}

Eigen::MatrixXcd MultibandSymbol::operator()(cplx k) const {
    Eigen::MatrixXcd m(bands_, bands_);
    for (int r = 0; r < bands_; ++r)
        for (int c = 0; c < bands_; ++c) m(r, c) = entry(r, c)(k);
    return m;
}

Eigen::MatrixXcd MultibandSymbol::at_beta(cplx beta) const {
    Eigen::MatrixXcd m(bands_, bands_);
    for (int r = 0; r < bands_; ++r)
        for (int c = 0; c < bands_; ++c) m(r, c) = entry(r, c).at_beta(beta);
    return m;
}

Eigen::VectorXcd MultibandSymbol::band_energies(cplx k) const {
    const Eigen::MatrixXcd m = (*this)(k);
    if (bands_ == 1) return m.diagonal();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
    return solver.eigenvalues();
}

int MultibandSymbol::max_power() const {
    int p = 0;
    for (const auto& e : entries_)
        if (!e.is_zero()) p = std::max(p, e.max_power());
    return p;
}

int MultibandSymbol::min_power() const {
    int q = 0;
    for (const auto& e : entries_)
        if (!e.is_zero()) q = std::min(q, e.min_power());
    return q;
}

double MultibandSymbol::scale() const {
    double s = 0.0;
    for (const auto& e : entries_) s = std::max(s, e.scale());
    return s;
}

namespace {

BivariateLaurent cofactor_det(const std::vector<std::vector<BivariateLaurent>>& m) {
    const std::size_t n = m.size();
    if (n == 1) return m[0][0];
    BivariateLaurent det;
    for (std::size_t col = 0; col < n; ++col) {
        if (m[0][col].coeffs().empty()) continue;
        std::vector<std::vector<BivariateLaurent>> minor;
        for (std::size_t r = 1; r < n; ++r) {
            std::vector<BivariateLaurent> row;
            for (std::size_t c = 0; c < n; ++c)
                if (c != col) row.push_back(m[r][c]);
            minor.push_back(std::move(row));
        }
        const BivariateLaurent term = m[0][col] * cofactor_det(minor);
        if (col % 2 == 0)
            det += term;
        else
            det = det - term;
    }
    return det;
}

}  // namespace

BivariateLaurent MultibandSymbol::characteristic() const {
    if (bands_ > 4)
        throw std::invalid_argument("characteristic polynomial limited to at most 4 bands");
    std::vector<std::vector<BivariateLaurent>> m(static_cast<std::size_t>(bands_));
    for (int r = 0; r < bands_; ++r) {
        for (int c = 0; c < bands_; ++c) {
            BivariateLaurent e = BivariateLaurent::from_symbol(entry(r, c));
            if (r == c) e += BivariateLaurent::minus_energy();
            m[static_cast<std::size_t>(r)].push_back(std::move(e));
        }
    }
    return cofactor_det(m);
}

std::vector<std::vector<int>> MultibandSymbol::blocks() const {
    std::vector<int> parent(static_cast<std::size_t>(bands_));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[static_cast<std::size_t>(a)] != a) a = parent[static_cast<std::size_t>(a)];
        return a;
    };
    for (int r = 0; r < bands_; ++r)
        for (int c = 0; c < bands_; ++c)
            if (r != c && !entry(r, c).is_zero())
                parent[static_cast<std::size_t>(find(r))] = find(c);
    std::map<int, std::vector<int>> groups;
    for (int b = 0; b < bands_; ++b) groups[find(b)].push_back(b);
    std::vector<std::vector<int>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
}

MultibandSymbol MultibandSymbol::sub_block(const std::vector<int>& indices) const {
    MultibandSymbol out(static_cast<int>(indices.size()));
    for (std::size_t r = 0; r < indices.size(); ++r)
        for (std::size_t c = 0; c < indices.size(); ++c)
            out.entry(static_cast<int>(r), static_cast<int>(c)) = entry(indices[r], indices[c]);
    return out;
}

MultibandSymbol MultibandSymbol::rescaled(double r) const {
    MultibandSymbol out(bands_);
    for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] = entries_[i].rescaled(r);
    return out;
}

LaurentSymbol char_poly(const MultibandSymbol& sym, cplx energy) {
    return sym.characteristic().at_energy(energy);
}

}  // namespace nonbloch
