#include "nonbloch/flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace nonbloch {

SymbolPhase::SymbolPhase(LaurentSymbol sym, double v)
    : h_(std::move(sym)), dh_(h_.derivative()), v_(v) {}

cplx SymbolPhase::value(cplx k) { return h_(k) - k * v_; }
cplx SymbolPhase::derivative(cplx k) { return dh_(k) - v_; }

BranchPhase::BranchPhase(const MultibandSymbol& sym, double v, cplx k0, cplx e0)
    : f_(sym.characteristic()), v_(v), last_k_(k0), last_e_(e0) {
    fk_ = f_.derivative_k();
    fe_ = f_.derivative_energy();
}

void BranchPhase::reset(cplx k, cplx value) {
    last_k_ = k;
    last_e_ = value + k * v_;
}

cplx BranchPhase::solve(cplx k) {
    const cplx beta = std::exp(I * k);
    // Predictor from dE/dk at the last point, then Newton on f(β, E) = 0.
    const cplx b0 = std::exp(I * last_k_);
    const cplx fe0 = fe_(b0, last_e_);
    cplx e = last_e_;
    if (fe0 != cplx(0.0)) e -= fk_(b0, last_e_) / fe0 * (k - last_k_);
    for (int it = 0; it < 30; ++it) {
        const cplx fe = fe_(beta, e);
        if (fe == cplx(0.0)) break;
        const cplx step = f_(beta, e) / fe;
        e -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(e))) break;
    }
    last_k_ = k;
    last_e_ = e;
    return e;
}

cplx BranchPhase::value(cplx k) { return solve(k) - k * v_; }

cplx BranchPhase::derivative(cplx k) {
    const cplx e = solve(k);
    const cplx beta = std::exp(I * k);
    return -fk_(beta, e) / fe_(beta, e) - v_;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::window_exit: return "window_exit";
        case Termination::divergence: return "divergence";
        case Termination::step_limit: return "step_limit";
        case Termination::near_saddle: return "near_saddle";
        case Termination::im_limit: return "im_limit";
    }
    return "unknown";
}

namespace {

// Dormand–Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

FlowPath integrate_flow(Phase& phase, FlowKind kind, int branch, cplx start, double s0,
                        const FlowOptions& options,
                        const std::function<bool(cplx, cplx, Termination&)>& stop) {
    FlowPath path;
    path.kind = kind;
    path.branch = branch;
    const double sign = kind == FlowKind::ascent ? 1.0 : -1.0;
    bool bad = false;
    auto field = [&](cplx k) -> cplx {
        const cplx d = phase.derivative(k);
        const double m = std::abs(d);
        if (!(m > 0.0) || !std::isfinite(m)) {
            bad = true;
            return 0.0;
        }
        return sign * I * std::conj(d) / m;
    };

    cplx k = start;
    double s = s0;
    cplx f1 = field(k);
    path.s.push_back(s);
    path.k.push_back(k);
    path.tangent.push_back(f1);
    if (bad) {
        path.termination = Termination::divergence;
        return path;
    }
    double h = std::min(options.max_step, 1e-3);
    for (int attempts = 0;; ++attempts) {
        if (s - s0 >= options.arc_limit || attempts >= options.max_attempts) {
            path.termination = Termination::step_limit;
            break;
        }
        h = std::min({h, options.max_step, s0 + options.arc_limit - s + 1e-12});
        const cplx f2 = field(k + h * (a21 * f1));
        const cplx f3 = field(k + h * (a31 * f1 + a32 * f2));
        const cplx f4 = field(k + h * (a41 * f1 + a42 * f2 + a43 * f3));
        const cplx f5 = field(k + h * (a51 * f1 + a52 * f2 + a53 * f3 + a54 * f4));
        const cplx f6 = field(k + h * (a61 * f1 + a62 * f2 + a63 * f3 + a64 * f4 + a65 * f5));
        const cplx k_new = k + h * (b1 * f1 + b3 * f3 + b4 * f4 + b5 * f5 + b6 * f6);
        const cplx f7 = field(k_new);
        if (bad) {
            path.termination = Termination::divergence;
            break;
        }
        const double err =
            std::abs(h * (e1 * f1 + e3 * f3 + e4 * f4 + e5 * f5 + e6 * f6 + e7 * f7));
        const double allowed = options.tolerance * h;
        if (err > allowed && h > 1e-9) {
            h *= std::max(0.2, 0.9 * std::pow(allowed / err, 0.2));
            // Rewind the continuation state of stateful phases.
            phase.reset(k, phase.value(k));
            f1 = field(k);
            continue;
        }
        k = k_new;
        s += h;
        f1 = f7;
        path.s.push_back(s);
        path.k.push_back(k);
        path.tangent.push_back(f1);
        if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) {
            path.termination = Termination::divergence;
            break;
        }
        Termination why = Termination::step_limit;
        if (stop(k, phase.value(k), why)) {
            path.termination = why;
            break;
        }
        h *= err > 0.0 ? std::min(5.0, 0.9 * std::pow(allowed / err, 0.2)) : 5.0;
    }
    return path;
}

namespace {

inline void hermite_basis(double u, double& h00, double& h10, double& h01, double& h11) {
    const double u2 = u * u;
    const double u3 = u2 * u;
    h00 = 2 * u3 - 3 * u2 + 1;
    h10 = u3 - 2 * u2 + u;
    h01 = -2 * u3 + 3 * u2;
    h11 = u3 - u2;
}

}  // namespace

cplx JoinedCurve::at(std::size_t j, double sv) const {
    const double d = s[j + 1] - s[j];
    const double u = (sv - s[j]) / d;
    double h00, h10, h01, h11;
    hermite_basis(u, h00, h10, h01, h11);
    return h00 * k[j] + h10 * d * tangent[j] + h01 * k[j + 1] + h11 * d * tangent[j + 1];
}

cplx JoinedCurve::slope(std::size_t j, double sv) const {
    const double d = s[j + 1] - s[j];
    const double u = (sv - s[j]) / d;
    const double u2 = u * u;
    const double d00 = (6 * u2 - 6 * u) / d;
    const double d10 = 3 * u2 - 4 * u + 1;
    const double d01 = (-6 * u2 + 6 * u) / d;
    const double d11 = 3 * u2 - 2 * u;
    return d00 * k[j] + d10 * tangent[j] + d01 * k[j + 1] + d11 * tangent[j + 1];
}

cplx JoinedCurve::integrate(const std::function<cplx(cplx)>& g) const {
    static constexpr std::array<double, 8> x = {
        -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
        0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
    static constexpr std::array<double, 8> w = {
        0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
        0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
    cplx total = 0.0;
    for (std::size_t j = 0; j + 1 < s.size(); ++j) {
        const double d = s[j + 1] - s[j];
        if (d <= 0.0) continue;
        const double mid = 0.5 * (s[j] + s[j + 1]);
        cplx seg = 0.0;
        for (std::size_t q = 0; q < x.size(); ++q) {
            const double sv = mid + 0.5 * d * x[q];
            seg += w[q] * g(at(j, sv)) * slope(j, sv);
        }
        total += 0.5 * d * seg;
    }
    return total;
}

JoinedCurve join(const FlowPath& minus, const FlowPath& plus) {
    JoinedCurve c;
    for (std::size_t i = minus.s.size(); i-- > 0;) {
        c.s.push_back(-minus.s[i]);
        c.k.push_back(minus.k[i]);
        c.tangent.push_back(-minus.tangent[i]);
    }
    for (std::size_t i = 0; i < plus.s.size(); ++i) {
        c.s.push_back(plus.s[i]);
        c.k.push_back(plus.k[i]);
        c.tangent.push_back(plus.tangent[i]);
    }
    return c;
}

}  // namespace nonbloch
