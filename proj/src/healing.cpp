#include "nonbloch/healing.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

#include "nonbloch/error.hpp"
#include "nonbloch/lattice.hpp"
#include "nonbloch/propagator.hpp"
#include "nonbloch/roots.hpp"
#include "nonbloch/thimble.hpp"

namespace nonbloch {

namespace {

std::string describe(cplx e0) {
    std::ostringstream s;
    s << "E0=" << e0.real() << (e0.imag() < 0 ? "" : "+") << e0.imag() << "i";
    return s.str();
}

/// [[H + V, Vψ0], [0, E0]] acting on (ξ, a); V is dropped when `with_loss`
/// is false.
CsrMatrix augmented(const CsrMatrix& h, const Eigen::VectorXcd& psi0, cplx e0, double gamma,
                    int from, int to, bool with_loss) {
    const int n = h.size;
    CsrMatrix m;
    m.size = n + 1;
    m.row_ptr.push_back(0);
    for (int x = 0; x < n; ++x) {
        const bool lossy = with_loss && x >= from && x < to;
        bool diagonal = false;
        for (int j = h.row_ptr[static_cast<std::size_t>(x)]; j < h.row_ptr[static_cast<std::size_t>(x) + 1]; ++j) {
            cplx v = h.val[static_cast<std::size_t>(j)];
            const int c = h.col[static_cast<std::size_t>(j)];
            if (c == x && lossy) {
                v += cplx(0.0, -gamma);
                diagonal = true;
            }
            m.col.push_back(c);
            m.val.push_back(v);
        }
        if (lossy && !diagonal) {
            m.col.push_back(x);
            m.val.push_back(cplx(0.0, -gamma));
        }
        if (lossy) {
            m.col.push_back(n);
            m.val.push_back(cplx(0.0, -gamma) * psi0[x]);
        }
        m.row_ptr.push_back(static_cast<int>(m.col.size()));
    }
    m.col.push_back(n);
    m.val.push_back(e0);
    m.row_ptr.push_back(static_cast<int>(m.col.size()));
    return m;
}

template <class Stepper>
void propagate(Stepper stepper, const CsrMatrix& plain, const CsrMatrix& lossy, int n, double t_end,
               const HealingOptions& options, HealingReport& rep) {
    const int probe = std::max(0, n - 6);  // site L−5 counted from 1

    auto record = [&](double t) {
        const Eigen::VectorXcd z = stepper.scaled_state();
        const double xi = z.head(n).norm();
        const double a = std::abs(z[n]);
        const double ln_phi = stepper.log_scale() + std::log(a);
        const double ln_xi = xi > 0.0 ? stepper.log_scale() + std::log(xi)
                                      : -std::numeric_limits<double>::infinity();
        const double ln_eps = 2.0 * (ln_xi - ln_phi);
        rep.times.push_back(t);
        rep.log_norm_phi.push_back(ln_phi);
        rep.log_norm_xi.push_back(ln_xi);
        rep.log_epsilon.push_back(ln_eps);
        rep.epsilon.push_back(ln_eps > 700.0 ? std::numeric_limits<double>::max() : std::exp(ln_eps));
        if (t >= options.t2 && xi > 0.0) {
            const double peak = z.head(n).cwiseAbs().maxCoeff();
            return std::abs(z[probe]) / peak > 1e-8;
        }
        return false;
    };

    record(0.0);
    double t = 0.0;
    const int steps = static_cast<int>(std::ceil(t_end / options.dt - 1e-9));
    for (int j = 1; j <= steps; ++j) {
        const double target = std::min(j * options.dt, t_end);
        // Split the interval at the switching times.
        while (t < target - 1e-12) {
            double stop = target;
            if (t < options.t1 && options.t1 < stop) stop = options.t1;
            if (t < options.t2 && options.t2 < stop) stop = options.t2;
            const bool on = t >= options.t1 - 1e-12 && t < options.t2 - 1e-12;
            stepper.replace_matrix(on ? lossy : plain);
            stepper.advance(stop - t);
            t = stop;
        }
        if (record(target)) {
            std::ostringstream s;
            s << "finite-size horizon reached at t=" << target;
            rep.flags.push_back(s.str());
            break;
        }
    }
}

}  // namespace

int winding(const LaurentSymbol& sym, cplx e0, int samples) {
    double total = 0.0;
    cplx prev = sym(0.0) - e0;
    double closest = std::abs(prev);
    int best = 0;
    for (int j = 1; j <= samples; ++j) {
        const cplx cur = sym(two_pi * j / samples) - e0;
        if (std::abs(cur) < closest) {
            closest = std::abs(cur);
            best = j;
        }
        total += std::arg(cur / prev);
        prev = cur;
    }
    // the samples can straddle E0; polish the nearest one
    if (closest < 1e-2) {
        double lo = two_pi * (best - 1) / samples, hi = two_pi * (best + 1) / samples;
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        for (int it = 0; it < 80; ++it) {
            const double m1 = hi - g * (hi - lo), m2 = lo + g * (hi - lo);
            if (std::abs(sym(m1) - e0) < std::abs(sym(m2) - e0)) hi = m2; else lo = m1;
        }
        closest = std::min(closest, std::abs(sym(0.5 * (lo + hi)) - e0));
    }
    if (closest < 1e-6)
        throw ModuleError("healing", "winding", "E0 on PBC spectrum", describe(e0));
    const double w = total / two_pi;
    if (std::abs(w - std::round(w)) > 1e-3)
        throw ModuleError("healing", "winding", "winding not resolved; increase samples", describe(e0));
    return static_cast<int>(std::lround(w));
}

SibcState build_sibc(const LaurentSymbol& sym, cplx e0, int cells) {
    const int q = sym.q();
    if (cells <= 2 * std::max(sym.p(), q))
        throw std::invalid_argument("lattice shorter than hopping range");
    const int w = winding(sym, e0);
    if (w != 1)
        throw ModuleError("healing", "build_sibc", "winding of E0 is not 1",
                          describe(e0) + ", W=" + std::to_string(w));
    const auto roots = symbol_roots(sym, e0);
    const auto inside = static_cast<std::size_t>(q + 1);
    if (roots.size() < inside)
        throw ModuleError("healing", "build_sibc", "boundary system degenerate", describe(e0));
    if (roots.size() > inside && std::abs(std::abs(roots[inside - 1]) - std::abs(roots[inside])) < 1e-8)
        throw ModuleError("healing", "build_sibc", "E0 at GBZ boundary", describe(e0));

    SibcState st;
    st.e0 = e0;
    st.betas.assign(roots.begin(), roots.begin() + static_cast<std::ptrdiff_t>(inside));

    // Row x of (H − E0) on a truncated plane wave misses the hoppings that
    // would leave the chain on the left.
    Eigen::MatrixXcd b = Eigen::MatrixXcd::Zero(q, static_cast<int>(inside));
    for (int x = 0; x < q; ++x)
        for (std::size_t j = 0; j < inside; ++j)
            for (const auto& [n, c] : sym.coeffs())
                if (x + n < 0) b(x, static_cast<int>(j)) += c * std::pow(st.betas[j], x + n);

    Eigen::VectorXcd null(static_cast<int>(inside));
    if (q == 0) {
        null(0) = 1.0;
    } else {
        Eigen::JacobiSVD<Eigen::MatrixXcd> svd(b, Eigen::ComputeFullV);
        const auto& sv = svd.singularValues();
        if (sv(q - 1) < 1e-10 * std::max(sv(0), 1e-300))
            throw ModuleError("healing", "build_sibc", "boundary system degenerate", describe(e0));
        null = svd.matrixV().col(static_cast<int>(inside) - 1);
    }
    st.coeffs.assign(null.data(), null.data() + null.size());

    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(cells);
    for (int x = 0; x < cells; ++x)
        for (std::size_t j = 0; j < inside; ++j) psi[x] += st.coeffs[j] * std::pow(st.betas[j], x);
    psi /= psi.norm();
    st.psi0 = psi;

    const LatticeHamiltonian h = assemble(MultibandSymbol(sym), cells, Boundary::open);
    const Eigen::VectorXcd r = h.sparse().apply(psi) - e0 * psi;
    for (int x = 0; x <= cells - 9; ++x) st.residual = std::max(st.residual, std::abs(r[x]));
    return st;
}

HealingThreshold healing_threshold(const LaurentSymbol& sym) {
    HealingThreshold th;
    th.im_sd = classify(sym, 0.0, Contour::bz()).dominant().saddle.S.imag();
    th.lambda_tot = th.im_sd;
    if (const auto p = find_P(sym)) {
        th.im_p = p->P.imag();
        if (*th.im_p > th.im_sd) {
            th.lambda_tot = *th.im_p;
            th.moving_peak = true;
        }
    }
    return th;
}

double default_end_time(const LaurentSymbol& sym, int cells, const HealingThreshold& threshold,
                        const HealingOptions& options, std::vector<std::string>& flags) {
    const double tc = crossover_estimate(MultibandSymbol(sym), cells);
    double t_end = std::isfinite(tc) ? 0.5 * tc : 200.0;
    // Rounding errors seed the fastest-growing OBC mode; stop before they
    // can reach the size of the signal.
    SpectrumOptions so;
    so.vectors = false;
    const double top = spectrum(assemble(MultibandSymbol(sym), cells, Boundary::open), so).point_O.imag();
    const double gap = top - threshold.lambda_tot;
    const double noise = options.precision == Precision::extended ? 60.0 : 25.0;
    if (gap > 0.0 && noise / gap < t_end) {
        t_end = std::max(noise / gap, options.t2 + options.fit_delay + 20.0 * options.dt);
        flags.push_back("t_end limited by precision");
    }
    return t_end;
}

const char* to_string(Verdict v) { return v == Verdict::heals ? "heals" : "not_healing"; }

HealingReport run_healing(const LaurentSymbol& sym, const SibcState& state,
                          const HealingOptions& options, std::optional<HealingThreshold> threshold) {
    const int n = static_cast<int>(state.psi0.size());
    if (!(options.t1 < options.t2)) throw std::invalid_argument("need t1 < t2");
    if (options.loss_range < 0 || options.site_offset < 0 || options.site_offset + options.loss_range > n)
        throw std::invalid_argument("loss range outside the lattice");
    HealingReport rep;
    rep.e0 = state.e0;
    rep.sibc_residual = state.residual;
    rep.threshold = threshold ? *threshold : healing_threshold(sym);

    const double t_end = options.t_end > 0.0 ? options.t_end
                                             : default_end_time(sym, n, rep.threshold, options, rep.flags);
    if (!(options.t2 < t_end)) throw std::invalid_argument("need t2 < t_end");

    const LatticeHamiltonian h = assemble(MultibandSymbol(sym), n, Boundary::open);
    const int from = options.site_offset;
    const int to = options.site_offset + options.loss_range;
    const CsrMatrix plain = augmented(h.sparse(), state.psi0, state.e0, options.gamma, from, to, false);
    const CsrMatrix lossy = augmented(h.sparse(), state.psi0, state.e0, options.gamma, from, to, true);

    Eigen::VectorXcd z0 = Eigen::VectorXcd::Zero(n + 1);
    z0[n] = 1.0;
    if (options.precision == Precision::extended)
        propagate(TaylorStepper<DoubleDouble>(plain, z0, 1e-30), plain, lossy, n, t_end, options, rep);
    else
        propagate(TaylorStepper<double>(plain, z0, 1e-17), plain, lossy, n, t_end, options, rep);

    const double a = options.t2 + options.fit_delay;
    const double b = rep.times.back();
    // ε = ‖ξ‖²/‖φ‖² inherits the square of the norm prefactor.
    const double alpha = rep.threshold.moving_peak ? -0.5 : -3.0;
    if (std::all_of(rep.epsilon.begin(), rep.epsilon.end(), [](double e) { return e == 0.0; })) {
        // nothing was removed (gamma = 0): the state never left psi0
        rep.verdict = Verdict::heals;
        rep.flags.push_back("no deviation");
        return rep;
    }
    rep.slope = fit_log_series(rep.times, rep.log_epsilon, a, b, alpha);
    rep.slope_raw = fit_log_series(rep.times, rep.log_epsilon, a, b);
    rep.verdict = rep.slope.slope < 0.0 ? Verdict::heals : Verdict::not_healing;
    if (rep.slope.poor) rep.flags.push_back("poor fit");
    return rep;
}

HealingReport run_healing(const LaurentSymbol& sym, cplx e0, const HealingOptions& options) {
    return run_healing(sym, build_sibc(sym, e0, options.cells), options);
}

ThresholdScan scan_threshold(const LaurentSymbol& sym, double re_e0, int count, double step,
                             const HealingOptions& options, int threads) {
    if (count < 2 || step <= 0.0) throw std::invalid_argument("scan needs count ≥ 2 and step > 0");
    ThresholdScan scan;
    scan.threshold = healing_threshold(sym);
    scan.points.resize(static_cast<std::size_t>(count));
    for (int j = 0; j < count; ++j)
        scan.points[static_cast<std::size_t>(j)].e0 =
            cplx(re_e0, scan.threshold.lambda_tot + (j - 0.5 * (count - 1)) * step);

    HealingOptions run_options = options;
    if (run_options.t_end <= 0.0) {
        std::vector<std::string> ignored;
        run_options.t_end = default_end_time(sym, options.cells, scan.threshold, options, ignored);
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int j = next++; j < count; j = next++) {
            ScanPoint& pt = scan.points[static_cast<std::size_t>(j)];
            try {
                const auto st = build_sibc(sym, pt.e0, options.cells);
                const auto rep = run_healing(sym, st, run_options, scan.threshold);
                pt.verdict = rep.verdict;
                pt.slope = rep.slope.slope;
                if (!rep.flags.empty()) pt.note = rep.flags.front();
            } catch (const std::exception& e) {
                pt.note = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int i = 1; i < std::max(threads, 1); ++i) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();

    int transitions = 0;
    const ScanPoint* prev = nullptr;
    for (const auto& pt : scan.points) {
        if (!pt.verdict) continue;
        if (prev && *prev->verdict != *pt.verdict) {
            ++transitions;
            if (!scan.flip && *prev->verdict == Verdict::not_healing)
                scan.flip = 0.5 * (prev->e0.imag() + pt.e0.imag());
        }
        prev = &pt;
    }
    scan.monotone = transitions == 1 && scan.flip.has_value();
    return scan;
}

}  // namespace nonbloch
