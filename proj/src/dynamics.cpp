#include "nonbloch/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "nonbloch/error.hpp"

namespace nonbloch {

namespace {

/// Local maxima of z, and whether they belong to a genuinely oscillating
/// series (dips between maxima deeper than `depth`).
std::vector<std::size_t> oscillation_peaks(const std::vector<double>& z, double depth) {
    std::vector<std::size_t> peaks;
    for (std::size_t i = 1; i + 1 < z.size(); ++i)
        if (z[i] > z[i - 1] && z[i] >= z[i + 1]) peaks.push_back(i);
    if (peaks.size() < 3) return {};
    int deep = 0;
    for (std::size_t j = 0; j + 1 < peaks.size(); ++j) {
        const double lo = *std::min_element(z.begin() + static_cast<std::ptrdiff_t>(peaks[j]),
                                            z.begin() + static_cast<std::ptrdiff_t>(peaks[j + 1]));
        if (std::min(z[peaks[j]], z[peaks[j + 1]]) - lo > depth) ++deep;
    }
    if (2 * deep < static_cast<int>(peaks.size()) - 1) return {};
    return peaks;
}

LineFit least_squares(const std::vector<double>& t, const std::vector<double>& z) {
    const auto n = static_cast<double>(t.size());
    const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
    const double mz = std::accumulate(z.begin(), z.end(), 0.0) / n;
    double stt = 0.0, stz = 0.0, szz = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        stt += (t[i] - mt) * (t[i] - mt);
        stz += (t[i] - mt) * (z[i] - mz);
        szz += (z[i] - mz) * (z[i] - mz);
    }
    LineFit f;
    f.slope = stt > 0.0 ? stz / stt : 0.0;
    f.intercept = mz - f.slope * mt;
    double res = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = z[i] - f.at(t[i]);
        res += r * r;
    }
    f.r2 = szz > 0.0 ? 1.0 - res / szz : 1.0;
    f.samples = static_cast<int>(t.size());
    return f;
}

}  // namespace

LineFit fit_log_series(const std::vector<double>& t, const std::vector<double>& y, double a,
                       double b, double alpha) {
    std::vector<double> tt;
    std::vector<double> zz;
    for (std::size_t i = 0; i < t.size() && i < y.size(); ++i) {
        if (t[i] < a || t[i] > b || !std::isfinite(y[i])) continue;
        if (alpha != 0.0 && t[i] <= 0.0) continue;
        tt.push_back(t[i]);
        zz.push_back(y[i] - alpha * std::log(std::max(t[i], 1e-300)));
    }
    if (tt.size() < 10) {
        std::ostringstream params;
        params << "window=[" << a << "," << b << "], samples=" << tt.size();
        throw ModuleError("dynamics", "fit_exponents", "insufficient trace", params.str());
    }
    const auto peaks = oscillation_peaks(zz, 0.1);
    LineFit f;
    if (!peaks.empty()) {
        std::vector<double> pt;
        std::vector<double> pz;
        for (auto i : peaks) {
            pt.push_back(tt[i]);
            pz.push_back(zz[i]);
        }
        f = least_squares(pt, pz);
        f.envelope = true;
    } else {
        f = least_squares(tt, zz);
    }
    f.t_begin = a;
    f.t_end = b;
    f.prefactor = alpha;
    f.poor = f.r2 < 0.99;
    return f;
}

BulkVelocities bulk_velocities(const MultibandSymbol& sym, int grid) {
    BulkVelocities out;
    out.v_plus = -std::numeric_limits<double>::infinity();
    out.v_minus = std::numeric_limits<double>::infinity();
    if (sym.bands() == 1) {
        const LaurentSymbol& h = sym.entry(0, 0);
        const LaurentSymbol d1 = h.derivative();
        const LaurentSymbol d2 = d1.derivative();
        const LaurentSymbol d3 = d2.derivative();
        auto polish = [&](double k) {
            for (int it = 0; it < 50; ++it) {
                const double g = d2(k).real();
                const double gp = d3(k).real();
                if (gp == 0.0) break;
                const double step = g / gp;
                if (std::abs(step) > 0.1) break;
                k -= step;
                if (std::abs(step) < 1e-15) break;
            }
            return k;
        };
        double kp = 0.0, km = 0.0;
        for (int j = 0; j < grid; ++j) {
            const double k = two_pi * j / grid;
            const double v = d1(k).real();
            if (v > out.v_plus) {
                out.v_plus = v;
                kp = k;
            }
            if (v < out.v_minus) {
                out.v_minus = v;
                km = k;
            }
        }
        kp = polish(kp);
        km = polish(km);
        const double vp = d1(kp).real();
        const double vm = d1(km).real();
        if (vp > out.v_plus) out.v_plus = vp, out.k_plus = wrap_momentum(kp);
        else out.k_plus = two_pi * std::round(kp / two_pi * grid) / grid;
        if (vm < out.v_minus) out.v_minus = vm, out.k_minus = wrap_momentum(km);
        else out.k_minus = two_pi * std::round(km / two_pi * grid) / grid;
        out.k_plus = wrap_momentum(out.k_plus);
        out.k_minus = wrap_momentum(out.k_minus);
        return out;
    }
    // Multiband: central differences of the continuity-tracked bands.
    const auto curve = pbc_curve(sym, grid);
    const double dk = two_pi / grid;
    for (int j = 0; j < grid; ++j) {
        const auto& prev = curve[static_cast<std::size_t>((j + grid - 1) % grid)].energies;
        const auto& next = curve[static_cast<std::size_t>((j + 1) % grid)].energies;
        for (std::size_t b = 0; b < prev.size(); ++b) {
            const double v = (next[b].real() - prev[b].real()) / (2.0 * dk);
            if (v > out.v_plus) {
                out.v_plus = v;
                out.k_plus = j * dk;
            }
            if (v < out.v_minus) {
                out.v_minus = v;
                out.k_minus = j * dk;
            }
        }
    }
    return out;
}

double crossover_theory(const BulkVelocities& v, int cells) {
    const double a = std::abs(v.v_plus);
    const double b = std::abs(v.v_minus);
    if (a == 0.0 || b == 0.0) return std::numeric_limits<double>::infinity();
    const double vc = 2.0 * a * b / (a + b);
    return 2.0 * (cells - 1) / vc;
}

double crossover_estimate(const MultibandSymbol& sym, int cells) {
    return crossover_theory(bulk_velocities(sym), cells);
}

std::optional<PointP> find_P(const LaurentSymbol& sym, int grid) {
    const LaurentSymbol d1 = sym.derivative();
    const LaurentSymbol d2 = d1.derivative();
    std::vector<double> im(static_cast<std::size_t>(grid));
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (int j = 0; j < grid; ++j) {
        im[static_cast<std::size_t>(j)] = sym(two_pi * j / grid).imag();
        lo = std::min(lo, im[static_cast<std::size_t>(j)]);
        hi = std::max(hi, im[static_cast<std::size_t>(j)]);
    }
    if (hi - lo < 1e-12 * std::max(1.0, sym.scale())) return std::nullopt;
    std::optional<PointP> best;
    for (int j = 0; j < grid; ++j) {
        const double prev = im[static_cast<std::size_t>((j + grid - 1) % grid)];
        const double cur = im[static_cast<std::size_t>(j)];
        const double next = im[static_cast<std::size_t>((j + 1) % grid)];
        if (!(cur > prev && cur >= next)) continue;
        double k = two_pi * j / grid;
        for (int it = 0; it < 50; ++it) {
            const double g = d1(k).imag();
            const double gp = d2(k).imag();
            if (gp == 0.0) break;
            const double step = g / gp;
            if (std::abs(step) > two_pi / grid) break;
            k -= step;
            if (std::abs(step) < 1e-15) break;
        }
        const double v = d1(k).real();
        if (v <= 1e-12) continue;
        PointP p{wrap_momentum(k), sym(k), v};
        if (!best || p.P.imag() > best->P.imag()) best = p;
    }
    return best;
}

double lambda_at(const LaurentSymbol& sym, double v) {
    FlowOptions opts;
    return classify(sym, v, Contour::bz(), opts).dominant().saddle.S.imag();
}

LambdaCurve lambda_of_v(const LaurentSymbol& sym, const std::vector<double>& v_grid) {
    if (v_grid.empty()) throw std::invalid_argument("empty velocity grid");
    for (std::size_t i = 0; i < v_grid.size(); ++i) {
        if (v_grid[i] < 0.0) throw std::invalid_argument("velocity grid must be non-negative");
        if (i > 0 && v_grid[i] <= v_grid[i - 1]) throw std::invalid_argument("velocity grid must be sorted");
    }
    LambdaCurve out;
    for (double v : v_grid) {
        try {
            const auto cls = classify(sym, v, Contour::bz());
            out.samples.push_back({v, cls.dominant().saddle.S.imag(), cls.dominant().saddle, false});
        } catch (const ModuleError& e) {
            throw ModuleError(e.module(), "lambda_of_v", e.what(), "v=" + std::to_string(v));
        }
    }
    const std::size_t n = out.samples.size();
    std::size_t arg = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double l = out.samples[i].lambda;
        const bool left = i == 0 || l >= out.samples[i - 1].lambda;
        const bool right = i + 1 == n || l >= out.samples[i + 1].lambda;
        out.samples[i].local_max = left && right;
        if (l > out.samples[arg].lambda) arg = i;
    }
    // Golden-section refinement between the neighbours of the grid maximum.
    double a = v_grid[arg > 0 ? arg - 1 : 0];
    double b = v_grid[arg + 1 < n ? arg + 1 : n - 1];
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = lambda_at(sym, c);
    double fd = lambda_at(sym, d);
    while (b - a > 1e-6) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = lambda_at(sym, c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = lambda_at(sym, d);
        }
    }
    double v_peak = 0.5 * (a + b);
    double l_peak = lambda_at(sym, v_peak);
    // The search interval may end at the grid boundary.
    for (double edge : {v_grid[arg > 0 ? arg - 1 : 0], v_grid[arg]}) {
        const double l = lambda_at(sym, edge);
        if (l > l_peak) {
            l_peak = l;
            v_peak = edge;
        }
    }
    out.v_peak = v_peak;
    out.lambda_peak = l_peak;
    return out;
}

std::vector<int> peak_sites(const EvolutionTrace& trace) {
    std::vector<int> out;
    for (const auto& p : trace.log_profiles)
        out.push_back(static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()));
    return out;
}

CrossoverTimes crossover_time(const MultibandSymbol& sym, int cells, const EvolutionTrace& trace,
                              const SpectrumSet& spectrum, double long_from, double search_until) {
    CrossoverTimes out;
    out.t_theo = crossover_estimate(sym, cells);
    const double mu = spectrum.point_O.imag();
    std::vector<double> resid;
    std::vector<double> rt;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        if (trace.times[i] < long_from || !std::isfinite(trace.log_amp_x0[i])) continue;
        rt.push_back(trace.times[i]);
        resid.push_back(trace.log_amp_x0[i] - mu * trace.times[i]);
    }
    if (resid.empty()) return out;
    const auto peaks = oscillation_peaks(resid, 0.1);
    if (!peaks.empty()) {
        double s = 0.0;
        for (auto i : peaks) s += resid[i];
        out.c2 = s / static_cast<double>(peaks.size());
    } else {
        out.c2 = std::accumulate(resid.begin(), resid.end(), 0.0) / static_cast<double>(resid.size());
    }
    const auto& y = trace.log_amp_x0;
    std::size_t imin = 0;
    for (std::size_t i = 0; i < y.size() && trace.times[i] <= search_until; ++i)
        if (y[i] < y[imin]) imin = i;
    for (std::size_t i = imin; i + 1 < y.size(); ++i) {
        const double g0 = y[i] - (mu * trace.times[i] + out.c2);
        const double g1 = y[i + 1] - (mu * trace.times[i + 1] + out.c2);
        if (g0 < 0.0 && g1 >= 0.0) {
            const double f = g0 / (g0 - g1);
            out.t_num = trace.times[i] + f * (trace.times[i + 1] - trace.times[i]);
            break;
        }
    }
    return out;
}

namespace {

EvolutionTrace merge_traces(const EvolutionTrace& a, const EvolutionTrace& b) {
    EvolutionTrace out = a;
    const double end = a.times.empty() ? -1.0 : a.times.back();
    for (std::size_t i = 0; i < b.times.size(); ++i) {
        if (b.times[i] <= end + 1e-12) continue;
        out.times.push_back(b.times[i]);
        out.log_amp_x0.push_back(b.log_amp_x0[i]);
        out.log_norm.push_back(b.log_norm[i]);
    }
    return out;
}

/// Smallest positive gap between Im(O) and the next distinct level below it.
double top_gap(const SpectrumSet& spec) {
    const double top = spec.point_O.imag();
    double next = -std::numeric_limits<double>::infinity();
    for (const auto& e : spec.obc)
        if (e.energy.imag() < top - 1e-7) next = std::max(next, e.energy.imag());
    return std::isfinite(next) ? top - next : 1.0;
}

}  // namespace

LyapunovRun analyze_lyapunov(const MultibandSymbol& sym, const LyapunovOptions& options) {
    LyapunovRun run;
    LyapunovReport& rep = run.report;
    const LatticeHamiltonian h = assemble(sym, options.cells, Boundary::open);
    SpectrumOptions so;
    so.vectors = false;
    run.spectrum = spectrum(h, so);
    rep.point_O = run.spectrum.point_O;
    rep.mu_pred = rep.point_O.imag();

    const bool single = sym.bands() == 1;
    try {
        run.classification = single ? classify(sym.entry(0, 0), 0.0, Contour::bz())
                                    : classify_multiband(sym, 0.0);
        rep.lambda_pred = run.classification.dominant().saddle.S.imag();
        if (run.classification.non_generic) rep.flags.push_back("non-generic classification");
    } catch (const ModuleError& e) {
        rep.lambda_pred = std::numeric_limits<double>::quiet_NaN();
        // no hopping at all: every site just decays at Im c_0
        if (single && sym.entry(0, 0).p() == 0 && sym.entry(0, 0).q() == 0)
            rep.lambda_pred = sym.entry(0, 0).coeff(0).imag();
        rep.flags.push_back(std::string("no saddle prediction: ") + e.what());
    }
    if (single) {
        rep.P = find_P(sym.entry(0, 0));
        if (!rep.P) rep.flags.push_back("P: none");
    }
    rep.lambda_tot_pred = rep.lambda_pred;
    if (rep.P && !(rep.P->P.imag() <= rep.lambda_pred)) rep.lambda_tot_pred = rep.P->P.imag();
    if (!single) {
        rep.lambda_tot_pred = std::numeric_limits<double>::quiet_NaN();
        rep.flags.push_back("lambda_tot prediction needs a single band");
    }

    rep.t_c_theo = crossover_estimate(sym, options.cells);
    const double tc = std::isfinite(rep.t_c_theo) ? rep.t_c_theo : 100.0;
    if (!std::isfinite(rep.t_c_theo)) rep.flags.push_back("t_c infinite (vanishing bulk velocity)");
    const double dt = options.dt > 0.0 ? options.dt : std::min(0.02, tc / 2000.0);

    const int n = h.dimension();
    Eigen::VectorXcd psi0 = options.psi0 ? *options.psi0 : delta_state(n, options.x0);
    EvolveOptions eo;
    eo.precision = Precision::extended;
    eo.snapshot_stride = std::max(1, static_cast<int>(std::lround(options.snapshot_every / dt)));
    const int short_steps = static_cast<int>(std::ceil(options.short_span * tc / dt));
    run.short_trace = evolve(h, psi0, options.x0, dt, short_steps, eo);

    double long_time = options.long_time;
    if (long_time <= 0.0) long_time = std::clamp(40.0 / top_gap(run.spectrum), 3.0 * tc, 1e5);
    long_time = std::max(long_time, 3.0 * tc);
    EvolveOptions lo;
    lo.precision = Precision::standard;
    const int long_steps = static_cast<int>(std::ceil(long_time / options.long_dt));
    run.long_trace = evolve(h, psi0, options.x0, options.long_dt, long_steps, lo);

    // Short regime. At the edge the image of the bulk saddle cancels the
    // t^{-1/2} term and leaves t^{-3/2}; a peak moving into the bulk carries
    // a Gaussian of width √t, so its norm goes as t^{-1/4}.
    // Without a saddle (flat band) the amplitude is a pure exponential. A
    // dominant saddle on the real axis spreads the norm instead of
    // localizing it, which removes the pinned-peak factor.
    const bool asymptotic = !run.classification.saddles.empty() && std::isfinite(rep.lambda_pred);
    const bool moving_peak = rep.P && rep.P->P.imag() > rep.lambda_pred;
    const bool localized = asymptotic && std::abs(run.classification.dominant().saddle.k.im()) > 1e-9;
    const bool at_edge = asymptotic && !options.psi0 && options.x0 < sym.max_power() * sym.bands();
    const double la = options.lambda_from * tc;
    const double lb = options.lambda_to * tc;
    const auto& st = run.short_trace;
    rep.lambda_fit = fit_log_series(st.times, st.log_amp_x0, la, lb, asymptotic ? (at_edge ? -1.5 : -0.5) : 0.0);
    rep.lambda_tot_fit =
        fit_log_series(st.times, st.log_norm, la, lb, moving_peak ? -0.25 : (localized ? -1.5 : 0.0));
    rep.lambda_raw = fit_log_series(st.times, st.log_amp_x0, la, lb);
    rep.lambda_tot_raw = fit_log_series(st.times, st.log_norm, la, lb);
    const double end = run.long_trace.times.back();
    const double ma = std::max(options.mu_from * tc, 0.5 * end);
    rep.mu_fit = fit_log_series(run.long_trace.times, run.long_trace.log_amp_x0, ma, end);
    rep.mu_tot_fit = fit_log_series(run.long_trace.times, run.long_trace.log_norm, ma, end);
    for (const auto* f : {&rep.lambda_fit, &rep.lambda_tot_fit, &rep.mu_fit, &rep.mu_tot_fit})
        if (f->poor) rep.flags.push_back("poor fit");

    if (single && options.lambda_curve) {
        const BulkVelocities bv = bulk_velocities(sym);
        std::vector<double> grid;
        const int m = std::max(options.v_points, 2);
        const double vmax = 1.5 * std::max(bv.v_plus, 1e-6);
        for (int i = 0; i < m; ++i) grid.push_back(vmax * i / (m - 1));
        try {
            run.curve = lambda_of_v(sym.entry(0, 0), grid);
            rep.v_peak = run.curve.v_peak;
        } catch (const ModuleError& e) {
            rep.flags.push_back(std::string("lambda(v): ") + e.what() + " " + e.parameters());
        }
    }

    const EvolutionTrace merged = merge_traces(run.short_trace, run.long_trace);
    if (std::isfinite(rep.t_c_theo)) {
        const auto ct = crossover_time(sym, options.cells, merged, run.spectrum, ma,
                                       options.short_span * tc);
        rep.t_c_num = ct.t_num;
        if (!ct.t_num) rep.flags.push_back("t_c_num not observed");
    }
    return run;
}

}  // namespace nonbloch
