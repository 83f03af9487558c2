#include "nonbloch/thimble.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "nonbloch/error.hpp"

namespace nonbloch {

Contour Contour::bz() { return Contour(); }

Contour Contour::gbz(const std::vector<cplx>& betas) {
    if (betas.size() < 3) throw std::invalid_argument("GBZ contour needs at least three points");
    std::vector<std::pair<double, double>> pts;
    pts.reserve(betas.size());
    for (const cplx& b : betas) pts.emplace_back(wrap_momentum(std::arg(b)), -std::log(std::abs(b)));
    std::sort(pts.begin(), pts.end());
    Contour c;
    for (const auto& [r, i] : pts) {
        if (!c.kr_.empty() && r - c.kr_.back() < 1e-12) {
            c.ki_.back() = 0.5 * (c.ki_.back() + i);
            continue;
        }
        c.kr_.push_back(r);
        c.ki_.push_back(i);
    }
    return c;
}

double Contour::height(double k_r) const {
    if (kr_.empty()) return 0.0;
    const double x = wrap_momentum(k_r);
    const std::size_t n = kr_.size();
    auto it = std::upper_bound(kr_.begin(), kr_.end(), x);
    double x0, y0, x1, y1;
    if (it == kr_.begin() || it == kr_.end()) {
        // Between the last sample and the first one (across 2π).
        x0 = kr_[n - 1];
        y0 = ki_[n - 1];
        x1 = kr_[0] + two_pi;
        y1 = ki_[0];
        const double xx = it == kr_.begin() ? x + two_pi : x;
        return y0 + (y1 - y0) * (xx - x0) / (x1 - x0);
    }
    const auto j = static_cast<std::size_t>(it - kr_.begin());
    x0 = kr_[j - 1];
    y0 = ki_[j - 1];
    x1 = kr_[j];
    y1 = ki_[j];
    return y0 + (y1 - y0) * (x - x0) / (x1 - x0);
}

double Contour::distance(cplx k) const { return k.imag() - height(k.real()); }

std::vector<cplx> Contour::vertices() const {
    std::vector<cplx> out;
    for (std::size_t i = 0; i < kr_.size(); ++i) out.emplace_back(kr_[i], ki_[i]);
    return out;
}

cplx Contour::integrate(const std::function<cplx(cplx)>& g, int nodes) const {
    if (kr_.empty()) {
        cplx sum = 0.0;
        for (int j = 0; j < nodes; ++j) sum += g(cplx(two_pi * j / nodes, 0.0));
        return sum * (two_pi / nodes);
    }
    static constexpr std::array<double, 8> x = {
        0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
        0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
    static constexpr std::array<double, 8> w = {
        0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
        0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};
    cplx total = 0.0;
    const std::size_t n = kr_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const cplx a(kr_[i], ki_[i]);
        const cplx b = i + 1 < n ? cplx(kr_[i + 1], ki_[i + 1]) : cplx(kr_[0] + two_pi, ki_[0]);
        const cplx mid = 0.5 * (a + b);
        const cplx half = 0.5 * (b - a);
        cplx seg = 0.0;
        for (std::size_t q = 0; q < x.size(); ++q)
            seg += w[q] * (g(mid + x[q] * half) + g(mid - x[q] * half));
        total += seg * half;
    }
    return total;
}

std::vector<Crossing> count_intersections(const JoinedCurve& curve, const Contour& contour) {
    std::vector<Crossing> out;
    const std::size_t n = curve.k.size();
    std::vector<double> d(n);
    for (std::size_t j = 0; j < n; ++j) {
        d[j] = contour.distance(curve.k[j]);
        if (std::abs(d[j]) < 1e-12) {
            std::ostringstream params;
            params << "k=(" << curve.k[j].real() << "," << curve.k[j].imag() << ")";
            throw ModuleError("thimble", "count_intersections", "non-transversal crossing",
                              params.str());
        }
    }
    for (std::size_t j = 0; j + 1 < n; ++j) {
        if ((d[j] < 0.0) == (d[j + 1] < 0.0)) continue;
        double lo = curve.s[j];
        double hi = curve.s[j + 1];
        const bool lo_negative = d[j] < 0.0;
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            const bool neg = contour.distance(curve.at(j, mid)) < 0.0;
            if (neg == lo_negative)
                lo = mid;
            else
                hi = mid;
        }
        out.push_back({curve.at(j, 0.5 * (lo + hi)), d[j + 1] > d[j] ? +1 : -1});
    }
    return out;
}

bool SaddleFlows::near_saddle() const {
    for (const FlowPath* p : {&ascent_minus, &ascent_plus, &descent_minus, &descent_plus})
        if (p->termination == Termination::near_saddle) return true;
    return false;
}

SaddleFlows trace_flows(const SaddlePoint& s, Phase& phase, const std::vector<SaddlePoint>& others,
                        const FlowOptions& options) {
    if (s.degenerate) {
        std::ostringstream params;
        params << "k_s=(" << s.k.re() << "," << s.k.im() << "), |h''|=" << std::abs(s.h2);
        throw ModuleError("thimble", "trace_flows", "Morse assumption violated", params.str());
    }
    const cplx ks = s.k.value();
    const double im_s = s.S.imag();
    SaddleFlows out;
    out.ascent_angle = 0.5 * (std::numbers::pi / 2.0 - std::arg(s.h2));
    const cplx dir_a = std::polar(1.0, out.ascent_angle);
    const cplx dir_d = std::polar(1.0, out.ascent_angle - std::numbers::pi / 2.0);

    auto near_other = [&](cplx k) {
        for (const auto& o : others) {
            cplx dk = k - o.k.value();
            const cplx self = ks - o.k.value();
            double sr = std::remainder(self.real(), two_pi);
            if (std::abs(cplx(sr, self.imag())) < 1e-7) continue;
            dk.real(std::remainder(dk.real(), two_pi));
            if (std::abs(dk) < options.near_saddle_radius) return true;
        }
        return false;
    };
    auto make_stop = [&](FlowKind kind) {
        return [&, kind](cplx k, cplx f, Termination& why) {
            if (std::abs(k.imag()) > options.k_max) {
                why = Termination::window_exit;
                return true;
            }
            const double rise = f.imag() - im_s;
            if ((kind == FlowKind::ascent && rise > options.im_window) ||
                (kind == FlowKind::descent && -rise > options.im_window)) {
                why = Termination::im_limit;
                return true;
            }
            if (near_other(k)) {
                why = Termination::near_saddle;
                return true;
            }
            return false;
        };
    };
    const double eps = options.seed_offset;
    auto run = [&](FlowKind kind, int branch, cplx dir) {
        phase.reset(ks, s.S);
        return integrate_flow(phase, kind, branch, ks + static_cast<double>(branch) * eps * dir, eps,
                              options, make_stop(kind));
    };
    out.ascent_plus = run(FlowKind::ascent, +1, dir_a);
    out.ascent_minus = run(FlowKind::ascent, -1, dir_a);
    out.descent_plus = run(FlowKind::descent, +1, dir_d);
    out.descent_minus = run(FlowKind::descent, -1, dir_d);
    return out;
}

SaddleFlows trace_flows(const SaddlePoint& s, const LaurentSymbol& sym, double v,
                        const FlowOptions& options) {
    SymbolPhase phase(sym, v);
    const auto others = find_saddles(sym, v);
    return trace_flows(s, phase, others, options);
}

namespace {

int side_of(const FlowPath& p, const Contour& c) {
    if (p.termination != Termination::window_exit && p.termination != Termination::im_limit) return 0;
    return c.distance(p.k.back()) > 0.0 ? 1 : -1;
}

template <class MakePhase>
ThimbleClassification classify_saddles(const std::vector<SaddlePoint>& saddles,
                                       const std::vector<std::vector<SaddlePoint>>& neighbours,
                                       MakePhase make_phase, const Contour& contour,
                                       const FlowOptions& options, double v) {
    ThimbleClassification out;
    for (std::size_t i = 0; i < saddles.size(); ++i) {
        const SaddlePoint& s = saddles[i];
        ClassifiedSaddle c;
        c.saddle = s;
        if (s.degenerate) {
            c.skipped_degenerate = true;
            out.warnings.push_back("saddle " + std::to_string(i + 1) + " degenerate; not traced");
            out.saddles.push_back(std::move(c));
            continue;
        }
        FlowOptions opts = options;
        for (int attempt = 0;; ++attempt) {
            auto phase = make_phase(s);
            c.flows = trace_flows(s, *phase, neighbours[i], opts);
            try {
                c.crossings = count_intersections(c.flows.ascent(), contour);
                break;
            } catch (const ModuleError&) {
                if (attempt == 3) throw;
                opts.seed_offset *= 3.0;
            }
        }
        c.n_sigma = 0;
        for (const auto& x : c.crossings) c.n_sigma += x.sign;
        const int a = side_of(c.flows.ascent_plus, contour);
        const int b = side_of(c.flows.ascent_minus, contour);
        c.n_topological = (a == 0 || b == 0) ? c.n_sigma : (a - b) / 2;
        if (c.n_sigma < 0) {
            // Reverse A and D together; n_σ·D_σ is unchanged.
            std::swap(c.flows.ascent_minus, c.flows.ascent_plus);
            std::swap(c.flows.descent_minus, c.flows.descent_plus);
            c.flows.ascent_minus.branch = -1;
            c.flows.ascent_plus.branch = +1;
            c.flows.descent_minus.branch = -1;
            c.flows.descent_plus.branch = +1;
            for (auto& x : c.crossings) x.sign = -x.sign;
            c.n_sigma = -c.n_sigma;
            c.n_topological = -c.n_topological;
            c.reversed = true;
        }
        if (a == 0 || b == 0)
            out.warnings.push_back("saddle " + std::to_string(i + 1) +
                                   ": ascent flow ended inside the window (" +
                                   to_string(a == 0 ? c.flows.ascent_plus.termination
                                                    : c.flows.ascent_minus.termination) +
                                   ")");
        if (c.flows.near_saddle()) {
            out.non_generic = true;
            out.warnings.push_back("saddle " + std::to_string(i + 1) +
                                   ": flow passes near another saddle (Stokes boundary); perturb "
                                   "the parameters slightly");
        }
        out.saddles.push_back(std::move(c));
    }
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < out.saddles.size(); ++i) {
        const auto& c = out.saddles[i];
        if (c.n_sigma != 0 && c.saddle.S.imag() > best + 1e-12) {
            best = c.saddle.S.imag();
            out.dominant_index = static_cast<int>(i);
        }
    }
    if (out.dominant_index < 0)
        throw ModuleError("thimble", "classify", "no contributing saddle", "v=" + std::to_string(v));
    return out;
}

}  // namespace

ThimbleClassification classify(const LaurentSymbol& sym, double v, const Contour& contour,
                               const FlowOptions& options) {
    const auto saddles = find_saddles(sym, v);
    std::vector<std::vector<SaddlePoint>> neighbours(saddles.size(), saddles);
    return classify_saddles(
        saddles, neighbours,
        [&](const SaddlePoint&) { return std::make_unique<SymbolPhase>(sym, v); }, contour, options,
        v);
}

ThimbleClassification classify_multiband(const MultibandSymbol& sym, double v,
                                         const FlowOptions& options) {
    const auto found = find_saddles_multiband(sym, v);
    const auto blocks = sym.blocks();
    auto block_of = [&](int band) -> std::size_t {
        for (std::size_t b = 0; b < blocks.size(); ++b)
            if (std::find(blocks[b].begin(), blocks[b].end(), band) != blocks[b].end()) return b;
        return 0;
    };
    std::vector<std::vector<SaddlePoint>> neighbours;
    for (const auto& s : found.saddles) {
        std::vector<SaddlePoint> same;
        for (const auto& o : found.saddles)
            if (block_of(o.band) == block_of(s.band) && std::abs(o.energy - s.energy) < 1e-3)
                same.push_back(o);
        neighbours.push_back(std::move(same));
    }
    auto make_phase = [&](const SaddlePoint& s) -> std::unique_ptr<Phase> {
        const auto& block = blocks[block_of(s.band)];
        if (block.size() == 1)
            return std::make_unique<SymbolPhase>(sym.entry(block[0], block[0]), v);
        return std::make_unique<BranchPhase>(sym.sub_block(block), v, s.k.value(), s.energy);
    };
    auto out = classify_saddles(found.saddles, neighbours, make_phase, Contour::bz(), options, v);
    out.warnings.insert(out.warnings.end(), found.warnings.begin(), found.warnings.end());
    return out;
}

cplx bz_propagator(const LaurentSymbol& sym, double t, int nodes) {
    return Contour::bz().integrate([&](cplx k) { return std::exp(-I * sym(k) * t); }, nodes) /
           two_pi;
}

cplx thimble_propagator(const LaurentSymbol& sym, const ThimbleClassification& cls, double t) {
    cplx total = 0.0;
    for (const auto& c : cls.saddles) {
        if (c.n_sigma == 0) continue;
        const auto d = c.flows.descent();
        total += static_cast<double>(c.n_sigma) *
                 d.integrate([&](cplx k) { return std::exp(-I * sym(k) * t); });
    }
    return total / two_pi;
}

}  // namespace nonbloch
