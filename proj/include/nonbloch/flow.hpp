#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "nonbloch/symbol.hpp"

namespace nonbloch {

/// Holomorphic phase f(k) whose Im part drives the flows.
class Phase {
public:
    virtual ~Phase() = default;
    virtual cplx value(cplx k) = 0;
    virtual cplx derivative(cplx k) = 0;
    /// Forget any continuation state and restart from (k, value).
    virtual void reset(cplx /*k*/, cplx /*value*/) {}
};

/// f(k) = h(k) − k·v for a single band.
class SymbolPhase : public Phase {
public:
    SymbolPhase(LaurentSymbol sym, double v);
    cplx value(cplx k) override;
    cplx derivative(cplx k) override;

private:
    LaurentSymbol h_;
    LaurentSymbol dh_;
    double v_;
};

/// f(k) = E(k) − k·v on one sheet of det[h(β) − E] = 0. E is continued by
/// Newton iteration from the most recent evaluation, so calls must follow
/// the path in small steps.
class BranchPhase : public Phase {
public:
    BranchPhase(const MultibandSymbol& sym, double v, cplx k0, cplx e0);
    cplx value(cplx k) override;
    cplx derivative(cplx k) override;
    void reset(cplx k, cplx value) override;

private:
    cplx solve(cplx k);
    BivariateLaurent f_;
    BivariateLaurent fk_;
    BivariateLaurent fe_;
    double v_;
    cplx last_k_;
    cplx last_e_;
};

enum class FlowKind { ascent, descent };
enum class Termination { window_exit, divergence, step_limit, near_saddle, im_limit };

const char* to_string(Termination t);

/// One branch leaving a saddle. k is stored unwrapped (no reduction of k_r)
/// so the polyline is continuous; `tangent` is dk/ds for unit arc speed.
struct FlowPath {
    FlowKind kind = FlowKind::ascent;
    int branch = +1;  ///< +1 or −1
    std::vector<double> s;
    std::vector<cplx> k;
    std::vector<cplx> tangent;
    Termination termination = Termination::step_limit;
};

struct FlowOptions {
    double seed_offset = 1e-5;
    double k_max = 6.0;          ///< window half-height in k_i
    double arc_limit = 200.0;
    double im_window = 50.0;     ///< stop once |Im f − Im S| exceeds this
    double tolerance = 1e-10;    ///< local error per unit arc length
    double max_step = 0.01;
    double near_saddle_radius = 1e-4;
    int max_attempts = 20000;    ///< accepted plus rejected steps per branch
};

/// Integrate dk/ds = ±i·conj(f')/|f'| from `start` with Dormand–Prince 5(4).
/// `stop` is consulted after each accepted step.
FlowPath integrate_flow(Phase& phase, FlowKind kind, int branch, cplx start, double s0,
                        const FlowOptions& options,
                        const std::function<bool(cplx k, cplx f, Termination& why)>& stop);

/// The two branches of a flow joined across their saddle, oriented from the
/// far end of branch −1 to the far end of branch +1. The saddle itself is not
/// a node; the segment between the two seeds passes straight through it.
struct JoinedCurve {
    std::vector<double> s;
    std::vector<cplx> k;
    std::vector<cplx> tangent;

    /// Cubic Hermite interpolation of k and dk/ds on segment j at parameter s.
    cplx at(std::size_t j, double s_value) const;
    cplx slope(std::size_t j, double s_value) const;
    /// ∫ g(k) dk along the curve by Gauss–Legendre on each segment.
    cplx integrate(const std::function<cplx(cplx)>& g) const;
};

JoinedCurve join(const FlowPath& minus, const FlowPath& plus);

}  // namespace nonbloch
