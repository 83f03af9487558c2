#pragma once

#include <string>
#include <vector>

#include "nonbloch/flow.hpp"
#include "nonbloch/saddle.hpp"

namespace nonbloch {

/// Closed reference contour on the momentum cylinder, oriented in +k_r.
/// The BZ is k_i = 0; a GBZ is represented as the graph k_i = g(k_r) built
/// from sampled β points (k = −i ln β), interpolated linearly and periodically.
class Contour {
public:
    static Contour bz();
    static Contour gbz(const std::vector<cplx>& betas);

    bool is_bz() const { return kr_.empty(); }
    /// Signed distance k_i − g(k_r); positive above the contour.
    double distance(cplx k) const;
    /// ∫ g(k) dk once around the contour.
    cplx integrate(const std::function<cplx(cplx)>& g, int nodes = 4096) const;
    /// Vertices of the closed polyline (empty for the BZ).
    std::vector<cplx> vertices() const;

private:
    double height(double k_r) const;
    std::vector<double> kr_;
    std::vector<double> ki_;
};

struct Crossing {
    cplx point;
    int sign = 0;
};

/// Signed crossings of a joined flow curve with a contour, located by sign
/// changes of the signed distance between nodes and refined by bisection on
/// the Hermite interpolant. Throws ModuleError("non-transversal crossing")
/// if a node lies on the contour within 1e−12.
std::vector<Crossing> count_intersections(const JoinedCurve& curve, const Contour& contour);

struct SaddleFlows {
    FlowPath ascent_minus;
    FlowPath ascent_plus;
    FlowPath descent_minus;
    FlowPath descent_plus;
    double ascent_angle = 0.0;  ///< φ_a

    JoinedCurve ascent() const { return join(ascent_minus, ascent_plus); }
    /// Oriented along e^{i(φ_a − π/2)} at the saddle.
    JoinedCurve descent() const { return join(descent_minus, descent_plus); }
    bool near_saddle() const;
};

/// Steepest ascent and descent flows of Im f from saddle `s`. `others`
/// are used for the near-saddle (Stokes) check.
SaddleFlows trace_flows(const SaddlePoint& s, Phase& phase, const std::vector<SaddlePoint>& others,
                        const FlowOptions& options = {});
SaddleFlows trace_flows(const SaddlePoint& s, const LaurentSymbol& sym, double v,
                        const FlowOptions& options = {});

struct ClassifiedSaddle {
    SaddlePoint saddle;
    int n_sigma = 0;
    /// Same number from the sides of the contour on which the two ascent
    /// ends terminate.
    int n_topological = 0;
    std::vector<Crossing> crossings;
    SaddleFlows flows;
    bool skipped_degenerate = false;
    /// Orientation of A and D flipped so that n_σ ≥ 0.
    bool reversed = false;
};

struct ThimbleClassification {
    std::vector<ClassifiedSaddle> saddles;
    int dominant_index = -1;
    bool non_generic = false;
    std::vector<std::string> warnings;

    const ClassifiedSaddle& dominant() const { return saddles.at(static_cast<std::size_t>(dominant_index)); }
};

/// n_σ for every saddle of h(k) − kv against `contour`, and the dominant
/// saddle (largest Im S among n_σ ≠ 0).
ThimbleClassification classify(const LaurentSymbol& sym, double v, const Contour& contour,
                               const FlowOptions& options = {});

/// Same for the branch saddles of a multiband symbol (BZ contour).
ThimbleClassification classify_multiband(const MultibandSymbol& sym, double v,
                                         const FlowOptions& options = {});

/// (1/2π)∫_BZ e^{−ih(k)t} dk by the periodic trapezoid rule.
cplx bz_propagator(const LaurentSymbol& sym, double t, int nodes = 4096);
/// Σ_σ n_σ (1/2π)∫_{D_σ} e^{−ih(k)t} dk along the traced descent curves.
cplx thimble_propagator(const LaurentSymbol& sym, const ThimbleClassification& cls, double t);

}  // namespace nonbloch
