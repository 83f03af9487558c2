#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "nonbloch/dynamics.hpp"
#include "nonbloch/propagator.hpp"
#include "nonbloch/symbol.hpp"

namespace nonbloch {

/// Winding of h(β) − E0 around |β| = 1 from 4096 phase samples. Throws
/// ModuleError("E0 on PBC spectrum") when E0 is within 1e−6 of the curve.
int winding(const LaurentSymbol& sym, cplx e0, int samples = 4096);

/// Eigenstate of the half-infinite chain (open at the left edge) truncated
/// to L sites.
struct SibcState {
    cplx e0;
    std::vector<cplx> betas;   ///< roots of h(β) = E0 inside the unit circle
    std::vector<cplx> coeffs;  ///< ψ0(x) = Σ_j coeffs_j β_j^x, x = 0..L−1
    Eigen::VectorXcd psi0;     ///< unit norm
    double residual = 0.0;     ///< max |(H − E0)ψ0| over x ≤ L − 9
};

/// Combine the q+1 decaying roots so that the q left-edge rows of
/// (H − E0)ψ vanish. Requires winding 1.
SibcState build_sibc(const LaurentSymbol& sym, cplx e0, int cells);

/// max[Im S_d, Im P] and its ingredients.
struct HealingThreshold {
    double lambda_tot = 0.0;
    double im_sd = 0.0;
    std::optional<double> im_p;
    bool moving_peak = false;  ///< Im P > Im S_d
};

HealingThreshold healing_threshold(const LaurentSymbol& sym);

struct HealingOptions {
    int cells = 600;
    double gamma = 10.0;
    int loss_range = 10;   ///< V acts on sites [offset, offset + loss_range)
    int site_offset = 0;
    double t1 = 2.0;
    double t2 = 4.0;
    /// 0: half the crossover time of the lattice, shortened so that rounding
    /// noise amplified by the top OBC mode stays below the signal.
    double t_end = 0.0;
    double dt = 0.1;       ///< sampling interval
    double fit_delay = 2.0;  ///< verdict slope fitted on [t2 + fit_delay, t_end]
    Precision precision = Precision::extended;
};

/// The automatic t_end of run_healing; appends a flag when precision limits it.
double default_end_time(const LaurentSymbol& sym, int cells, const HealingThreshold& threshold,
                        const HealingOptions& options, std::vector<std::string>& flags);

enum class Verdict { heals, not_healing };
const char* to_string(Verdict v);

struct HealingReport {
    cplx e0;
    HealingThreshold threshold;
    std::vector<double> times;
    std::vector<double> epsilon;   ///< ‖ψ − e^{−iE0t}ψ0‖² / ‖e^{−iE0t}ψ0‖²
    std::vector<double> log_epsilon;
    std::vector<double> log_norm_phi;
    std::vector<double> log_norm_xi;
    LineFit slope;                 ///< of ln ε, with the algebraic prefactor removed
    LineFit slope_raw;
    Verdict verdict = Verdict::not_healing;
    double sibc_residual = 0.0;
    std::vector<std::string> flags;
};

/// Three-phase evolution H, H + V, H with V = −iγ on the loss sites during
/// [t1, t2). The deviation ξ = ψ − e^{−iE0t}ψ0 is propagated directly,
/// driven by V e^{−iE0t}ψ0, so ε never suffers cancellation.
HealingReport run_healing(const LaurentSymbol& sym, const SibcState& state,
                          const HealingOptions& options = {},
                          std::optional<HealingThreshold> threshold = std::nullopt);
HealingReport run_healing(const LaurentSymbol& sym, cplx e0, const HealingOptions& options = {});

struct ScanPoint {
    cplx e0;
    std::optional<Verdict> verdict;  ///< empty when E0 was not admissible
    double slope = 0.0;
    std::string note;
};

struct ThresholdScan {
    HealingThreshold threshold;
    std::vector<ScanPoint> points;
    /// Midpoint of the Im E0 interval where the verdict changes (first
    /// not_healing → heals transition), if any.
    std::optional<double> flip;
    bool monotone = true;  ///< a single transition
};

/// `count` values Im E0 = λ_tot + (j − (count−1)/2)·step at fixed Re E0.
ThresholdScan scan_threshold(const LaurentSymbol& sym, double re_e0, int count = 12,
                             double step = 0.02, const HealingOptions& options = {},
                             int threads = 1);

}  // namespace nonbloch
