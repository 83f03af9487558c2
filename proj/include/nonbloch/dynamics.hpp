#pragma once

#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "nonbloch/lattice.hpp"
#include "nonbloch/propagator.hpp"
#include "nonbloch/thimble.hpp"

namespace nonbloch {

/// Least-squares line through ln-amplitude samples.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    double t_begin = 0.0;
    double t_end = 0.0;
    int samples = 0;
    bool envelope = false;     ///< fitted through local maxima only
    double prefactor = 0.0;    ///< α of the t^α prefactor removed before fitting
    bool poor = false;         ///< r2 < 0.99

    double at(double t) const { return slope * t + intercept; }
};

/// Fit y ≈ slope·t + α·ln t + c on t ∈ [a, b]. If the samples oscillate
/// (interference of a complex-conjugate pair of modes), only local maxima
/// are used. Throws ModuleError("insufficient trace") below 10 samples.
LineFit fit_log_series(const std::vector<double>& t, const std::vector<double>& y, double a,
                       double b, double alpha = 0.0);

struct BulkVelocities {
    double v_plus = 0.0;
    double k_plus = 0.0;
    double v_minus = 0.0;
    double k_minus = 0.0;
};

/// max / min over real k of dRe E/dk (over all bands), from a 4096-point grid
/// and Newton polish (single band).
BulkVelocities bulk_velocities(const MultibandSymbol& sym, int grid = 4096);

/// t_c = 2(L−1)/v_c with v_c = 2|v+ v−|/(|v+| + |v−|). Infinite when a
/// velocity vanishes.
double crossover_theory(const BulkVelocities& v, int cells);

struct PointP {
    double k = 0.0;
    cplx P{0.0, 0.0};
    double v = 0.0;
};

/// Admissible local maximum of Im h on the real axis with dRe h/dk > 0.
std::optional<PointP> find_P(const LaurentSymbol& sym, int grid = 4096);

struct LambdaSample {
    double v = 0.0;
    double lambda = 0.0;
    SaddlePoint dominant;
    bool local_max = false;
};

struct LambdaCurve {
    std::vector<LambdaSample> samples;
    double v_peak = 0.0;
    double lambda_peak = 0.0;
};

/// λ(v) = Im[h(k_d) − k_d v] from the BZ classification at each v. The
/// maximum over the grid is refined by golden-section search to 1e−6.
LambdaCurve lambda_of_v(const LaurentSymbol& sym, const std::vector<double>& v_grid);
double lambda_at(const LaurentSymbol& sym, double v);

struct CrossoverTimes {
    double t_theo = 0.0;
    std::optional<double> t_num;
    double c2 = 0.0;  ///< intercept of the long-time line Im(O)·t + c2
};

/// t_c from velocities, and the first time after the minimum of ln|ψ_x0|
/// over t ≤ `search_until` at which the trace reaches the line Im(O)·t + c2.
/// c2 is fitted with the slope held at Im(O) over t ≥ `long_from`.
CrossoverTimes crossover_time(const MultibandSymbol& sym, int cells, const EvolutionTrace& trace,
                              const SpectrumSet& spectrum, double long_from,
                              double search_until = std::numeric_limits<double>::infinity());

/// Site with the largest amplitude in each stored profile.
std::vector<int> peak_sites(const EvolutionTrace& trace);

struct LyapunovReport {
    /// Short-regime slopes with the algebraic prefactor of the asymptotic law
    /// removed (edge amplitude t^{-3/2}; norm t^{-1/4} for a moving peak,
    /// t^{-3/2} for a peak pinned to the edge).
    LineFit lambda_fit;
    LineFit lambda_tot_fit;
    /// Plain least-squares slopes of the log traces over the same windows.
    LineFit lambda_raw;
    LineFit lambda_tot_raw;
    LineFit mu_fit;
    LineFit mu_tot_fit;
    double lambda_pred = 0.0;      ///< Im(S_d)
    double mu_pred = 0.0;          ///< Im(O)
    double lambda_tot_pred = 0.0;  ///< max[Im(S_d), Im(P)]
    std::optional<PointP> P;
    double v_peak = 0.0;
    double t_c_theo = 0.0;
    std::optional<double> t_c_num;
    cplx point_O{0.0, 0.0};
    std::vector<std::string> flags;
};

struct LyapunovOptions {
    int cells = 140;
    int x0 = 0;                       ///< monitored and initial basis index
    std::optional<Eigen::VectorXcd> psi0;  ///< default δ_{x0}
    double dt = 0.0;                  ///< 0: min(0.02, t_c/2000)
    double lambda_from = 0.2;         ///< λ window, fractions of t_c
    double lambda_to = 0.5;
    double mu_from = 1.5;             ///< μ window starts at max(mu_from·t_c, end/2)
    double short_span = 1.5;          ///< extended-precision trace length, in t_c
    double long_time = 0.0;           ///< 0: chosen from the OBC gap below Im(O)
    double long_dt = 0.2;
    double snapshot_every = 1.0;      ///< time between stored profiles
    bool lambda_curve = true;         ///< compute λ(v) and v_peak
    int v_points = 512;
};

struct LyapunovRun {
    SpectrumSet spectrum;
    ThimbleClassification classification;
    EvolutionTrace short_trace;
    EvolutionTrace long_trace;
    LambdaCurve curve;
    LyapunovReport report;
};

/// Full pipeline for one lattice: spectrum, dominant saddle, short and long
/// traces, fits and crossover time.
LyapunovRun analyze_lyapunov(const MultibandSymbol& sym, const LyapunovOptions& options);

/// Time scale t_c for a symbol on `cells` sites (the crossover estimate).
double crossover_estimate(const MultibandSymbol& sym, int cells);

}  // namespace nonbloch
