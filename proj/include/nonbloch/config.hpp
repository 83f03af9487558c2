#pragma once

#include <optional>
#include <string>
#include <vector>

#include "nonbloch/io.hpp"
#include "nonbloch/symbol.hpp"

namespace nonbloch {

inline constexpr const char* kVersion = "0.1.0";

/// Task names accepted in "tasks", in the order they are reported.
const std::vector<std::string>& task_names();

struct TimeConfig {
    double dt = 0.0;  ///< 0: min(0.02, t_c/2000)
    double lambda_from = 0.2;
    double lambda_to = 0.5;
    double mu_from = 1.5;
    double short_span = 1.5;
    double long_time = 0.0;
    double long_dt = 0.2;
    double snapshot_every = 1.0;
};

/// Absolute tolerances used by --check. t_c is relative.
struct Tolerances {
    double lambda = 0.02;
    double mu = 0.005;
    double lambda_tot = 0.02;
    double v_peak = 0.02;
    double t_c = 0.2;
    double healing_slope = 0.05;
    double multiband = 0.03;
    double identity = 1e-6;
};

struct HealingConfig {
    std::vector<cplx> e0;
    double gamma = 10.0;
    int loss_range = 10;
    int site_offset = 0;
    double t1 = 2.0;
    double t2 = 4.0;
    double t_end = 0.0;
    bool scan = false;
    int scan_points = 12;
    double scan_step = 0.02;
};

struct ExperimentConfig {
    std::string preset;  ///< resolved preset name, empty for an inline model
    MultibandSymbol symbol;
    std::vector<std::string> tasks;
    int cells = 140;
    int x0 = 0;  ///< initial and monitored site
    /// "delta" (δ at x0) or "flat" (uniform over the first flat_width cells).
    std::string initial = "delta";
    int flat_width = 40;
    TimeConfig time;
    std::string out = "out";
    Tolerances tolerances;
    HealingConfig healing;
    std::vector<double> sweep_t1L;  ///< crossover sweep of Im c_1
    unsigned seed = 1;
    int threads = 0;  ///< 0: NONBLOCH_THREADS, else hardware concurrency
    int v_points = 512;
    /// Published reference values apply only to an untouched preset.
    bool preset_defaults = false;
};

/// Validate a config document. Unknown keys, wrong types and unknown
/// tasks raise std::invalid_argument naming the JSON path.
ExperimentConfig parse_config(const json& j);

/// Preset-only config, as produced by `run --preset`.
ExperimentConfig preset_config(const std::string& name, const std::vector<std::string>& tasks);

/// Canonical JSON form of a parsed config; its hash identifies the run.
json config_to_json(const ExperimentConfig& c);

/// 64-bit FNV-1a of `text`, as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace nonbloch
