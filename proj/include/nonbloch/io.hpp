#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "nonbloch/dynamics.hpp"
#include "nonbloch/healing.hpp"
#include "nonbloch/lattice.hpp"
#include "nonbloch/thimble.hpp"

namespace nonbloch {

using json = nlohmann::ordered_json;

/// {"bands": m, "coeffs": [{"row", "col", "power", "re", "im"}, ...]}.
/// Unknown keys and out-of-range indices are rejected with the JSON path.
MultibandSymbol model_from_json(const json& j);
json model_to_json(const MultibandSymbol& sym);

json to_json(cplx z);
json to_json(const LineFit& f);
json to_json(const SaddlePoint& s);
json to_json(const ThimbleClassification& c);
json to_json(const LyapunovReport& r);
json to_json(const HealingReport& r);
json to_json(const ThresholdScan& s);

/// e^{ln_value} as decimal text. Values far outside the double range keep
/// their exponent ("3.1e-1204") instead of collapsing to 0 or inf.
std::string format_exp(double ln_value);

/// Fixed column list, rows of preformatted cells. The file is written by
/// close(), which throws on I/O failure.
class CsvWriter {
public:
    CsvWriter(std::filesystem::path path, const std::vector<std::string>& header);
    void row(const std::vector<std::string>& cells);
    void close();

private:
    std::filesystem::path path_;
    std::size_t columns_;
    std::string buffer_;
};

/// Shortest round-trip decimal form (locale independent).
std::string num(double x);

/// t, amp_x0, norm, ln_amp_x0, ln_norm.
void write_trace_csv(const std::filesystem::path& path, const EvolutionTrace& trace);
/// t, x, normalized amplitude (profile divided by its maximum).
void write_heatmap_csv(const std::filesystem::path& path, const EvolutionTrace& trace);
void write_lambda_csv(const std::filesystem::path& path, const LambdaCurve& curve);
/// re, im, kind (obc / pbc).
void write_spectrum_csv(const std::filesystem::path& path, const SpectrumSet& spec);
void write_gbz_csv(const std::filesystem::path& path, const SpectrumSet& spec);
void write_saddles_csv(const std::filesystem::path& path, const std::vector<SaddlePoint>& saddles);
/// saddle, branch, kind, s, re_k, im_k for every traced flow; re_k wrapped to [0, 2π).
void write_flows_csv(const std::filesystem::path& path, const ThimbleClassification& cls);
/// t, epsilon, norm_phi, norm_xi, ln_epsilon.
void write_healing_csv(const std::filesystem::path& path, const HealingReport& rep);
void write_scan_csv(const std::filesystem::path& path, const ThresholdScan& scan);

void write_json(const std::filesystem::path& path, const json& j);
json read_json(const std::filesystem::path& path);

}  // namespace nonbloch
