#include "nonbloch/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nonbloch {

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
    throw std::invalid_argument("model" + path + ": " + what);
}

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    if (!j.is_object()) schema_error(path, "expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) schema_error(path, "unknown key '" + key + "'");
}

int get_int(const json& j, const char* key, const std::string& path) {
    if (!j.contains(key) || !j[key].is_number_integer()) schema_error(path + "." + key, "expected an integer");
    return j[key].get<int>();
}

double get_number(const json& j, const char* key, const std::string& path, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) schema_error(path + "." + key, "expected a number");
    return j[key].get<double>();
}

}  // namespace

MultibandSymbol model_from_json(const json& j) {
    only_keys(j, {"bands", "coeffs"}, "");
    const int m = get_int(j, "bands", "");
    if (m < 1 || m > 4) schema_error(".bands", "must be between 1 and 4");
    if (!j.contains("coeffs") || !j["coeffs"].is_array()) schema_error(".coeffs", "expected an array");
    MultibandSymbol sym(m);
    std::size_t idx = 0;
    for (const auto& c : j["coeffs"]) {
        const std::string path = ".coeffs[" + std::to_string(idx++) + "]";
        only_keys(c, {"row", "col", "power", "re", "im"}, path);
        const int r = get_int(c, "row", path);
        const int col = get_int(c, "col", path);
        const int n = get_int(c, "power", path);
        if (r < 0 || r >= m || col < 0 || col >= m) schema_error(path, "row/col outside the band range");
        const cplx value(get_number(c, "re", path, 0.0), get_number(c, "im", path, 0.0));
        sym.entry(r, col) += LaurentSymbol({{n, value}});
    }
    return sym;
}

json model_to_json(const MultibandSymbol& sym) {
    json coeffs = json::array();
    for (int r = 0; r < sym.bands(); ++r)
        for (int c = 0; c < sym.bands(); ++c)
            for (const auto& [n, v] : sym.entry(r, c).coeffs())
                coeffs.push_back({{"row", r}, {"col", c}, {"power", n}, {"re", v.real()}, {"im", v.imag()}});
    return {{"bands", sym.bands()}, {"coeffs", coeffs}};
}

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const LineFit& f) {
    return {{"slope", f.slope},     {"intercept", f.intercept}, {"r2", f.r2},
            {"t_begin", f.t_begin}, {"t_end", f.t_end},         {"samples", f.samples},
            {"envelope", f.envelope}, {"prefactor", f.prefactor}, {"poor_fit", f.poor}};
}

json to_json(const SaddlePoint& s) {
    return {{"k", to_json(s.k.value())}, {"S", to_json(s.S)},   {"energy", to_json(s.energy)},
            {"v", s.v},                  {"h2", to_json(s.h2)}, {"band", s.band},
            {"degenerate", s.degenerate}, {"multiplicity", s.multiplicity}};
}

json to_json(const ThimbleClassification& c) {
    json saddles = json::array();
    for (std::size_t i = 0; i < c.saddles.size(); ++i) {
        const auto& cs = c.saddles[i];
        json crossings = json::array();
        for (const auto& x : cs.crossings) crossings.push_back({{"k", to_json(x.point)}, {"sign", x.sign}});
        saddles.push_back({{"label", "S" + std::to_string(i + 1)},
                           {"S", to_json(cs.saddle.S)},
                           {"saddle", to_json(cs.saddle)},
                           {"n_sigma", cs.n_sigma},
                           {"n_topological", cs.n_topological},
                           {"ascent_angle", cs.flows.ascent_angle},
                           {"crossings", crossings},
                           {"reversed", cs.reversed},
                           {"skipped_degenerate", cs.skipped_degenerate}});
    }
    return {{"saddles", saddles},
            {"dominant", c.dominant_index >= 0 ? json("S" + std::to_string(c.dominant_index + 1)) : json()},
            {"non_generic", c.non_generic},
            {"warnings", c.warnings}};
}

json to_json(const LyapunovReport& r) {
    json j = {{"lambda_fit", to_json(r.lambda_fit)},
              {"lambda_raw", to_json(r.lambda_raw)},
              {"mu_fit", to_json(r.mu_fit)},
              {"lambda_tot_fit", to_json(r.lambda_tot_fit)},
              {"lambda_tot_raw", to_json(r.lambda_tot_raw)},
              {"mu_tot_fit", to_json(r.mu_tot_fit)},
              {"lambda_pred", r.lambda_pred},
              {"mu_pred", r.mu_pred},
              {"lambda_tot_pred", r.lambda_tot_pred},
              {"point_O", to_json(r.point_O)},
              {"v_peak", r.v_peak},
              {"t_c_theo", r.t_c_theo},
              {"t_c_num", r.t_c_num ? json(*r.t_c_num) : json("not observed")},
              {"flags", r.flags}};
    if (r.P)
        j["P"] = {{"k", r.P->k}, {"P", to_json(r.P->P)}, {"v_P", r.P->v}};
    else
        j["P"] = "none";
    return j;
}

json to_json(const HealingReport& r) {
    json th = {{"lambda_tot", r.threshold.lambda_tot},
               {"im_S_d", r.threshold.im_sd},
               {"im_P", r.threshold.im_p ? json(*r.threshold.im_p) : json("none")},
               {"moving_peak", r.threshold.moving_peak}};
    return {{"E0", to_json(r.e0)},
            {"threshold", th},
            {"verdict", to_string(r.verdict)},
            {"slope", to_json(r.slope)},
            {"slope_raw", to_json(r.slope_raw)},
            {"predicted_slope", 2.0 * (r.threshold.lambda_tot - r.e0.imag())},
            {"sibc_residual", r.sibc_residual},
            {"t_end", r.times.empty() ? 0.0 : r.times.back()},
            {"flags", r.flags}};
}

json to_json(const ThresholdScan& s) {
    json points = json::array();
    for (const auto& p : s.points)
        points.push_back({{"E0", to_json(p.e0)},
                          {"verdict", p.verdict ? json(to_string(*p.verdict)) : json()},
                          {"slope", p.slope},
                          {"note", p.note}});
    return {{"lambda_tot", s.threshold.lambda_tot},
            {"flip", s.flip ? json(*s.flip) : json()},
            {"monotone", s.monotone},
            {"points", points}};
}

std::string num(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string format_exp(double ln_value) {
    if (std::isnan(ln_value)) return "nan";
    if (ln_value == -std::numeric_limits<double>::infinity()) return "0";
    if (std::abs(ln_value) < 700.0) return num(std::exp(ln_value));
    const double e10 = ln_value / std::log(10.0);
    const double e = std::floor(e10);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.15ge%lld", std::pow(10.0, e10 - e), static_cast<long long>(e));
    return buf;
}

CsvWriter::CsvWriter(std::filesystem::path path, const std::vector<std::string>& header)
    : path_(std::move(path)), columns_(header.size()) {
    row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) throw std::logic_error("csv row has the wrong number of cells");
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) buffer_ += ',';
        buffer_ += cells[i];
    }
    buffer_ += '\n';
}

void CsvWriter::close() {
    std::ofstream out(path_, std::ios::binary);
    out << buffer_;
    if (!out) throw std::runtime_error("cannot write " + path_.string());
}

void write_trace_csv(const std::filesystem::path& path, const EvolutionTrace& trace) {
    CsvWriter w(path, {"t", "amp_x0", "norm", "ln_amp_x0", "ln_norm"});
    for (std::size_t i = 0; i < trace.times.size(); ++i)
        w.row({num(trace.times[i]), format_exp(trace.log_amp_x0[i]), format_exp(trace.log_norm[i]),
               num(trace.log_amp_x0[i]), num(trace.log_norm[i])});
    w.close();
}

void write_heatmap_csv(const std::filesystem::path& path, const EvolutionTrace& trace) {
    CsvWriter w(path, {"t", "x", "amplitude"});
    for (std::size_t s = 0; s < trace.log_profiles.size(); ++s) {
        const auto& p = trace.log_profiles[s];
        double top = -std::numeric_limits<double>::infinity();
        for (double v : p) top = std::max(top, v);
        for (std::size_t x = 0; x < p.size(); ++x)
            w.row({num(trace.snapshot_times[s]), std::to_string(x), num(std::exp(p[x] - top))});
    }
    w.close();
}

void write_lambda_csv(const std::filesystem::path& path, const LambdaCurve& curve) {
    CsvWriter w(path, {"v", "lambda", "local_max"});
    for (const auto& s : curve.samples) w.row({num(s.v), num(s.lambda), s.local_max ? "1" : "0"});
    w.close();
}

void write_spectrum_csv(const std::filesystem::path& path, const SpectrumSet& spec) {
    CsvWriter w(path, {"re", "im", "kind"});
    for (const auto& e : spec.obc) w.row({num(e.energy.real()), num(e.energy.imag()), "obc"});
    for (const auto& p : spec.pbc)
        for (const auto& e : p.energies) w.row({num(e.real()), num(e.imag()), "pbc"});
    w.close();
}

void write_gbz_csv(const std::filesystem::path& path, const SpectrumSet& spec) {
    CsvWriter w(path, {"re_beta", "im_beta"});
    for (const auto& b : spec.gbz) w.row({num(b.real()), num(b.imag())});
    w.close();
}

void write_saddles_csv(const std::filesystem::path& path, const std::vector<SaddlePoint>& saddles) {
    CsvWriter w(path, {"label", "v", "band", "re_k", "im_k", "re_S", "im_S", "re_h2", "im_h2", "degenerate"});
    for (std::size_t i = 0; i < saddles.size(); ++i) {
        const auto& s = saddles[i];
        w.row({"S" + std::to_string(i + 1), num(s.v), std::to_string(s.band), num(s.k.re()), num(s.k.im()),
               num(s.S.real()), num(s.S.imag()), num(s.h2.real()), num(s.h2.imag()), s.degenerate ? "1" : "0"});
    }
    w.close();
}

void write_flows_csv(const std::filesystem::path& path, const ThimbleClassification& cls) {
    CsvWriter w(path, {"saddle", "branch", "kind", "s", "re_k", "im_k"});
    for (std::size_t i = 0; i < cls.saddles.size(); ++i) {
        const auto& f = cls.saddles[i].flows;
        for (const FlowPath* p : {&f.ascent_minus, &f.ascent_plus, &f.descent_minus, &f.descent_plus})
            for (std::size_t j = 0; j < p->k.size(); ++j)
                w.row({std::to_string(i + 1), p->branch > 0 ? "+" : "-",
                       p->kind == FlowKind::ascent ? "ascent" : "descent", num(p->s[j]),
                       num(wrap_momentum(p->k[j].real())), num(p->k[j].imag())});
    }
    w.close();
}

void write_healing_csv(const std::filesystem::path& path, const HealingReport& rep) {
    CsvWriter w(path, {"t", "epsilon", "norm_phi", "norm_xi", "ln_epsilon"});
    for (std::size_t i = 0; i < rep.times.size(); ++i)
        w.row({num(rep.times[i]), format_exp(rep.log_epsilon[i]), format_exp(rep.log_norm_phi[i]),
               format_exp(rep.log_norm_xi[i]),
               std::isfinite(rep.log_epsilon[i]) ? num(rep.log_epsilon[i]) : ""});
    w.close();
}

void write_scan_csv(const std::filesystem::path& path, const ThresholdScan& scan) {
    CsvWriter w(path, {"re_E0", "im_E0", "verdict", "slope", "note"});
    for (const auto& p : scan.points) {
        std::string note = p.note;
        for (char& c : note)
            if (c == ',' || c == '\n') c = ';';
        w.row({num(p.e0.real()), num(p.e0.imag()), p.verdict ? to_string(*p.verdict) : "n/a", num(p.slope), note});
    }
    w.close();
}

void write_json(const std::filesystem::path& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << '\n';
    if (!out) throw std::runtime_error("cannot write " + path.string());
}

json read_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

}  // namespace nonbloch
