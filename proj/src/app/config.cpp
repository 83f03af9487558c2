#include "nonbloch/config.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <set>
#include <stdexcept>

#include "nonbloch/presets.hpp"

namespace nonbloch {

const std::vector<std::string>& task_names() {
    static const std::vector<std::string> names = {"spectra",  "saddles",   "thimbles", "evolve",
                                                   "lambda_v", "crossover", "healing",  "multiband"};
    return names;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
    throw std::invalid_argument("config" + path + ": " + what);
}

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    for (const auto& [key, value] : j.items())
        if (!allowed.count(key)) fail(path, "unknown key '" + key + "'");
}

void read(const json& j, const char* key, double& out, const std::string& path) {
    if (!j.contains(key)) return;
    if (!j[key].is_number()) fail(path + "." + key, "expected a number");
    out = j[key].get<double>();
}

void read(const json& j, const char* key, int& out, const std::string& path) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer()) fail(path + "." + key, "expected an integer");
    out = j[key].get<int>();
}

void read(const json& j, const char* key, bool& out, const std::string& path) {
    if (!j.contains(key)) return;
    if (!j[key].is_boolean()) fail(path + "." + key, "expected true or false");
    out = j[key].get<bool>();
}

void read(const json& j, const char* key, std::string& out, const std::string& path) {
    if (!j.contains(key)) return;
    if (!j[key].is_string()) fail(path + "." + key, "expected a string");
    out = j[key].get<std::string>();
}

cplx read_complex(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    fail(path, "expected a number or [re, im]");
}

void apply_preset(ExperimentConfig& c, const std::string& name) {
    const Preset p = preset(name);
    c.preset = p.name;
    c.symbol = p.symbol;
    c.cells = p.cells;
    c.healing.e0 = p.healing_e0;
    c.healing.gamma = p.gamma;
    c.healing.loss_range = p.loss_range;
    c.healing.t1 = p.t1;
    c.healing.t2 = p.t2;
    if (p.name == "fig7") c.sweep_t1L = {1.0, 1.1, 1.2, 1.3, 1.4};
    c.preset_defaults = true;
}

}  // namespace

ExperimentConfig parse_config(const json& j) {
    only_keys(j, {"preset", "model", "tasks", "L", "x0", "initial", "flat_width", "time", "out", "tolerances",
                  "healing", "sweep_t1L", "seed", "threads", "v_points"},
              "");
    ExperimentConfig c;
    if (j.contains("preset") == j.contains("model")) fail("", "exactly one of 'preset' and 'model' is required");
    if (j.contains("preset")) {
        if (!j["preset"].is_string()) fail(".preset", "expected a string");
        try {
            apply_preset(c, j["preset"].get<std::string>());
        } catch (const std::invalid_argument& e) {
            fail(".preset", e.what());
        }
    } else {
        c.symbol = model_from_json(j["model"]);
    }

    if (j.contains("tasks")) {
        if (!j["tasks"].is_array()) fail(".tasks", "expected an array");
        for (std::size_t i = 0; i < j["tasks"].size(); ++i) {
            const auto& t = j["tasks"][i];
            const std::string path = ".tasks[" + std::to_string(i) + "]";
            if (!t.is_string()) fail(path, "expected a string");
            const auto name = t.get<std::string>();
            const auto& known = task_names();
            if (std::find(known.begin(), known.end(), name) == known.end()) fail(path, "unknown task '" + name + "'");
            c.tasks.push_back(name);
        }
    }

    if (j.contains("L") || j.contains("x0") || j.contains("model") || j.contains("initial"))
        c.preset_defaults = false;
    read(j, "L", c.cells, "");
    if (c.cells < 3) fail(".L", "must be at least 3");
    read(j, "x0", c.x0, "");
    if (c.x0 < 0 || c.x0 >= c.cells) fail(".x0", "outside the lattice");
    read(j, "initial", c.initial, "");
    if (c.initial != "delta" && c.initial != "flat") fail(".initial", "expected \"delta\" or \"flat\"");
    read(j, "flat_width", c.flat_width, "");
    if (c.flat_width < 1 || c.flat_width > c.cells) fail(".flat_width", "outside the lattice");

    if (j.contains("time")) {
        const auto& t = j["time"];
        only_keys(t, {"dt", "lambda_from", "lambda_to", "mu_from", "short_span", "long_time", "long_dt", "snapshot_every"},
                  ".time");
        read(t, "dt", c.time.dt, ".time");
        read(t, "lambda_from", c.time.lambda_from, ".time");
        read(t, "lambda_to", c.time.lambda_to, ".time");
        read(t, "mu_from", c.time.mu_from, ".time");
        read(t, "short_span", c.time.short_span, ".time");
        read(t, "long_time", c.time.long_time, ".time");
        read(t, "long_dt", c.time.long_dt, ".time");
        read(t, "snapshot_every", c.time.snapshot_every, ".time");
        if (c.time.dt < 0) fail(".time.dt", "must be non-negative");
        if (!(c.time.lambda_from < c.time.lambda_to)) fail(".time", "lambda_from must be below lambda_to");
        if (c.time.long_dt <= 0) fail(".time.long_dt", "must be positive");
        if (c.time.snapshot_every <= 0) fail(".time.snapshot_every", "must be positive");
    }

    read(j, "out", c.out, "");

    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        only_keys(t, {"lambda", "mu", "lambda_tot", "v_peak", "t_c", "healing_slope", "multiband", "identity"},
                  ".tolerances");
        read(t, "lambda", c.tolerances.lambda, ".tolerances");
        read(t, "mu", c.tolerances.mu, ".tolerances");
        read(t, "lambda_tot", c.tolerances.lambda_tot, ".tolerances");
        read(t, "v_peak", c.tolerances.v_peak, ".tolerances");
        read(t, "t_c", c.tolerances.t_c, ".tolerances");
        read(t, "healing_slope", c.tolerances.healing_slope, ".tolerances");
        read(t, "multiband", c.tolerances.multiband, ".tolerances");
        read(t, "identity", c.tolerances.identity, ".tolerances");
    }

    if (j.contains("healing")) {
        const auto& h = j["healing"];
        only_keys(h, {"E0", "gamma", "l", "offset", "t1", "t2", "t_end", "scan", "scan_points", "scan_step"},
                  ".healing");
        if (h.contains("E0")) {
            if (!h["E0"].is_array()) fail(".healing.E0", "expected an array");
            c.healing.e0.clear();
            for (std::size_t i = 0; i < h["E0"].size(); ++i)
                c.healing.e0.push_back(read_complex(h["E0"][i], ".healing.E0[" + std::to_string(i) + "]"));
        }
        read(h, "gamma", c.healing.gamma, ".healing");
        read(h, "l", c.healing.loss_range, ".healing");
        read(h, "offset", c.healing.site_offset, ".healing");
        read(h, "t1", c.healing.t1, ".healing");
        read(h, "t2", c.healing.t2, ".healing");
        read(h, "t_end", c.healing.t_end, ".healing");
        read(h, "scan", c.healing.scan, ".healing");
        read(h, "scan_points", c.healing.scan_points, ".healing");
        read(h, "scan_step", c.healing.scan_step, ".healing");
        if (!(c.healing.t1 < c.healing.t2)) fail(".healing", "t1 must be below t2");
        if (c.healing.t_end != 0.0 && !(c.healing.t2 < c.healing.t_end)) fail(".healing", "t2 must be below t_end");
        if (c.healing.loss_range < 1) fail(".healing.l", "must be positive");
        if (c.healing.scan_points < 2) fail(".healing.scan_points", "must be at least 2");
        if (c.healing.scan_step <= 0) fail(".healing.scan_step", "must be positive");
    }

    if (j.contains("sweep_t1L")) {
        if (!j["sweep_t1L"].is_array()) fail(".sweep_t1L", "expected an array");
        c.sweep_t1L.clear();
        for (const auto& v : j["sweep_t1L"]) {
            if (!v.is_number()) fail(".sweep_t1L", "expected numbers");
            c.sweep_t1L.push_back(v.get<double>());
        }
    }

    int seed = static_cast<int>(c.seed);
    read(j, "seed", seed, "");
    if (seed < 0) fail(".seed", "must be non-negative");
    c.seed = static_cast<unsigned>(seed);
    read(j, "threads", c.threads, "");
    if (c.threads < 0) fail(".threads", "must be non-negative");
    read(j, "v_points", c.v_points, "");
    if (c.v_points < 2) fail(".v_points", "must be at least 2");
    return c;
}

ExperimentConfig preset_config(const std::string& name, const std::vector<std::string>& tasks) {
    json j = {{"preset", name}, {"tasks", tasks}};
    return parse_config(j);
}

json config_to_json(const ExperimentConfig& c) {
    json e0 = json::array();
    for (const auto& z : c.healing.e0) e0.push_back(to_json(z));
    return {{"preset", c.preset},
            {"model", model_to_json(c.symbol)},
            {"tasks", c.tasks},
            {"L", c.cells},
            {"x0", c.x0},
            {"initial", c.initial},
            {"flat_width", c.flat_width},
            {"time",
             {{"dt", c.time.dt},
              {"lambda_from", c.time.lambda_from},
              {"lambda_to", c.time.lambda_to},
              {"mu_from", c.time.mu_from},
              {"short_span", c.time.short_span},
              {"long_time", c.time.long_time},
              {"long_dt", c.time.long_dt},
              {"snapshot_every", c.time.snapshot_every}}},
            {"tolerances",
             {{"lambda", c.tolerances.lambda},
              {"mu", c.tolerances.mu},
              {"lambda_tot", c.tolerances.lambda_tot},
              {"v_peak", c.tolerances.v_peak},
              {"t_c", c.tolerances.t_c},
              {"healing_slope", c.tolerances.healing_slope},
              {"multiband", c.tolerances.multiband},
              {"identity", c.tolerances.identity}}},
            {"healing",
             {{"E0", e0},
              {"gamma", c.healing.gamma},
              {"l", c.healing.loss_range},
              {"offset", c.healing.site_offset},
              {"t1", c.healing.t1},
              {"t2", c.healing.t2},
              {"t_end", c.healing.t_end},
              {"scan", c.healing.scan},
              {"scan_points", c.healing.scan_points},
              {"scan_step", c.healing.scan_step}}},
            {"sweep_t1L", c.sweep_t1L},
            {"seed", c.seed},
            {"v_points", c.v_points}};
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace nonbloch
