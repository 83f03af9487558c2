#include "nonbloch/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace nonbloch {

namespace fs = std::filesystem;

int CsvTable::column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : static_cast<int>(it - header.begin());
}

double CsvTable::number(std::size_t row, int col) const {
    const std::string& cell = rows.at(row).at(static_cast<std::size_t>(col));
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end != cell.c_str() + cell.size())
        throw std::runtime_error(source + ":" + std::to_string(lines[row]) + ": column '" +
                                 header[static_cast<std::size_t>(col)] + "' is not a number: '" + cell + "'");
    return v;
}

CsvTable read_csv(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvTable table;
    table.source = path.string();
    std::string line;
    int number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.emplace_back();
        if (table.header.empty()) {
            table.header = cells;
            continue;
        }
        if (cells.size() != table.header.size())
            throw std::runtime_error(table.source + ":" + std::to_string(number) + ": expected " +
                                     std::to_string(table.header.size()) + " cells, found " +
                                     std::to_string(cells.size()));
        table.rows.push_back(std::move(cells));
        table.lines.push_back(number);
    }
    if (table.header.empty()) throw std::runtime_error(table.source + ":1: empty file");
    return table;
}

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"};

std::string fmt(double v, int digits = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '<') out += "&lt;";
        else if (c == '>') out += "&gt;";
        else if (c == '&') out += "&amp;";
        else out += c;
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (!std::isfinite(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    void finish() {
        if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
        if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) lo -= 0.5, hi += 0.5;
    }
};

std::vector<double> ticks(double lo, double hi) {
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    std::vector<double> out;
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return out;
}

// One panel with linear axes. Coordinates are given in data units.
class Svg {
public:
    Svg(std::string title, std::string xlabel, std::string ylabel, Range x, Range y)
        : title_(std::move(title)), xlabel_(std::move(xlabel)), ylabel_(std::move(ylabel)), x_(x), y_(y) {
        x_.finish();
        y_.finish();
        const double px = 0.03 * (x_.hi - x_.lo), py = 0.05 * (y_.hi - y_.lo);
        x_.lo -= px, x_.hi += px, y_.lo -= py, y_.hi += py;
    }

    double sx(double x) const { return left + (x - x_.lo) / (x_.hi - x_.lo) * (width - left - right); }
    double sy(double y) const { return height - bottom - (y - y_.lo) / (y_.hi - y_.lo) * (height - top - bottom); }

    void polyline(const std::vector<double>& xs, const std::vector<double>& ys, const std::string& color,
                  double stroke = 1.5, const std::string& dash = "") {
        std::string pts;
        auto flush = [&] {
            if (pts.empty()) return;
            body_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << stroke << "\""
                  << (dash.empty() ? "" : " stroke-dasharray=\"" + dash + "\"") << " points=\"" << pts << "\"/>\n";
            pts.clear();
        };
        // Long series keep the extremes of each of ~1000 buckets.
        const std::size_t bucket = std::max<std::size_t>(1, xs.size() / 1000);
        for (std::size_t i = 0; i < xs.size(); i += bucket) {
            const std::size_t end = std::min(xs.size(), i + bucket);
            std::size_t lo = i, hi = i;
            bool broken = false;
            for (std::size_t j = i; j < end; ++j) {
                if (!std::isfinite(xs[j]) || !std::isfinite(ys[j])) {
                    broken = true;
                    continue;
                }
                if (!std::isfinite(ys[lo]) || ys[j] < ys[lo]) lo = j;
                if (!std::isfinite(ys[hi]) || ys[j] > ys[hi]) hi = j;
            }
            if (broken) flush();
            if (!std::isfinite(xs[lo]) || !std::isfinite(ys[lo])) continue;
            for (std::size_t j : {std::min(lo, hi), std::max(lo, hi)}) {
                pts += fmt(sx(xs[j]), 6) + "," + fmt(sy(ys[j]), 6) + " ";
                if (lo == hi) break;
            }
        }
        flush();
    }

    void dot(double x, double y, const std::string& color, double r = 2.0) {
        if (!std::isfinite(x) || !std::isfinite(y)) return;
        body_ << "<circle cx=\"" << fmt(sx(x), 6) << "\" cy=\"" << fmt(sy(y), 6) << "\" r=\"" << r << "\" fill=\""
              << color << "\"/>\n";
    }

    void rect(double x0, double y0, double x1, double y1, const std::string& fill) {
        const double a = sx(x0), b = sx(x1), c = sy(y1), d = sy(y0);
        body_ << "<rect x=\"" << fmt(std::min(a, b), 6) << "\" y=\"" << fmt(std::min(c, d), 6) << "\" width=\""
              << fmt(std::abs(b - a) + 0.3, 5) << "\" height=\"" << fmt(std::abs(d - c) + 0.3, 5) << "\" fill=\""
              << fill << "\"/>\n";
    }

    void vline(double x, const std::string& color) {
        body_ << "<line x1=\"" << fmt(sx(x), 6) << "\" y1=\"" << top << "\" x2=\"" << fmt(sx(x), 6) << "\" y2=\""
              << height - bottom << "\" stroke=\"" << color << "\" stroke-dasharray=\"4 3\"/>\n";
    }

    void label(double x, double y, const std::string& text, const std::string& color) {
        body_ << "<text x=\"" << fmt(sx(x), 6) << "\" y=\"" << fmt(sy(y), 6) << "\" font-size=\"12\" fill=\"" << color
              << "\">" << escape(text) << "</text>\n";
    }

    void legend(const std::string& text, const std::string& color) {
        const double y = top + 16 + 16 * legends_++;
        body_ << "<line x1=\"" << width - right - 150 << "\" y1=\"" << y - 4 << "\" x2=\"" << width - right - 130
              << "\" y2=\"" << y - 4 << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
              << "<text x=\"" << width - right - 125 << "\" y=\"" << y << "\" font-size=\"12\">" << escape(text)
              << "</text>\n";
    }

    const Range& xr() const { return x_; }
    const Range& yr() const { return y_; }

    std::string str() const {
        std::ostringstream s;
        s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
          << "\" viewBox=\"0 0 " << width << " " << height << "\" font-family=\"sans-serif\">\n"
          << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
          << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape(title_)
          << "</text>\n";
        s << "<clipPath id=\"plot\"><rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right
          << "\" height=\"" << height - top - bottom << "\"/></clipPath>\n";
        s << "<g clip-path=\"url(#plot)\">\n" << body_.str() << "</g>\n";
        s << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width - left - right << "\" height=\""
          << height - top - bottom << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double t : ticks(x_.lo, x_.hi)) {
            const double px = sx(t);
            s << "<line x1=\"" << fmt(px, 6) << "\" y1=\"" << height - bottom << "\" x2=\"" << fmt(px, 6)
              << "\" y2=\"" << height - bottom + 5 << "\" stroke=\"black\"/>\n"
              << "<text x=\"" << fmt(px, 6) << "\" y=\"" << height - bottom + 18
              << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(t) << "</text>\n";
        }
        for (double t : ticks(y_.lo, y_.hi)) {
            const double py = sy(t);
            s << "<line x1=\"" << left - 5 << "\" y1=\"" << fmt(py, 6) << "\" x2=\"" << left << "\" y2=\""
              << fmt(py, 6) << "\" stroke=\"black\"/>\n"
              << "<text x=\"" << left - 8 << "\" y=\"" << fmt(py + 4, 6)
              << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(t) << "</text>\n";
        }
        s << "<text x=\"" << (left + width - right) / 2 << "\" y=\"" << height - 8
          << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(xlabel_) << "</text>\n"
          << "<text transform=\"translate(16," << (top + height - bottom) / 2
          << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(ylabel_) << "</text>\n"
          << "</svg>\n";
        return s.str();
    }

    static constexpr double width = 720, height = 460, left = 70, right = 20, top = 36, bottom = 50;

private:
    std::string title_, xlabel_, ylabel_;
    Range x_, y_;
    std::ostringstream body_;
    int legends_ = 0;
};

std::vector<double> column_values(const CsvTable& t, const std::string& name) {
    const int c = t.column(name);
    std::vector<double> out(t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) out[i] = t.number(i, c);
    return out;
}

bool has_columns(const CsvTable& t, std::initializer_list<const char*> names) {
    for (const char* n : names)
        if (t.column(n) < 0) return false;
    return true;
}

nlohmann::json sibling_json(const fs::path& csv, std::initializer_list<const char*> names) {
    for (const char* n : names) {
        const fs::path p = csv.parent_path() / n;
        if (!fs::exists(p)) continue;
        std::ifstream in(p);
        try {
            auto j = nlohmann::json::parse(in);
            if (j.contains("report") && j["report"].is_object()) return j["report"];
            return j;
        } catch (const nlohmann::json::exception&) {
            throw std::runtime_error(p.string() + ": not valid JSON");
        }
    }
    return nullptr;
}

std::string render_trace(const CsvTable& t, const fs::path& path) {
    const auto time = column_values(t, "t");
    std::vector<double> amp, norm;
    if (t.column("ln_amp_x0") >= 0) {
        amp = column_values(t, "ln_amp_x0");
        norm = column_values(t, "ln_norm");
    } else {
        amp = column_values(t, "amp_x0");
        norm = column_values(t, "norm");
        for (auto& v : amp) v = std::log(v);
        for (auto& v : norm) v = std::log(v);
    }
    Range xr, yr;
    for (double v : time) xr.add(v);
    for (double v : amp) yr.add(v);
    for (double v : norm) yr.add(v);
    Svg svg(path.filename().string(), "t", "ln amplitude", xr, yr);
    svg.polyline(time, amp, kPalette[0]);
    svg.polyline(time, norm, kPalette[1]);
    svg.legend("ln|psi(x0, t)|", kPalette[0]);
    svg.legend("ln||psi(t)||", kPalette[1]);

    const auto report = sibling_json(path, {"report.json", "multiband.json"});
    if (!report.is_object()) return svg.str();
    const double t0 = time.empty() ? 0.0 : time.front(), t1 = time.empty() ? 0.0 : time.back();
    struct Overlay {
        const char* key;
        const char* symbol;
        const char* color;
    };
    int row = 0;
    for (const Overlay& o : {Overlay{"lambda_fit", "lambda", "#0b3d91"}, Overlay{"lambda_tot_fit", "lambda_tot", "#8b0000"},
                             Overlay{"mu_fit", "mu", "#0b3d91"}, Overlay{"mu_tot_fit", "mu_tot", "#8b0000"}}) {
        if (!report.contains(o.key)) continue;
        const auto& f = report[o.key];
        const double a = f.value("t_begin", 0.0), b = f.value("t_end", 0.0);
        if (!(a >= t0 - 1e-9 && b <= t1 + 1e-9 && b > a)) continue;
        const double slope = f.value("slope", 0.0), c = f.value("intercept", 0.0), alpha = f.value("prefactor", 0.0);
        std::vector<double> xs, ys;
        for (int i = 0; i <= 60; ++i) {
            const double x = a + (b - a) * i / 60.0;
            xs.push_back(x);
            ys.push_back(slope * x + alpha * std::log(x) + c);
        }
        svg.polyline(xs, ys, o.color, 2.5, "6 4");
        const double ty = svg.yr().lo + (0.08 + 0.07 * row++) * (svg.yr().hi - svg.yr().lo);
        svg.label(svg.xr().lo + 0.03 * (svg.xr().hi - svg.xr().lo), ty,
                  std::string(o.symbol) + " fit slope = " + fmt(slope, 5), o.color);
    }
    return svg.str();
}

// Light-to-dark blue scale for v in [0, 1].
std::string shade(double v) {
    v = std::clamp(v, 0.0, 1.0);
    const int r = static_cast<int>(247 - v * (247 - 8));
    const int g = static_cast<int>(251 - v * (251 - 48));
    const int b = static_cast<int>(255 - v * (255 - 107));
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

std::string render_heatmap(const CsvTable& t, const fs::path& path) {
    const auto time = column_values(t, "t");
    const auto x = column_values(t, "x");
    const auto a = column_values(t, "amplitude");
    Range xr, yr;
    for (double v : x) xr.add(v);
    for (double v : time) yr.add(v);
    std::vector<double> ts = time;
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    const double dt = ts.size() > 1 ? (ts.back() - ts.front()) / (ts.size() - 1) : 1.0;
    // Thin the raster to at most ~200 time rows.
    const std::size_t stride = std::max<std::size_t>(1, ts.size() / 200);
    std::map<double, bool> keep;
    for (std::size_t i = 0; i < ts.size(); i += stride) keep[ts[i]] = true;
    Svg svg(path.filename().string(), "x", "t", xr, yr);
    for (std::size_t i = 0; i < time.size(); ++i) {
        if (!keep.count(time[i])) continue;
        svg.rect(x[i] - 0.5, time[i] - 0.5 * dt * stride, x[i] + 0.5, time[i] + 0.5 * dt * stride, shade(a[i]));
    }
    return svg.str();
}

std::string render_lambda(const CsvTable& t, const fs::path& path) {
    const auto v = column_values(t, "v");
    const auto l = column_values(t, "lambda");
    Range xr, yr;
    for (double z : v) xr.add(z);
    for (double z : l) yr.add(z);
    Svg svg(path.filename().string(), "v", "lambda(v)", xr, yr);
    svg.polyline(v, l, kPalette[0], 2.0);
    std::size_t best = 0;
    for (std::size_t i = 0; i < l.size(); ++i)
        if (l[i] > l[best]) best = i;
    if (!l.empty()) {
        // The refined peak from the run, else the best grid point.
        double vp = v[best], lp = l[best];
        const auto report = sibling_json(path, {"lambda_v.json", "report.json"});
        if (report.is_object() && report.contains("v_peak")) {
            vp = report["v_peak"].get<double>();
            if (report.contains("lambda_peak")) lp = report["lambda_peak"].get<double>();
        }
        svg.vline(vp, kPalette[1]);
        svg.dot(vp, lp, kPalette[1], 4.0);
        svg.label(vp, lp, "  v_peak = " + fmt(vp) + ", lambda = " + fmt(lp), kPalette[1]);
    }
    return svg.str();
}

std::string render_points(const CsvTable& t, const fs::path& path, const std::string& xc, const std::string& yc,
                          const std::string& group, const std::string& xlabel, const std::string& ylabel) {
    const auto xs = column_values(t, xc);
    const auto ys = column_values(t, yc);
    const int g = group.empty() ? -1 : t.column(group);
    Range xr, yr;
    for (double z : xs) xr.add(z);
    for (double z : ys) yr.add(z);
    Svg svg(path.filename().string(), xlabel, ylabel, xr, yr);
    std::map<std::string, int> groups;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const std::string key = g < 0 ? "" : t.rows[i][static_cast<std::size_t>(g)];
        const auto it = groups.emplace(key, static_cast<int>(groups.size())).first;
        svg.dot(xs[i], ys[i], kPalette[it->second % 8], key == "pbc" ? 1.0 : 2.5);
    }
    for (const auto& [key, idx] : groups)
        if (!key.empty()) svg.legend(key, kPalette[idx % 8]);
    return svg.str();
}

std::string render_flows(const CsvTable& t, const fs::path& path) {
    const auto s = column_values(t, "s");
    const auto kr = column_values(t, "re_k");
    const auto ki = column_values(t, "im_k");
    const int cs = t.column("saddle"), cb = t.column("branch"), ck = t.column("kind");
    Range xr, yr;
    xr.add(0.0);
    xr.add(2.0 * M_PI);
    for (double z : ki) yr.add(z);
    Svg svg(path.filename().string(), "Re k", "Im k", xr, yr);
    svg.polyline({0.0, 2.0 * M_PI}, {0.0, 0.0}, "black", 1.0, "2 2");
    std::vector<double> px, py;
    std::string current;
    std::string color;
    std::string dash;
    auto flush = [&] {
        svg.polyline(px, py, color, 1.5, dash);
        px.clear();
        py.clear();
    };
    for (std::size_t i = 0; i < s.size(); ++i) {
        const auto& r = t.rows[i];
        const std::string key = r[cs] + r[cb] + r[ck];
        if (key != current) {
            flush();
            current = key;
            const int idx = std::atoi(r[cs].c_str()) - 1;
            color = kPalette[std::max(idx, 0) % 8];
            dash = r[ck] == "descent" ? "4 3" : "";
        }
        // Break the line where k_r wraps around the cylinder.
        if (!px.empty() && std::abs(kr[i] - px.back()) > M_PI) flush();
        px.push_back(kr[i]);
        py.push_back(ki[i]);
    }
    flush();
    return svg.str();
}

std::string render_healing(const CsvTable& t, const fs::path& path) {
    const auto time = column_values(t, "t");
    std::vector<double> le;
    if (t.column("ln_epsilon") >= 0) {
        le = column_values(t, "ln_epsilon");
    } else {
        le = column_values(t, "epsilon");
        for (auto& v : le) v = std::log(v);
    }
    Range xr, yr;
    for (double v : time) xr.add(v);
    for (double v : le) yr.add(v);
    Svg svg(path.filename().string(), "t", "ln epsilon(t)", xr, yr);
    svg.polyline(time, le, kPalette[0], 2.0);
    const auto report = sibling_json(path, {"healing_report.json"});
    if (report.is_object() && report.contains("slope")) {
        const auto& f = report["slope"];
        const double a = f.value("t_begin", 0.0), b = f.value("t_end", 0.0);
        const double slope = f.value("slope", 0.0), c = f.value("intercept", 0.0), alpha = f.value("prefactor", 0.0);
        std::vector<double> xs, ys;
        for (int i = 0; i <= 60; ++i) {
            const double x = a + (b - a) * i / 60.0;
            xs.push_back(x);
            ys.push_back(slope * x + alpha * std::log(x) + c);
        }
        svg.polyline(xs, ys, kPalette[1], 2.5, "6 4");
        svg.label(svg.xr().lo + 0.03 * (svg.xr().hi - svg.xr().lo), svg.yr().lo + 0.08 * (svg.yr().hi - svg.yr().lo),
                  "slope = " + fmt(slope, 5) + " (" + report.value("verdict", std::string("?")) + ")", kPalette[1]);
    }
    return svg.str();
}

std::string render_sweep(const CsvTable& t, const fs::path& path) {
    const auto x = column_values(t, "t1L_im");
    const auto a = column_values(t, "t_c_theo");
    const auto b = column_values(t, "t_c_num");
    Range xr, yr;
    for (double v : x) xr.add(v);
    for (double v : a) yr.add(v);
    for (double v : b) yr.add(v);
    Svg svg(path.filename().string(), "Im t1L", "t_c", xr, yr);
    svg.polyline(x, a, kPalette[0], 2.0);
    svg.polyline(x, b, kPalette[1], 2.0, "5 3");
    for (std::size_t i = 0; i < x.size(); ++i) {
        svg.dot(x[i], a[i], kPalette[0], 3.0);
        svg.dot(x[i], b[i], kPalette[1], 3.0);
    }
    svg.legend("t_c theory", kPalette[0]);
    svg.legend("t_c numerics", kPalette[1]);
    return svg.str();
}

}  // namespace

std::string render_svg(const fs::path& csv) {
    const CsvTable t = read_csv(csv);
    if (has_columns(t, {"t", "amp_x0", "norm"})) return render_trace(t, csv);
    if (has_columns(t, {"t", "x", "amplitude"})) return render_heatmap(t, csv);
    if (has_columns(t, {"v", "lambda"}) && t.column("band") < 0) return render_lambda(t, csv);
    if (has_columns(t, {"re", "im", "kind"}))
        return render_points(t, csv, "re", "im", "kind", "Re E", "Im E");
    if (has_columns(t, {"re_beta", "im_beta"}))
        return render_points(t, csv, "re_beta", "im_beta", "", "Re beta", "Im beta");
    if (has_columns(t, {"re_k", "im_k", "re_S", "im_S"}))
        return render_points(t, csv, "re_k", "im_k", "band", "Re k", "Im k");
    if (has_columns(t, {"saddle", "branch", "kind", "s", "re_k", "im_k"})) return render_flows(t, csv);
    if (has_columns(t, {"t", "epsilon"})) return render_healing(t, csv);
    if (has_columns(t, {"re_E0", "im_E0", "verdict", "slope"}))
        return render_points(t, csv, "im_E0", "slope", "verdict", "Im E0", "slope of ln epsilon");
    if (has_columns(t, {"t1L_im", "t_c_theo", "t_c_num"})) return render_sweep(t, csv);
    throw std::runtime_error(csv.string() + ":1: unrecognized columns");
}

fs::path plot_file(const fs::path& csv, const fs::path& out_dir) {
    const std::string svg = render_svg(csv);
    fs::create_directories(out_dir);
    const fs::path out = out_dir / (csv.stem().string() + ".svg");
    std::ofstream f(out, std::ios::binary);
    f << svg;
    if (!f) throw std::runtime_error("cannot write " + out.string());
    return out;
}

}  // namespace nonbloch
