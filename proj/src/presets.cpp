#include "nonbloch/presets.hpp"

#include <map>
#include <stdexcept>

namespace nonbloch {

LaurentSymbol nnn_chain(cplx t1_left, cplx t1_right, cplx t2_left, cplx t2_right, double kappa) {
    return LaurentSymbol::from_hoppings(t1_left, t1_right, t2_left, t2_right, kappa);
}

MultibandSymbol chiral_two_band(cplx t1, cplx t2, cplx t3, double gamma1, double gamma2, double kappa) {
    MultibandSymbol h(2);
    h.entry(0, 1) = LaurentSymbol({{1, t3}, {-1, t2 - gamma2 / 2.0}, {0, t1 + gamma1 / 2.0}});
    h.entry(1, 0) = LaurentSymbol({{-1, t3}, {1, t2 + gamma2 / 2.0}, {0, t1 - gamma1 / 2.0}});
    h.entry(0, 0) = LaurentSymbol::constant(cplx(0.0, -kappa));
    h.entry(1, 1) = LaurentSymbol::constant(cplx(0.0, -kappa));
    return h;
}

MultibandSymbol split_two_band(cplx a1, cplx a_1, cplx b1, cplx b_1, double kappa) {
    const LaurentSymbol a({{1, a1}, {-1, a_1}});
    const LaurentSymbol b({{1, b1}, {-1, b_1}});
    const LaurentSymbol diag = 0.5 * (a + b) + LaurentSymbol::constant(cplx(0.0, -kappa / 2.0));
    const LaurentSymbol off = a - b;
    MultibandSymbol h(2);
    h.entry(0, 0) = diag;
    h.entry(1, 1) = diag;
    h.entry(0, 1) = cplx(0.0, -0.5) * off;
    h.entry(1, 0) = cplx(0.0, 0.5) * off;
    return h;
}

MultibandSymbol coupled_chains(double t_left, double t_right, double v, double delta, double kappa) {
    MultibandSymbol h(2);
    h.entry(0, 0) = LaurentSymbol({{1, t_left}, {-1, t_right}, {0, cplx(v, -kappa)}});
    h.entry(1, 1) = LaurentSymbol({{1, t_right}, {-1, t_left}, {0, cplx(-v, -kappa)}});
    h.entry(0, 1) = LaurentSymbol::constant(delta);
    h.entry(1, 0) = LaurentSymbol::constant(delta);
    return h;
}

namespace {

const std::map<std::string, std::string>& aliases() {
    static const std::map<std::string, std::string> table = {
        {"fig3a", "fig2b"}, {"fig3b", "fig2b"}, {"fig3c", "fig2b"}, {"fig3d", "fig2b"},
        {"fig3e", "fig4e"}, {"fig3f", "fig4e"}, {"fig3g", "fig4e"}, {"fig3h", "fig4e"},
        {"fig4a", "fig2a"}, {"fig4b", "fig2a"}, {"fig4c", "fig2a"}, {"fig4d", "fig2a"},
        {"fig4f", "fig4e"}, {"fig4g", "fig4e"}, {"fig4h", "fig4e"},
        {"fig5a", "fig2a"}, {"fig5b", "fig4e"},
    };
    return table;
}

}  // namespace

Preset preset(const std::string& requested) {
    const auto alias = aliases().find(requested);
    const std::string name = alias == aliases().end() ? requested : alias->second;
    const cplx i1(0.0, 1.0);
    Preset p;
    p.name = name;
    if (name == "fig2a") {
        p.symbol = nnn_chain(1.2 * i1, -0.8 * i1, 0.35 * i1, 0.05 * i1, 0.35);
    } else if (name == "fig2b") {
        p.symbol = nnn_chain(1.2 * i1, -0.8 * i1, 0.6 * i1, 0.1 * i1, 0.7);
    } else if (name == "fig4e") {
        p.symbol = nnn_chain(2.05 * i1, -0.95 * i1, 0.85 * i1, -0.15 * i1, 0.15);
    } else if (name == "fig7") {
        p.symbol = nnn_chain(1.2 * i1, -0.8 * i1, 0.6 * i1, 0.1 * i1, 0.7);
        p.cells = 51;
    } else if (name == "fig6a") {
        p.symbol = nnn_chain(1.2 * i1, -0.8 * i1, 0.35 * i1, 0.05 * i1, 0.0);
        p.cells = 600;
        p.healing_e0 = {cplx(-1.0, 0.05), cplx(-1.2, -0.05)};
    } else if (name == "fig6e") {
        p.symbol = nnn_chain(2.05 * i1, -0.95 * i1, 0.85 * i1, -0.15 * i1, -0.2);
        p.cells = 600;
        p.healing_e0 = {cplx(-1.667, 0.2)};
    } else if (name == "figS3a") {
        p.symbol = chiral_two_band(0.1, 0.4, 0.1 * i1, 0.2, 0.2, 0.3);
        p.cells = 50;
    } else if (name == "figS3b") {
        p.symbol = split_two_band(0.2, 0.6, cplx(0.2, 0.8), 0.3, 2.0);
        p.cells = 50;
    } else if (name == "figS3c") {
        p.symbol = coupled_chains(1.4, 0.6, 0.5, 1e-4, 0.5);
        p.cells = 50;
    } else {
        throw std::invalid_argument("unknown preset '" + requested + "'");
    }
    return p;
}

std::vector<std::string> preset_names() {
    std::vector<std::string> names = {"fig2a", "fig2b", "fig4e", "fig6a", "fig6e",
                                      "fig7",  "figS3a", "figS3b", "figS3c"};
    for (const auto& [alias, target] : aliases()) names.push_back(alias);
    return names;
}

}  // namespace nonbloch
