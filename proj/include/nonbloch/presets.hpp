#pragma once

#include <string>
#include <vector>

#include "nonbloch/symbol.hpp"

namespace nonbloch {

/// Named parameter set: the symbol plus the lattice and experiment settings
/// that go with it.
struct Preset {
    std::string name;
    MultibandSymbol symbol;
    int cells = 140;
    /// Healing presets: target energies and the lossy pulse.
    std::vector<cplx> healing_e0;
    double gamma = 10.0;
    int loss_range = 10;
    double t1 = 2.0;
    double t2 = 4.0;
};

/// h(k) = t1L e^{ik} + t1R e^{-ik} + t2L e^{2ik} + t2R e^{-2ik} − iκ.
LaurentSymbol nnn_chain(cplx t1_left, cplx t1_right, cplx t2_left, cplx t2_right, double kappa);

/// [[0, R+], [R−, 0]] − iκ with R± built from t1, t2, t3, γ1, γ2.
MultibandSymbol chiral_two_band(cplx t1, cplx t2, cplx t3, double gamma1, double gamma2, double kappa);
/// ½(A − B)σ_y + ½(A + B − iκ) with A = a1 e^{ik} + a−1 e^{−ik}, B likewise.
MultibandSymbol split_two_band(cplx a1, cplx a_1, cplx b1, cplx b_1, double kappa);
/// Two Hatano–Nelson chains of opposite bias coupled by δ, minus iκ.
MultibandSymbol coupled_chains(double t_left, double t_right, double v, double delta, double kappa);

/// Look up a preset by name (aliases such as "fig3f" or "fig4a" resolve to
/// the parameter set they share). Throws std::invalid_argument if unknown.
Preset preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace nonbloch
