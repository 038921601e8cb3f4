#pragma once
// Deterministic relations of the grounding model. Units: tonnes, knots,
// metres, newtons, joules, m^3/s unless a parameter says otherwise.

#include <cmath>
#include <span>

#include "groundbn/errors.hpp"

namespace groundbn::model {

inline constexpr double kKnot = 0.51444;  // m/s
inline constexpr double kGravity = 9.81;

struct BottomLayer {
    double t_eq = 0.0;    // m
    double sigma0 = 0.0;  // Pa
    double eps_f = 0.0;
};

// E = 1/2 (M + Ma) V^2 with Ma = f M.
inline double kinetic_energy(double mass_t, double speed_kn, double added_mass_fraction = 0.05) {
    const double v = speed_kn * kKnot;
    return 0.5 * (1.0 + added_mass_fraction) * mass_t * 1000.0 * v * v;
}

// Median horizontal grounding force; the lognormal error is applied in the table.
inline double horizontal_force(double energy_j, double length_m) {
    if (!(length_m > 0.0)) throw Error(ErrorCode::DivisionByZeroLength, "damage length must be positive", "L_D");
    return energy_j / length_m;
}

inline double layer_resistance(const BottomLayer& l) {
    return l.sigma0 * std::pow(l.eps_f, 0.71) * std::pow(l.t_eq, 1.17);
}

inline double total_resistance(std::span<const BottomLayer> layers) {
    double k = 0.0;
    for (const auto& l : layers) k += layer_resistance(l);
    return 0.77 * k;
}

// Tearing force for a given width, and its inverse.
inline double tearing_force(double width_m, std::span<const BottomLayer> layers) {
    return total_resistance(layers) * std::pow(width_m, 0.83);
}

inline double damage_width(double force_n, std::span<const BottomLayer> layers) {
    if (layers.empty()) throw Error(ErrorCode::InvalidParameter, "at least one bottom layer is required");
    if (!(force_n > 0.0)) return 0.0;
    return std::pow(force_n / total_resistance(layers), 1.0 / 0.83);
}

// Orifice flow through an opening of area l_D * D_t.
inline double flooding_rate(double cd, double tank_length_m, double width_m, double head_m, double g = kGravity) {
    if (head_m <= 0.0) return 0.0;
    return cd * tank_length_m * width_m * std::sqrt(2.0 * g * head_m);
}

struct OutflowRate {
    double rate = 0.0;
    bool equilibrium = false;  // net oil head <= 0: no outflow
};

inline OutflowRate oil_outflow_rate(double cd, double tank_length_m, double width_m, double oil_level_m,
                                    double head_m, double rho_w, double rho_o, double g = kGravity) {
    const double net = oil_level_m - rho_w / rho_o * head_m;
    if (net <= 0.0) return {0.0, true};
    return {cd * tank_length_m * width_m * std::sqrt(2.0 * g * net), false};
}

// tan(phi) from the moment balance R*Y_D = (W' - R) GM tan(phi); port positive.
inline double heel_tangent(double reaction_t, double displacement_t, double gm_m, double y_d_m) {
    if (!(reaction_t < displacement_t))
        throw Error(ErrorCode::GroundReactionExceedsWeight, "ground reaction must be smaller than the displacement", "R");
    if (!(gm_m > 0.0)) throw Error(ErrorCode::InvalidParameter, "GM must be positive", "GM");
    return reaction_t * y_d_m / ((displacement_t - reaction_t) * gm_m);
}

inline double starboard_draft(double port_draft_m, double tan_phi, double breadth_m) {
    return port_draft_m + breadth_m * tan_phi;
}

// Draft at the rock: mean draft corrected by the heel over the offset Y_D.
inline double rock_draft(double port_draft_m, double stbd_draft_m, double y_d_m, double breadth_m) {
    return 0.5 * (port_draft_m + stbd_draft_m) - y_d_m * (stbd_draft_m - port_draft_m) / breadth_m;
}

inline double penetration(double rock_draft_m, double water_depth_m) {
    return std::max(0.0, rock_draft_m - water_depth_m);
}

}  // namespace groundbn::model
