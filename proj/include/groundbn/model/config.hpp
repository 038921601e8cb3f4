#pragma once
// Ship, model and incident configuration.

#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "groundbn/discretize/cpt_synthesis.hpp"
#include "groundbn/discretize/distribution.hpp"
#include "groundbn/errors.hpp"
#include "groundbn/model/physics.hpp"

namespace groundbn::model {

enum class HullType { single_hull, double_hull };
enum class LoadingCondition { loaded, ballast };

struct ShipParticulars {
    std::string name;
    double length = 0.0;         // L, m
    double breadth = 0.0;        // B, m
    double depth = 0.0;          // D, m
    double design_draft = 0.0;   // T, m
    double service_speed = 0.0;  // V_s, kn
    std::optional<double> gm0;   // m
    std::optional<double> double_bottom_height;  // h_DB, m
    HullType hull = HullType::single_hull;
    BottomLayer outer;
    std::optional<BottomLayer> inner;
    std::optional<double> max_draft;  // T_0,max; defaults to the design draft

    double t0_max() const { return max_draft.value_or(design_draft); }
    bool double_hull() const { return hull == HullType::double_hull; }

    void validate() const {
        auto bad = [](const std::string& field, const std::string& why) {
            throw Error(ErrorCode::InvalidConfiguration, why, "ship." + field);
        };
        using Field = std::pair<double, const char*>;
        for (auto [v, f] : std::initializer_list<Field>{{length, "length"}, {breadth, "breadth"}, {depth, "depth"},
                                                        {design_draft, "design_draft"}, {service_speed, "service_speed"}})
            if (!(v > 0.0)) bad(f, "must be positive");
        auto check_layer = [&](const BottomLayer& l, const std::string& f) {
            if (!(l.t_eq > 0.0)) bad(f + ".t_eq", "must be positive");
            if (!(l.sigma0 > 0.0)) bad(f + ".sigma0", "must be positive");
            if (!(l.eps_f > 0.0 && l.eps_f < 1.0)) bad(f + ".eps_f", "must lie in (0, 1)");
        };
        check_layer(outer, "outer_bottom");
        if (double_hull()) {
            if (!inner) bad("inner_bottom", "a double hull needs inner bottom properties");
            check_layer(*inner, "inner_bottom");
            if (!double_bottom_height || !(*double_bottom_height > 0.0))
                bad("double_bottom_height", "a double hull needs a positive double bottom height");
            if (!(*double_bottom_height < 0.3 * depth))
                bad("double_bottom_height", "must be below 0.3 * depth");
        } else if (inner) {
            bad("inner_bottom", "a single hull has no inner bottom");
        }
        if (gm0 && !(*gm0 > 0.0)) bad("gm0", "must be positive");
        if (!(t0_max() > 0.0 && t0_max() <= depth)) bad("max_draft", "must lie in (0, depth]");
    }
};

// Error terms of the reported/measured quantities.
struct ErrorCatalog {
    double fh_cov = 0.10;          // horizontal force, multiplicative
    double v_sd = 0.24;            // reported speed, kn
    double m_cov = 0.025;          // reported displacement
    double l_sd = 5.0;             // reported damage length, m
    double q_cov_good = 0.10;      // measured flow rate
    double q_cov_poor = 0.30;
    double tp_sd = 0.25;           // measured drafts, m
    double ts_sd = 0.25;
    double r_cov = 0.10;           // calculated ground reaction
    double h_sd = 0.75;            // reported water depth, m
    double d_cov_good = 0.10;      // inspected extents
    double d_cov_poor = 0.30;
    double y_sd_good = 1.0;        // inspected location, m
    double y_sd_poor = 2.0;
};

struct ModuleToggles {
    bool crashworthiness = true;
    bool hydraulic = true;
    bool hydrostatic = true;
    bool inspection = true;

    bool any() const { return crashworthiness || hydraulic || hydrostatic || inspection; }
};

// Per-node replacement for the default bin layout. Exactly one of
// edges / count / width is used, in that order of precedence; lo/hi
// narrow or widen the default range.
struct BinOverride {
    std::vector<double> edges;
    std::optional<std::size_t> count;
    std::optional<double> width;
    std::optional<double> lo, hi;
};

struct PriorConfig {
    std::optional<discretize::DistributionSpec> mass;          // M, t
    std::optional<discretize::DistributionSpec> speed;         // V, kn
    std::optional<discretize::DistributionSpec> damage_length; // L_D, m
    std::optional<discretize::DistributionSpec> reaction;      // R, t
    std::optional<discretize::DistributionSpec> location;      // Y_D, m
    std::optional<discretize::DistributionSpec> water_depth;   // H, m
    std::optional<discretize::DistributionSpec> port_draft;    // T_p, m
};

struct ModelConfig {
    double added_mass_fraction = 0.05;
    double g = kGravity;
    double rho_w = 1025.0;
    double rho_o = 900.0;
    discretize::Normal discharge{0.625, 0.02};
    ErrorCatalog errors;
    ModuleToggles modules;
    PriorConfig priors;
    std::map<std::string, BinOverride> bins;
    discretize::SynthesisConfig synthesis;

    void validate() const {
        auto bad = [](const std::string& field, const std::string& why) {
            throw Error(ErrorCode::InvalidConfiguration, why, "model." + field);
        };
        if (!(added_mass_fraction >= 0.0)) bad("added_mass_fraction", "must be non-negative");
        if (!(g > 0.0)) bad("g", "must be positive");
        if (!(rho_w > 0.0)) bad("rho_w", "must be positive");
        if (!(rho_o > 0.0)) bad("rho_o", "must be positive");
        if (!(discharge.sd > 0.0 && discharge.mean > 0.0)) bad("discharge", "needs positive mean and sd");
        const ErrorCatalog& e = errors;
        using Field = std::pair<double, const char*>;
        for (auto [v, f] : std::initializer_list<Field>{{e.fh_cov, "fh_cov"}, {e.v_sd, "v_sd"}, {e.m_cov, "m_cov"}, {e.l_sd, "l_sd"},
                            {e.q_cov_good, "q_cov_good"}, {e.q_cov_poor, "q_cov_poor"}, {e.tp_sd, "tp_sd"},
                            {e.ts_sd, "ts_sd"}, {e.r_cov, "r_cov"}, {e.h_sd, "h_sd"}, {e.d_cov_good, "d_cov_good"},
                            {e.d_cov_poor, "d_cov_poor"}, {e.y_sd_good, "y_sd_good"}, {e.y_sd_poor, "y_sd_poor"}})
            if (!(v > 0.0)) bad(std::string("errors.") + f, "must be positive");
        if (!modules.any()) bad("modules", "at least one module must be enabled");
        if (synthesis.samples_per_cell < 1) bad("synthesis.samples_per_cell", "must be >= 1");
    }
};

struct IncidentConfig {
    std::optional<LoadingCondition> loading;
    std::optional<double> tank_length;     // l_D, m
    double tank_length_sd = 0.0;           // additive Gaussian sd on l_D
    std::optional<double> oil_level;       // h_o, m
    std::optional<double> head;            // h_w, m
    std::optional<double> gm;              // post-damage GM, m
    std::optional<double> displacement;    // M', t
    bool displacement_uncertain = false;   // apply the reported-displacement error to M'
    std::optional<double> reaction_estimate;  // expected R_c, t; widens the R prior
    std::optional<double> reaction_upper;     // explicit R prior upper bound, t
    double visibility_good = 0.5;          // prior P(Vis = good)
    double flow_quality_good = 0.5;        // prior P(Q_eps = good)

    void validate(const ShipParticulars& ship) const {
        auto bad = [](const std::string& field, const std::string& why) {
            throw Error(ErrorCode::InvalidConfiguration, why, "incident." + field);
        };
        if (tank_length && !(*tank_length > 0.0 && *tank_length <= ship.length))
            bad("tank_length", "must lie in (0, L]");
        if (!(tank_length_sd >= 0.0)) bad("tank_length_sd", "must be non-negative");
        if (oil_level && !(*oil_level >= 0.0 && *oil_level <= ship.depth)) bad("oil_level", "must lie in [0, D]");
        if (head && !(*head >= 0.0)) bad("head", "must be non-negative");
        if (gm && !(*gm > 0.0)) bad("gm", "must be positive");
        if (displacement && !(*displacement > 0.0)) bad("displacement", "must be positive");
        if (reaction_estimate && !(*reaction_estimate >= 0.0)) bad("reaction_estimate", "must be non-negative");
        if (reaction_upper && !(*reaction_upper > 0.0)) bad("reaction_upper", "must be positive");
        if (!(visibility_good >= 0.0 && visibility_good <= 1.0)) bad("visibility_good", "must lie in [0, 1]");
        if (!(flow_quality_good >= 0.0 && flow_quality_good <= 1.0)) bad("flow_quality_good", "must lie in [0, 1]");
    }
};

}  // namespace groundbn::model
