#pragma once
// Assembles the grounding-damage network from ship, model and incident
// configuration. Node ids:
//
//   crashworthiness  M, M_r, V, V_r, E [MJ], L_D, L_D_r, F_H [MN], D_t
//   damage           D_t, D_v, Y_D, IHB
//   hydraulic        LC, WI, OS, Q, Q_eps, Q_m
//   hydrostatic      M_prime, R, R_c, phi [deg], T_p, T_p_m, T_s, T_s_m, T_D, H, H_r
//   inspection       Vis, Z_t, Z_v, Z_y

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "groundbn/bn/network.hpp"
#include "groundbn/discretize/binning.hpp"
#include "groundbn/discretize/cpt_synthesis.hpp"
#include "groundbn/discretize/distribution.hpp"
#include "groundbn/model/config.hpp"
#include "groundbn/model/damage_states.hpp"
#include "groundbn/model/physics.hpp"

namespace groundbn::model {

// Nodes that accept evidence, in display order.
inline const std::vector<std::string>& observable_ids() {
    static const std::vector<std::string> ids{"M_r", "V_r", "L_D_r", "R_c", "H_r", "T_p_m", "T_s_m", "Q_m",
                                              "WI",  "OS",  "LC",    "Q_eps", "Vis", "Z_t",  "Z_v",  "Z_y"};
    return ids;
}

inline bool is_observable(const std::string& id) {
    const auto& ids = observable_ids();
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

struct GroundingModel {
    std::shared_ptr<const bn::Network> network;
    DamageStateSpec damage;
    std::vector<std::string> observables;  // observable ids present in the network
};

namespace detail {

using discretize::BinningPolicy;
using discretize::Distribution;
using discretize::NoiseModel;
using discretize::ParentAxis;

constexpr double kDeg = std::numbers::pi / 180.0;
// Widest heel the phi node resolves; larger implied heels are clamped.
constexpr double kMaxHeelDeg = 10.0;

// Default layout of one node before overrides.
struct DefaultBins {
    double lo = 0.0, hi = 1.0;
    std::size_t count = 24;
    std::optional<double> width;
    bool geometric = false;
    double span = 1000.0;  // geometric: hi / (upper edge of the first bin)
};

inline double finite_lo(const Distribution& d) {
    return std::isfinite(d.support_lo()) ? d.support_lo() : d.quantile(1e-6);
}
inline double finite_hi(const Distribution& d) {
    return std::isfinite(d.support_hi()) ? d.support_hi() : d.quantile(1.0 - 1e-6);
}

class Builder {
public:
    Builder(const ShipParticulars& ship, const ModelConfig& model, const IncidentConfig& incident,
            DamageStateSpec damage)
        : ship_(ship), model_(model), inc_(incident), dmg_(std::move(damage)) {}

    GroundingModel run();

private:
    const ShipParticulars& ship_;
    const ModelConfig& model_;
    const IncidentConfig& inc_;
    DamageStateSpec dmg_;

    std::vector<bn::DiscreteNode> nodes_;
    std::vector<bn::ConditionalTable> tables_;
    std::map<std::string, std::size_t> index_;

    const bn::DiscreteNode& node(const std::string& id) const { return nodes_[index_.at(id)]; }
    bool has(const std::string& id) const { return index_.count(id) != 0; }

    BinningPolicy bins(const std::string& id, DefaultBins d) const {
        try {
            if (auto it = model_.bins.find(id); it != model_.bins.end()) {
                const BinOverride& o = it->second;
                if (!o.edges.empty()) return BinningPolicy::edges(o.edges);
                if (o.lo) d.lo = *o.lo;
                if (o.hi) d.hi = *o.hi;
                if (o.count) {
                    d.count = *o.count;
                    d.width.reset();
                }
                if (o.width) {
                    d.width = *o.width;
                    d.geometric = false;
                }
            }
            if (d.width) return BinningPolicy::width(d.lo, d.hi, *d.width);
            if (d.geometric) return BinningPolicy::geometric(d.hi / d.span, d.hi, d.count);
            return BinningPolicy::uniform(d.lo, d.hi, d.count);
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidConfiguration, e.detail(), "model.bins." + id);
        }
    }

    void add(bn::DiscreteNode n, bn::ConditionalTable t) {
        index_[n.id] = nodes_.size();
        nodes_.push_back(std::move(n));
        tables_.push_back(std::move(t));
    }

    void add_prior(const std::string& id, const std::string& unit, const BinningPolicy& b, const Distribution& d) {
        add(bn::interval_node(id, b.edges(), {}, unit), {id, discretize::prior_table(d, b)});
    }

    void add_categorical(const std::string& id, std::vector<std::string> labels, std::vector<std::string> parents,
                         std::vector<double> values) {
        add(bn::categorical_node(id, std::move(labels), std::move(parents)), {id, std::move(values)});
    }

    void add_functional(const std::string& id, const std::string& unit, const BinningPolicy& b,
                        std::vector<std::string> parents, const discretize::CellFunction& f,
                        const discretize::NoiseSelector& noise, std::vector<Distribution> aux = {}) {
        std::vector<ParentAxis> axes;
        for (const auto& p : parents) {
            const auto& pn = node(p);
            axes.push_back(pn.is_interval() ? ParentAxis::numeric(pn.edges()) : ParentAxis::categorical(pn.cardinality()));
        }
        auto table = discretize::functional_cpt(id, b, axes, f, noise, model_.synthesis, aux);
        add(bn::interval_node(id, b.edges(), std::move(parents), unit), std::move(table));
    }

    void add_functional(const std::string& id, const std::string& unit, const BinningPolicy& b,
                        std::vector<std::string> parents, const discretize::CellFunction& f, const NoiseModel& noise,
                        std::vector<Distribution> aux = {}) {
        add_functional(id, unit, b, std::move(parents), f,
                       [noise](std::span<const std::size_t>) { return noise; }, std::move(aux));
    }

    // Reported value = latent value (+|x) error, as a leaf below `latent`.
    void add_reported(const std::string& id, const std::string& latent, const BinningPolicy& b,
                      const NoiseModel& noise) {
        add_functional(id, node(latent).unit, b, {latent}, [](std::span<const double> x) { return x[0]; }, noise);
    }

    static NoiseModel additive_normal(double sd) {
        return NoiseModel::additive(discretize::make_distribution(discretize::Normal{0.0, sd}));
    }
    static NoiseModel lognormal(double cov) {
        return NoiseModel::multiplicative(discretize::make_distribution(discretize::LognormalMedianCov{1.0, cov}));
    }

    Distribution prior_or(const std::optional<discretize::DistributionSpec>& spec, discretize::DistributionSpec fallback,
                          const std::string& field) const {
        try {
            return discretize::make_distribution(spec ? *spec : fallback);
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidConfiguration, e.detail(), "model.priors." + field);
        }
    }

    std::vector<BottomLayer> layers(bool inner_breached) const {
        std::vector<BottomLayer> l{ship_.outer};
        if (inner_breached && ship_.inner) l.push_back(*ship_.inner);
        return l;
    }

    void check_complete() const;
    void crashworthiness();
    void damage_nodes();
    void hydraulic();
    void hydrostatic();
    void inspection();

    bool hydraulic_on() const { return model_.modules.hydraulic && ship_.double_hull(); }
    bool need_location() const { return model_.modules.hydrostatic || model_.modules.inspection; }
    bool need_penetration() const { return need_location() || ship_.double_hull(); }
};

inline void Builder::check_complete() const {
    std::vector<std::string> missing;
    if (model_.modules.crashworthiness && !model_.priors.mass) missing.push_back("model.priors.mass");
    if (hydraulic_on()) {
        if (!inc_.tank_length) missing.push_back("incident.tank_length");
        if (!inc_.head) missing.push_back("incident.head");
        if (inc_.loading != LoadingCondition::ballast && !inc_.oil_level) missing.push_back("incident.oil_level");
    }
    if (model_.modules.hydrostatic) {
        if (!inc_.gm) missing.push_back("incident.gm");
        if (!inc_.displacement) missing.push_back("incident.displacement");
    }
    if (missing.empty()) return;
    std::string msg = "missing inputs for the enabled modules:";
    for (const auto& m : missing) msg += " " + m;
    throw Error(ErrorCode::ConfigurationIncomplete, msg, missing.front());
}

inline void Builder::crashworthiness() {
    const double B = ship_.breadth, L = ship_.length, Vs = ship_.service_speed;
    const auto& err = model_.errors;

    Distribution m = prior_or(model_.priors.mass, discretize::Uniform{0, 1}, "mass");
    const double m_lo = finite_lo(m), m_hi = finite_hi(m);
    add_prior("M", "t", bins("M", {m_lo, m_hi}), m);
    add_reported("M_r", "M",
                 bins("M_r", {std::max(0.0, m_lo * (1 - 5 * err.m_cov)), m_hi * (1 + 5 * err.m_cov), 100}),
                 lognormal(err.m_cov));

    Distribution v = prior_or(model_.priors.speed, discretize::ScaledBeta{5, 2, 0, Vs}, "speed");
    const double v_lo = finite_lo(v), v_hi = finite_hi(v);
    add_prior("V", "kn", bins("V", {v_lo, v_hi, 0, 0.25}), v);
    add_reported("V_r", "V", bins("V_r", {v_lo - 4 * err.v_sd, v_hi + 4 * err.v_sd, 0, 0.1}),
                 additive_normal(err.v_sd));

    const double fa = model_.added_mass_fraction;
    const double e_hi = kinetic_energy(m_hi, v_hi, fa) / 1e6;
    DefaultBins eb{0, e_hi, 60};
    eb.geometric = true;
    add_functional("E", "MJ", bins("E", eb), {"M", "V"},
                   [fa](std::span<const double> x) { return kinetic_energy(x[0], x[1], fa) / 1e6; },
                   NoiseModel::none());

    Distribution ld = prior_or(model_.priors.damage_length, discretize::trunc_exp_with_mean(0.22 * L, 0, L),
                               "damage_length");
    const double ld_lo = finite_lo(ld), ld_hi = finite_hi(ld);
    add_prior("L_D", "m", bins("L_D", {ld_lo, ld_hi, 60}), ld);
    add_reported("L_D_r", "L_D", bins("L_D_r", {ld_lo - 4 * err.l_sd, ld_hi + 4 * err.l_sd, 0, 1.0}),
                 additive_normal(err.l_sd));

    // Force that tears the full breadth through every layer.
    const auto all = layers(true);
    DefaultBins fb{0, tearing_force(B, all) / 1e6, 60};
    fb.geometric = true;
    add_functional("F_H", "MN", bins("F_H", fb), {"E", "L_D"},
                   [](std::span<const double> x) { return horizontal_force(x[0], x[1]); }, lognormal(err.fh_cov));

    const auto outer = layers(false);
    const BinningPolicy dt = BinningPolicy::edges(dmg_.dt_edges);
    if (ship_.double_hull()) {
        add_functional("D_t", "m", dt, {"F_H", "IHB"},
                       [all, outer](std::span<const double> x) {
                           return damage_width(x[0] * 1e6, x[1] == 0.0 ? std::span(all) : std::span(outer));
                       },
                       NoiseModel::none());
    } else {
        add_functional("D_t", "m", dt, {"F_H"},
                       [outer](std::span<const double> x) { return damage_width(x[0] * 1e6, outer); },
                       NoiseModel::none());
    }
}

// D_v, IHB and, without the crashworthiness chain, a flat D_t.
inline void Builder::damage_nodes() {
    if (need_penetration() && !model_.modules.hydrostatic) {
        // no physics above D_v: prior proportional to state width
        std::vector<double> p;
        for (std::size_t i = 0; i + 1 < dmg_.dv_edges.size(); ++i)
            p.push_back((dmg_.dv_edges[i + 1] - dmg_.dv_edges[i]) / (dmg_.dv_edges.back() - dmg_.dv_edges.front()));
        auto n = bn::interval_node("D_v", dmg_.dv_edges, {}, "m");
        for (std::size_t i = 0; i < n.states.size(); ++i) n.states[i].label = dmg_.dv_labels[i];
        add(std::move(n), {"D_v", std::move(p)});
    }
    if (ship_.double_hull()) {
        add(bn::categorical_node("IHB", {"yes", "no"}, {"D_v"}), ihb_table(dmg_));
    }
    if (!model_.modules.crashworthiness) {
        const auto b = BinningPolicy::edges(dmg_.dt_edges);
        add_prior("D_t", "m", b, discretize::make_distribution(discretize::Uniform{b.lo(), b.hi()}));
    }
}

inline void Builder::hydraulic() {
    const auto& err = model_.errors;
    const double lc_loaded = !inc_.loading ? 0.5 : (*inc_.loading == LoadingCondition::loaded ? 1.0 : 0.0);
    add_categorical("LC", {"loaded", "ballast"}, {}, {lc_loaded, 1.0 - lc_loaded});
    auto det = detection_tables();
    add(bn::categorical_node("WI", {"ballast_tank", "cargo_tank"}, {"IHB", "LC"}), std::move(det.water_ingress));
    add(bn::categorical_node("OS", {"yes", "no"}, {"IHB", "LC"}), std::move(det.oil_outflow));

    const double ld = *inc_.tank_length, hw = *inc_.head, ho = inc_.oil_level.value_or(0.0);
    const double rw = model_.rho_w, ro = model_.rho_o, g = model_.g;
    const double ld_sd = inc_.tank_length_sd;
    std::vector<Distribution> aux{discretize::make_distribution(model_.discharge)};
    if (ld_sd > 0.0) aux.push_back(discretize::make_distribution(discretize::Normal{ld, ld_sd}));

    const double cd_hi = model_.discharge.mean + 5 * model_.discharge.sd;
    const double head_hi = std::max(hw, ho);
    const double q_hi = cd_hi * (ld + 5 * ld_sd) * ship_.breadth * std::sqrt(2 * g * head_hi);
    DefaultBins qb{0, q_hi};
    qb.geometric = true;
    add_functional(
        "Q", "m3/s", bins("Q", qb), {"D_t", "IHB", "LC"},
        [=](std::span<const double> x) {
            const double cd = x[3];
            const double l = ld_sd > 0.0 ? std::max(0.0, x[4]) : ld;
            const bool breach = x[1] == 0.0, loaded = x[2] == 0.0;
            if (breach && loaded) return oil_outflow_rate(cd, l, x[0], ho, hw, rw, ro, g).rate;
            return flooding_rate(cd, l, x[0], hw, g);
        },
        NoiseModel::none(), std::move(aux));

    add_categorical("Q_eps", {"good", "poor"}, {}, {inc_.flow_quality_good, 1.0 - inc_.flow_quality_good});
    DefaultBins qmb{0, 2 * q_hi, 120};
    qmb.geometric = true;
    qmb.span = 2000.0;
    const NoiseModel good = lognormal(err.q_cov_good), poor = lognormal(err.q_cov_poor);
    add_functional(
        "Q_m", "m3/s", bins("Q_m", qmb), {"Q", "Q_eps"}, [](std::span<const double> x) { return x[0]; },
        [good, poor](std::span<const std::size_t> cell) { return cell[1] == 0 ? good : poor; });
}

inline void Builder::hydrostatic() {
    const auto& err = model_.errors;
    const double B = ship_.breadth, D = ship_.depth;
    const double mp = *inc_.displacement, gm = *inc_.gm;

    if (inc_.displacement_uncertain) {
        Distribution d = discretize::make_distribution(discretize::LognormalMedianCov{mp, err.m_cov});
        add_prior("M_prime", "t", bins("M_prime", {mp * (1 - 3 * err.m_cov), mp * (1 + 3 * err.m_cov), 8}), d);
    } else {
        // a known constant, carried as a narrow two-state node
        add(bn::interval_node("M_prime", {mp * 0.999, mp, mp * 1.001}, {}, "t"), {"M_prime", {0.5, 0.5}});
    }
    const double mp_lo = node("M_prime").edges().front();

    const double r_upper =
        inc_.reaction_upper.value_or(std::max(10000.0, 1.5 * inc_.reaction_estimate.value_or(0.0)));
    if (!(r_upper < mp_lo))
        throw Error(ErrorCode::GroundReactionExceedsWeight, "ground reaction prior reaches the displacement",
                    "incident.reaction_upper");
    Distribution r = prior_or(model_.priors.reaction, discretize::Uniform{0, r_upper}, "reaction");
    const double r_lo = finite_lo(r), r_hi = finite_hi(r);
    if (!(r_hi < mp_lo))
        throw Error(ErrorCode::GroundReactionExceedsWeight, "ground reaction prior reaches the displacement",
                    "model.priors.reaction");
    add_prior("R", "t", bins("R", {r_lo, r_hi}), r);
    add_reported("R_c", "R", bins("R_c", {0, 1.5 * r_hi, 120}), lognormal(err.r_cov));

    Distribution y = prior_or(model_.priors.location, discretize::Uniform{-B / 2, B / 2}, "location");
    add_prior("Y_D", "m", BinningPolicy::edges(dmg_.yd_edges), y);

    const double tan_max = std::min(std::tan(kMaxHeelDeg * kDeg), r_hi * (B / 2) / ((mp_lo - r_hi) * gm));
    const double phi_max = std::atan(tan_max) / kDeg;
    add_functional("phi", "deg", bins("phi", {-phi_max, phi_max}), {"M_prime", "R", "Y_D"},
                   [gm](std::span<const double> x) { return std::atan(heel_tangent(x[1], x[0], gm, x[2])) / kDeg; },
                   NoiseModel::none());

    const double T = ship_.design_draft;
    Distribution tp = prior_or(model_.priors.port_draft,
                               discretize::Uniform{std::max(0.0, T - 10.0), std::min(D, T + 10.0)}, "port_draft");
    const double tp_lo = finite_lo(tp), tp_hi = finite_hi(tp);
    add_prior("T_p", "m", bins("T_p", {tp_lo, tp_hi}), tp);
    add_reported("T_p_m", "T_p", bins("T_p_m", {tp_lo - 4 * err.tp_sd, tp_hi + 4 * err.tp_sd, 0, 0.1}),
                 additive_normal(err.tp_sd));

    const double ts_lo = std::max(0.0, tp_lo - B * tan_max), ts_hi = std::min(D, tp_hi + B * tan_max);
    add_functional("T_s", "m", bins("T_s", {ts_lo, ts_hi}), {"phi", "T_p"},
                   [B](std::span<const double> x) { return starboard_draft(x[1], std::tan(x[0] * kDeg), B); },
                   NoiseModel::none());
    add_reported("T_s_m", "T_s", bins("T_s_m", {ts_lo - 4 * err.ts_sd, ts_hi + 4 * err.ts_sd, 0, 0.1}),
                 additive_normal(err.ts_sd));

    add_functional("T_D", "m", bins("T_D", {std::min(tp_lo, ts_lo), std::max(tp_hi, ts_hi)}), {"Y_D", "T_p", "T_s"},
                   [B](std::span<const double> x) { return rock_draft(x[1], x[2], x[0], B); }, NoiseModel::none());

    Distribution h = prior_or(model_.priors.water_depth, discretize::Uniform{0, ship_.t0_max()}, "water_depth");
    const double h_lo = finite_lo(h), h_hi = finite_hi(h);
    add_prior("H", "m", bins("H", {h_lo, h_hi}), h);
    add_reported("H_r", "H", bins("H_r", {h_lo - 4 * err.h_sd, h_hi + 4 * err.h_sd, 0, 0.1}),
                 additive_normal(err.h_sd));

    add_functional("D_v", "m", BinningPolicy::edges(dmg_.dv_edges), {"T_D", "H"},
                   [](std::span<const double> x) { return penetration(x[0], x[1]); }, NoiseModel::none());
    auto& dv = nodes_[index_.at("D_v")];
    for (std::size_t i = 0; i < dv.states.size(); ++i) dv.states[i].label = dmg_.dv_labels[i];
}

inline void Builder::inspection() {
    const auto& err = model_.errors;
    const double B = ship_.breadth, D = ship_.depth;
    add_categorical("Vis", {"good", "poor"}, {}, {inc_.visibility_good, 1.0 - inc_.visibility_good});
    auto by_vis = [](NoiseModel good, NoiseModel poor) {
        return [good, poor](std::span<const std::size_t> cell) { return cell[1] == 0 ? good : poor; };
    };
    auto identity = [](std::span<const double> x) { return x[0]; };
    add_functional("Z_t", "m", bins("Z_t", {0, 1.5 * B, 0, 0.1}), {"D_t", "Vis"}, identity,
                   by_vis(lognormal(err.d_cov_good), lognormal(err.d_cov_poor)));
    add_functional("Z_v", "m", bins("Z_v", {0, 0.45 * D, 0, 0.05}), {"D_v", "Vis"}, identity,
                   by_vis(lognormal(err.d_cov_good), lognormal(err.d_cov_poor)));
    const double pad = 4 * err.y_sd_poor;
    add_functional("Z_y", "m", bins("Z_y", {-B / 2 - pad, B / 2 + pad, 0, 0.1}), {"Y_D", "Vis"}, identity,
                   by_vis(additive_normal(err.y_sd_good), additive_normal(err.y_sd_poor)));
}

inline GroundingModel Builder::run() {
    ship_.validate();
    model_.validate();
    inc_.validate(ship_);
    check_complete();

    // Parents are declared before children so tables can read parent edges.
    if (need_location() && !model_.modules.hydrostatic) {
        Distribution y = prior_or(model_.priors.location, discretize::Uniform{-ship_.breadth / 2, ship_.breadth / 2},
                                  "location");
        add_prior("Y_D", "m", BinningPolicy::edges(dmg_.yd_edges), y);
    }
    if (model_.modules.hydrostatic) hydrostatic();
    damage_nodes();
    if (model_.modules.crashworthiness) crashworthiness();
    if (hydraulic_on()) hydraulic();
    if (model_.modules.inspection) inspection();

    GroundingModel gm;
    gm.network = std::make_shared<const bn::Network>(bn::construct_network(nodes_, tables_));
    gm.damage = dmg_;
    for (const auto& id : observable_ids())
        if (has(id)) gm.observables.push_back(id);
    return gm;
}

}  // namespace detail

inline GroundingModel build_network(const ShipParticulars& ship, const ModelConfig& model,
                                    const IncidentConfig& incident, std::optional<DamageStateSpec> spec = {}) {
    ship.validate();
    return detail::Builder(ship, model, incident, spec ? *spec : DamageStateSpec::for_ship(ship)).run();
}

}  // namespace groundbn::model
