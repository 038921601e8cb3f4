#pragma once
// State spaces of the three damage variables and the fixed tables that
// hang off them (inner hull breach, leak detection).

#include <cmath>
#include <string>
#include <vector>

#include "groundbn/bn/network.hpp"
#include "groundbn/discretize/binning.hpp"
#include "groundbn/model/config.hpp"

namespace groundbn::model {

struct DamageStateSpec {
    std::vector<double> dt_edges;  // D_t on [0, B]
    std::vector<double> yd_edges;  // Y_D on [-B/2, B/2]
    std::vector<double> dv_edges;  // D_v on [0, 0.3 D]
    std::vector<std::string> dv_labels;
    std::optional<double> h_db;

    // IB1 onwards grow by this fraction of h_DB, so IB2 ends at 1.4 h_DB.
    static constexpr double kInnerStep = 0.2;
    // Single-hull D_v bin width, m.
    static constexpr double kSingleHullStep = 0.5;

    static DamageStateSpec for_ship(const ShipParticulars& ship, double dt_width = 1.0, double yd_width = 1.0) {
        DamageStateSpec s;
        s.dt_edges = discretize::BinningPolicy::width(0.0, ship.breadth, dt_width).edges();
        s.yd_edges = discretize::BinningPolicy::width(-0.5 * ship.breadth, 0.5 * ship.breadth, yd_width).edges();
        const double top = 0.3 * ship.depth;
        if (ship.double_hull()) {
            const double h = *ship.double_bottom_height;
            s.h_db = h;
            s.dv_edges = {0.0, 0.75 * h, h};
            s.dv_labels = {"OB", "IB0"};
            for (int k = 1;; ++k) {
                double e = h + k * kInnerStep * h;
                // a sliver shorter than 1% of a step is merged into the last state
                if (e >= top - 0.01 * kInnerStep * h) {
                    s.dv_edges.push_back(top);
                    s.dv_labels.push_back("IB" + std::to_string(k));
                    break;
                }
                s.dv_edges.push_back(e);
                s.dv_labels.push_back("IB" + std::to_string(k));
            }
        } else {
            s.dv_edges = discretize::BinningPolicy::width(0.0, top, kSingleHullStep).edges();
            for (std::size_t i = 0; i + 1 < s.dv_edges.size(); ++i) s.dv_labels.push_back("S" + std::to_string(i));
        }
        return s;
    }

    // States on or below the inner bottom (no inner breach possible).
    std::size_t outer_states() const { return h_db ? 2 : 0; }
};

// P(IHB | D_v) for the labelled penetration states.
inline std::vector<double> ihb_probabilities(std::size_t dv_states) {
    static const double kBreach[] = {0.0, 0.0, 0.7, 0.9, 0.95};
    std::vector<double> p(dv_states);
    for (std::size_t i = 0; i < dv_states; ++i) p[i] = i < 5 ? kBreach[i] : 1.0;
    return p;
}

// IHB states: yes, no.
inline bn::ConditionalTable ihb_table(const DamageStateSpec& spec) {
    if (!spec.h_db) throw Error(ErrorCode::SingleHullUnsupported, "inner hull breach needs a double bottom");
    bn::ConditionalTable t{"IHB", {}};
    for (double p : ihb_probabilities(spec.dv_labels.size())) {
        t.values.push_back(p);
        t.values.push_back(1.0 - p);
    }
    return t;
}

struct DetectionTables {
    bn::ConditionalTable water_ingress;  // WI | IHB, LC; states ballast_tank, cargo_tank
    bn::ConditionalTable oil_outflow;    // OS | IHB, LC; states yes, no
};

// Parent order (IHB, LC) with IHB in {yes, no} and LC in {loaded, ballast}.
// Detection is taken as perfect, so both tables are deterministic.
inline DetectionTables detection_tables() {
    DetectionTables d{{"WI", {}}, {"OS", {}}};
    for (int ihb = 0; ihb < 2; ++ihb)
        for (int lc = 0; lc < 2; ++lc) {
            const bool breach = ihb == 0, loaded = lc == 0;
            const bool cargo = !loaded && breach;
            d.water_ingress.values.insert(d.water_ingress.values.end(), {cargo ? 0.0 : 1.0, cargo ? 1.0 : 0.0});
            const bool spill = loaded && breach;
            d.oil_outflow.values.insert(d.oil_outflow.values.end(), {spill ? 1.0 : 0.0, spill ? 0.0 : 1.0});
        }
    return d;
}

}  // namespace groundbn::model
