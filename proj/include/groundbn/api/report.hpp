#pragma once
// Posterior summaries for presentation: histogram, moments (from bin
// midpoints), mode bin and the exceedance table P(X >= edge). D_v reports
// also carry P(IHB = yes).

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "groundbn/bn/network.hpp"
#include "groundbn/errors.hpp"

namespace groundbn::api {

using json = nlohmann::json;

struct NodeReport {
    std::string node;
    std::string unit;
    std::vector<double> edges;          // empty for categorical nodes
    std::vector<std::string> labels;
    std::vector<double> masses;
    std::optional<double> mean, sd;     // interval nodes only
    std::size_t mode = 0;
    std::vector<double> exceedance;     // P(X >= edges[k]), k = 0..n
    std::optional<double> p_inner_breach;
};

struct PosteriorReport {
    std::vector<NodeReport> nodes;
    double log_evidence = 0.0;
    std::vector<std::string> warnings;

    const NodeReport& at(const std::string& id) const {
        for (const auto& n : nodes)
            if (n.node == id) return n;
        throw Error(ErrorCode::UnknownNode, "no report for '" + id + "'", id);
    }
};

inline NodeReport node_report(const bn::Network& net, const std::string& id, const std::vector<double>& p,
                              const bn::Marginals& all = {}) {
    const auto& n = net.node(id);
    NodeReport r;
    r.node = id;
    r.unit = n.unit;
    double total = 0.0;
    for (double x : p) total += x;
    for (double x : p) r.masses.push_back(x / total);
    for (const auto& s : n.states) r.labels.push_back(s.label);
    for (std::size_t i = 1; i < r.masses.size(); ++i)
        if (r.masses[i] > r.masses[r.mode]) r.mode = i;
    if (n.is_interval()) {
        r.edges = n.edges();
        double m = 0.0, v = 0.0;
        for (std::size_t i = 0; i < r.masses.size(); ++i) m += r.masses[i] * 0.5 * (r.edges[i] + r.edges[i + 1]);
        for (std::size_t i = 0; i < r.masses.size(); ++i) {
            const double d = 0.5 * (r.edges[i] + r.edges[i + 1]) - m;
            v += r.masses[i] * d * d;
        }
        r.mean = m;
        r.sd = std::sqrt(v);
        r.exceedance.assign(r.edges.size(), 0.0);
        double tail = 0.0;
        for (std::size_t k = r.masses.size(); k-- > 0;) {
            tail += r.masses[k];
            r.exceedance[k] = std::min(1.0, tail);
        }
    }
    if (id == "D_v")
        if (auto it = all.find("IHB"); it != all.end()) r.p_inner_breach = it->second[0];
    return r;
}

inline PosteriorReport make_report(const bn::Network& net, const bn::Marginals& m, const std::vector<std::string>& nodes,
                                   double log_evidence = 0.0, std::vector<std::string> warnings = {}) {
    PosteriorReport out;
    out.log_evidence = log_evidence;
    out.warnings = std::move(warnings);
    for (const auto& id : nodes) {
        auto it = m.find(id);
        if (it == m.end()) throw Error(ErrorCode::UnknownNode, "no posterior for '" + id + "'", id);
        out.nodes.push_back(node_report(net, id, it->second, m));
    }
    return out;
}

inline json to_json(const NodeReport& r) {
    json j{{"node", r.node}, {"masses", r.masses}, {"labels", r.labels}, {"mode", r.mode}};
    if (!r.unit.empty()) j["unit"] = r.unit;
    if (!r.edges.empty()) {
        j["edges"] = r.edges;
        j["mean"] = *r.mean;
        j["sd"] = *r.sd;
        j["mode_bin"] = {r.edges[r.mode], r.edges[r.mode + 1]};
        j["exceedance"] = r.exceedance;
    }
    if (r.p_inner_breach) j["p_inner_breach"] = *r.p_inner_breach;
    return j;
}

inline json to_json(const PosteriorReport& r) {
    json nodes = json::object();
    for (const auto& n : r.nodes) nodes[n.node] = to_json(n);
    return {{"nodes", nodes}, {"log_evidence", r.log_evidence}, {"warnings", r.warnings}};
}

// One row per bin: node,lo,hi,mass (categorical nodes: node,label,,mass).
inline std::string histogram_csv(const PosteriorReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "node,lo,hi,mass\n";
    for (const auto& n : r.nodes)
        for (std::size_t i = 0; i < n.masses.size(); ++i) {
            if (!n.edges.empty()) os << n.node << ',' << n.edges[i] << ',' << n.edges[i + 1] << ',' << n.masses[i] << '\n';
            else os << n.node << ',' << n.labels[i] << ",," << n.masses[i] << '\n';
        }
    return os.str();
}

}  // namespace groundbn::api
