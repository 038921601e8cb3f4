#pragma once
// Discrete Bayesian network representation.
//
// A Network owns its nodes and one conditional table per node. Tables are
// stored row-major: one row per joint parent configuration (first parent is
// the most significant digit), each row a probability vector over the
// child's states.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "groundbn/errors.hpp"

namespace groundbn::bn {

inline constexpr double kRowSumTolerance = 1e-12;

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double mid() const { return 0.5 * (lo + hi); }
    double width() const { return hi - lo; }
};

// A labeled category, or a numeric interval [lo, hi) with units.
struct StateDescriptor {
    std::string label;
    std::optional<Interval> interval;

    static StateDescriptor category(std::string label) { return {std::move(label), std::nullopt}; }
    static StateDescriptor range(double lo, double hi, std::string label = {}) {
        if (label.empty()) {
            std::ostringstream os;
            os << '[' << lo << ',' << hi << ')';
            label = os.str();
        }
        return {std::move(label), Interval{lo, hi}};
    }
};

struct DiscreteNode {
    std::string id;
    std::vector<StateDescriptor> states;
    std::vector<std::string> parents;
    std::string unit;

    std::size_t cardinality() const { return states.size(); }

    bool is_interval() const {
        return !states.empty() && std::all_of(states.begin(), states.end(),
                                              [](const auto& s) { return s.interval.has_value(); });
    }

    // Bin edges of an interval-valued node (cardinality + 1 values).
    std::vector<double> edges() const {
        std::vector<double> e;
        if (!is_interval()) return e;
        e.reserve(states.size() + 1);
        for (const auto& s : states) e.push_back(s.interval->lo);
        e.push_back(states.back().interval->hi);
        return e;
    }

    std::optional<std::size_t> state_index(std::string_view label) const {
        for (std::size_t i = 0; i < states.size(); ++i)
            if (states[i].label == label) return i;
        return std::nullopt;
    }

    // Index of the interval containing x; intervals are half-open except the last.
    std::optional<std::size_t> locate(double x) const {
        if (!is_interval() || !std::isfinite(x)) return std::nullopt;
        const auto& first = *states.front().interval;
        const auto& last = *states.back().interval;
        if (x < first.lo || x > last.hi) return std::nullopt;
        for (std::size_t i = 0; i < states.size(); ++i)
            if (x < states[i].interval->hi) return i;
        return states.size() - 1;
    }
};

// Builds a node from strictly ascending bin edges.
inline DiscreteNode interval_node(std::string id, const std::vector<double>& edges,
                                  std::vector<std::string> parents = {}, std::string unit = {}) {
    DiscreteNode n{std::move(id), {}, std::move(parents), std::move(unit)};
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        n.states.push_back(StateDescriptor::range(edges[i], edges[i + 1]));
    return n;
}

inline DiscreteNode categorical_node(std::string id, std::vector<std::string> labels,
                                     std::vector<std::string> parents = {}) {
    DiscreteNode n{std::move(id), {}, std::move(parents), {}};
    for (auto& l : labels) n.states.push_back(StateDescriptor::category(std::move(l)));
    return n;
}

struct ConditionalTable {
    std::string child;
    std::vector<double> values;  // rows × child cardinality

    std::size_t rows(std::size_t child_card) const { return child_card ? values.size() / child_card : 0; }
};

// node id → observed state index
using EvidenceAssignment = std::map<std::string, std::size_t>;

// node id → probability vector over its states
using Marginals = std::map<std::string, std::vector<double>>;

class Network {
public:
    Network() = default;

    const std::vector<DiscreteNode>& nodes() const { return nodes_; }
    const std::vector<ConditionalTable>& tables() const { return tables_; }
    std::size_t size() const { return nodes_.size(); }

    bool contains(std::string_view id) const { return index_.count(std::string(id)) > 0; }

    std::size_t index_of(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) throw Error(ErrorCode::UnknownNode, "no node '" + std::string(id) + "'");
        return it->second;
    }

    const DiscreteNode& node(std::string_view id) const { return nodes_[index_of(id)]; }
    const ConditionalTable& table(std::string_view id) const { return tables_[index_of(id)]; }

    // Parent indices of node i, in declaration order.
    const std::vector<std::size_t>& parent_indices(std::size_t i) const { return parent_idx_[i]; }

    // Node indices in a topological order (parents before children).
    const std::vector<std::size_t>& topological_order() const { return topo_; }

    // Probability p(child = s | parents = cfg) where cfg indexes parents in declaration order.
    double probability(std::size_t node, std::size_t state, const std::vector<std::size_t>& parent_states) const {
        std::size_t row = 0;
        for (std::size_t k = 0; k < parent_idx_[node].size(); ++k)
            row = row * nodes_[parent_idx_[node][k]].cardinality() + parent_states[k];
        return tables_[node].values[row * nodes_[node].cardinality() + state];
    }

    void validate_evidence(const EvidenceAssignment& ev) const {
        for (const auto& [id, s] : ev) {
            const auto& n = node(id);
            if (s >= n.cardinality())
                throw Error(ErrorCode::InvalidParameter,
                            "evidence state " + std::to_string(s) + " out of range for '" + id + "'", id);
        }
    }

    friend Network construct_network(std::vector<DiscreteNode> nodes, std::vector<ConditionalTable> tables);

private:
    std::vector<DiscreteNode> nodes_;
    std::vector<ConditionalTable> tables_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<std::vector<std::size_t>> parent_idx_;
    std::vector<std::size_t> topo_;
};

namespace detail {

inline void check_states(const DiscreteNode& n) {
    if (n.states.size() < 2)
        throw Error(ErrorCode::InvalidNetwork, "node '" + n.id + "' needs at least two states", n.id);
    bool any_interval = false;
    bool all_interval = true;
    for (const auto& s : n.states) {
        any_interval |= s.interval.has_value();
        all_interval &= s.interval.has_value();
    }
    if (any_interval && !all_interval)
        throw Error(ErrorCode::InvalidNetwork, "node '" + n.id + "' mixes interval and categorical states", n.id);
    if (all_interval) {
        for (std::size_t i = 0; i < n.states.size(); ++i) {
            const auto& iv = *n.states[i].interval;
            if (!(iv.hi > iv.lo) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
                throw Error(ErrorCode::InvalidNetwork, "node '" + n.id + "' has an empty interval", n.id);
            if (i > 0 && n.states[i - 1].interval->hi != iv.lo)
                throw Error(ErrorCode::InvalidNetwork, "node '" + n.id + "' intervals are not contiguous", n.id);
        }
    }
}

}  // namespace detail

// Validates and assembles a network. Rejects cycles, dangling parents,
// missing tables and rows that are not probability vectors.
inline Network construct_network(std::vector<DiscreteNode> nodes, std::vector<ConditionalTable> tables) {
    Network net;
    const std::size_t n = nodes.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!net.index_.emplace(nodes[i].id, i).second)
            throw Error(ErrorCode::InvalidNetwork, "duplicate node id '" + nodes[i].id + "'", nodes[i].id);
        detail::check_states(nodes[i]);
    }

    net.parent_idx_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto& pidx = net.parent_idx_[i];
        for (const auto& p : nodes[i].parents) {
            auto it = net.index_.find(p);
            if (it == net.index_.end())
                throw Error(ErrorCode::InvalidNetwork,
                            "node '" + nodes[i].id + "' references unknown parent '" + p + "'", nodes[i].id);
            if (std::find(pidx.begin(), pidx.end(), it->second) != pidx.end())
                throw Error(ErrorCode::InvalidNetwork, "node '" + nodes[i].id + "' lists parent '" + p + "' twice",
                            nodes[i].id);
            pidx.push_back(it->second);
        }
    }

    // Kahn's algorithm; ties broken by declaration order.
    std::vector<std::size_t> indegree(n, 0);
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t i = 0; i < n; ++i)
        for (auto p : net.parent_idx_[i]) {
            ++indegree[i];
            children[p].push_back(i);
        }
    std::vector<std::size_t> ready;
    for (std::size_t i = n; i-- > 0;)
        if (indegree[i] == 0) ready.push_back(i);
    while (!ready.empty()) {
        std::size_t v = ready.back();
        ready.pop_back();
        net.topo_.push_back(v);
        for (auto c : children[v])
            if (--indegree[c] == 0) ready.push_back(c);
    }
    if (net.topo_.size() != n) {
        std::string cyc;
        for (std::size_t i = 0; i < n; ++i)
            if (indegree[i] > 0) cyc += (cyc.empty() ? "" : ", ") + nodes[i].id;
        throw Error(ErrorCode::CycleDetected, "directed cycle through {" + cyc + "}");
    }

    std::vector<std::optional<ConditionalTable>> by_node(n);
    for (auto& t : tables) {
        auto it = net.index_.find(t.child);
        if (it == net.index_.end())
            throw Error(ErrorCode::InvalidNetwork, "table for unknown node '" + t.child + "'", t.child);
        if (by_node[it->second])
            throw Error(ErrorCode::InvalidNetwork, "two tables for node '" + t.child + "'", t.child);
        by_node[it->second] = std::move(t);
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!by_node[i]) throw Error(ErrorCode::MissingTable, "no table for node '" + nodes[i].id + "'", nodes[i].id);
        const auto& t = *by_node[i];
        std::size_t rows = 1;
        for (auto p : net.parent_idx_[i]) rows *= nodes[p].cardinality();
        const std::size_t card = nodes[i].cardinality();
        if (t.values.size() != rows * card)
            throw Error(ErrorCode::InvalidNetwork,
                        "table for '" + nodes[i].id + "' has " + std::to_string(t.values.size()) +
                            " entries, expected " + std::to_string(rows * card),
                        nodes[i].id);
        for (std::size_t r = 0; r < rows; ++r) {
            double sum = 0.0;
            for (std::size_t s = 0; s < card; ++s) {
                double v = t.values[r * card + s];
                if (!(v >= 0.0 && v <= 1.0))
                    throw Error(ErrorCode::NonStochasticRow,
                                "node '" + nodes[i].id + "' row " + std::to_string(r) + " has entry outside [0,1]",
                                nodes[i].id);
                sum += v;
            }
            if (std::abs(sum - 1.0) > kRowSumTolerance)
                throw Error(ErrorCode::NonStochasticRow,
                            "node '" + nodes[i].id + "' row " + std::to_string(r) + " sums to " +
                                std::to_string(sum),
                            nodes[i].id);
        }
    }

    net.nodes_ = std::move(nodes);
    net.tables_.reserve(n);
    for (auto& t : by_node) net.tables_.push_back(std::move(*t));
    return net;
}

// Graphviz rendering for documentation.
inline std::string to_dot(const Network& net) {
    std::ostringstream os;
    os << "digraph groundbn {\n  rankdir=TB;\n";
    for (const auto& n : net.nodes())
        os << "  \"" << n.id << "\" [label=\"" << n.id << "\\n" << n.cardinality() << " states\"];\n";
    for (const auto& n : net.nodes())
        for (const auto& p : n.parents) os << "  \"" << p << "\" -> \"" << n.id << "\";\n";
    os << "}\n";
    return os.str();
}

}  // namespace groundbn::bn
