#pragma once
// Random discrete networks for property tests.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "groundbn/bn/network.hpp"

namespace groundbn::testing {

struct RandomNetworkOptions {
    std::size_t max_nodes = 12;
    std::size_t max_states = 6;
    std::size_t max_parents = 3;
    double max_joint_states = 2e5;
    double zero_probability = 0.0;  // chance that a CPT entry is forced to zero
};

inline bn::Network random_network(std::mt19937_64& gen, const RandomNetworkOptions& opt = {}) {
    std::uniform_int_distribution<std::size_t> count(2, opt.max_nodes);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = count(gen);
    std::vector<std::size_t> cards(n);
    double joint = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t hi = opt.max_states;
        while (hi > 2 && joint * static_cast<double>(hi) * std::pow(2.0, static_cast<double>(n - i - 1)) > opt.max_joint_states)
            --hi;
        cards[i] = std::uniform_int_distribution<std::size_t>(2, hi)(gen);
        joint *= static_cast<double>(cards[i]);
    }

    std::vector<bn::DiscreteNode> nodes;
    std::vector<bn::ConditionalTable> tables;
    for (std::size_t i = 0; i < n; ++i) {
        bn::DiscreteNode node;
        node.id = "X" + std::to_string(i);
        for (std::size_t s = 0; s < cards[i]; ++s) node.states.push_back(bn::StateDescriptor::category("s" + std::to_string(s)));
        std::vector<std::size_t> candidates(i);
        for (std::size_t j = 0; j < i; ++j) candidates[j] = j;
        std::shuffle(candidates.begin(), candidates.end(), gen);
        std::size_t np = std::min<std::size_t>(candidates.size(), std::uniform_int_distribution<std::size_t>(0, opt.max_parents)(gen));
        std::size_t rows = 1;
        for (std::size_t k = 0; k < np; ++k) {
            node.parents.push_back("X" + std::to_string(candidates[k]));
            rows *= cards[candidates[k]];
        }
        bn::ConditionalTable t{node.id, {}};
        for (std::size_t r = 0; r < rows; ++r) {
            std::vector<double> row(cards[i]);
            double s = 0.0;
            for (auto& v : row) {
                v = unit(gen) < opt.zero_probability ? 0.0 : unit(gen) + 1e-3;
                s += v;
            }
            if (s == 0.0) {
                row[0] = 1.0;
                s = 1.0;
            }
            for (auto& v : row) v /= s;
            // keep the row sum within the validator's tolerance
            double acc = 0.0;
            for (std::size_t k = 0; k + 1 < row.size(); ++k) acc += row[k];
            row.back() = std::max(0.0, 1.0 - acc);
            t.values.insert(t.values.end(), row.begin(), row.end());
        }
        nodes.push_back(std::move(node));
        tables.push_back(std::move(t));
    }
    // shuffle declaration order so the topological sort is exercised
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), gen);
    std::vector<bn::DiscreteNode> sn;
    std::vector<bn::ConditionalTable> st;
    for (auto i : order) {
        sn.push_back(nodes[i]);
        st.push_back(tables[i]);
    }
    return bn::construct_network(std::move(sn), std::move(st));
}

inline bn::EvidenceAssignment random_evidence(std::mt19937_64& gen, const bn::Network& net, double rate = 0.3) {
    bn::EvidenceAssignment ev;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& node : net.nodes())
        if (unit(gen) < rate)
            ev[node.id] = std::uniform_int_distribution<std::size_t>(0, node.cardinality() - 1)(gen);
    return ev;
}

inline std::vector<std::string> all_ids(const bn::Network& net) {
    std::vector<std::string> ids;
    for (const auto& n : net.nodes()) ids.push_back(n.id);
    return ids;
}

}  // namespace groundbn::testing
