#pragma once
// Reference inference by full enumeration of the joint distribution.
// Used as the oracle for the junction tree; exponential in network size.

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "groundbn/bn/junction_tree.hpp"
#include "groundbn/bn/network.hpp"
#include "groundbn/errors.hpp"

namespace groundbn::bn {

inline constexpr double kMaxEnumeratedStates = 1e7;

inline InferenceResult brute_force_infer(const Network& net, const EvidenceAssignment& ev,
                                         const std::vector<std::string>& query) {
    net.validate_evidence(ev);
    const std::size_t n = net.size();
    double space = 1.0;
    for (const auto& node : net.nodes()) space *= static_cast<double>(node.cardinality());
    if (space > kMaxEnumeratedStates)
        throw Error(ErrorCode::StateSpaceTooLarge,
                    "joint state space of " + std::to_string(space) + " exceeds the enumeration guard");

    std::vector<long> fixed(n, -1);
    for (const auto& [id, s] : ev) fixed[net.index_of(id)] = static_cast<long>(s);
    std::vector<std::size_t> qidx;
    std::vector<std::vector<double>> acc;
    for (const auto& q : query) {
        qidx.push_back(net.index_of(q));
        acc.emplace_back(net.node(q).cardinality(), 0.0);
    }

    std::vector<std::size_t> x(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        if (fixed[i] >= 0) x[i] = static_cast<std::size_t>(fixed[i]);

    std::vector<std::size_t> pstates;
    double total = 0.0;
    while (true) {
        double p = 1.0;
        for (std::size_t i = 0; i < n && p > 0.0; ++i) {
            const auto& ps = net.parent_indices(i);
            pstates.resize(ps.size());
            for (std::size_t k = 0; k < ps.size(); ++k) pstates[k] = x[ps[k]];
            p *= net.probability(i, x[i], pstates);
        }
        total += p;
        for (std::size_t k = 0; k < qidx.size(); ++k) acc[k][x[qidx[k]]] += p;

        // next joint configuration over the free variables
        std::size_t d = n;
        while (d-- > 0) {
            if (fixed[d] >= 0) continue;
            if (++x[d] < net.nodes()[d].cardinality()) break;
            x[d] = 0;
        }
        if (d == static_cast<std::size_t>(-1)) break;
    }

    if (!(total >= kImpossibleEvidenceThreshold))
        throw Error(ErrorCode::ImpossibleEvidence, "the entered evidence has zero probability under the model");

    InferenceResult r;
    r.log_evidence = std::log(total);
    for (std::size_t k = 0; k < qidx.size(); ++k) {
        for (auto& v : acc[k]) v /= total;
        r.marginals[query[k]] = std::move(acc[k]);
    }
    return r;
}

inline Marginals brute_force_marginals(const Network& net, const EvidenceAssignment& ev,
                                       const std::vector<std::string>& query) {
    return brute_force_infer(net, ev, query).marginals;
}

}  // namespace groundbn::bn
