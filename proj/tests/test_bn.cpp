#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "groundbn/bn/brute_force.hpp"
#include "groundbn/bn/junction_tree.hpp"
#include "groundbn/bn/network.hpp"
#include "random_networks.hpp"

using namespace groundbn;
using namespace groundbn::bn;
using Catch::Approx;

namespace {

// M -> D <- V, D -> Z with D = severe iff heavy and fast.
Network mass_speed_network() {
    auto m = categorical_node("M", {"heavy", "light"});
    auto v = categorical_node("V", {"fast", "slow"});
    auto d = categorical_node("D", {"severe", "minor"}, {"M", "V"});
    auto z = categorical_node("Z", {"pos", "neg"}, {"D"});
    std::vector<ConditionalTable> t{
        {"M", {0.5, 0.5}},
        {"V", {0.5, 0.5}},
        {"D", {1, 0, 0, 1, 0, 1, 0, 1}},
        {"Z", {0.9, 0.1, 0.1, 0.9}},
    };
    return construct_network({m, v, d, z}, t);
}

Network chain() {
    return construct_network({categorical_node("A", {"a0", "a1"}), categorical_node("B", {"b0", "b1"}, {"A"}),
                              categorical_node("C", {"c0", "c1", "c2"}, {"B"})},
                             {{"A", {0.3, 0.7}}, {"B", {0.9, 0.1, 0.2, 0.8}}, {"C", {0.2, 0.3, 0.5, 0.6, 0.2, 0.2}}});
}

std::vector<std::string> ids_of(const JunctionTree& jt, const Clique& c) {
    std::vector<std::string> out;
    for (auto v : c.vars) out.push_back(jt.network().nodes()[v].id);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("construct_network accepts the mass/speed/damage/inspection example", "[bn]") {
    auto net = mass_speed_network();
    CHECK(net.size() == 4);
    CHECK(net.tables().size() == 4);
    CHECK(net.topological_order().back() == net.index_of("Z"));
}

TEST_CASE("construct_network accepts a single root node", "[bn]") {
    auto net = construct_network({categorical_node("R", {"a", "b", "c"})}, {{"R", {0.2, 0.3, 0.5}}});
    auto jt = compile(net);
    auto m = infer_marginals(jt, {}, {"R"});
    CHECK(m["R"][0] == Approx(0.2).margin(1e-15));
    CHECK(m["R"][2] == Approx(0.5).margin(1e-15));
}

TEST_CASE("construct_network rejects invalid structures", "[bn]") {
    auto a = categorical_node("A", {"0", "1"}, {"B"});
    auto b = categorical_node("B", {"0", "1"}, {"A"});
    ConditionalTable ta{"A", {0.5, 0.5, 0.5, 0.5}}, tb{"B", {0.5, 0.5, 0.5, 0.5}};
    try {
        construct_network({a, b}, {ta, tb});
        FAIL("cycle accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::CycleDetected);
    }

    auto root = categorical_node("A", {"0", "1"});
    try {
        construct_network({root}, {});
        FAIL("missing table accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MissingTable);
    }

    auto child = categorical_node("C", {"0", "1"}, {"A"});
    try {
        construct_network({root, child}, {{"A", {0.5, 0.5}}, {"C", {0.5, 0.5, 0.7, 0.2}}});
        FAIL("non-stochastic row accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NonStochasticRow);
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }

    auto dangling = categorical_node("C", {"0", "1"}, {"Nope"});
    CHECK_THROWS_AS(construct_network({root, dangling}, {{"A", {0.5, 0.5}}, {"C", {0.5, 0.5, 0.5, 0.5}}}), Error);

    DiscreteNode gap{"G", {StateDescriptor::range(0, 1), StateDescriptor::range(2, 3)}, {}, "m"};
    CHECK_THROWS_AS(construct_network({gap}, {{"G", {0.5, 0.5}}}), Error);
}

TEST_CASE("compile: chain yields two cliques joined by the middle node", "[bn][compile]") {
    auto jt = compile(chain());
    REQUIRE(jt.cliques().size() == 2);
    std::vector<std::vector<std::string>> got{ids_of(jt, jt.cliques()[0]), ids_of(jt, jt.cliques()[1])};
    std::sort(got.begin(), got.end());
    CHECK(got[0] == std::vector<std::string>{"A", "B"});
    CHECK(got[1] == std::vector<std::string>{"B", "C"});
    REQUIRE(jt.separators().size() == 1);
    CHECK(jt.separators()[0].vars == std::vector<std::size_t>{jt.network().index_of("B")});
}

TEST_CASE("compile: collider is married into one clique", "[bn][compile]") {
    auto m = categorical_node("M", {"0", "1"});
    auto v = categorical_node("V", {"0", "1"});
    auto d = categorical_node("D", {"0", "1"}, {"M", "V"});
    auto net = construct_network({m, v, d}, {{"M", {0.5, 0.5}}, {"V", {0.5, 0.5}}, {"D", {1, 0, 0, 1, 0, 1, 0, 1}}});
    auto jt = compile(net);
    REQUIRE(jt.cliques().size() == 1);
    CHECK(ids_of(jt, jt.cliques()[0]) == std::vector<std::string>{"D", "M", "V"});
}

TEST_CASE("infer: observing a positive inspection", "[bn][infer]") {
    auto net = mass_speed_network();
    auto jt = compile(net);
    EvidenceAssignment ev{{"Z", 0}};
    auto m = infer_marginals(jt, ev, {"D", "M", "Z"});
    // hand Bayes: 0.225 / 0.300
    CHECK(m["D"][0] == Approx(0.75).margin(1e-12));
    CHECK(m["Z"][0] == 1.0);
    CHECK(m["Z"][1] == 0.0);
    auto bf = brute_force_marginals(net, ev, {"D", "M"});
    CHECK(bf["D"][0] == Approx(0.75).margin(1e-12));
    CHECK(bf["M"][0] == Approx(m["M"][0]).margin(1e-12));
}

TEST_CASE("infer: empty evidence returns root priors", "[bn][infer]") {
    auto jt = compile(chain());
    auto m = infer_marginals(jt, {}, {"A"});
    CHECK(m["A"][0] == Approx(0.3).margin(1e-15));
    CHECK(m["A"][1] == Approx(0.7).margin(1e-15));
}

TEST_CASE("brute force: independent nodes give product marginals", "[bn][oracle]") {
    auto net = construct_network({categorical_node("A", {"0", "1"}), categorical_node("B", {"0", "1", "2"})},
                                 {{"A", {0.25, 0.75}}, {"B", {0.1, 0.6, 0.3}}});
    auto m = brute_force_marginals(net, {}, {"A", "B"});
    CHECK(m["A"][1] == Approx(0.75).margin(1e-15));
    CHECK(m["B"][1] == Approx(0.6).margin(1e-15));
}

TEST_CASE("brute force refuses huge state spaces", "[bn][oracle]") {
    std::vector<DiscreteNode> nodes;
    std::vector<ConditionalTable> tables;
    for (int i = 0; i < 8; ++i) {
        DiscreteNode n;
        n.id = "N" + std::to_string(i);
        for (int s = 0; s < 10; ++s) n.states.push_back(StateDescriptor::category(std::to_string(s)));
        nodes.push_back(n);
        tables.push_back({n.id, std::vector<double>(10, 0.1)});
    }
    auto net = construct_network(nodes, tables);
    try {
        brute_force_marginals(net, {}, {"N0"});
        FAIL("no guard");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::StateSpaceTooLarge);
    }
}

TEST_CASE("impossible evidence is reported, not normalized away", "[bn][infer]") {
    auto net = mass_speed_network();
    auto jt = compile(net);
    // D = severe needs M = heavy
    EvidenceAssignment ev{{"D", 0}, {"M", 1}};
    try {
        jt.infer(ev, {"V"});
        FAIL("impossible evidence accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ImpossibleEvidence);
    }
    CHECK_THROWS_AS(brute_force_marginals(net, ev, {"V"}), Error);
}

TEST_CASE("junction tree matches enumeration on random networks", "[bn][property]") {
    std::mt19937_64 gen(7);
    for (int trial = 0; trial < 60; ++trial) {
        auto net = testing::random_network(gen);
        auto jt = compile(net);
        auto ev = testing::random_evidence(gen, net);
        auto ids = testing::all_ids(net);
        std::optional<Marginals> bf;
        try {
            bf = brute_force_marginals(net, ev, ids);
        } catch (const Error&) {
        }
        if (!bf) continue;
        auto jm = infer_marginals(jt, ev, ids);
        for (const auto& id : ids) {
            double sum = 0.0;
            for (std::size_t s = 0; s < jm[id].size(); ++s) {
                CHECK(std::abs(jm[id][s] - (*bf)[id][s]) <= 1e-9);
                CHECK(jm[id][s] >= 0.0);
                sum += jm[id][s];
            }
            CHECK(sum == Approx(1.0).margin(1e-9));
        }
    }
}

TEST_CASE("impossible evidence detection agrees with enumeration", "[bn][property]") {
    std::mt19937_64 gen(11);
    testing::RandomNetworkOptions opt;
    opt.zero_probability = 0.5;
    opt.max_nodes = 7;
    opt.max_states = 3;
    int impossible = 0;
    for (int trial = 0; trial < 150; ++trial) {
        auto net = testing::random_network(gen, opt);
        auto jt = compile(net);
        auto ev = testing::random_evidence(gen, net, 0.5);
        bool bf_throws = false, jt_throws = false;
        try {
            brute_force_marginals(net, ev, {});
        } catch (const Error& e) {
            bf_throws = e.code() == ErrorCode::ImpossibleEvidence;
        }
        try {
            jt.infer(ev, {});
        } catch (const Error& e) {
            jt_throws = e.code() == ErrorCode::ImpossibleEvidence;
        }
        CHECK(bf_throws == jt_throws);
        impossible += bf_throws;
    }
    CHECK(impossible > 0);
}

TEST_CASE("inference is bitwise deterministic and families are preserved", "[bn][property]") {
    std::mt19937_64 gen(3);
    for (int trial = 0; trial < 20; ++trial) {
        auto net = testing::random_network(gen);
        auto jt = compile(net);
        for (std::size_t v = 0; v < net.size(); ++v) {
            const auto& c = jt.cliques()[jt.family_clique(v)];
            CHECK(c.contains(v));
            for (auto p : net.parent_indices(v)) CHECK(c.contains(p));
        }
        auto ev = testing::random_evidence(gen, net, 0.2);
        try {
            auto a = infer_marginals(jt, ev, testing::all_ids(net));
            auto b = infer_marginals(compile(net), ev, testing::all_ids(net));
            CHECK(a == b);
        } catch (const Error&) {
        }
    }
}

TEST_CASE("interval nodes locate values in half-open bins", "[bn]") {
    auto n = interval_node("X", {0.0, 1.0, 2.0, 3.0});
    CHECK(n.locate(0.0) == 0u);
    CHECK(n.locate(1.0) == 1u);
    CHECK(n.locate(3.0) == 2u);
    CHECK_FALSE(n.locate(3.1).has_value());
    CHECK_FALSE(n.locate(-0.1).has_value());
}

TEST_CASE("DOT export lists every edge", "[bn]") {
    auto dot = to_dot(mass_speed_network());
    CHECK(dot.find("\"M\" -> \"D\"") != std::string::npos);
    CHECK(dot.find("\"D\" -> \"Z\"") != std::string::npos);
}
