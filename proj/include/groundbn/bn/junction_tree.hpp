#pragma once
// Exact inference by the clustering (junction-tree) algorithm.
//
// compile(): moralize, triangulate with greedy min-fill (ties broken by
// node id), keep maximal elimination cliques, join them with a maximum
// spanning tree over separator sizes.
// infer(): Hugin-style collect/distribute with separator division.
// Messages are renormalized as they are passed; the scale factors are
// accumulated in log space so the evidence probability stays available.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "groundbn/bn/network.hpp"
#include "groundbn/errors.hpp"

namespace groundbn::bn {

inline constexpr double kImpossibleEvidenceThreshold = 1e-300;
inline constexpr std::size_t kMaxCliqueEntries = 60'000'000;

struct Clique {
    std::vector<std::size_t> vars;     // node indices, ascending
    std::vector<std::size_t> cards;
    std::vector<std::size_t> strides;  // row-major, last var fastest
    std::size_t size = 1;

    bool contains(std::size_t v) const { return std::binary_search(vars.begin(), vars.end(), v); }
};

struct Separator {
    std::size_t a = 0;  // clique closer to the root
    std::size_t b = 0;  // clique further from the root
    std::vector<std::size_t> vars;
    std::size_t size = 1;
};

struct InferenceResult {
    Marginals marginals;
    double log_evidence = 0.0;  // ln p(e)
};

namespace detail {

inline Clique make_clique(std::vector<std::size_t> vars, const Network& net) {
    Clique c;
    std::sort(vars.begin(), vars.end());
    c.vars = std::move(vars);
    c.cards.resize(c.vars.size());
    c.strides.resize(c.vars.size());
    for (std::size_t i = 0; i < c.vars.size(); ++i) c.cards[i] = net.nodes()[c.vars[i]].cardinality();
    std::size_t s = 1;
    for (std::size_t i = c.vars.size(); i-- > 0;) {
        c.strides[i] = s;
        if (s > kMaxCliqueEntries / std::max<std::size_t>(c.cards[i], 1))
            throw Error(ErrorCode::StateSpaceTooLarge, "clique table exceeds the supported size");
        s *= c.cards[i];
    }
    c.size = s;
    return c;
}

// Stride of each clique variable inside a sub-table over `sub` (ascending
// node indices, row-major); zero for variables not in `sub`.
inline std::vector<std::size_t> projection_strides(const Clique& c, const std::vector<std::size_t>& sub,
                                                   const Network& net) {
    std::vector<std::size_t> out(c.vars.size(), 0);
    std::size_t s = 1;
    for (std::size_t k = sub.size(); k-- > 0;) {
        auto it = std::lower_bound(c.vars.begin(), c.vars.end(), sub[k]);
        out[static_cast<std::size_t>(it - c.vars.begin())] = s;
        s *= net.nodes()[sub[k]].cardinality();
    }
    return out;
}

// Calls f(clique_index, projected_index) for every clique entry, in order.
template <class F>
void for_each_projection(const Clique& c, const std::vector<std::size_t>& proj, F&& f) {
    const std::size_t dims = c.vars.size();
    if (dims == 0) {
        f(std::size_t{0}, std::size_t{0});
        return;
    }
    std::vector<std::size_t> counter(dims, 0);
    const std::size_t last_card = c.cards[dims - 1];
    const std::size_t last_proj = proj[dims - 1];
    std::size_t base = 0;
    for (std::size_t i = 0; i < c.size; i += last_card) {
        std::size_t p = base;
        for (std::size_t j = 0; j < last_card; ++j, p += last_proj) f(i + j, p);
        // advance the odometer over all but the last dimension
        for (std::size_t d = dims - 1; d-- > 0;) {
            ++counter[d];
            base += proj[d];
            if (counter[d] < c.cards[d]) break;
            base -= proj[d] * counter[d];
            counter[d] = 0;
        }
    }
}

}  // namespace detail

class JunctionTree {
public:
    const Network& network() const { return *net_; }
    const std::vector<Clique>& cliques() const { return cliques_; }
    const std::vector<Separator>& separators() const { return seps_; }

    // Clique holding each node's family {child ∪ parents}.
    std::size_t family_clique(std::size_t node) const { return family_home_[node]; }

    std::size_t largest_clique_entries() const {
        std::size_t m = 0;
        for (const auto& c : cliques_) m = std::max(m, c.size);
        return m;
    }

    std::size_t total_entries() const {
        std::size_t t = 0;
        for (const auto& c : cliques_) t += c.size;
        return t;
    }

    // Exact posterior marginals of the query nodes given hard evidence.
    InferenceResult infer(const EvidenceAssignment& ev, const std::vector<std::string>& query) const;

    friend JunctionTree compile(std::shared_ptr<const Network> net);

private:
    std::shared_ptr<const Network> net_;
    std::vector<Clique> cliques_;
    std::vector<Separator> seps_;           // in collect order is reversed; seps_[k].b is visited after .a
    std::vector<std::vector<double>> init_;  // initial clique potentials
    std::vector<std::size_t> family_home_;
    std::vector<std::size_t> var_home_;      // smallest clique containing each node
    std::vector<std::vector<std::size_t>> sep_proj_a_, sep_proj_b_;
};

namespace detail {

inline std::vector<std::set<std::size_t>> moral_graph(const Network& net) {
    const std::size_t n = net.size();
    std::vector<std::set<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ps = net.parent_indices(i);
        for (std::size_t a = 0; a < ps.size(); ++a) {
            adj[i].insert(ps[a]);
            adj[ps[a]].insert(i);
            for (std::size_t b = a + 1; b < ps.size(); ++b) {
                adj[ps[a]].insert(ps[b]);
                adj[ps[b]].insert(ps[a]);
            }
        }
    }
    return adj;
}

// Greedy min-fill elimination; returns the elimination cliques.
inline std::vector<std::vector<std::size_t>> min_fill_cliques(const Network& net) {
    auto adj = moral_graph(net);
    const std::size_t n = net.size();
    std::vector<bool> eliminated(n, false);
    std::vector<std::vector<std::size_t>> out;
    for (std::size_t step = 0; step < n; ++step) {
        std::size_t best = n;
        std::size_t best_fill = std::numeric_limits<std::size_t>::max();
        for (std::size_t v = 0; v < n; ++v) {
            if (eliminated[v]) continue;
            std::size_t fill = 0;
            for (auto a = adj[v].begin(); a != adj[v].end(); ++a)
                for (auto b = std::next(a); b != adj[v].end(); ++b)
                    if (!adj[*a].count(*b)) ++fill;
            if (fill < best_fill || (fill == best_fill && net.nodes()[v].id < net.nodes()[best].id)) {
                best = v;
                best_fill = fill;
            }
        }
        std::vector<std::size_t> clique(adj[best].begin(), adj[best].end());
        for (auto a : clique)
            for (auto b : clique)
                if (a != b) adj[a].insert(b);
        clique.push_back(best);
        std::sort(clique.begin(), clique.end());
        out.push_back(std::move(clique));
        for (auto a : adj[best]) adj[a].erase(best);
        adj[best].clear();
        eliminated[best] = true;
    }
    return out;
}

inline std::vector<std::vector<std::size_t>> maximal_only(std::vector<std::vector<std::size_t>> cl) {
    std::vector<std::vector<std::size_t>> keep;
    for (std::size_t i = 0; i < cl.size(); ++i) {
        bool subsumed = false;
        for (std::size_t j = 0; j < cl.size() && !subsumed; ++j) {
            if (i == j) continue;
            bool subset = std::includes(cl[j].begin(), cl[j].end(), cl[i].begin(), cl[i].end());
            // equal sets: keep the first occurrence only
            if (subset && (cl[i].size() < cl[j].size() || j < i)) subsumed = true;
        }
        if (!subsumed) keep.push_back(cl[i]);
    }
    return keep;
}

inline std::vector<std::size_t> intersect(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    std::vector<std::size_t> out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

}  // namespace detail

inline JunctionTree compile(std::shared_ptr<const Network> net_ptr) {
    const Network& net = *net_ptr;
    JunctionTree jt;
    jt.net_ = net_ptr;

    auto sets = detail::maximal_only(detail::min_fill_cliques(net));
    for (auto& s : sets) jt.cliques_.push_back(detail::make_clique(s, net));
    const std::size_t k = jt.cliques_.size();

    // Maximum spanning tree (Kruskal) over separator sizes; zero-weight edges
    // join disconnected components so the result is a single tree.
    struct Candidate {
        std::size_t weight, i, j;
    };
    std::vector<Candidate> cand;
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j)
            cand.push_back({detail::intersect(jt.cliques_[i].vars, jt.cliques_[j].vars).size(), i, j});
    std::stable_sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) { return a.weight > b.weight; });
    std::vector<std::size_t> comp(k);
    std::iota(comp.begin(), comp.end(), 0);
    auto find = [&](std::size_t x) {
        while (comp[x] != x) x = comp[x] = comp[comp[x]];
        return x;
    };
    std::vector<std::vector<std::size_t>> tree(k);
    for (const auto& c : cand) {
        auto ri = find(c.i), rj = find(c.j);
        if (ri == rj) continue;
        comp[ri] = rj;
        tree[c.i].push_back(c.j);
        tree[c.j].push_back(c.i);
    }

    // Orient from clique 0: separators listed in breadth-first order.
    std::vector<bool> seen(k, false);
    std::vector<std::size_t> queue{0};
    seen[0] = true;
    for (std::size_t q = 0; q < queue.size(); ++q) {
        std::size_t a = queue[q];
        for (auto b : tree[a]) {
            if (seen[b]) continue;
            seen[b] = true;
            queue.push_back(b);
            Separator s;
            s.a = a;
            s.b = b;
            s.vars = detail::intersect(jt.cliques_[a].vars, jt.cliques_[b].vars);
            for (auto v : s.vars) s.size *= net.nodes()[v].cardinality();
            jt.seps_.push_back(std::move(s));
        }
    }

    // Running-intersection property: cliques containing v form a subtree.
    for (std::size_t v = 0; v < net.size(); ++v) {
        std::size_t holders = 0;
        for (const auto& c : jt.cliques_) holders += c.contains(v);
        std::size_t links = 0;
        for (const auto& s : jt.seps_) links += std::binary_search(s.vars.begin(), s.vars.end(), v);
        if (holders == 0 || links != holders - 1)
            throw Error(ErrorCode::InvalidNetwork, "running intersection violated for '" + net.nodes()[v].id + "'");
    }

    auto smallest_holding = [&](const std::vector<std::size_t>& vars) {
        std::size_t best = k;
        for (std::size_t c = 0; c < k; ++c) {
            bool ok = std::all_of(vars.begin(), vars.end(), [&](auto v) { return jt.cliques_[c].contains(v); });
            if (ok && (best == k || jt.cliques_[c].size < jt.cliques_[best].size)) best = c;
        }
        return best;
    };

    jt.family_home_.resize(net.size());
    jt.var_home_.resize(net.size());
    jt.init_.resize(k);
    for (std::size_t c = 0; c < k; ++c) jt.init_[c].assign(jt.cliques_[c].size, 1.0);
    for (std::size_t v = 0; v < net.size(); ++v) {
        std::vector<std::size_t> fam = net.parent_indices(v);
        fam.push_back(v);
        std::sort(fam.begin(), fam.end());
        std::size_t home = smallest_holding(fam);
        if (home == k)
            throw Error(ErrorCode::InvalidNetwork, "family of '" + net.nodes()[v].id + "' not covered by a clique");
        jt.family_home_[v] = home;
        jt.var_home_[v] = smallest_holding({v});

        // Multiply the CPT into its home clique. CPT layout: parents in
        // declaration order, then the child.
        const auto& clique = jt.cliques_[home];
        std::vector<std::size_t> proj(clique.vars.size(), 0);
        std::size_t stride = net.nodes()[v].cardinality();
        auto set_stride = [&](std::size_t var, std::size_t s) {
            auto it = std::lower_bound(clique.vars.begin(), clique.vars.end(), var);
            proj[static_cast<std::size_t>(it - clique.vars.begin())] = s;
        };
        set_stride(v, 1);
        const auto& ps = net.parent_indices(v);
        for (std::size_t p = ps.size(); p-- > 0;) {
            set_stride(ps[p], stride);
            stride *= net.nodes()[ps[p]].cardinality();
        }
        const auto& cpt = net.tables()[v].values;
        auto& pot = jt.init_[home];
        detail::for_each_projection(clique, proj, [&](std::size_t i, std::size_t t) { pot[i] *= cpt[t]; });
    }

    for (const auto& s : jt.seps_) {
        jt.sep_proj_a_.push_back(detail::projection_strides(jt.cliques_[s.a], s.vars, net));
        jt.sep_proj_b_.push_back(detail::projection_strides(jt.cliques_[s.b], s.vars, net));
    }
    return jt;
}

inline JunctionTree compile(const Network& net) { return compile(std::make_shared<const Network>(net)); }

inline InferenceResult JunctionTree::infer(const EvidenceAssignment& ev, const std::vector<std::string>& query) const {
    const Network& net = *net_;
    net.validate_evidence(ev);
    std::vector<std::size_t> query_idx;
    for (const auto& q : query) query_idx.push_back(net.index_of(q));

    std::vector<std::vector<double>> pot = init_;
    for (const auto& [id, state] : ev) {
        std::size_t v = net.index_of(id);
        const auto& c = cliques_[var_home_[v]];
        auto proj = detail::projection_strides(c, {v}, net);
        auto& p = pot[var_home_[v]];
        detail::for_each_projection(c, proj, [&](std::size_t i, std::size_t s) {
            if (s != state) p[i] = 0.0;
        });
    }

    auto impossible = [] {
        return Error(ErrorCode::ImpossibleEvidence, "the entered evidence has zero probability under the model");
    };

    std::vector<std::vector<double>> sep_msg(seps_.size());
    double log_scale = 0.0;

    // Collect: leaves towards the root.
    for (std::size_t e = seps_.size(); e-- > 0;) {
        const auto& s = seps_[e];
        std::vector<double> msg(s.size, 0.0);
        const auto& pb = pot[s.b];
        detail::for_each_projection(cliques_[s.b], sep_proj_b_[e], [&](std::size_t i, std::size_t j) { msg[j] += pb[i]; });
        double z = std::accumulate(msg.begin(), msg.end(), 0.0);
        if (!(z > 0.0)) throw impossible();
        for (auto& m : msg) m /= z;
        log_scale += std::log(z);
        auto& pa = pot[s.a];
        detail::for_each_projection(cliques_[s.a], sep_proj_a_[e], [&](std::size_t i, std::size_t j) { pa[i] *= msg[j]; });
        sep_msg[e] = std::move(msg);
    }
    double root_sum = std::accumulate(pot[0].begin(), pot[0].end(), 0.0);
    if (!(root_sum > 0.0)) throw impossible();
    const double log_evidence = log_scale + std::log(root_sum);
    if (log_evidence < std::log(kImpossibleEvidenceThreshold)) throw impossible();

    // Distribute: root towards the leaves, dividing out the collect message.
    for (std::size_t e = 0; e < seps_.size(); ++e) {
        const auto& s = seps_[e];
        std::vector<double> msg(s.size, 0.0);
        const auto& pa = pot[s.a];
        detail::for_each_projection(cliques_[s.a], sep_proj_a_[e], [&](std::size_t i, std::size_t j) { msg[j] += pa[i]; });
        double z = std::accumulate(msg.begin(), msg.end(), 0.0);
        for (auto& m : msg) m /= z;
        const auto& old = sep_msg[e];
        for (std::size_t j = 0; j < msg.size(); ++j) msg[j] = old[j] > 0.0 ? msg[j] / old[j] : 0.0;
        auto& pb = pot[s.b];
        detail::for_each_projection(cliques_[s.b], sep_proj_b_[e], [&](std::size_t i, std::size_t j) { pb[i] *= msg[j]; });
    }

    InferenceResult result;
    result.log_evidence = log_evidence;
    for (std::size_t qi = 0; qi < query_idx.size(); ++qi) {
        std::size_t v = query_idx[qi];
        std::size_t home = var_home_[v];
        const auto& c = cliques_[home];
        std::vector<double> m(net.nodes()[v].cardinality(), 0.0);
        auto proj = detail::projection_strides(c, {v}, net);
        const auto& p = pot[home];
        detail::for_each_projection(c, proj, [&](std::size_t i, std::size_t j) { m[j] += p[i]; });
        double z = std::accumulate(m.begin(), m.end(), 0.0);
        for (auto& x : m) x /= z;
        result.marginals[query[qi]] = std::move(m);
    }
    return result;
}

inline Marginals infer_marginals(const JunctionTree& jt, const EvidenceAssignment& ev,
                                 const std::vector<std::string>& query) {
    return jt.infer(ev, query).marginals;
}

}  // namespace groundbn::bn
