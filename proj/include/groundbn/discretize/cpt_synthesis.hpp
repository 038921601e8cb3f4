#pragma once
// Conditional-table synthesis for discretized continuous relations.
//
// A child defined as y = f(parents) (plus an error term) becomes a table by,
// for every parent cell, evaluating f on a stratified point set in the cell
// and spreading each sample's mass over the child bins with the exact error
// cdf. Categorical parents are passed to f as their state index.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "groundbn/bn/network.hpp"
#include "groundbn/discretize/binning.hpp"
#include "groundbn/discretize/counter_rng.hpp"
#include "groundbn/discretize/distribution.hpp"
#include "groundbn/errors.hpp"

namespace groundbn::discretize {

enum class NoiseKind { none, additive, multiplicative };

struct NoiseModel {
    NoiseKind kind = NoiseKind::none;
    Distribution error;

    static NoiseModel none() { return {}; }
    static NoiseModel additive(Distribution d) { return {NoiseKind::additive, std::move(d)}; }
    static NoiseModel multiplicative(Distribution d) {
        if (!(d.support_lo() >= 0.0))
            throw Error(ErrorCode::InvalidParameter, "multiplicative error needs positive support");
        return {NoiseKind::multiplicative, std::move(d)};
    }
};

struct SynthesisConfig {
    std::size_t samples_per_cell = 256;
    std::uint64_t seed = 20250101;
    unsigned threads = 0;  // 0: hardware concurrency
};

// One parent dimension: numeric bin edges, or a number of categories.
struct ParentAxis {
    std::vector<double> edges;
    std::size_t categories = 0;

    static ParentAxis numeric(const BinningPolicy& b) { return {b.edges(), 0}; }
    static ParentAxis numeric(std::vector<double> e) { return {std::move(e), 0}; }
    static ParentAxis categorical(std::size_t k) { return {{}, k}; }

    bool is_numeric() const { return !edges.empty(); }
    std::size_t count() const { return is_numeric() ? edges.size() - 1 : categories; }
};

// Receives parent values (in axis order) followed by auxiliary draws.
using CellFunction = std::function<double(std::span<const double>)>;
// Receives the parent cell's state indices.
using NoiseSelector = std::function<NoiseModel(std::span<const std::size_t>)>;

// Bin masses of `dist` over `bins`. Mass outside the bins is removed by
// renormalization (truncation) or, when truncation is off, folded into the
// boundary bins; more than 1e-3 outside without truncation is an error.
inline std::vector<double> prior_table(const Distribution& dist, const BinningPolicy& bins, bool truncate = true) {
    const auto& e = bins.edges();
    std::vector<double> c(e.size());
    for (std::size_t i = 0; i < e.size(); ++i) c[i] = dist.cdf(e[i]);
    std::vector<double> m(bins.count());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::max(0.0, c[i + 1] - c[i]);
    const double outside = c.front() + (1.0 - c.back());
    if (!truncate) {
        if (outside > 1e-3)
            throw Error(ErrorCode::SupportMismatch,
                        std::to_string(outside) + " of the probability mass lies outside the bin range");
        m.front() += c.front();
        m.back() += 1.0 - c.back();
    }
    double s = 0.0;
    for (double x : m) s += x;
    if (!(s > 0.0)) throw Error(ErrorCode::SupportMismatch, "distribution puts no mass on the bin range");
    for (double& x : m) x /= s;
    return m;
}

namespace detail {

// Adds `weight` of the law of the child value to `row`.
inline void spread(double y, const NoiseModel& noise, const std::vector<double>& e, double weight,
                   std::vector<double>& row, const BinningPolicy& child) {
    const std::size_t n = e.size() - 1;
    if (noise.kind == NoiseKind::none || (noise.kind == NoiseKind::multiplicative && y == 0.0)) {
        row[child.clamp_locate(y)] += weight;
        return;
    }
    auto below = [&](std::size_t k) {
        if (noise.kind == NoiseKind::additive) return noise.error.cdf(e[k] - y);
        if (y > 0.0) return noise.error.cdf(e[k] / y);
        return 1.0 - noise.error.cdf(e[k] / y);
    };
    // Interior edges whose cdf is exactly 0 or 1 contribute nothing; find the
    // band in between by bisection so wide child ranges stay cheap.
    auto first_edge = [&](std::size_t from, auto pred) {
        std::size_t lo = from, hi = n;
        while (lo < hi) {
            std::size_t m = (lo + hi) / 2;
            if (pred(below(m))) hi = m;
            else lo = m + 1;
        }
        return lo;
    };
    const std::size_t a = first_edge(1, [](double c) { return c > 0.0; });
    const std::size_t b = first_edge(a, [](double c) { return c >= 1.0; });
    double prev = 0.0;
    for (std::size_t k = a; k <= n; ++k) {
        double c = k >= b ? 1.0 : std::max(below(k), prev);
        row[k - 1] += weight * (c - prev);
        prev = c;
        if (k >= b) break;
    }
}

inline constexpr std::array<unsigned, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

inline double radical_inverse(unsigned base, std::size_t i) {
    double inv = 1.0 / base, f = inv, r = 0.0;
    for (; i > 0; i /= base, f *= inv) r += f * static_cast<double>(i % base);
    return r;
}

inline double wrap(double u) { return u >= 1.0 ? u - 1.0 : u; }

// Adds `weight` times the image of the uniform law on [0, 1] under g to `row`,
// locating each interior child edge by regula falsi (Illinois). Returns false
// when g is not finite at the ends or visibly non-monotone.
template <class G>
bool integrate_monotone(G&& g, const BinningPolicy& child, double weight, std::vector<double>& row) {
    double y0 = g(0.0), y1 = g(1.0), ym = g(0.5);
    if (!std::isfinite(y0) || !std::isfinite(y1) || !std::isfinite(ym)) return false;
    const bool up = y1 >= y0;
    if (up ? !(y0 <= ym && ym <= y1) : !(y0 >= ym && ym >= y1)) return false;
    const auto& e = child.edges();
    std::size_t bin = child.clamp_locate(y0);
    const std::size_t last = child.clamp_locate(y1);
    if (bin == last) {
        row[bin] += weight;
        return true;
    }
    double t_prev = 0.0, lo_t = 0.0, lo_y = y0;
    while (bin != last) {
        const double target = up ? e[bin + 1] : e[bin];
        // root of g(t) - target on [lo_t, 1]; sign convention: h < 0 before it
        auto h = [&](double y) { return up ? y - target : target - y; };
        double a = lo_t, fa = h(lo_y), b = 1.0, fb = h(y1);
        int side = 0;
        for (int it = 0; it < 200 && b - a > 1e-14; ++it) {
            double c = fb - fa > 0 ? (a * fb - b * fa) / (fb - fa) : 0.5 * (a + b);
            if (!(c > a && c < b)) c = 0.5 * (a + b);
            double yc = g(c), fc = h(yc);
            if (!std::isfinite(yc)) return false;
            if (fc < 0) {
                a = c, fa = fc;
                if (side == -1) fb *= 0.5;
                side = -1;
            } else {
                b = c, fb = fc;
                if (fc == 0) break;
                if (side == 1) fa *= 0.5;
                side = 1;
            }
        }
        row[bin] += weight * (b - t_prev);
        t_prev = b;
        lo_t = b;
        lo_y = g(b);
        bin = up ? bin + 1 : bin - 1;
        // skip empty bins crossed at the same point
        while (bin != last && (up ? lo_y >= e[bin + 1] : lo_y < e[bin])) bin = up ? bin + 1 : bin - 1;
    }
    row[bin] += weight * (1.0 - t_prev);
    return true;
}

template <class F>
void parallel_for(std::size_t count, unsigned threads, F&& body) {
    unsigned t = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    if (t <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    t = static_cast<unsigned>(std::min<std::size_t>(t, count));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(t);
    for (unsigned w = 0; w < t; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < count; i += t) body(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace detail

inline bn::ConditionalTable functional_cpt(const std::string& child_id, const BinningPolicy& child,
                                           std::span<const ParentAxis> parents, const CellFunction& f,
                                           const NoiseSelector& noise, const SynthesisConfig& cfg,
                                           std::span<const Distribution> aux = {}) {
    if (cfg.samples_per_cell < 1) throw Error(ErrorCode::InvalidParameter, "samples per cell must be >= 1");
    std::size_t rows = 1;
    std::vector<std::size_t> numeric_dims;
    for (std::size_t k = 0; k < parents.size(); ++k) {
        if (parents[k].count() < 1) throw Error(ErrorCode::InvalidParameter, "empty parent axis");
        rows *= parents[k].count();
        if (parents[k].is_numeric()) numeric_dims.push_back(k);
    }
    const std::size_t card = child.count();
    const std::size_t n = cfg.samples_per_cell;
    const std::size_t dims = numeric_dims.size() + aux.size();
    if (dims > detail::kPrimes.size())
        throw Error(ErrorCode::InvalidParameter, "too many sampled dimensions for '" + child_id + "'");
    const std::uint64_t stream = stream_id(child_id);
    const auto& edges = child.edges();

    bn::ConditionalTable table{child_id, std::vector<double>(rows * card, 0.0)};

    detail::parallel_for(rows, cfg.threads, [&](std::size_t r) {
        std::vector<std::size_t> cell(parents.size());
        for (std::size_t k = parents.size(), rem = r; k-- > 0;) {
            cell[k] = rem % parents[k].count();
            rem /= parents[k].count();
        }
        const NoiseModel nm = noise ? noise(cell) : NoiseModel::none();

        // Noise-free relations are integrated exactly along the last numeric
        // parent, which then drops out of the sampled design.
        const bool exact = nm.kind == NoiseKind::none && !numeric_dims.empty();
        const std::size_t exact_dim = exact ? numeric_dims.size() - 1 : dims;
        const std::size_t sampled = exact ? dims - 1 : dims;
        const std::size_t m = sampled == 0 ? 1 : n;

        std::vector<double> shift(dims, 0.0);
        for (std::size_t d = 1; d < dims; ++d) shift[d] = CounterRng(cfg.seed, stream, r, d).uniform();

        std::vector<double> x(parents.size() + aux.size());
        for (std::size_t k = 0; k < parents.size(); ++k)
            if (!parents[k].is_numeric()) x[k] = static_cast<double>(cell[k]);

        auto undefined = [&] {
            return Error(ErrorCode::DegenerateCell,
                         "relation for '" + child_id + "' is undefined on parent cell " + std::to_string(r), child_id);
        };
        auto place = [&](std::size_t d, double u) {
            if (d < numeric_dims.size()) {
                const auto& e = parents[numeric_dims[d]].edges;
                std::size_t b = cell[numeric_dims[d]];
                x[numeric_dims[d]] = e[b] + u * (e[b + 1] - e[b]);
            } else {
                x[parents.size() + (d - numeric_dims.size())] = aux[d - numeric_dims.size()].quantile(u);
            }
        };

        std::vector<double> row(card, 0.0);
        const double w = 1.0 / static_cast<double>(m);
        for (std::size_t j = 0; j < m; ++j) {
            // Hammersley points: midpoints on the first sampled axis, shifted
            // radical inverses on the others.
            double u_exact = 0.5;
            for (std::size_t d = 0, s = 0; d < dims; ++d) {
                double u = s == 0 ? (static_cast<double>(j) + 0.5) / static_cast<double>(m)
                                  : detail::wrap(detail::radical_inverse(detail::kPrimes[s - 1], j) + shift[d]);
                if (d == exact_dim) {
                    u_exact = detail::wrap(detail::radical_inverse(detail::kPrimes[dims - 1], j) + shift[d]);
                    continue;
                }
                place(d, u);
                ++s;
            }
            if (exact) {
                auto g = [&](double t) {
                    place(exact_dim, t);
                    return f(x);
                };
                if (detail::integrate_monotone(g, child, w, row)) continue;
                place(exact_dim, u_exact);
            }
            double y = f(x);
            if (!std::isfinite(y)) throw undefined();
            detail::spread(y, nm, edges, w, row, child);
        }
        double s = 0.0;
        for (double v : row) s += v;
        for (std::size_t i = 0; i < card; ++i) table.values[r * card + i] = row[i] / s;
    });
    return table;
}

inline bn::ConditionalTable functional_cpt(const std::string& child_id, const BinningPolicy& child,
                                           std::span<const ParentAxis> parents, const CellFunction& f,
                                           const NoiseModel& noise, const SynthesisConfig& cfg,
                                           std::span<const Distribution> aux = {}) {
    return functional_cpt(child_id, child, parents, f, NoiseSelector([noise](std::span<const std::size_t>) { return noise; }),
                          cfg, aux);
}

}  // namespace groundbn::discretize
