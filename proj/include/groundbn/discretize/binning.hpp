#pragma once
// Bin layouts for discretized continuous variables.

#include <cmath>
#include <string>
#include <vector>

#include "groundbn/errors.hpp"

namespace groundbn::discretize {

class BinningPolicy {
public:
    // `count` equal-width bins over [lo, hi].
    static BinningPolicy uniform(double lo, double hi, std::size_t count) {
        if (!(hi > lo) || count < 2) throw Error(ErrorCode::InvalidParameter, "uniform binning needs hi > lo and >= 2 bins");
        std::vector<double> e(count + 1);
        for (std::size_t i = 0; i <= count; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count);
        e.back() = hi;
        return BinningPolicy(std::move(e));
    }

    // Bins of the given width starting at lo; the last bin is shortened to end at hi.
    static BinningPolicy width(double lo, double hi, double w) {
        if (!(hi > lo) || !(w > 0)) throw Error(ErrorCode::InvalidParameter, "width binning needs hi > lo and w > 0");
        std::vector<double> e{lo};
        for (std::size_t k = 1;; ++k) {
            double x = lo + w * static_cast<double>(k);
            if (x >= hi - 1e-9 * w) break;
            e.push_back(x);
        }
        e.push_back(hi);
        return BinningPolicy(std::move(e));
    }

    // [0, first) followed by `count - 1` geometrically growing bins up to hi.
    static BinningPolicy geometric(double first, double hi, std::size_t count) {
        if (!(first > 0 && hi > first) || count < 2)
            throw Error(ErrorCode::InvalidParameter, "geometric binning needs 0 < first < hi and >= 2 bins");
        std::vector<double> e{0.0};
        const double ratio = std::pow(hi / first, 1.0 / static_cast<double>(count - 1));
        for (std::size_t i = 0; i + 1 < count; ++i) e.push_back(first * std::pow(ratio, static_cast<double>(i)));
        e.push_back(hi);
        return BinningPolicy(std::move(e));
    }

    static BinningPolicy edges(std::vector<double> e) { return BinningPolicy(std::move(e)); }

    const std::vector<double>& edges() const { return edges_; }
    std::size_t count() const { return edges_.size() - 1; }
    double lo() const { return edges_.front(); }
    double hi() const { return edges_.back(); }

    // Bin containing x, clamped to the boundary bins.
    std::size_t clamp_locate(double x) const {
        if (!(x >= edges_[1])) return 0;
        if (x >= edges_[edges_.size() - 2]) return count() - 1;
        std::size_t a = 1, b = count() - 1;  // edges_[a] <= x < edges_[b]
        while (b - a > 1) {
            std::size_t m = (a + b) / 2;
            (x >= edges_[m] ? a : b) = m;
        }
        return a;
    }

private:
    explicit BinningPolicy(std::vector<double> e) : edges_(std::move(e)) {
        if (edges_.size() < 3) throw Error(ErrorCode::InvalidParameter, "binning needs at least two bins");
        for (std::size_t i = 1; i < edges_.size(); ++i)
            if (!(edges_[i] > edges_[i - 1]) || !std::isfinite(edges_[i]))
                throw Error(ErrorCode::InvalidParameter, "bin edges must be finite and strictly ascending");
    }

    std::vector<double> edges_;
};

}  // namespace groundbn::discretize
