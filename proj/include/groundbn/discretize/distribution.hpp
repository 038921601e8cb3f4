#pragma once
// Continuous distribution families used for priors and error terms.
//
// Closed-form cdf/quantile come from Boost.Math. LognormalMedianCov is
// parameterized the way engineering error terms are usually quoted: a
// median and a coefficient of variation, mapped to ln-location ln(median)
// and ln-scale sqrt(ln(1 + cov^2)).

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/distributions/beta.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>

#include "groundbn/discretize/counter_rng.hpp"
#include "groundbn/errors.hpp"

namespace groundbn::discretize {

struct Uniform {
    double lo, hi;
};
struct ScaledBeta {
    double alpha, beta, lo, hi;
};
struct Normal {
    double mean, sd;
};
struct LognormalMedianCov {
    double median, cov;
};
// Exponential with rate λ restricted to [lo, hi].
struct TruncExp {
    double rate, lo, hi;
};
struct EmpiricalHistogram {
    std::vector<double> edges;   // ascending, masses.size() + 1 entries
    std::vector<double> masses;  // sum to 1
};

using DistributionSpec = std::variant<Uniform, ScaledBeta, Normal, LognormalMedianCov, TruncExp, EmpiricalHistogram>;

class Distribution {
public:
    Distribution() : spec_(Uniform{0.0, 1.0}) {}
    explicit Distribution(DistributionSpec spec);

    const DistributionSpec& spec() const { return spec_; }
    std::string family() const;

    double cdf(double x) const;
    double quantile(double p) const;
    double mean() const;
    double sd() const;
    // Lower/upper end of the support (may be infinite).
    double support_lo() const;
    double support_hi() const;

    double sample(CounterRng& rng) const { return quantile(std::clamp(rng.uniform(), 1e-16, 1.0 - 1e-16)); }

private:
    DistributionSpec spec_;
};

// Validates parameters; throws InvalidParameter.
inline Distribution make_distribution(DistributionSpec spec) { return Distribution(std::move(spec)); }

namespace detail {

inline double lognormal_scale(double cov) { return std::sqrt(std::log1p(cov * cov)); }

inline double std_normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

inline void require(bool ok, const std::string& what) {
    if (!ok) throw Error(ErrorCode::InvalidParameter, what);
}

}  // namespace detail

inline Distribution::Distribution(DistributionSpec spec) : spec_(std::move(spec)) {
    using detail::require;
    std::visit(detail::overloaded{
                   [](const Uniform& d) { require(d.hi > d.lo, "uniform requires hi > lo"); },
                   [](const ScaledBeta& d) {
                       require(d.alpha > 0 && d.beta > 0, "beta shape parameters must be positive");
                       require(d.hi > d.lo, "scaled beta requires hi > lo");
                   },
                   [](const Normal& d) { require(d.sd > 0 && std::isfinite(d.mean), "normal requires sd > 0"); },
                   [](const LognormalMedianCov& d) {
                       require(d.median > 0 && d.cov > 0, "lognormal requires median > 0 and cov > 0");
                   },
                   [](const TruncExp& d) {
                       require(d.rate > 0 && d.hi > d.lo, "truncated exponential requires rate > 0 and hi > lo");
                   },
                   [](const EmpiricalHistogram& d) {
                       require(d.masses.size() >= 1 && d.edges.size() == d.masses.size() + 1,
                               "histogram needs one more edge than masses");
                       double s = 0.0;
                       for (double m : d.masses) {
                           require(m >= 0.0, "histogram masses must be nonnegative");
                           s += m;
                       }
                       require(std::abs(s - 1.0) <= 1e-12, "histogram masses must sum to 1");
                       for (std::size_t i = 1; i < d.edges.size(); ++i)
                           require(d.edges[i] > d.edges[i - 1], "histogram edges must ascend");
                   },
               },
               spec_);
}

inline std::string Distribution::family() const {
    return std::visit(detail::overloaded{
                          [](const Uniform&) { return std::string("uniform"); },
                          [](const ScaledBeta&) { return std::string("scaled_beta"); },
                          [](const Normal&) { return std::string("normal"); },
                          [](const LognormalMedianCov&) { return std::string("lognormal_median_cov"); },
                          [](const TruncExp&) { return std::string("trunc_exp"); },
                          [](const EmpiricalHistogram&) { return std::string("empirical_histogram"); },
                      },
                      spec_);
}

inline double Distribution::cdf(double x) const {
    namespace bm = boost::math;
    return std::visit(
        detail::overloaded{
            [x](const Uniform& d) { return std::clamp((x - d.lo) / (d.hi - d.lo), 0.0, 1.0); },
            [x](const ScaledBeta& d) {
                if (x <= d.lo) return 0.0;
                if (x >= d.hi) return 1.0;
                return bm::cdf(bm::beta_distribution<>(d.alpha, d.beta), (x - d.lo) / (d.hi - d.lo));
            },
            [x](const Normal& d) { return detail::std_normal_cdf((x - d.mean) / d.sd); },
            [x](const LognormalMedianCov& d) {
                if (x <= 0.0) return 0.0;
                if (std::isinf(x)) return 1.0;
                return detail::std_normal_cdf((std::log(x) - std::log(d.median)) / detail::lognormal_scale(d.cov));
            },
            [x](const TruncExp& d) {
                if (x <= d.lo) return 0.0;
                if (x >= d.hi) return 1.0;
                return -std::expm1(-d.rate * (x - d.lo)) / -std::expm1(-d.rate * (d.hi - d.lo));
            },
            [x](const EmpiricalHistogram& d) {
                if (x <= d.edges.front()) return 0.0;
                double c = 0.0;
                for (std::size_t i = 0; i < d.masses.size(); ++i) {
                    if (x >= d.edges[i + 1]) {
                        c += d.masses[i];
                        continue;
                    }
                    return c + d.masses[i] * (x - d.edges[i]) / (d.edges[i + 1] - d.edges[i]);
                }
                return 1.0;
            },
        },
        spec_);
}

inline double Distribution::quantile(double p) const {
    namespace bm = boost::math;
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidParameter, "quantile level outside [0,1]");
    return std::visit(
        detail::overloaded{
            [p](const Uniform& d) { return d.lo + p * (d.hi - d.lo); },
            [p](const ScaledBeta& d) {
                return d.lo + (d.hi - d.lo) * bm::quantile(bm::beta_distribution<>(d.alpha, d.beta), p);
            },
            [p](const Normal& d) {
                if (p <= 0.0) return -std::numeric_limits<double>::infinity();
                if (p >= 1.0) return std::numeric_limits<double>::infinity();
                return bm::quantile(bm::normal_distribution<>(d.mean, d.sd), p);
            },
            [p](const LognormalMedianCov& d) {
                if (p <= 0.0) return 0.0;
                if (p >= 1.0) return std::numeric_limits<double>::infinity();
                return bm::quantile(bm::lognormal_distribution<>(std::log(d.median), detail::lognormal_scale(d.cov)),
                                    p);
            },
            [p](const TruncExp& d) {
                return d.lo - std::log1p(p * std::expm1(-d.rate * (d.hi - d.lo))) / d.rate;
            },
            [p](const EmpiricalHistogram& d) {
                double c = 0.0;
                for (std::size_t i = 0; i < d.masses.size(); ++i) {
                    if (d.masses[i] > 0.0 && c + d.masses[i] >= p)
                        return d.edges[i] + (p - c) / d.masses[i] * (d.edges[i + 1] - d.edges[i]);
                    c += d.masses[i];
                }
                return d.edges.back();
            },
        },
        spec_);
}

inline double Distribution::mean() const {
    return std::visit(detail::overloaded{
                          [](const Uniform& d) { return 0.5 * (d.lo + d.hi); },
                          [](const ScaledBeta& d) { return d.lo + (d.hi - d.lo) * d.alpha / (d.alpha + d.beta); },
                          [](const Normal& d) { return d.mean; },
                          [](const LognormalMedianCov& d) {
                              double s = detail::lognormal_scale(d.cov);
                              return d.median * std::exp(0.5 * s * s);
                          },
                          [](const TruncExp& d) {
                              double w = d.hi - d.lo;
                              return d.lo + 1.0 / d.rate - w / std::expm1(d.rate * w);
                          },
                          [](const EmpiricalHistogram& d) {
                              double m = 0.0;
                              for (std::size_t i = 0; i < d.masses.size(); ++i)
                                  m += d.masses[i] * 0.5 * (d.edges[i] + d.edges[i + 1]);
                              return m;
                          },
                      },
                      spec_);
}

inline double Distribution::sd() const {
    return std::visit(
        detail::overloaded{
            [](const Uniform& d) { return (d.hi - d.lo) / std::sqrt(12.0); },
            [](const ScaledBeta& d) {
                double a = d.alpha, b = d.beta;
                return (d.hi - d.lo) * std::sqrt(a * b / ((a + b) * (a + b) * (a + b + 1.0)));
            },
            [](const Normal& d) { return d.sd; },
            [](const LognormalMedianCov& d) {
                // sd = mean * cov by construction of the scale parameter
                double s = detail::lognormal_scale(d.cov);
                return d.median * std::exp(0.5 * s * s) * d.cov;
            },
            [](const TruncExp& d) {
                double w = d.hi - d.lo;
                double e = std::exp(-d.rate * w);
                double denom = 1.0 - e;
                // moments of the exponential truncated to [0, w]
                double m1 = 1.0 / d.rate - w * e / denom;
                double m2 = 2.0 / (d.rate * d.rate) - (w * w + 2.0 * w / d.rate) * e / denom;
                return std::sqrt(std::max(0.0, m2 - m1 * m1));
            },
            [](const EmpiricalHistogram& d) {
                // uniform within each bin
                double m = 0.0, m2 = 0.0;
                for (std::size_t i = 0; i < d.masses.size(); ++i) {
                    double a = d.edges[i], b = d.edges[i + 1];
                    m += d.masses[i] * 0.5 * (a + b);
                    m2 += d.masses[i] * (a * a + a * b + b * b) / 3.0;
                }
                return std::sqrt(std::max(0.0, m2 - m * m));
            },
        },
        spec_);
}

inline double Distribution::support_lo() const {
    return std::visit(detail::overloaded{
                          [](const Uniform& d) { return d.lo; },
                          [](const ScaledBeta& d) { return d.lo; },
                          [](const Normal&) { return -std::numeric_limits<double>::infinity(); },
                          [](const LognormalMedianCov&) { return 0.0; },
                          [](const TruncExp& d) { return d.lo; },
                          [](const EmpiricalHistogram& d) { return d.edges.front(); },
                      },
                      spec_);
}

inline double Distribution::support_hi() const {
    return std::visit(detail::overloaded{
                          [](const Uniform& d) { return d.hi; },
                          [](const ScaledBeta& d) { return d.hi; },
                          [](const Normal&) { return std::numeric_limits<double>::infinity(); },
                          [](const LognormalMedianCov&) { return std::numeric_limits<double>::infinity(); },
                          [](const TruncExp& d) { return d.hi; },
                          [](const EmpiricalHistogram& d) { return d.edges.back(); },
                      },
                      spec_);
}

// Rate of an exponential on [lo, hi] whose truncated mean equals `mean`.
// Requires lo < mean < (lo + hi) / 2.
inline TruncExp trunc_exp_with_mean(double mean, double lo, double hi) {
    if (!(mean > lo && mean < 0.5 * (lo + hi)))
        throw Error(ErrorCode::InvalidParameter, "truncated exponential mean must lie in (lo, (lo+hi)/2)");
    // truncated mean decreases monotonically in the rate
    double a = 1e-12, b = 1.0;
    auto tmean = [&](double r) { return Distribution(TruncExp{r, lo, hi}).mean(); };
    while (tmean(b) > mean) b *= 2.0;
    for (int it = 0; it < 200; ++it) {
        double m = 0.5 * (a + b);
        (tmean(m) > mean ? a : b) = m;
    }
    return TruncExp{0.5 * (a + b), lo, hi};
}

}  // namespace groundbn::discretize
