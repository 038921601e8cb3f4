#include <catch2/catch_amalgamated.hpp>

#include <array>

#include "groundbn/discretize/binning.hpp"
#include "groundbn/discretize/cpt_synthesis.hpp"
#include "groundbn/discretize/distribution.hpp"

using namespace groundbn;
using namespace groundbn::discretize;
using Catch::Approx;

TEST_CASE("make_distribution: moments of the reported priors", "[discretize]") {
    auto beta = make_distribution(ScaledBeta{5, 2, 0, 15});
    CHECK(beta.mean() == Approx(10.7).margin(0.05));
    CHECK(beta.sd() == Approx(2.4).margin(0.05));
    auto beta2 = make_distribution(ScaledBeta{5, 2, 0, 15.6});
    CHECK(beta2.mean() == Approx(11.14).margin(0.01));
    CHECK(beta2.sd() == Approx(2.49).margin(0.01));

    auto u = make_distribution(Uniform{200000, 300000});
    CHECK(u.mean() == Approx(250000));
    CHECK(u.sd() == Approx(28868).margin(1));
    auto u2 = make_distribution(Uniform{130000, 350000});
    CHECK(u2.sd() == Approx(63509).margin(1));

    auto ln = make_distribution(LognormalMedianCov{1.0, 0.10});
    CHECK(ln.cdf(1.0) == Approx(0.5).margin(1e-15));
    CHECK(ln.sd() / ln.mean() == Approx(0.10).margin(1e-12));
}

TEST_CASE("make_distribution rejects bad parameters", "[discretize]") {
    auto code = [](auto spec) {
        try {
            make_distribution(spec);
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::UnknownNode;
    };
    CHECK(code(Normal{0, 0}) == ErrorCode::InvalidParameter);
    CHECK(code(LognormalMedianCov{1, -0.1}) == ErrorCode::InvalidParameter);
    CHECK(code(Uniform{2, 1}) == ErrorCode::InvalidParameter);
    CHECK(code(EmpiricalHistogram{{0, 1, 2}, {0.5, 0.6}}) == ErrorCode::InvalidParameter);
}

TEST_CASE("quantile inverts cdf for every family", "[discretize][property]") {
    std::vector<Distribution> ds{
        make_distribution(Uniform{-3, 7}),
        make_distribution(ScaledBeta{5, 2, 0, 15}),
        make_distribution(Normal{2, 0.24}),
        make_distribution(LognormalMedianCov{1, 0.3}),
        make_distribution(trunc_exp_with_mean(67, 0, 304)),
        make_distribution(EmpiricalHistogram{{0, 1, 3, 6}, {0.2, 0.5, 0.3}}),
    };
    for (const auto& d : ds)
        for (double p : {0.01, 0.1, 0.37, 0.5, 0.8, 0.99}) CHECK(d.cdf(d.quantile(p)) == Approx(p).margin(1e-9));
}

TEST_CASE("truncated exponential is calibrated to the requested mean", "[discretize]") {
    auto d = make_distribution(trunc_exp_with_mean(67, 0, 304));
    CHECK(d.mean() == Approx(67).margin(1e-6));
    // scipy.stats.truncexpon with the same rate
    CHECK(d.sd() == Approx(61.2300588233).margin(1e-6));
    auto d2 = make_distribution(trunc_exp_with_mean(69.5, 0, 316));
    CHECK(d2.mean() == Approx(69.5).margin(1e-6));
}

TEST_CASE("seeded sampling is reproducible", "[discretize]") {
    auto d = make_distribution(Normal{0, 1});
    CounterRng a(42, 1, 2, 3), b(42, 1, 2, 3), c(43, 1, 2, 3);
    double xa = d.sample(a), xb = d.sample(b), xc = d.sample(c);
    CHECK(xa == xb);
    CHECK(xa != xc);
}

TEST_CASE("prior_table: uniform into unit bins", "[discretize]") {
    auto m = prior_table(make_distribution(Uniform{0, 10}), BinningPolicy::uniform(0, 10, 10));
    for (double x : m) CHECK(x == Approx(0.1).margin(1e-15));
}

TEST_CASE("prior_table: truncated standard normal", "[discretize]") {
    auto m = prior_table(make_distribution(Normal{0, 1}), BinningPolicy::edges({-5, -1, 0, 1, 5}));
    // scipy: (Phi(b) - Phi(a)) / (Phi(5) - Phi(-5))
    CHECK(m[0] == Approx(0.158655058237329).margin(1e-12));
    CHECK(m[1] == Approx(0.341344941762671).margin(1e-12));
    CHECK(m[2] == Approx(0.341344941762671).margin(1e-12));
    CHECK(m[3] == Approx(0.158655058237329).margin(1e-12));
    CHECK_THROWS_AS(prior_table(make_distribution(Normal{0, 1}), BinningPolicy::edges({-1, 0, 1}), false), Error);
}

TEST_CASE("prior_table: speed prior in one-knot bins keeps its mean", "[discretize]") {
    auto bins = BinningPolicy::width(0, 15, 1.0);
    auto m = prior_table(make_distribution(ScaledBeta{5, 2, 0, 15}), bins);
    double mean = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        mean += m[i] * 0.5 * (bins.edges()[i] + bins.edges()[i + 1]);
        sum += m[i];
    }
    CHECK(sum == Approx(1.0).margin(1e-12));
    CHECK(mean == Approx(10.7).margin(0.05));
}

TEST_CASE("prior_table midpoint mean is within half a bin of the analytic mean", "[discretize][property]") {
    std::vector<std::pair<Distribution, BinningPolicy>> cases{
        {make_distribution(trunc_exp_with_mean(67, 0, 304)), BinningPolicy::uniform(0, 304, 24)},
        {make_distribution(Uniform{130000, 350000}), BinningPolicy::uniform(130000, 350000, 24)},
        {make_distribution(ScaledBeta{5, 2, 0, 15.6}), BinningPolicy::uniform(0, 15.6, 24)},
        {make_distribution(Normal{0, 3}), BinningPolicy::uniform(-30, 30, 24)},
    };
    for (const auto& [d, b] : cases) {
        auto m = prior_table(d, b);
        double mean = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) mean += m[i] * 0.5 * (b.edges()[i] + b.edges()[i + 1]);
        CHECK(std::abs(mean - d.mean()) <= 0.5 * (b.edges()[1] - b.edges()[0]));
    }
}

TEST_CASE("binning helpers", "[discretize]") {
    auto w = BinningPolicy::width(0, 52.4, 1.0);
    CHECK(w.count() == 53);
    CHECK(w.edges().back() == 52.4);
    auto g = BinningPolicy::geometric(10, 1000, 5);
    CHECK(g.edges().front() == 0.0);
    CHECK(g.edges()[1] == Approx(10));
    CHECK(g.edges().back() == 1000.0);
    CHECK(g.clamp_locate(-1) == 0);
    CHECK(g.clamp_locate(5000) == 4);
    CHECK(g.clamp_locate(10) == 1);
    CHECK_THROWS_AS(BinningPolicy::edges({0, 1}), Error);
    CHECK_THROWS_AS(BinningPolicy::edges({0, 2, 1}), Error);
}

TEST_CASE("functional_cpt: additive symmetric noise around a bin edge", "[discretize][cpt]") {
    std::array<ParentAxis, 1> parents{ParentAxis::numeric({0.0, 1e-12})};
    auto child = BinningPolicy::edges({-8, 0, 8});
    auto t = functional_cpt("Y", child, parents, [](std::span<const double> x) { return x[0] * 0.0; },
                            NoiseModel::additive(make_distribution(Normal{0, 1})), SynthesisConfig{});
    CHECK(t.values[0] == Approx(0.5).margin(1e-12));
    CHECK(t.values[1] == Approx(0.5).margin(1e-12));
}

TEST_CASE("functional_cpt: noiseless identity splits a cell evenly", "[discretize][cpt]") {
    std::array<ParentAxis, 1> parents{ParentAxis::numeric({0.0, 1.0})};
    auto t = functional_cpt("Y", BinningPolicy::edges({0, 0.5, 1}), parents,
                            [](std::span<const double> x) { return x[0]; }, NoiseModel::none(), SynthesisConfig{});
    CHECK(t.values[0] == 0.5);
    CHECK(t.values[1] == 0.5);
}

TEST_CASE("functional_cpt: pushforward of a doubled cell", "[discretize][cpt]") {
    std::array<ParentAxis, 1> parents{ParentAxis::numeric({1.0, 2.0})};
    auto t = functional_cpt("Y", BinningPolicy::width(0, 8, 1.0), parents,
                            [](std::span<const double> x) { return 2.0 * x[0]; }, NoiseModel::none(), SynthesisConfig{});
    REQUIRE(t.values.size() == 8);
    CHECK(t.values[2] == 0.5);
    CHECK(t.values[3] == 0.5);
    CHECK(t.values[0] + t.values[1] + t.values[4] + t.values[5] + t.values[6] + t.values[7] == 0.0);
}

TEST_CASE("functional_cpt: additive noise matches quadrature", "[discretize][cpt]") {
    std::array<ParentAxis, 1> parents{ParentAxis::numeric({0.0, 1.0})};
    auto t = functional_cpt("Y", BinningPolicy::edges({-2, -1, 0, 0.5, 1, 2, 3}), parents,
                            [](std::span<const double> x) { return x[0]; },
                            NoiseModel::additive(make_distribution(Normal{0, 0.5})), SynthesisConfig{});
    // scipy.integrate.quad of the clamped bin probabilities over the uniform cell
    const std::array<double, 6> oracle{0.0042417786792, 0.190984010213, 0.304774211108,
                                       0.304774211108,  0.190984010213, 0.0042417786792};
    for (std::size_t i = 0; i < 6; ++i) CHECK(t.values[i] == Approx(oracle[i]).margin(2e-6));
}

TEST_CASE("functional_cpt: multiplicative lognormal noise keeps the median", "[discretize][cpt][property]") {
    for (double y : {0.7, 2.5, 13.0}) {
        std::array<ParentAxis, 1> parents{ParentAxis::numeric({y, y + 1e-9})};
        auto t = functional_cpt("Y", BinningPolicy::edges({0, y, 50}), parents,
                                [](std::span<const double> x) { return x[0]; },
                                NoiseModel::multiplicative(make_distribution(LognormalMedianCov{1, 0.3})),
                                SynthesisConfig{});
        CHECK(t.values[0] == Approx(0.5).margin(1e-6));
    }
}

TEST_CASE("functional_cpt: categorical parents select the noise", "[discretize][cpt]") {
    std::array<ParentAxis, 2> parents{ParentAxis::numeric({4.0, 4.0 + 1e-9}), ParentAxis::categorical(2)};
    NoiseSelector sel = [](std::span<const std::size_t> cell) {
        return NoiseModel::additive(make_distribution(Normal{0, cell[1] == 0 ? 1.0 : 2.0}));
    };
    auto t = functional_cpt("Y", BinningPolicy::edges({-10, 3, 5, 20}), parents,
                            [](std::span<const double> x) { return x[0]; }, sel, SynthesisConfig{});
    // P(|N(0,s)| < 1)
    CHECK(t.values[1] == Approx(0.682689492137).margin(1e-6));
    CHECK(t.values[4] == Approx(0.382924922548).margin(1e-6));
}

TEST_CASE("functional_cpt: rows sum to one and seeds are reproducible", "[discretize][cpt][property]") {
    std::array<ParentAxis, 2> parents{ParentAxis::numeric(BinningPolicy::uniform(0, 10, 7)),
                                      ParentAxis::numeric(BinningPolicy::uniform(1, 4, 5))};
    auto f = [](std::span<const double> x) { return x[0] / x[1]; };
    auto child = BinningPolicy::uniform(0, 10, 13);
    std::array<Distribution, 1> aux{make_distribution(Normal{1, 0.05})};
    auto g = [](std::span<const double> x) { return x[0] / x[1] * x[2]; };
    SynthesisConfig cfg;
    auto a = functional_cpt("Y", child, parents, f, NoiseModel::none(), cfg);
    auto b = functional_cpt("Y", child, parents, f, NoiseModel::none(), cfg);
    CHECK(a.values == b.values);
    auto d = functional_cpt("Y", child, parents, g, NoiseModel::none(), cfg, aux);
    cfg.seed = 99;
    // with one sampled axis and the other integrated exactly, nothing is random
    auto c = functional_cpt("Y", child, parents, f, NoiseModel::none(), cfg);
    CHECK(a.values == c.values);
    CHECK(functional_cpt("Y", child, parents, g, NoiseModel::none(), cfg, aux).values != d.values);
    for (const auto* t : {&a, &c, &d})
        for (std::size_t r = 0; r < 35; ++r) {
            double s = 0.0;
            for (std::size_t i = 0; i < 13; ++i) s += t->values[r * 13 + i];
            CHECK(std::abs(s - 1.0) <= 1e-12);
        }
    cfg.threads = 3;
    cfg.seed = SynthesisConfig{}.seed;
    auto e = functional_cpt("Y", child, parents, g, NoiseModel::none(), cfg, aux);
    CHECK(d.values == e.values);
}

TEST_CASE("functional_cpt flags undefined cells", "[discretize][cpt]") {
    std::array<ParentAxis, 1> parents{ParentAxis::numeric({-1.0, 0.0, 1.0})};
    try {
        functional_cpt("Y", BinningPolicy::uniform(0, 1, 2), parents,
                       [](std::span<const double> x) { return std::log(x[0]); }, NoiseModel::none(), SynthesisConfig{});
        FAIL("degenerate cell accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::DegenerateCell);
    }
}

TEST_CASE("functional_cpt: noise-free relations are exact along the last axis", "[discretize][cpt]") {
    // Y = X0 * X1 on [1,2] x [1,3]: P(Y < 3) = int_1^2 (3/x - 1)/2 dx = (3 ln 2 - 1)/2
    std::array<ParentAxis, 2> parents{ParentAxis::numeric(std::vector<double>{0, 1, 2}),
                                      ParentAxis::numeric(std::vector<double>{1, 3})};
    auto f = [](std::span<const double> x) { return x[0] * x[1]; };
    auto child = BinningPolicy::edges({0, 3, 6});
    auto t = functional_cpt("Y", child, parents, f, NoiseModel::none(), SynthesisConfig{});
    CHECK(t.values[0] == 1.0);
    CHECK(t.values[2] == Approx((3 * std::log(2.0) - 1) / 2).margin(2e-6));
    // decreasing in the last axis: Y = X0 / X1
    auto h = [](std::span<const double> x) { return x[0] / x[1]; };
    auto child2 = BinningPolicy::edges({0, 1, 2});
    auto u = functional_cpt("Y", child2, parents, h, NoiseModel::none(), SynthesisConfig{});
    // P(X0/X1 < 1) = int_1^2 (3 - x)/2 dx = 3/4
    CHECK(u.values[2] == Approx(0.75).margin(1e-9));
}

TEST_CASE("functional_cpt: doubling samples barely moves entries", "[discretize][cpt][property]") {
    std::array<ParentAxis, 3> parents{ParentAxis::numeric(BinningPolicy::uniform(0, 10, 6)),
                                      ParentAxis::numeric(BinningPolicy::uniform(1, 4, 4)),
                                      ParentAxis::numeric(BinningPolicy::uniform(-1, 1, 3))};
    auto f = [](std::span<const double> x) { return x[0] / x[1] + x[2] * x[0]; };
    auto child = BinningPolicy::uniform(-10, 20, 40);
    SynthesisConfig cfg;
    for (auto noise : {NoiseModel::none(), NoiseModel::additive(make_distribution(Normal{0, 0.4}))}) {
        cfg.samples_per_cell = 256;
        auto a = functional_cpt("Y", child, parents, f, noise, cfg);
        cfg.samples_per_cell = 512;
        auto b = functional_cpt("Y", child, parents, f, noise, cfg);
        double worst = 0.0;
        for (std::size_t i = 0; i < a.values.size(); ++i) worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
        CHECK(worst < 0.02);
    }
}
