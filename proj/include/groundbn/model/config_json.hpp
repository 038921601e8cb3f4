#pragma once
// JSON mapping of the configuration types. Readers report the dotted path
// of the offending field in Error::field().
//
// Distributions: {"family": "uniform", "lo", "hi"} | "scaled_beta" (alpha,
// beta, lo, hi) | "normal" (mean, sd) | "lognormal" (median, cov) |
// "trunc_exp" (lo, hi and either rate or mean) | "histogram" (edges, masses).

#include <string>

#include <json.hpp>

#include "groundbn/discretize/distribution.hpp"
#include "groundbn/model/config.hpp"

namespace groundbn::model {

using json = nlohmann::json;

namespace io {

class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail("expected an object");
    }

    [[noreturn]] void fail(const std::string& why, const std::string& key = {}) const {
        throw Error(ErrorCode::MalformedInput, why, key.empty() ? path_ : join(key));
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    double number(const std::string& key) const {
        if (!has(key)) fail("required field is missing", key);
        return as_number(j_.at(key), key);
    }
    double number(const std::string& key, double fallback) const { return has(key) ? number(key) : fallback; }
    std::optional<double> maybe_number(const std::string& key) const {
        return has(key) ? std::optional(number(key)) : std::nullopt;
    }
    std::string text(const std::string& key) const {
        if (!has(key)) fail("required field is missing", key);
        if (!j_.at(key).is_string()) fail("expected a string", key);
        return j_.at(key).get<std::string>();
    }
    std::string text(const std::string& key, std::string fallback) const { return has(key) ? text(key) : fallback; }
    bool flag(const std::string& key, bool fallback) const {
        if (!has(key)) return fallback;
        if (!j_.at(key).is_boolean()) fail("expected true or false", key);
        return j_.at(key).get<bool>();
    }
    std::vector<double> numbers(const std::string& key) const {
        if (!has(key)) fail("required field is missing", key);
        const json& a = j_.at(key);
        if (!a.is_array()) fail("expected an array of numbers", key);
        std::vector<double> v;
        for (std::size_t i = 0; i < a.size(); ++i) v.push_back(as_number(a[i], key + "[" + std::to_string(i) + "]"));
        return v;
    }
    Reader child(const std::string& key) const {
        if (!has(key)) fail("required field is missing", key);
        return Reader(j_.at(key), join(key));
    }
    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }
    std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

private:
    const json& j_;
    std::string path_;

    double as_number(const json& v, const std::string& key) const {
        if (!v.is_number()) fail("expected a number", key);
        double x = v.get<double>();
        if (!std::isfinite(x)) fail("expected a finite number", key);
        return x;
    }
};

}  // namespace io

inline discretize::DistributionSpec distribution_from_json(const io::Reader& r) {
    using namespace discretize;
    const std::string f = r.text("family");
    if (f == "uniform") return Uniform{r.number("lo"), r.number("hi")};
    if (f == "scaled_beta") return ScaledBeta{r.number("alpha"), r.number("beta"), r.number("lo"), r.number("hi")};
    if (f == "normal") return Normal{r.number("mean"), r.number("sd")};
    if (f == "lognormal") return LognormalMedianCov{r.number("median"), r.number("cov")};
    if (f == "trunc_exp") {
        const double lo = r.number("lo"), hi = r.number("hi");
        if (r.has("rate")) return TruncExp{r.number("rate"), lo, hi};
        try {
            return trunc_exp_with_mean(r.number("mean"), lo, hi);
        } catch (const Error& e) {
            throw Error(ErrorCode::MalformedInput, e.detail(), r.join("mean"));
        }
    }
    if (f == "histogram") return EmpiricalHistogram{r.numbers("edges"), r.numbers("masses")};
    r.fail("unknown distribution family '" + f + "'", "family");
}

inline json distribution_to_json(const discretize::DistributionSpec& spec) {
    using namespace discretize;
    return std::visit(
        [](const auto& d) -> json {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, Uniform>) return {{"family", "uniform"}, {"lo", d.lo}, {"hi", d.hi}};
            else if constexpr (std::is_same_v<T, ScaledBeta>)
                return {{"family", "scaled_beta"}, {"alpha", d.alpha}, {"beta", d.beta}, {"lo", d.lo}, {"hi", d.hi}};
            else if constexpr (std::is_same_v<T, Normal>) return {{"family", "normal"}, {"mean", d.mean}, {"sd", d.sd}};
            else if constexpr (std::is_same_v<T, LognormalMedianCov>)
                return {{"family", "lognormal"}, {"median", d.median}, {"cov", d.cov}};
            else if constexpr (std::is_same_v<T, TruncExp>)
                return {{"family", "trunc_exp"}, {"rate", d.rate}, {"lo", d.lo}, {"hi", d.hi}};
            else return {{"family", "histogram"}, {"edges", d.edges}, {"masses", d.masses}};
        },
        spec);
}

inline BottomLayer layer_from_json(const io::Reader& r) {
    return {r.number("t_eq"), r.number("sigma0"), r.number("eps_f")};
}
inline json layer_to_json(const BottomLayer& l) { return {{"t_eq", l.t_eq}, {"sigma0", l.sigma0}, {"eps_f", l.eps_f}}; }

inline ShipParticulars ship_from_json(const json& j, const std::string& path = "ship") {
    io::Reader r(j, path);
    ShipParticulars s;
    s.name = r.text("name", "");
    s.length = r.number("length");
    s.breadth = r.number("breadth");
    s.depth = r.number("depth");
    s.design_draft = r.number("design_draft");
    s.service_speed = r.number("service_speed");
    s.gm0 = r.maybe_number("gm0");
    s.double_bottom_height = r.maybe_number("double_bottom_height");
    const std::string hull = r.text("hull");
    if (hull == "single") s.hull = HullType::single_hull;
    else if (hull == "double") s.hull = HullType::double_hull;
    else r.fail("expected 'single' or 'double'", "hull");
    s.outer = layer_from_json(r.child("outer_bottom"));
    if (r.has("inner_bottom")) s.inner = layer_from_json(r.child("inner_bottom"));
    s.max_draft = r.maybe_number("max_draft");
    return s;
}

inline json ship_to_json(const ShipParticulars& s) {
    json j{{"name", s.name},
           {"length", s.length},
           {"breadth", s.breadth},
           {"depth", s.depth},
           {"design_draft", s.design_draft},
           {"service_speed", s.service_speed},
           {"hull", s.double_hull() ? "double" : "single"},
           {"outer_bottom", layer_to_json(s.outer)}};
    if (s.gm0) j["gm0"] = *s.gm0;
    if (s.double_bottom_height) j["double_bottom_height"] = *s.double_bottom_height;
    if (s.inner) j["inner_bottom"] = layer_to_json(*s.inner);
    if (s.max_draft) j["max_draft"] = *s.max_draft;
    return j;
}

inline ModelConfig model_from_json(const json& j, const std::string& path = "model") {
    io::Reader r(j, path);
    ModelConfig m;
    m.added_mass_fraction = r.number("added_mass_fraction", m.added_mass_fraction);
    m.g = r.number("g", m.g);
    m.rho_w = r.number("rho_w", m.rho_w);
    m.rho_o = r.number("rho_o", m.rho_o);
    if (r.has("discharge")) {
        auto d = r.child("discharge");
        m.discharge = {d.number("mean"), d.number("sd")};
    }
    if (r.has("errors")) {
        auto e = r.child("errors");
        ErrorCatalog& c = m.errors;
        for (auto [key, field] : std::initializer_list<std::pair<const char*, double*>>{
                 {"fh_cov", &c.fh_cov}, {"v_sd", &c.v_sd}, {"m_cov", &c.m_cov}, {"l_sd", &c.l_sd},
                 {"q_cov_good", &c.q_cov_good}, {"q_cov_poor", &c.q_cov_poor}, {"tp_sd", &c.tp_sd},
                 {"ts_sd", &c.ts_sd}, {"r_cov", &c.r_cov}, {"h_sd", &c.h_sd}, {"d_cov_good", &c.d_cov_good},
                 {"d_cov_poor", &c.d_cov_poor}, {"y_sd_good", &c.y_sd_good}, {"y_sd_poor", &c.y_sd_poor}})
            *field = e.number(key, *field);
    }
    if (r.has("modules")) {
        auto t = r.child("modules");
        m.modules.crashworthiness = t.flag("crashworthiness", true);
        m.modules.hydraulic = t.flag("hydraulic", true);
        m.modules.hydrostatic = t.flag("hydrostatic", true);
        m.modules.inspection = t.flag("inspection", true);
    }
    if (r.has("priors")) {
        auto p = r.child("priors");
        for (auto [key, field] : std::initializer_list<std::pair<const char*, std::optional<discretize::DistributionSpec>*>>{
                 {"mass", &m.priors.mass}, {"speed", &m.priors.speed}, {"damage_length", &m.priors.damage_length},
                 {"reaction", &m.priors.reaction}, {"location", &m.priors.location},
                 {"water_depth", &m.priors.water_depth}, {"port_draft", &m.priors.port_draft}})
            if (p.has(key)) *field = distribution_from_json(p.child(key));
    }
    if (r.has("bins")) {
        auto b = r.child("bins");
        for (const auto& [id, v] : b.raw().items()) {
            io::Reader o(v, b.join(id));
            BinOverride ov;
            if (o.has("edges")) ov.edges = o.numbers("edges");
            if (o.has("count")) {
                double c = o.number("count");
                if (!(c >= 2 && c == std::floor(c))) o.fail("expected an integer >= 2", "count");
                ov.count = static_cast<std::size_t>(c);
            }
            ov.width = o.maybe_number("width");
            ov.lo = o.maybe_number("lo");
            ov.hi = o.maybe_number("hi");
            m.bins[id] = ov;
        }
    }
    if (r.has("synthesis")) {
        auto s = r.child("synthesis");
        double n = s.number("samples_per_cell", static_cast<double>(m.synthesis.samples_per_cell));
        if (!(n >= 1 && n == std::floor(n))) s.fail("expected a positive integer", "samples_per_cell");
        m.synthesis.samples_per_cell = static_cast<std::size_t>(n);
        double seed = s.number("seed", static_cast<double>(m.synthesis.seed));
        if (!(seed >= 0 && seed == std::floor(seed) && seed < 9.007e15)) s.fail("expected a non-negative integer", "seed");
        m.synthesis.seed = static_cast<std::uint64_t>(seed);
    }
    return m;
}

inline json model_to_json(const ModelConfig& m) {
    const ErrorCatalog& c = m.errors;
    json j{{"added_mass_fraction", m.added_mass_fraction},
           {"g", m.g},
           {"rho_w", m.rho_w},
           {"rho_o", m.rho_o},
           {"discharge", {{"mean", m.discharge.mean}, {"sd", m.discharge.sd}}},
           {"errors",
            {{"fh_cov", c.fh_cov}, {"v_sd", c.v_sd}, {"m_cov", c.m_cov}, {"l_sd", c.l_sd},
             {"q_cov_good", c.q_cov_good}, {"q_cov_poor", c.q_cov_poor}, {"tp_sd", c.tp_sd}, {"ts_sd", c.ts_sd},
             {"r_cov", c.r_cov}, {"h_sd", c.h_sd}, {"d_cov_good", c.d_cov_good}, {"d_cov_poor", c.d_cov_poor},
             {"y_sd_good", c.y_sd_good}, {"y_sd_poor", c.y_sd_poor}}},
           {"modules",
            {{"crashworthiness", m.modules.crashworthiness}, {"hydraulic", m.modules.hydraulic},
             {"hydrostatic", m.modules.hydrostatic}, {"inspection", m.modules.inspection}}},
           {"synthesis", {{"samples_per_cell", m.synthesis.samples_per_cell}, {"seed", m.synthesis.seed}}}};
    json priors = json::object();
    auto put = [&](const char* k, const std::optional<discretize::DistributionSpec>& d) {
        if (d) priors[k] = distribution_to_json(*d);
    };
    put("mass", m.priors.mass);
    put("speed", m.priors.speed);
    put("damage_length", m.priors.damage_length);
    put("reaction", m.priors.reaction);
    put("location", m.priors.location);
    put("water_depth", m.priors.water_depth);
    put("port_draft", m.priors.port_draft);
    j["priors"] = priors;
    json bins = json::object();
    for (const auto& [id, o] : m.bins) {
        json b = json::object();
        if (!o.edges.empty()) b["edges"] = o.edges;
        if (o.count) b["count"] = *o.count;
        if (o.width) b["width"] = *o.width;
        if (o.lo) b["lo"] = *o.lo;
        if (o.hi) b["hi"] = *o.hi;
        bins[id] = b;
    }
    j["bins"] = bins;
    return j;
}

inline IncidentConfig incident_from_json(const json& j, const std::string& path = "incident") {
    io::Reader r(j, path);
    IncidentConfig c;
    if (r.has("loading")) {
        const std::string lc = r.text("loading");
        if (lc == "loaded") c.loading = LoadingCondition::loaded;
        else if (lc == "ballast") c.loading = LoadingCondition::ballast;
        else r.fail("expected 'loaded' or 'ballast'", "loading");
    }
    c.tank_length = r.maybe_number("tank_length");
    c.tank_length_sd = r.number("tank_length_sd", 0.0);
    c.oil_level = r.maybe_number("oil_level");
    c.head = r.maybe_number("head");
    c.gm = r.maybe_number("gm");
    c.displacement = r.maybe_number("displacement");
    c.displacement_uncertain = r.flag("displacement_uncertain", false);
    c.reaction_estimate = r.maybe_number("reaction_estimate");
    c.reaction_upper = r.maybe_number("reaction_upper");
    c.visibility_good = r.number("visibility_good", 0.5);
    c.flow_quality_good = r.number("flow_quality_good", 0.5);
    return c;
}

inline json incident_to_json(const IncidentConfig& c) {
    json j = json::object();
    if (c.loading) j["loading"] = *c.loading == LoadingCondition::loaded ? "loaded" : "ballast";
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) j[k] = *v;
    };
    put("tank_length", c.tank_length);
    j["tank_length_sd"] = c.tank_length_sd;
    put("oil_level", c.oil_level);
    put("head", c.head);
    put("gm", c.gm);
    put("displacement", c.displacement);
    j["displacement_uncertain"] = c.displacement_uncertain;
    put("reaction_estimate", c.reaction_estimate);
    put("reaction_upper", c.reaction_upper);
    j["visibility_good"] = c.visibility_good;
    j["flow_quality_good"] = c.flow_quality_good;
    return j;
}

}  // namespace groundbn::model
