#pragma once
// Reproduces a bundled case: enters its evidence script and checks the
// posteriors against the case's tolerance bands.

#include <cmath>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "groundbn/api/cases.hpp"
#include "groundbn/api/query.hpp"
#include "groundbn/session/session.hpp"

namespace groundbn::api {

struct RunOptions {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples_per_cell;
    std::map<std::string, model::BinOverride> bins;
    std::filesystem::path fixtures = fixture_dir();
};

struct Check {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct CaseResult {
    CaseFile file;
    PosteriorReport report;  // all evidence entered
    std::vector<Check> checks;

    bool passed() const {
        for (const auto& c : checks)
            if (!c.passed) return false;
        return true;
    }
};

inline std::string fmt(double x, int digits = 4) {
    std::ostringstream os;
    os.precision(digits);
    os << x;
    return os.str();
}

// Probability mass of an interval node on [lo, hi]; bins must align with lo and hi.
inline double mass_between(const NodeReport& r, double lo, double hi) {
    double m = 0.0;
    for (std::size_t i = 0; i < r.masses.size(); ++i)
        if (r.edges[i] >= lo - 1e-9 && r.edges[i + 1] <= hi + 1e-9) m += r.masses[i];
    return m;
}

inline double mode_mid(const NodeReport& r) { return 0.5 * (r.edges[r.mode] + r.edges[r.mode + 1]); }

inline CaseResult run_case(const std::string& name, const RunOptions& opt = {}) {
    CaseResult out;
    out.file = load_case(name, opt.fixtures);
    auto cfg = out.file.config;
    if (opt.seed) cfg.model.synthesis.seed = *opt.seed;
    if (opt.samples_per_cell) cfg.model.synthesis.samples_per_cell = *opt.samples_per_cell;
    for (const auto& [id, b] : opt.bins) cfg.model.bins[id] = b;
    out.file.config = cfg;

    session::IncidentSession s(cfg, name);
    for (const auto& e : out.file.evidence) s.add_evidence(e);
    const auto nodes = [&] {
        std::vector<std::string> q;
        for (const char* id : {"D_t", "D_v", "Y_D"})
            if (s.network().contains(id)) q.emplace_back(id);
        return q;
    }();
    out.report = report_for(s, {}, nodes);
    auto add = [&](std::string n, bool ok, std::string d) { out.checks.push_back({std::move(n), ok, std::move(d)}); };
    const auto& dt = out.report.at("D_t");

    if (name == "case1") {
        const double p610 = mass_between(dt, 6.0, 10.0);
        add("D_t mean in [8.0, 9.2] m", *dt.mean >= 8.0 && *dt.mean <= 9.2, "mean " + fmt(*dt.mean));
        add("D_t sd in [1.2, 2.2] m", *dt.sd >= 1.2 && *dt.sd <= 2.2, "sd " + fmt(*dt.sd));
        add("P(6 <= D_t <= 10) >= 0.60", p610 >= 0.60, "P " + fmt(p610));
    } else if (name == "scenarioB") {
        const auto& dv = out.report.at("D_v");
        const double h = *out.file.config.ship.double_bottom_height;
        const double p_out = dv.masses[0] + dv.masses[1];
        const double p_above = mass_between(dv, h, dv.edges.back());
        add("P(IHB = yes) = 1", dv.p_inner_breach && *dv.p_inner_breach == 1.0,
            "P " + fmt(dv.p_inner_breach.value_or(-1), 17));
        add("D_v mass on {OB, IB0} = 0", p_out == 0.0, "mass " + fmt(p_out, 17));
        add("P(D_v > h_DB) >= 0.95", p_above >= 0.95, "P " + fmt(p_above));
        const auto six = *s.network().node("D_t").locate(6.0);
        add("D_t mean within 1 m of 6.0 m", std::abs(*dt.mean - 6.0) <= 1.0, "mean " + fmt(*dt.mean));
        add("D_t mode within one bin of 6 m", std::abs(static_cast<double>(dt.mode) - static_cast<double>(six)) <= 1.0,
            "mode [" + fmt(dt.edges[dt.mode]) + ", " + fmt(dt.edges[dt.mode + 1]) + ")");
    } else if (name == "scenarioA") {
        // location uses only those two modules, not the full log
        session::IncidentSession only(cfg, name + "-location");
        for (const auto& e : out.file.from({"hydrostatic", "inspection"})) only.add_evidence(e);
        const auto y = report_for(only, {}, {"Y_D"}).at("Y_D");
        add("Y_D mode within 2 m of 14.5 m (hydrostatic + inspection)", std::abs(mode_mid(y) - 14.5) <= 2.0,
            "mode [" + fmt(y.edges[y.mode]) + ", " + fmt(y.edges[y.mode + 1]) + ")");
    }
    return out;
}

inline json to_json(const CaseResult& r) {
    json checks = json::array();
    for (const auto& c : r.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    return {{"case", r.file.name},
            {"description", r.file.description},
            {"seed", r.file.config.model.synthesis.seed},
            {"samples_per_cell", r.file.config.model.synthesis.samples_per_cell},
            {"report", to_json(r.report)},
            {"checks", checks},
            {"passed", r.passed()}};
}

}  // namespace groundbn::api
