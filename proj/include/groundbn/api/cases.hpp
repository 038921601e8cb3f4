#pragma once
// Bundled case fixtures: a session configuration plus an evidence script
// whose records name the module that produced them.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "groundbn/session/evidence.hpp"
#include "groundbn/session/model_cache.hpp"

#ifndef GROUNDBN_FIXTURE_DIR
#define GROUNDBN_FIXTURE_DIR "data/cases"
#endif

namespace groundbn::api {

using session::json;

inline const std::vector<std::string>& case_names() {
    static const std::vector<std::string> names{"case1", "scenarioA", "scenarioB"};
    return names;
}

struct CaseFile {
    std::string name;
    std::string description;
    session::SessionConfig config;
    std::vector<session::Evidence> evidence;  // source = module name

    std::vector<session::Evidence> from(std::initializer_list<std::string_view> modules) const {
        std::vector<session::Evidence> out;
        for (const auto& e : evidence)
            for (auto m : modules)
                if (e.source == m) out.push_back(e);
        return out;
    }
};

// GROUNDBN_FIXTURES overrides the compiled-in fixture directory.
inline std::filesystem::path fixture_dir() {
    if (const char* env = std::getenv("GROUNDBN_FIXTURES"); env && *env) return env;
    return GROUNDBN_FIXTURE_DIR;
}

inline CaseFile parse_case(const json& j, std::string name) {
    CaseFile c;
    c.name = std::move(name);
    c.description = j.value("description", std::string());
    c.config = session::config_from_json(j);
    if (j.contains("evidence")) {
        const auto& ev = j.at("evidence");
        if (!ev.is_array()) throw Error(ErrorCode::MalformedInput, "expected an array", "evidence");
        for (std::size_t i = 0; i < ev.size(); ++i) {
            auto e = session::evidence_from_json(ev[i], "evidence[" + std::to_string(i) + "]");
            if (e.id.empty()) e.id = "c" + std::to_string(i + 1);
            c.evidence.push_back(std::move(e));
        }
    }
    return c;
}

inline CaseFile load_case(const std::string& name, const std::filesystem::path& dir = fixture_dir()) {
    const auto path = dir / (name + ".json");
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FixtureMissing, "no fixture '" + name + "' in " + dir.string(), name);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::MalformedInput, "fixture is not valid JSON", path.string());
    return parse_case(j, name);
}

}  // namespace groundbn::api
