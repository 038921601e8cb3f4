#pragma once
// Evidence records and their JSON / JSON Lines forms.

#include <istream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "groundbn/bn/network.hpp"
#include "groundbn/errors.hpp"
#include "groundbn/model/build.hpp"

namespace groundbn::session {

using json = nlohmann::json;

// Numeric values are in the node's unit (t, kn, m, m^3/s); categorical
// values are state labels.
using EvidenceValue = std::variant<double, std::string>;

struct Evidence {
    std::string id;  // assigned by the session when empty
    std::string node;
    EvidenceValue value;
    std::string timestamp;
    std::string source;
};

inline std::string value_text(const EvidenceValue& v) {
    if (const auto* s = std::get_if<std::string>(&v)) return *s;
    std::ostringstream os;
    os << std::get<double>(v);
    return os.str();
}

inline json evidence_to_json(const Evidence& e) {
    json j{{"id", e.id}, {"node", e.node}};
    std::visit([&](const auto& v) { j["value"] = v; }, e.value);
    if (!e.timestamp.empty()) j["timestamp"] = e.timestamp;
    if (!e.source.empty()) j["source"] = e.source;
    return j;
}

inline Evidence evidence_from_json(const json& j, const std::string& path = "evidence") {
    if (!j.is_object()) throw Error(ErrorCode::MalformedInput, "expected an object", path);
    auto str = [&](const char* key, bool required) -> std::string {
        if (!j.contains(key) || j.at(key).is_null()) {
            if (required) throw Error(ErrorCode::MalformedInput, "required field is missing", path + "." + key);
            return {};
        }
        if (!j.at(key).is_string()) throw Error(ErrorCode::MalformedInput, "expected a string", path + "." + key);
        return j.at(key).get<std::string>();
    };
    Evidence e;
    e.id = str("id", false);
    e.node = str("node", true);
    e.timestamp = str("timestamp", false);
    e.source = str("source", false);
    if (!j.contains("value")) throw Error(ErrorCode::MalformedInput, "required field is missing", path + ".value");
    const json& v = j.at("value");
    if (v.is_number()) e.value = v.get<double>();
    else if (v.is_string()) e.value = v.get<std::string>();
    else throw Error(ErrorCode::MalformedInput, "expected a number or a state label", path + ".value");
    return e;
}

// One Evidence object per line; blank lines are skipped.
inline std::vector<Evidence> read_evidence_jsonl(std::istream& in) {
    std::vector<Evidence> out;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::MalformedInput, "invalid JSON", "line " + std::to_string(n));
        out.push_back(evidence_from_json(j, "line " + std::to_string(n)));
    }
    return out;
}

// Maps an evidence value to a state of its node. Rejects nodes that do not
// take evidence and values outside the node's range or state set.
inline std::size_t resolve_state(const bn::Network& net, const Evidence& e) {
    if (!model::is_observable(e.node))
        throw Error(ErrorCode::UnknownNode, "'" + e.node + "' does not accept evidence", "node");
    if (!net.contains(e.node))
        throw Error(ErrorCode::UnknownNode, "'" + e.node + "' is not part of this model", "node");
    const auto& n = net.node(e.node);
    if (n.is_interval()) {
        const auto* x = std::get_if<double>(&e.value);
        const auto edges = n.edges();
        std::ostringstream range;
        range << "[" << edges.front() << ", " << edges.back() << "]" << (n.unit.empty() ? "" : " " + n.unit);
        if (!x) throw Error(ErrorCode::OutOfRangeValue, e.node + " expects a number in " + range.str(), "value");
        auto s = n.locate(*x);
        if (!s)
            throw Error(ErrorCode::OutOfRangeValue,
                        e.node + " = " + value_text(e.value) + " is outside the admissible range " + range.str(), "value");
        return *s;
    }
    std::string labels;
    for (const auto& st : n.states) labels += (labels.empty() ? "" : ", ") + st.label;
    const auto* s = std::get_if<std::string>(&e.value);
    auto idx = s ? n.state_index(*s) : std::nullopt;
    if (!idx)
        throw Error(ErrorCode::OutOfRangeValue,
                    e.node + " = " + value_text(e.value) + " is not one of {" + labels + "}", "value");
    return *idx;
}

}  // namespace groundbn::session
