#pragma once
// Compiled networks shared between sessions, keyed by a hash of the
// configuration that determines the network structure and tables.

#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "groundbn/bn/junction_tree.hpp"
#include "groundbn/hash.hpp"
#include "groundbn/model/build.hpp"
#include "groundbn/model/config_json.hpp"

namespace groundbn::session {

struct SessionConfig {
    model::ShipParticulars ship;
    model::ModelConfig model;
    model::IncidentConfig incident;
};

inline json config_to_json(const SessionConfig& c) {
    return {{"ship", model::ship_to_json(c.ship)},
            {"model", model::model_to_json(c.model)},
            {"incident", model::incident_to_json(c.incident)}};
}

inline SessionConfig config_from_json(const json& j, const std::string& path = "") {
    auto at = [&](const char* key) -> const json& {
        if (!j.is_object() || !j.contains(key))
            throw Error(ErrorCode::MalformedInput, "required field is missing", path.empty() ? key : path + "." + key);
        return j.at(key);
    };
    auto sub = [&](const char* key) { return path.empty() ? std::string(key) : path + "." + key; };
    SessionConfig c;
    c.ship = model::ship_from_json(at("ship"), sub("ship"));
    c.model = j.contains("model") ? model::model_from_json(j.at("model"), sub("model")) : model::ModelConfig{};
    c.incident = j.contains("incident") ? model::incident_from_json(j.at("incident"), sub("incident"))
                                        : model::IncidentConfig{};
    return c;
}

// The canonical JSON form is hashed, so equal configurations hash equally
// whatever their source formatting.
inline std::string structure_hash(const SessionConfig& c) { return hex64(fnv1a64(config_to_json(c).dump())); }

struct CompiledModel {
    model::GroundingModel model;
    bn::JunctionTree tree;
    std::string hash;
};

class ModelCache {
public:
    static ModelCache& global() {
        static ModelCache cache;
        return cache;
    }

    std::shared_ptr<const CompiledModel> get(const SessionConfig& c) {
        const std::string h = structure_hash(c);
        std::shared_future<std::shared_ptr<const CompiledModel>> fut;
        std::promise<std::shared_ptr<const CompiledModel>> mine;
        bool build = false;
        {
            std::lock_guard lock(mu_);
            auto it = entries_.find(h);
            if (it == entries_.end()) {
                fut = mine.get_future().share();
                entries_.emplace(h, fut);
                build = true;
            } else {
                fut = it->second;
            }
        }
        if (build) {
            try {
                auto gm = model::build_network(c.ship, c.model, c.incident);
                auto tree = bn::compile(gm.network);
                mine.set_value(std::make_shared<const CompiledModel>(CompiledModel{std::move(gm), std::move(tree), h}));
            } catch (...) {
                {
                    std::lock_guard lock(mu_);
                    entries_.erase(h);
                }
                mine.set_exception(std::current_exception());
            }
        }
        return fut.get();
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        return entries_.size();
    }

    void clear() {
        std::lock_guard lock(mu_);
        entries_.clear();
    }

private:
    mutable std::mutex mu_;
    std::map<std::string, std::shared_future<std::shared_ptr<const CompiledModel>>> entries_;
};

}  // namespace groundbn::session
