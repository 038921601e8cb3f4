#pragma once
// Incident sessions: configuration, an append-only evidence log with
// tombstone retraction, cached posteriors and a versioned file format.
//
// Numeric evidence is entered as hard evidence on the bin containing the
// value. When a node has several live observations the latest one is used
// and a warning is returned.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "groundbn/session/evidence.hpp"
#include "groundbn/session/model_cache.hpp"

namespace groundbn::session {

inline constexpr const char* kFormatName = "groundbn-session";
inline constexpr int kFormatMajor = 1;
inline constexpr int kFormatMinor = 1;

struct LogRecord {
    enum class Kind { add, retract };
    std::uint64_t seq = 0;
    Kind kind = Kind::add;
    Evidence evidence;   // add
    std::string target;  // retract: id of the retracted evidence
    std::string timestamp;
};

struct Rejection {
    Evidence evidence;
    std::string reason;
};

struct Posteriors {
    bn::Marginals marginals;
    double log_evidence = 0.0;
    std::vector<std::string> warnings;
};

// Nodes whose posteriors a session keeps current.
inline std::vector<std::string> default_query(const bn::Network& net) {
    std::vector<std::string> q;
    for (const char* id : {"D_t", "D_v", "Y_D", "IHB"})
        if (net.contains(id)) q.emplace_back(id);
    return q;
}

class IncidentSession {
public:
    IncidentSession(SessionConfig cfg, std::string id, ModelCache& cache = ModelCache::global())
        : id_(std::move(id)), cfg_(std::move(cfg)), compiled_(cache.get(cfg_)) {
        current_ = infer_locked(active_locked({}));
    }

    IncidentSession(const IncidentSession&) = delete;
    IncidentSession& operator=(const IncidentSession&) = delete;

    const std::string& id() const { return id_; }
    const SessionConfig& config() const { return cfg_; }
    const std::string& structure_hash() const { return compiled_->hash; }
    const CompiledModel& compiled() const { return *compiled_; }
    const bn::Network& network() const { return *compiled_->model.network; }
    const std::vector<std::string>& notes() const { return notes_; }

    std::vector<LogRecord> log() const {
        std::shared_lock lock(mu_);
        return log_;
    }

    std::vector<Rejection> rejections() const {
        std::shared_lock lock(mu_);
        return rejected_;
    }

    std::string log_hash() const {
        std::shared_lock lock(mu_);
        return hex64(fnv1a64(log_json_locked().dump()));
    }

    // Live evidence after retractions and latest-wins, in log order.
    std::vector<Evidence> active_evidence() const {
        std::shared_lock lock(mu_);
        std::vector<Evidence> out;
        for (const auto& [node, e] : active_locked({}).by_node) out.push_back(e);
        std::sort(out.begin(), out.end(), [&](const Evidence& a, const Evidence& b) { return seq_of(a.id) < seq_of(b.id); });
        return out;
    }

    Posteriors posteriors() const {
        std::shared_lock lock(mu_);
        return current_;
    }

    // Posteriors of arbitrary nodes under the current evidence.
    Posteriors query(const std::vector<std::string>& nodes) const {
        std::shared_lock lock(mu_);
        for (const auto& n : nodes) network().index_of(n);
        return infer_locked(active_locked({}), nodes);
    }

    Posteriors add_evidence(Evidence e) {
        std::unique_lock lock(mu_);
        if (e.id.empty()) e.id = "e" + std::to_string(next_seq_);
        if (find_add_locked(e.id))
            throw Error(ErrorCode::MalformedInput, "evidence id '" + e.id + "' is already in use", "id");
        resolve_state(network(), e);
        std::vector<Evidence> extra{e};
        Posteriors p;
        try {
            p = infer_locked(active_locked(extra));
        } catch (const Error& err) {
            if (err.code() == ErrorCode::ImpossibleEvidence) rejected_.push_back({e, err.detail()});
            throw;
        }
        LogRecord r;
        r.seq = next_seq_++;
        r.kind = LogRecord::Kind::add;
        r.timestamp = e.timestamp;
        r.evidence = std::move(e);
        log_.push_back(std::move(r));
        current_ = p;
        return p;
    }

    Posteriors retract_evidence(const std::string& evidence_id, std::string timestamp = {}) {
        std::unique_lock lock(mu_);
        if (!find_add_locked(evidence_id))
            throw Error(ErrorCode::UnknownEvidenceId, "no evidence with id '" + evidence_id + "'", "id");
        if (retracted_locked(evidence_id))
            throw Error(ErrorCode::UnknownEvidenceId, "evidence '" + evidence_id + "' is already retracted", "id");
        LogRecord r;
        r.seq = next_seq_++;
        r.kind = LogRecord::Kind::retract;
        r.target = evidence_id;
        r.timestamp = std::move(timestamp);
        log_.push_back(std::move(r));
        current_ = infer_locked(active_locked({}));
        return current_;
    }

    // Posteriors with the overlay added on top of the live evidence; the
    // session is left untouched. Overlay values win over logged ones.
    Posteriors what_if(std::span<const Evidence> overlay, const std::vector<std::string>& nodes = {}) const {
        std::shared_lock lock(mu_);
        for (const auto& e : overlay) resolve_state(network(), e);
        std::vector<Evidence> extra(overlay.begin(), overlay.end());
        for (auto& e : extra)
            if (e.id.empty()) e.id = "what-if";
        return infer_locked(active_locked(extra), nodes);
    }

    json to_json() const {
        std::shared_lock lock(mu_);
        json rej = json::array();
        for (const auto& r : rejected_) rej.push_back({{"evidence", evidence_to_json(r.evidence)}, {"reason", r.reason}});
        return {{"format", kFormatName},
                {"format_version", std::to_string(kFormatMajor) + "." + std::to_string(kFormatMinor)},
                {"id", id_},
                {"config", config_to_json(cfg_)},
                {"log", log_json_locked()},
                {"rejected", rej}};
    }

    void save(const std::filesystem::path& path) const {
        const std::string body = to_json().dump(2);
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw Error(ErrorCode::DataDirUnwritable, "cannot write '" + tmp.string() + "'", "path");
            out << body;
            if (!out.flush()) throw Error(ErrorCode::DataDirUnwritable, "cannot write '" + tmp.string() + "'", "path");
        }
        std::filesystem::rename(tmp, path);
    }

    static std::shared_ptr<IncidentSession> from_json(const json& j, ModelCache& cache = ModelCache::global());

    static std::shared_ptr<IncidentSession> load(const std::filesystem::path& path,
                                                 ModelCache& cache = ModelCache::global()) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw Error(ErrorCode::CorruptFile, "cannot open '" + path.string() + "'", path.string());
        std::string body((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        json j = json::parse(body, nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::CorruptFile, "not a valid JSON document", path.string());
        return from_json(j, cache);
    }

private:
    struct Active {
        std::map<std::string, Evidence> by_node;
        std::vector<std::string> warnings;
    };

    std::string id_;
    SessionConfig cfg_;
    std::shared_ptr<const CompiledModel> compiled_;
    mutable std::shared_mutex mu_;
    std::vector<LogRecord> log_;
    std::vector<Rejection> rejected_;
    std::vector<std::string> notes_;
    std::uint64_t next_seq_ = 1;
    Posteriors current_;

    std::uint64_t seq_of(const std::string& evidence_id) const {
        for (const auto& r : log_)
            if (r.kind == LogRecord::Kind::add && r.evidence.id == evidence_id) return r.seq;
        return UINT64_MAX;
    }

    const Evidence* find_add_locked(const std::string& evidence_id) const {
        for (const auto& r : log_)
            if (r.kind == LogRecord::Kind::add && r.evidence.id == evidence_id) return &r.evidence;
        return nullptr;
    }

    bool retracted_locked(const std::string& evidence_id) const {
        return std::any_of(log_.begin(), log_.end(), [&](const LogRecord& r) {
            return r.kind == LogRecord::Kind::retract && r.target == evidence_id;
        });
    }

    Active active_locked(const std::vector<Evidence>& extra) const {
        Active a;
        auto put = [&](const Evidence& e) {
            auto [it, fresh] = a.by_node.insert_or_assign(e.node, e);
            (void)it;
            if (!fresh)
                a.warnings.push_back(e.node + " has more than one observation; using the latest ('" + e.id + "')");
        };
        for (const auto& r : log_)
            if (r.kind == LogRecord::Kind::add && !retracted_locked(r.evidence.id)) put(r.evidence);
        for (const auto& e : extra) put(e);
        return a;
    }

    Posteriors infer_locked(const Active& a, std::vector<std::string> nodes = {}) const {
        bn::EvidenceAssignment ev;
        for (const auto& [node, e] : a.by_node) ev[node] = resolve_state(network(), e);
        if (nodes.empty()) nodes = default_query(network());
        auto r = compiled_->tree.infer(ev, nodes);
        return {std::move(r.marginals), r.log_evidence, a.warnings};
    }

    json log_json_locked() const {
        json out = json::array();
        for (const auto& r : log_) {
            json j{{"seq", r.seq}, {"kind", r.kind == LogRecord::Kind::add ? "add" : "retract"}};
            if (r.kind == LogRecord::Kind::add) j["evidence"] = evidence_to_json(r.evidence);
            else j["target"] = r.target;
            if (!r.timestamp.empty()) j["timestamp"] = r.timestamp;
            out.push_back(std::move(j));
        }
        return out;
    }
};

// Replays the stored log through the public operations, so a loaded
// session is exactly a live session that saw the same calls.
inline std::shared_ptr<IncidentSession> IncidentSession::from_json(const json& j, ModelCache& cache) {
    auto corrupt = [](const std::string& why, const std::string& field) {
        return Error(ErrorCode::CorruptFile, why, field);
    };
    if (!j.is_object()) throw corrupt("session file must hold a JSON object", "");
    if (!j.contains("format_version") || !j["format_version"].is_string())
        throw corrupt("missing format_version", "format_version");
    const std::string ver = j["format_version"];
    int major = 0, minor = 0;
    if (std::sscanf(ver.c_str(), "%d.%d", &major, &minor) != 2) throw corrupt("unreadable format_version", "format_version");
    if (major != kFormatMajor || minor > kFormatMinor)
        throw Error(ErrorCode::VersionMismatch,
                    "session format " + ver + " is not readable by format " + std::to_string(kFormatMajor) + "." +
                        std::to_string(kFormatMinor),
                    "format_version");

    SessionConfig cfg;
    std::string id;
    try {
        if (!j.contains("config")) throw corrupt("missing config", "config");
        cfg = config_from_json(j["config"], "config");
        id = j.value("id", std::string("session"));
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptFile) throw;
        throw corrupt(e.detail(), e.field());
    } catch (const json::exception& e) {
        throw corrupt(e.what(), "");
    }

    auto s = std::make_shared<IncidentSession>(std::move(cfg), std::move(id), cache);
    try {
        if (minor == 0) {
            // 1.0 kept additions and retractions in two flat lists.
            s->notes_.push_back("migrated from session format 1.0; retractions were replayed after all additions");
            for (const auto& e : j.at("evidence")) s->add_evidence(evidence_from_json(e));
            for (const auto& t : j.value("retracted", json::array())) s->retract_evidence(t.get<std::string>());
        } else {
            for (const auto& r : j.at("log")) {
                const std::string kind = r.at("kind");
                const std::string ts = r.value("timestamp", std::string());
                if (kind == "add") s->add_evidence(evidence_from_json(r.at("evidence"), "log.evidence"));
                else if (kind == "retract") s->retract_evidence(r.at("target").get<std::string>(), ts);
                else throw corrupt("unknown log record kind '" + kind + "'", "log");
            }
        }
        for (const auto& r : j.value("rejected", json::array()))
            s->rejected_.push_back({evidence_from_json(r.at("evidence")), r.value("reason", std::string())});
    } catch (const Error& e) {
        if (e.code() == ErrorCode::CorruptFile) throw;
        throw corrupt("log cannot be replayed: " + e.detail(), e.field());
    } catch (const json::exception& e) {
        throw corrupt(std::string("malformed log: ") + e.what(), "log");
    }
    return s;
}

}  // namespace groundbn::session
