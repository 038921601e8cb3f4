#pragma once
// HTTP JSON service over a directory of persisted incident sessions.
//
//   POST   /incidents                       {ship, model?, incident?} or {case}
//   GET    /incidents/{id}
//   POST   /incidents/{id}/evidence         Evidence object
//   DELETE /incidents/{id}/evidence/{eid}
//   GET    /incidents/{id}/posteriors?nodes=D_t,D_v,Y_D
//   POST   /incidents/{id}/what-if          {overlay: [Evidence], nodes?: [..]}
//   GET    /healthz
//
// Errors come back as {"error": {code, field, message}}.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include <httplib.h>

#include "groundbn/api/cases.hpp"
#include "groundbn/api/query.hpp"

namespace groundbn::api {

namespace fs = std::filesystem;

// --data-dir beats GROUNDBN_DATA_DIR beats ./groundbn-data.
inline fs::path data_dir(const std::string& flag = {}) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv("GROUNDBN_DATA_DIR"); env && *env) return env;
    return "groundbn-data";
}

inline std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Sessions by id, each saved to <dir>/<id>.json after every mutation.
class SessionStore {
public:
    explicit SessionStore(fs::path dir, session::ModelCache& cache = session::ModelCache::global())
        : dir_(std::move(dir)), cache_(cache) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        const auto probe = dir_ / ".write-probe";
        {
            std::ofstream out(probe);
            if (ec || !out || !(out << "ok").flush())
                throw Error(ErrorCode::DataDirUnwritable, "data directory '" + dir_.string() + "' is not writable",
                            "data_dir");
        }
        fs::remove(probe, ec);
    }

    const fs::path& dir() const { return dir_; }

    // Loads every stored session; unreadable files are reported, not fatal.
    std::vector<std::string> load_all() {
        std::vector<std::string> problems;
        std::vector<fs::path> files;
        for (const auto& f : fs::directory_iterator(dir_))
            if (f.path().extension() == ".json") files.push_back(f.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            try {
                auto s = session::IncidentSession::load(f, cache_);
                const std::string id = s->id();
                std::lock_guard lock(mu_);
                entries_[id] = make_entry(std::move(s));
            } catch (const Error& e) {
                problems.push_back(f.filename().string() + ": " + e.what());
            }
        }
        return problems;
    }

    std::shared_ptr<session::IncidentSession> create(const session::SessionConfig& cfg) {
        std::string id;
        {
            std::lock_guard lock(mu_);
            do id = fresh_id(); while (entries_.count(id));
            entries_[id] = nullptr;  // reserve while the model builds
        }
        try {
            auto s = std::make_shared<session::IncidentSession>(cfg, id, cache_);
            s->save(path_of(id));
            std::lock_guard lock(mu_);
            entries_[id] = make_entry(s);
            return s;
        } catch (...) {
            std::lock_guard lock(mu_);
            entries_.erase(id);
            throw;
        }
    }

    std::shared_ptr<session::IncidentSession> get(const std::string& id) const { return entry(id)->session; }

    // Runs a mutation and persists the result; mutations on one session are
    // serialized so the saved file always matches some prefix of the log.
    template <class F>
    auto mutate(const std::string& id, F&& f) {
        auto e = entry(id);
        std::lock_guard lock(e->write);
        auto out = f(*e->session);
        e->session->save(path_of(id));
        return out;
    }

    std::size_t size() const {
        std::lock_guard lock(mu_);
        std::size_t n = 0;
        for (const auto& [id, e] : entries_) n += e != nullptr;
        return n;
    }

    void flush() const {
        std::vector<std::shared_ptr<Entry>> all;
        {
            std::lock_guard lock(mu_);
            for (const auto& [id, e] : entries_)
                if (e) all.push_back(e);
        }
        for (const auto& e : all) {
            std::lock_guard lock(e->write);
            e->session->save(path_of(e->session->id()));
        }
    }

private:
    struct Entry {
        std::shared_ptr<session::IncidentSession> session;
        std::mutex write;
    };

    fs::path dir_;
    session::ModelCache& cache_;
    mutable std::mutex mu_;
    std::map<std::string, std::shared_ptr<Entry>> entries_;
    std::mt19937_64 ids_{std::random_device{}()};

    static std::shared_ptr<Entry> make_entry(std::shared_ptr<session::IncidentSession> s) {
        auto e = std::make_shared<Entry>();
        e->session = std::move(s);
        return e;
    }

    fs::path path_of(const std::string& id) const { return dir_ / (id + ".json"); }

    std::string fresh_id() { return "inc-" + hex64(ids_()).substr(0, 12); }

    std::shared_ptr<Entry> entry(const std::string& id) const {
        std::lock_guard lock(mu_);
        auto it = entries_.find(id);
        if (it == entries_.end() || !it->second)
            throw Error(ErrorCode::UnknownSession, "no incident '" + id + "'", "id");
        return it->second;
    }
};

inline int http_status(ErrorCode c) {
    switch (c) {
        case ErrorCode::UnknownSession:
        case ErrorCode::UnknownEvidenceId:
        case ErrorCode::FixtureMissing: return 404;
        case ErrorCode::ImpossibleEvidence: return 409;
        case ErrorCode::UnknownNode:
        case ErrorCode::OutOfRangeValue: return 422;
        case ErrorCode::DataDirUnwritable:
        case ErrorCode::CorruptFile:
        case ErrorCode::CycleDetected:
        case ErrorCode::MissingTable:
        case ErrorCode::NonStochasticRow:
        case ErrorCode::InvalidNetwork:
        case ErrorCode::StateSpaceTooLarge: return 500;
        default: return 400;
    }
}

inline json error_json(std::string_view code, const std::string& field, const std::string& message) {
    return {{"error", {{"code", code}, {"field", field}, {"message", message}}}};
}

class Service {
public:
    explicit Service(fs::path dir, session::ModelCache& cache = session::ModelCache::global())
        : store_(std::move(dir), cache) {
        load_problems_ = store_.load_all();
        routes();
    }

    ~Service() { stop(); }

    SessionStore& store() { return store_; }
    const std::vector<std::string>& load_problems() const { return load_problems_; }

    // Binds (port 0 picks a free one) and returns the bound port.
    int bind(const std::string& host, int port) {
        int bound = port;
        if (port == 0) bound = server_.bind_to_any_port(host);
        else if (!server_.bind_to_port(host, port)) bound = -1;
        if (bound < 0)
            throw Error(ErrorCode::PortInUse, "cannot bind " + host + ":" + std::to_string(port), "port");
        return bound;
    }

    // Blocks until stop().
    void run() { server_.listen_after_bind(); }

    void start_background() {
        thread_ = std::thread([this] { run(); });
        server_.wait_until_ready();
    }

    void stop() {
        std::lock_guard lock(stop_mu_);
        if (stopped_) return;
        stopped_ = true;
        server_.stop();
        if (thread_.joinable()) thread_.join();
        store_.flush();
    }

private:
    SessionStore store_;
    httplib::Server server_;
    std::thread thread_;
    std::mutex stop_mu_;
    bool stopped_ = false;
    std::vector<std::string> load_problems_;

    static void send(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
    }

    static json parse_body(const httplib::Request& req) {
        json j = json::parse(req.body, nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::MalformedInput, "request body is not valid JSON", "body");
        return j;
    }

    template <class F>
    static httplib::Server::Handler guarded(F f) {
        return [f](const httplib::Request& req, httplib::Response& res) {
            try {
                f(req, res);
            } catch (const Error& e) {
                send(res, http_status(e.code()), error_json(to_string(e.code()), e.field(), e.detail()));
            } catch (const json::exception& e) {
                send(res, 400, error_json("MalformedInput", "body", e.what()));
            } catch (const std::exception& e) {
                send(res, 500, error_json("Internal", "", e.what()));
            }
        };
    }

    static json incident_json(const session::IncidentSession& s) {
        json log = s.to_json();
        json active = json::array();
        for (const auto& e : s.active_evidence()) active.push_back(session::evidence_to_json(e));
        json observables = json::array();
        const auto& net = s.network();
        for (const auto& id : s.compiled().model.observables) {
            const auto& n = net.node(id);
            json o{{"node", id}};
            if (!n.unit.empty()) o["unit"] = n.unit;
            if (n.is_interval()) {
                const auto edges = n.edges();
                o["range"] = {edges.front(), edges.back()};
            } else {
                json labels = json::array();
                for (const auto& st : n.states) labels.push_back(st.label);
                o["labels"] = labels;
            }
            observables.push_back(std::move(o));
        }
        return {{"id", s.id()},
                {"structure_hash", s.structure_hash()},
                {"log_hash", s.log_hash()},
                {"config", log["config"]},
                {"log", log["log"]},
                {"rejected", log["rejected"]},
                {"active_evidence", active},
                {"observables", observables},
                {"notes", s.notes()}};
    }

    void routes() {
        // httplib's default adds SO_REUSEPORT, which lets a second server
        // silently share the port instead of failing with PortInUse.
        server_.set_socket_options([](socket_t sock) {
            int yes = 1;
            ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof yes);
        });
        server_.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
            send(res, 500, error_json("Internal", "", "unhandled error"));
        });

        server_.Get("/healthz", guarded([this](const httplib::Request&, httplib::Response& res) {
            send(res, 200, {{"status", "ok"}, {"sessions", store_.size()}, {"load_problems", load_problems_}});
        }));

        server_.Post("/incidents", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const json body = parse_body(req);
            if (!body.is_object()) throw Error(ErrorCode::MalformedInput, "expected an object", "body");
            session::SessionConfig cfg;
            if (body.contains("case")) {
                if (!body.at("case").is_string()) throw Error(ErrorCode::MalformedInput, "expected a string", "case");
                cfg = load_case(body.at("case").get<std::string>()).config;
            } else {
                cfg = session::config_from_json(body);
            }
            auto s = store_.create(cfg);
            json out = incident_json(*s);
            out["report"] = to_json(report_for(*s, {}));
            send(res, 201, out);
        }));

        server_.Get(R"(/incidents/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            send(res, 200, incident_json(*store_.get(req.matches[1])));
        }));

        server_.Post(R"(/incidents/([^/]+)/evidence)",
                     guarded([this](const httplib::Request& req, httplib::Response& res) {
                         auto e = session::evidence_from_json(parse_body(req), "body");
                         if (e.timestamp.empty()) e.timestamp = utc_now();
                         const std::string id = req.matches[1];
                         auto out = store_.mutate(id, [&](session::IncidentSession& s) {
                             s.add_evidence(e);
                             const auto added = s.log().back().evidence;
                             return json{{"evidence", session::evidence_to_json(added)},
                                         {"log_hash", s.log_hash()},
                                         {"report", to_json(report_for(s, {}))}};
                         });
                         send(res, 201, out);
                     }));

        server_.Delete(R"(/incidents/([^/]+)/evidence/([^/]+))",
                       guarded([this](const httplib::Request& req, httplib::Response& res) {
                           const std::string id = req.matches[1], eid = req.matches[2];
                           auto out = store_.mutate(id, [&](session::IncidentSession& s) {
                               s.retract_evidence(eid, utc_now());
                               return json{{"retracted", eid},
                                           {"log_hash", s.log_hash()},
                                           {"report", to_json(report_for(s, {}))}};
                           });
                           send(res, 200, out);
                       }));

        server_.Get(R"(/incidents/([^/]+)/posteriors)",
                    guarded([this](const httplib::Request& req, httplib::Response& res) {
                        auto s = store_.get(req.matches[1]);
                        auto nodes = split_nodes(req.get_param_value("nodes"));
                        send(res, 200, to_json(report_for(*s, {}, nodes)));
                    }));

        server_.Post(R"(/incidents/([^/]+)/what-if)",
                     guarded([this](const httplib::Request& req, httplib::Response& res) {
                         auto s = store_.get(req.matches[1]);
                         const json body = parse_body(req);
                         if (!body.is_object()) throw Error(ErrorCode::MalformedInput, "expected an object", "body");
                         for (const auto& [key, v] : body.items())
                             if (key != "overlay" && key != "nodes")
                                 throw Error(ErrorCode::MalformedInput, "unknown field (expected overlay, nodes)", key);
                         std::vector<session::Evidence> overlay;
                         if (body.contains("overlay")) {
                             const auto& o = body.at("overlay");
                             if (!o.is_array()) throw Error(ErrorCode::MalformedInput, "expected an array", "overlay");
                             for (std::size_t i = 0; i < o.size(); ++i)
                                 overlay.push_back(
                                     session::evidence_from_json(o[i], "overlay[" + std::to_string(i) + "]"));
                         }
                         std::vector<std::string> nodes;
                         if (body.contains("nodes")) {
                             const auto& n = body.at("nodes");
                             if (!n.is_array()) throw Error(ErrorCode::MalformedInput, "expected an array", "nodes");
                             for (std::size_t i = 0; i < n.size(); ++i) {
                                 if (!n[i].is_string())
                                     throw Error(ErrorCode::MalformedInput, "expected a string",
                                                 "nodes[" + std::to_string(i) + "]");
                                 nodes.push_back(n[i].get<std::string>());
                             }
                         }
                         auto r = to_json(report_for(*s, overlay, nodes));
                         r["log_hash"] = s->log_hash();
                         send(res, 200, r);
                     }));
    }
};

}  // namespace groundbn::api
