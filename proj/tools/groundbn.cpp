// groundbn command line: batch assessment, case reproduction, flow
// estimation from tank soundings, and the HTTP service.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "groundbn/api/run_case.hpp"
#include "groundbn/api/service.hpp"
#include "groundbn/ingest/flow.hpp"

namespace {

using namespace groundbn;
using json = nlohmann::json;

json read_json(const std::string& path, const std::string& what) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MalformedInput, "cannot open " + what + " file '" + path + "'", what);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::MalformedInput, "'" + path + "' is not valid JSON", what);
    return j;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out || !(out << body).flush()) throw Error(ErrorCode::DataDirUnwritable, "cannot write '" + path + "'", "out");
}

// NODE:key=value[,key=value...] with keys count, width, lo, hi.
std::pair<std::string, model::BinOverride> parse_bin(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0)
        throw Error(ErrorCode::MalformedInput, "expected NODE:key=value[,...], got '" + text + "'", "bin");
    model::BinOverride b;
    std::istringstream items(text.substr(colon + 1));
    std::string item;
    while (std::getline(items, item, ',')) {
        const auto eq = item.find('=');
        const std::string key = item.substr(0, eq);
        double v = 0.0;
        if (eq == std::string::npos || !(std::istringstream(item.substr(eq + 1)) >> v))
            throw Error(ErrorCode::MalformedInput, "bad item '" + item + "' in '" + text + "'", "bin");
        if (key == "count") {
            if (!(v >= 2 && v == std::floor(v))) throw Error(ErrorCode::MalformedInput, "count must be an integer >= 2", "bin");
            b.count = static_cast<std::size_t>(v);
        } else if (key == "width") b.width = v;
        else if (key == "lo") b.lo = v;
        else if (key == "hi") b.hi = v;
        else throw Error(ErrorCode::MalformedInput, "unknown key '" + key + "' (count, width, lo, hi)", "bin");
    }
    return {text.substr(0, colon), b};
}

struct ModelFlags {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> samples;
    std::vector<std::string> bins;

    void add(CLI::App* app) {
        app->add_option("--seed", seed, "Seed for table synthesis");
        app->add_option("--samples-per-cell", samples, "Samples per parent cell in table synthesis")
            ->check(CLI::PositiveNumber);
        app->add_option("--bin", bins, "Bin override NODE:count=N|width=W[,lo=L][,hi=H] (repeatable)");
    }

    void apply(model::ModelConfig& m) const {
        if (seed) m.synthesis.seed = *seed;
        if (samples) m.synthesis.samples_per_cell = *samples;
        for (const auto& b : bins) {
            auto [node, bin] = parse_bin(b);
            m.bins.insert_or_assign(node, bin);
        }
    }
};

std::vector<session::Evidence> read_evidence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MalformedInput, "cannot open evidence file '" + path + "'", "evidence");
    in >> std::ws;
    if (in.peek() != '[') return session::read_evidence_jsonl(in);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::MalformedInput, "'" + path + "' is not valid JSON", "evidence");
    std::vector<session::Evidence> out;
    for (std::size_t i = 0; i < j.size(); ++i)
        out.push_back(session::evidence_from_json(j[i], "[" + std::to_string(i) + "]"));
    return out;
}

int assess(const std::string& ship_file, const std::string& incident_file, const std::string& model_file,
           const std::string& evidence_file, const std::string& query, const ModelFlags& flags,
           const std::string& out_file, const std::string& csv_file) {
    json cfg;
    const json ship = read_json(ship_file, "ship");
    cfg["ship"] = ship.contains("ship") ? ship.at("ship") : ship;
    if (!model_file.empty()) {
        const json m = read_json(model_file, "model");
        cfg["model"] = m.contains("model") ? m.at("model") : m;
    }
    if (!incident_file.empty()) {
        const json inc = read_json(incident_file, "incident");
        cfg["incident"] = inc.contains("incident") ? inc.at("incident") : inc;
    }
    auto config = session::config_from_json(cfg);
    flags.apply(config.model);
    config.model.validate();

    session::IncidentSession s(config, "cli");
    if (!evidence_file.empty())
        for (auto& e : read_evidence(evidence_file)) s.add_evidence(std::move(e));
    const auto report = api::report_for(s, {}, api::split_nodes(query));
    json out = api::to_json(report);
    out["structure_hash"] = s.structure_hash();
    out["log_hash"] = s.log_hash();
    if (out_file.empty()) std::cout << out.dump(2) << '\n';
    else write_file(out_file, out.dump(2) + "\n");
    if (!csv_file.empty()) write_file(csv_file, api::histogram_csv(report));
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
    return 0;
}

int run_case(const std::string& name, const ModelFlags& flags, const std::string& out_dir, const std::string& fixtures) {
    api::RunOptions opt;
    opt.seed = flags.seed;
    opt.samples_per_cell = flags.samples;
    for (const auto& b : flags.bins) {
        auto [node, bin] = parse_bin(b);
        opt.bins.insert_or_assign(node, bin);
    }
    if (!fixtures.empty()) opt.fixtures = fixtures;

    const auto r = api::run_case(name, opt);
    std::filesystem::create_directories(out_dir);
    const auto base = std::filesystem::path(out_dir) / name;
    write_file(base.string() + ".report.json", api::to_json(r).dump(2) + "\n");
    write_file(base.string() + ".histogram.csv", api::histogram_csv(r.report));
    std::cout << name << ": " << r.file.description << '\n';
    for (const auto& c : r.checks) std::cout << (c.passed ? "  PASS  " : "  FAIL  ") << c.name << "  (" << c.detail << ")\n";
    std::cout << "wrote " << base.string() << ".report.json and .histogram.csv\n";
    return r.passed() ? 0 : 1;
}

int flow(const std::vector<std::string>& levels, const std::vector<std::string>& curves, double window,
         const std::string& quality) {
    if (curves.size() != 1 && curves.size() != levels.size())
        throw Error(ErrorCode::MalformedInput, "give one volume curve, or one per level series", "volume-curve");
    const auto q = quality == "poor" ? ingest::FlowQuality::poor : ingest::FlowQuality::good;
    std::vector<ingest::FlowEstimate> rates;
    json tanks = json::array();
    for (std::size_t i = 0; i < levels.size(); ++i) {
        ingest::LevelSeries s;
        s.tank = levels[i];
        s.samples = ingest::read_level_series(levels[i]);
        s.volume = ingest::read_volume_curve(curves.size() == 1 ? curves[0] : curves[i]);
        const auto f = ingest::flow_rate_from_levels(s, window, q);
        rates.push_back(f);
        tanks.push_back({{"tank", s.tank}, {"rate", f.rate}, {"sd", f.sd}, {"samples", f.samples}});
    }
    const auto total = ingest::sum_tank_flows(rates);
    json out{{"unit", "m^3/s"},
             {"window_s", window},
             {"tanks", tanks},
             {"total", {{"rate", total.rate}, {"sd", total.sd}, {"quality", ingest::to_string(total.quality)}}}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

int serve(const std::string& host, int port, const std::string& dir_flag) {
    // Block the shutdown signals before any thread starts, then wait for one.
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, nullptr);

    api::Service svc(api::data_dir(dir_flag));
    for (const auto& p : svc.load_problems()) std::cerr << "skipped " << p << '\n';
    const int bound = svc.bind(host, port);
    svc.start_background();
    std::cerr << "listening on " << host << ":" << bound << " (data in " << svc.store().dir().string() << ", "
              << svc.store().size() << " sessions)\n";
    int sig = 0;
    sigwait(&set, &sig);
    std::cerr << "shutting down\n";
    svc.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grounding damage assessment with a Bayesian network"};
    app.require_subcommand(1);

    auto* a = app.add_subcommand("assess", "Posterior report for a ship, incident and evidence file");
    std::string ship, incident, model_file, evidence, query = "D_t,D_v,Y_D", out, csv;
    ModelFlags aflags;
    a->add_option("--ship", ship, "Ship JSON")->required()->check(CLI::ExistingFile);
    a->add_option("--incident", incident, "Incident JSON")->check(CLI::ExistingFile);
    a->add_option("--model", model_file, "Model config JSON (priors, modules, bins)")->check(CLI::ExistingFile);
    a->add_option("--evidence", evidence, "Evidence as JSON lines or a JSON array")->check(CLI::ExistingFile);
    a->add_option("--query", query, "Comma-separated nodes to report")->capture_default_str();
    a->add_option("--out", out, "Report JSON path (default stdout)");
    a->add_option("--csv", csv, "Histogram CSV path");
    aflags.add(a);

    auto* c = app.add_subcommand("case", "Bundled case studies");
    c->require_subcommand(1);
    auto* cr = c->add_subcommand("run", "Reproduce a case; exit 0 iff its tolerances hold");
    std::string case_name, out_dir = ".", fixtures;
    ModelFlags cflags;
    cr->add_option("name", case_name, "case1, scenarioA or scenarioB")->required();
    cr->add_option("--out-dir", out_dir, "Where the report JSON and histogram CSV go")->capture_default_str();
    cr->add_option("--fixtures", fixtures, "Fixture directory (default: GROUNDBN_FIXTURES or the bundled one)");
    cflags.add(cr);
    auto* cl = c->add_subcommand("list", "List bundled cases");
    auto* cd = c->add_subcommand("dot", "Write a case's network as a Graphviz DOT graph");
    std::string dot_case, dot_out;
    cd->add_option("name", dot_case, "case1, scenarioA or scenarioB")->required();
    cd->add_option("--out", dot_out, "DOT path (default stdout)");

    auto* f = app.add_subcommand("flow", "Flow rate from tank level soundings");
    std::vector<std::string> levels, curves;
    double window = 60.0;
    std::string quality = "good";
    f->add_option("--levels", levels, "CSV time_s,level_m (repeatable, one per tank)")->required();
    f->add_option("--volume-curve", curves, "CSV level_m,volume_m3 (one, or one per tank)")->required();
    f->add_option("--window", window, "Averaging window, s")->capture_default_str()->check(CLI::PositiveNumber);
    f->add_option("--quality", quality, "Measurement quality")->check(CLI::IsMember({"good", "poor"}));

    auto* s = app.add_subcommand("serve", "Run the HTTP JSON service");
    std::string host = "127.0.0.1", data;
    int port = 8080;
    s->add_option("--port", port, "Port (0 picks a free one)")->capture_default_str()->check(CLI::Range(0, 65535));
    s->add_option("--host", host, "Bind address")->capture_default_str();
    s->add_option("--data-dir", data, "Session directory (default: GROUNDBN_DATA_DIR or ./groundbn-data)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*a) return assess(ship, incident, model_file, evidence, query, aflags, out, csv);
        if (*cr) return run_case(case_name, cflags, out_dir, fixtures);
        if (*cl) {
            for (const auto& n : api::case_names()) std::cout << n << '\n';
            return 0;
        }
        if (*cd) {
            auto cfg = api::load_case(dot_case).config;
            const auto dot = bn::to_dot(*model::build_network(cfg.ship, cfg.model, cfg.incident).network);
            if (dot_out.empty()) std::cout << dot;
            else write_file(dot_out, dot);
            return 0;
        }
        if (*f) return flow(levels, curves, window, quality);
        if (*s) return serve(host, port, data);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what();
        if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
        std::cerr << '\n';
        return 2;
    }
    return 0;
}
