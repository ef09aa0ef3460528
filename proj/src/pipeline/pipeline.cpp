#include "dtwin/pipeline/pipeline.hpp"

#include "dtwin/aml/aml.hpp"
#include "dtwin/dynamics/traces.hpp"
#include "dtwin/error.hpp"
#include "dtwin/graph/persistence.hpp"
#include "dtwin/mining/templates.hpp"
#include "dtwin/plc/analysis.hpp"
#include "dtwin/plc/project.hpp"
#include "dtwin/synth/plant.hpp"
#include "dtwin/util/files.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <sstream>

namespace dtwin::pipeline {

using graph::NodeKind;

namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

template <typename T>
T number(const std::string& key, const std::string& v) {
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        fail(ErrorCode::Config, "setting '" + key + "': '" + v + "' is not a valid number");
    }
    return out;
}

bool boolean(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    fail(ErrorCode::Config, "setting '" + key + "': expected true or false");
}

std::vector<std::string> list(const std::string& v) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= v.size()) {
        auto pos = v.find(',', start);
        auto item = trim(std::string_view(v).substr(start, pos == std::string::npos ? std::string::npos : pos - start));
        if (!item.empty()) out.push_back(item);
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return out;
}

fs::path resolve(const fs::path& base, const std::string& v) {
    fs::path p(v);
    return p.is_relative() && !base.empty() ? base / p : p;
}

void say(const Log& log, const std::string& msg) {
    if (log) log(msg);
}

/// Configured path, else the synthesized artifact when a plantspec is set.
fs::path input(const PipelineConfig& c, const std::optional<fs::path>& configured, std::string_view synthName,
               std::string_view key) {
    if (configured) return *configured;
    if (c.plantspec) return c.out(synthName);
    fail(ErrorCode::Config, "no '" + std::string(key) + "' configured");
}

void require(const fs::path& p) {
    if (!fs::exists(p)) fail(ErrorCode::Io, "input file not found: " + p.string());
}

std::string text(const fs::path& p) {
    require(p);
    return util::read_file(p);
}

void write(const PipelineConfig& c, std::string_view name, const std::string& contents) {
    std::error_code ec;
    fs::create_directories(c.outDir, ec);
    if (ec) fail(ErrorCode::Io, "cannot create output directory " + c.outDir.string() + ": " + ec.message());
    util::write_file(c.out(name), contents);
}

graph::PropertyGraph load(const fs::path& p) {
    require(p);
    return graph::load_graph(p);
}

std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

plc::PlcProject project_of(const PipelineConfig& c) {
    return plc::prepare(plc::parse_project(text(input(c, c.plcXml, artifact::plc_xml, "plcXml"))));
}

}  // namespace

void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value, const fs::path& base) {
    auto& d = c.dynamics;
    if (key == "plantspec") {
        c.plantspec = resolve(base, value);
    } else if (key == "plcXml") {
        c.plcXml = resolve(base, value);
    } else if (key == "ioCsv") {
        c.ioCsv = resolve(base, value);
    } else if (key == "rtlsCsv") {
        c.rtlsCsv = resolve(base, value);
    } else if (key == "labeledRtlsCsv") {
        c.labeledRtlsCsv = resolve(base, value);
    } else if (key == "groundTruth") {
        c.groundTruth = resolve(base, value);
    } else if (key == "outDir") {
        c.outDir = resolve(base, value);
    } else if (key == "seed") {
        c.seed = number<std::uint64_t>(key, value);
    } else if (key == "mode") {
        if (value == "Classify") {
            d.mode = dynamics::GroupingMode::Classify;
        } else if (value == "Cluster") {
            d.mode = dynamics::GroupingMode::Cluster;
        } else {
            fail(ErrorCode::Config, "mode must be Classify or Cluster");
        }
    } else if (key == "query") {
        if (value == "MatchedPositions") {
            d.query = dynamics::QueryMode::MatchedPositions;
        } else if (value == "RawTrajectory") {
            d.query = dynamics::QueryMode::RawTrajectory;
        } else {
            fail(ErrorCode::Config, "query must be MatchedPositions or RawTrajectory");
        }
    } else if (key == "windowMs") {
        d.windowMs = number<std::int64_t>(key, value);
    } else if (key == "minMatches") {
        d.minMatches = number<std::int64_t>(key, value);
    } else if (key == "hysteresis") {
        d.hysteresisFraction = number<double>(key, value);
    } else if (key == "band") {
        if (value == "none") {
            d.dtw.band.reset();
        } else {
            d.dtw.band = number<std::size_t>(key, value);
        }
    } else if (key == "clusterMethod") {
        if (value == "kmeans") {
            if (!std::holds_alternative<dynamics::KMeans>(d.cluster)) d.cluster = dynamics::KMeans{};
        } else if (value == "dbscan") {
            if (!std::holds_alternative<dynamics::Dbscan>(d.cluster)) d.cluster = dynamics::Dbscan{};
        } else {
            fail(ErrorCode::Config, "clusterMethod must be kmeans or dbscan");
        }
    } else if (key == "k") {
        if (!std::holds_alternative<dynamics::KMeans>(d.cluster)) d.cluster = dynamics::KMeans{};
        std::get<dynamics::KMeans>(d.cluster).k = number<std::size_t>(key, value);
    } else if (key == "eps") {
        if (!std::holds_alternative<dynamics::Dbscan>(d.cluster)) d.cluster = dynamics::Dbscan{};
        std::get<dynamics::Dbscan>(d.cluster).eps = number<double>(key, value);
    } else if (key == "minPts") {
        if (!std::holds_alternative<dynamics::Dbscan>(d.cluster)) d.cluster = dynamics::Dbscan{};
        std::get<dynamics::Dbscan>(d.cluster).minPts = number<std::size_t>(key, value);
    } else if (key == "minSupport") {
        c.mining.minSupport = number<std::int64_t>(key, value);
    } else if (key == "minNodes") {
        c.mining.minNodes = number<std::size_t>(key, value);
    } else if (key == "maxNodes") {
        c.mining.maxNodes = number<std::size_t>(key, value);
    } else if (key == "rootedOnly") {
        c.mining.rootedOnly = boolean(key, value);
    } else if (key == "excludedKinds") {
        c.projection.excludedKinds.clear();
        for (const auto& k : list(value)) {
            if (k == "none") continue;
            auto kind = graph::parse_node_kind(k);
            if (!kind) fail(ErrorCode::Config, "excludedKinds: unknown node kind '" + k + "'");
            c.projection.excludedKinds.insert(*kind);
        }
    } else if (key == "labelProjection") {
        c.projection.labelProjection = list(value);
    } else {
        fail(ErrorCode::Config, "unknown setting '" + key + "'");
    }
}

void check_ranges(const PipelineConfig& c) {
    auto need = [](bool ok, const std::string& what) {
        if (!ok) fail(ErrorCode::Config, what);
    };
    const auto& d = c.dynamics;
    need(d.windowMs >= 0, "windowMs must be non-negative");
    need(d.minMatches >= 1, "minMatches must be at least 1");
    need(d.hysteresisFraction >= 0 && d.hysteresisFraction < 1, "hysteresis must be in [0, 1)");
    if (const auto* km = std::get_if<dynamics::KMeans>(&d.cluster)) need(km->k >= 1, "k must be at least 1");
    if (const auto* db = std::get_if<dynamics::Dbscan>(&d.cluster)) {
        need(db->eps > 0, "eps must be positive");
        need(db->minPts >= 1, "minPts must be at least 1");
    }
    need(c.mining.minSupport >= 2, "minSupport must be at least 2");
    need(c.mining.minNodes >= 2 && c.mining.minNodes <= c.mining.maxNodes, "need 2 <= minNodes <= maxNodes");
    need(c.mining.maxNodes <= 32, "maxNodes must not exceed 32");
}

PipelineConfig parse_config(std::string_view text, const fs::path& base) {
    PipelineConfig c;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorCode::Config, "config line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(c, trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)), base);
    }
    check_ranges(c);
    return c;
}

void synth(const PipelineConfig& c, const Log& log) {
    if (!c.plantspec) fail(ErrorCode::Config, "no 'plantspec' configured");
    auto spec = synth::parse_plantspec(text(*c.plantspec));
    if (c.seed) spec.seed = *c.seed;
    auto plant = synth::generate(spec);
    write(c, artifact::plc_xml, plant.plcXml);
    write(c, artifact::io_csv, plant.ioCsv);
    write(c, artifact::rtls_csv, plant.rtlsCsv);
    write(c, artifact::labeled_csv, plant.labeledRtlsCsv);
    write(c, artifact::ground_truth, plant.groundTruth.to_json());
    const auto& n = plant.groundTruth.counts;
    say(log, "synth: " + std::to_string(n.at("sensors")) + " sensors, " + std::to_string(n.at("actuators")) +
                 " actuators, " + std::to_string(n.at("missions")) + " missions");
}

void analyze_plc(const PipelineConfig& c, const Log& log) {
    auto result = plc::analyze_plc(text(input(c, c.plcXml, artifact::plc_xml, "plcXml")));
    for (const auto& w : result.warnings) say(log, "warning: " + w);
    write(c, artifact::plc_graph, graph::serialize_graph(result.graph));
    say(log, "analyze-plc: " + std::to_string(result.graph.nodes().size()) + " nodes, " +
                 std::to_string(result.graph.edges().size()) + " edges");
}

void analyze_dynamics(const PipelineConfig& c, const Log& log) {
    auto project = project_of(c);
    dynamics::DynamicsInputs in;
    in.rootName = project.name;
    in.tags = dynamics::tag_infos(project);
    auto io_path = input(c, c.ioCsv, artifact::io_csv, "ioCsv");
    auto rtls_path = input(c, c.rtlsCsv, artifact::rtls_csv, "rtlsCsv");
    require(io_path);
    require(rtls_path);
    auto io = dynamics::load_io_trace(io_path);
    auto rtls = dynamics::load_rtls_trace(rtls_path);
    for (const auto& w : io.warnings) say(log, "warning: " + w);
    for (const auto& w : rtls.warnings) say(log, "warning: " + w);
    in.io = std::move(io.samples);
    in.rtls = std::move(rtls.samples);
    auto config = c.dynamics;
    if (c.seed) {
        if (auto* km = std::get_if<dynamics::KMeans>(&config.cluster)) km->seed = *c.seed;
    }
    if (config.mode == dynamics::GroupingMode::Classify) {
        auto path = input(c, c.labeledRtlsCsv, artifact::labeled_csv, "labeledRtlsCsv");
        require(path);
        in.labeledRtls = dynamics::load_rtls_trace(path).samples;
    }
    auto result = dynamics::analyze_dynamics(in, config);
    for (const auto& w : result.warnings) say(log, "warning: " + w);
    write(c, artifact::dynamics_graph, graph::serialize_graph(result.graph));

    std::ostringstream os;
    std::size_t known = 0;
    for (const auto& e : result.estimates) {
        bool ok = e.status == dynamics::EstimateStatus::Known;
        known += ok;
        os << e.ownerTag << " status = " << (ok ? "Known" : "Unknown") << " matches = " << e.matchCount;
        if (ok) os << " x = " << num(e.mean.x) << " y = " << num(e.mean.y) << " z = " << num(e.mean.z);
        auto a = result.assignments.find(e.ownerTag);
        if (a != result.assignments.end()) os << " group = " << a->second;
        auto d = result.distances.find(e.ownerTag);
        if (d != result.distances.end()) os << " distance = " << num(d->second);
        os << "\n";
    }
    write(c, artifact::dynamics_report, os.str());
    say(log, "analyze-dynamics: " + std::to_string(known) + " of " + std::to_string(result.estimates.size()) +
                 " components located, " + std::to_string(result.graph.query({{NodeKind::PhysicalGroup}, {}, {}}).size()) +
                 " physical groups");
}

void merge(const PipelineConfig& c, const Log& log) {
    auto merged = graph::merge(load(c.out(artifact::plc_graph)), load(c.out(artifact::dynamics_graph)));
    auto violations = merged.assembly_violations();
    if (!violations.empty()) fail(ErrorCode::InvalidGraph, "merged graph: " + violations.front());
    write(c, artifact::merged_graph, graph::serialize_graph(merged));
    say(log, "merge: " + std::to_string(merged.nodes().size()) + " nodes, " + std::to_string(merged.edges().size()) + " edges");
}

void mine(const PipelineConfig& c, const Log& log) {
    auto g = load(c.out(artifact::merged_graph));
    auto mg = mining::project_for_mining(g, c.projection);
    auto patterns = mining::mine(mg, c.mining);
    auto templates = mining::select_templates(patterns);
    auto marked = mining::mark_templates(g, mg, templates);
    write(c, artifact::twin_graph, graph::serialize_graph(marked.graph));
    write(c, artifact::templates, mining::format_templates(marked.annotations));
    write(c, artifact::summary, mining::format_summary(mining::summarize(marked.graph)));
    say(log, "mine: " + std::to_string(mg.vertices.size()) + " vertices, " + std::to_string(patterns.size()) +
                 " frequent patterns, " + std::to_string(templates.size()) + " templates");
}

void export_aml(const PipelineConfig& c, const Log& log) {
    auto result = aml::export_aml(load(c.out(artifact::twin_graph)));
    write(c, artifact::aml, result.xml);
    say(log, "export: " + std::to_string(result.counts.elements) + " elements, " + std::to_string(result.counts.links) +
                 " links");
}

synth::MetricsReport evaluate(const PipelineConfig& c, double runtimeSeconds, const Log& log) {
    auto truth = synth::GroundTruth::from_json(text(input(c, c.groundTruth, artifact::ground_truth, "groundTruth")));
    auto report = synth::evaluate(load(c.out(artifact::twin_graph)), truth, runtimeSeconds);
    write(c, artifact::metrics, synth::format_metrics(report));
    say(log, "evaluate: ari " + num(report.ari) + ", accuracy " + num(report.classificationAccuracy) + ", recovery " +
                 num(report.templateRecovery));
    return report;
}

std::vector<StageTiming> run_all(const PipelineConfig& c, const Log& log) {
    std::vector<StageTiming> timings;
    auto timed = [&](const std::string& name, const std::function<void()>& stage) {
        auto start = std::chrono::steady_clock::now();
        stage();
        timings.push_back({name, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count()});
    };
    if (c.plantspec) timed("synth", [&] { synth(c, log); });
    // Every input must exist before the first stage runs.
    require(input(c, c.plcXml, artifact::plc_xml, "plcXml"));
    require(input(c, c.ioCsv, artifact::io_csv, "ioCsv"));
    require(input(c, c.rtlsCsv, artifact::rtls_csv, "rtlsCsv"));
    if (c.dynamics.mode == dynamics::GroupingMode::Classify) {
        require(input(c, c.labeledRtlsCsv, artifact::labeled_csv, "labeledRtlsCsv"));
    }
    timed("analyze-plc", [&] { analyze_plc(c, log); });
    timed("analyze-dynamics", [&] { analyze_dynamics(c, log); });
    timed("merge", [&] { merge(c, log); });
    timed("mine", [&] { mine(c, log); });
    timed("export", [&] { export_aml(c, log); });
    if (c.groundTruth || c.plantspec) {
        double analysis = 0;
        for (const auto& t : timings) analysis += t.stage == "synth" ? 0.0 : t.seconds;
        timed("evaluate", [&] { evaluate(c, analysis, log); });
    } else {
        say(log, "evaluate skipped: no ground truth configured");
    }
    write(c, artifact::timing, format_timing(timings));
    return timings;
}

std::string format_timing(const std::vector<StageTiming>& timings) {
    std::ostringstream os;
    double total = 0;
    for (const auto& t : timings) {
        os << t.stage << " = " << num(t.seconds) << "\n";
        total += t.seconds;
    }
    os << "total = " << num(total) << "\n";
    return os.str();
}

}  // namespace dtwin::pipeline
