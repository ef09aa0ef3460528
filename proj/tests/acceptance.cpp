// One line per acceptance criterion; exit status 1 when any criterion fails.

#include "dtwin/aml/aml.hpp"
#include "dtwin/dynamics/classify.hpp"
#include "dtwin/graph/persistence.hpp"
#include "dtwin/mining/templates.hpp"
#include "dtwin/pipeline/pipeline.hpp"
#include "dtwin/plc/analysis.hpp"
#include "dtwin/synth/metrics.hpp"
#include "dtwin/util/files.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace dtwin;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

fs::path data_dir() { return DTWIN_DATA_DIR; }

pipeline::PipelineConfig full_config(const std::string& name) {
    auto c = pipeline::parse_config(util::read_file(data_dir() / "full.conf"), data_dir());
    c.outDir = fixture::temp_dir(name);
    return c;
}

// Paper-scale run shared by criteria 5, 7 and 8.
struct FullRun {
    pipeline::PipelineConfig config;
    double seconds = 0;
};

FullRun run_full(const std::string& name) {
    FullRun r{full_config(name), 0};
    auto start = std::chrono::steady_clock::now();
    pipeline::run_all(r.config);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

const FullRun& first_run() {
    static const FullRun r = run_full("accept_a");
    return r;
}

Outcome functional_grouping() {
    auto spec = synth::PlantSpec::full_scale();
    spec.rtlsNoiseSigmaM = 0;
    auto plant = synth::generate(spec);
    auto project = plc::prepare(plc::parse_project(plant.plcXml));
    auto tree = plc::build_call_tree(project);
    auto g = plc::functional_grouping(project, tree).graph;
    double ari = synth::ari(plant.groundTruth.functionalPartition, synth::functional_partition(g, plant.groundTruth));

    // FunctionalGroup tree against the call tree: same node set, same parents.
    bool same = true;
    std::size_t groups = g.query({{graph::NodeKind::FunctionalGroup}, {}, {}}).size();
    same = same && groups == tree.nodes.size() + 1;
    const auto top = graph::node_id(graph::NodeKind::FunctionalGroup, project.name);
    for (const auto& n : tree.nodes) {
        auto id = graph::node_id(graph::NodeKind::FunctionalGroup, n.name);
        if (!g.has_node(id)) {
            same = false;
            continue;
        }
        auto expected = n.callers.size() == 1 ? graph::node_id(graph::NodeKind::FunctionalGroup, tree.nodes[n.callers[0]].name) : top;
        same = same && g.parent(id) == std::optional<std::string>(expected);
    }
    auto sensors = g.query({{graph::NodeKind::Sensor}, {}, {}}).size();
    auto actuators = g.query({{graph::NodeKind::Actuator}, {}, {}}).size();
    bool pass = ari == 1.0 && same && sensors == 35 && actuators == 25;
    return {pass, "ari=" + fmt(ari) + " tree_isomorphic=" + (same ? "yes" : "no") + " sensors=" + std::to_string(sensors) +
                      " actuators=" + std::to_string(actuators)};
}

Outcome dtw_oracle() {
    std::mt19937_64 rng(20240501);
    std::uniform_int_distribution<int> len(1, 50);
    std::uniform_real_distribution<double> coord(-10.0, 10.0);
    int pairs = 0, exact = 0, banded = 0;
    for (int i = 0; i < 400; ++i) {
        bool flat = i % 2 == 0;
        auto series = [&]() {
            std::vector<dynamics::Point3> s(static_cast<std::size_t>(len(rng)));
            for (auto& p : s) p = flat ? dynamics::Point3{coord(rng), 0, 0} : dynamics::Point3{coord(rng), coord(rng), coord(rng)};
            return s;
        };
        auto a = series(), b = series();
        auto sa = dynamics::make_series("a", a), sb = dynamics::make_series("b", b);
        double d = dynamics::dtw_distance(sa, sb);
        ++pairs;
        exact += d == oracle::dtw(a, b);
        banded += dynamics::dtw_distance(sa, sb, std::max(a.size(), b.size())) == d;
    }
    return {exact == pairs && banded == pairs,
            "pairs=" + std::to_string(pairs) + " exact=" + std::to_string(exact) + " banded_equal=" + std::to_string(banded)};
}

Outcome classification() {
    std::ostringstream detail;
    bool pass = true;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        auto spec = synth::PlantSpec::full_scale();
        spec.seed = seed;
        auto t = fixture::build(spec);
        auto r = synth::evaluate(t.merged, t.plant.groundTruth);
        pass = pass && r.classificationAccuracy >= 0.9;
        detail << "seed" << seed << "=" << fmt(r.classificationAccuracy) << " ";
    }
    dynamics::DynamicsConfig cluster;
    cluster.mode = dynamics::GroupingMode::Cluster;
    cluster.cluster = dynamics::KMeans{8, 7};
    auto t = fixture::build(synth::PlantSpec::full_scale(), cluster);
    auto r = synth::evaluate(t.merged, t.plant.groundTruth);
    pass = pass && r.physicalAri > 0;
    detail << "cluster_ari=" << fmt(r.physicalAri);
    return {pass, detail.str()};
}

Outcome mining_oracle() {
    std::mt19937_64 rng(4242);
    mining::MiningParams p;
    p.minSupport = 2;
    p.minNodes = 2;
    p.maxNodes = 12;
    int agree = 0;
    std::string first;
    for (int i = 0; i < 100; ++i) {
        auto g = oracle::random_graph(rng, 12, 3);
        auto problem = oracle::compare_mining(g, p);
        if (problem.empty()) {
            ++agree;
        } else if (first.empty()) {
            first = " first_mismatch=graph" + std::to_string(i) + ":" + problem;
        }
    }
    return {agree == 100, "graphs=100 agree=" + std::to_string(agree) + first};
}

bool has_star(const mining::Pattern& p, std::size_t channels) {
    std::size_t devices = 0, ch = 0;
    for (std::size_t v = 0; v < p.vertex_count(); ++v) {
        for (const auto& e : p.code) {
            if (static_cast<std::size_t>(e.from) == v) {
                devices += e.fromLabel == "IoDevice";
                ch += e.fromLabel == "Channel";
                break;
            }
            if (static_cast<std::size_t>(e.to) == v) {
                devices += e.toLabel == "IoDevice";
                ch += e.toLabel == "Channel";
                break;
            }
        }
    }
    return devices >= 1 && ch >= channels;
}

Outcome template_recovery() {
    const auto& run = first_run();
    auto g = graph::load_graph(run.config.out(pipeline::artifact::twin_graph));
    auto truth = synth::GroundTruth::from_json(util::read_file(run.config.out(pipeline::artifact::ground_truth)));
    auto report = synth::evaluate(g, truth);
    std::int64_t row = 0, place = 0;
    for (const auto& t : truth.templates) (t.name == "row" ? row : place) = t.support;

    // Device exclusion regression on one row of sixteen places (two full input modules).
    auto spec = synth::PlantSpec::mini();
    spec.placesPerRow = 16;
    spec.simDurationS = 120;
    auto plant = fixture::build(spec);
    mining::MiningParams p;
    p.minSupport = 3;
    p.maxNodes = 10;
    auto largest = [&](const mining::ProjectionConfig& pc) {
        auto sel = mining::select_templates(mining::mine(mining::project_for_mining(plant.merged, pc), p));
        std::optional<mining::Pattern> best;
        for (const auto& s : sel) {
            if (!best || s.vertex_count() > best->vertex_count()) best = s;
        }
        return std::make_pair(best, sel);
    };
    mining::ProjectionConfig open;
    open.excludedKinds = {graph::NodeKind::PhysicalGroup};
    auto [top_open, all_open] = largest(open);
    auto [top_default, all_default] = largest(mining::ProjectionConfig{});
    bool dominates = top_open && has_star(*top_open, 8);
    bool absent = true;
    for (const auto& s : all_default) absent = absent && !has_star(s, 1);

    bool pass = report.templateRecovery == 1.0 && row == 8 && dominates && absent;
    return {pass, "recovery=" + fmt(report.templateRecovery) + " row_support=" + std::to_string(row) +
                      " place_support=" + std::to_string(place) + " device_star_dominates_without_exclusion=" +
                      (dominates ? "yes" : "no") + " device_star_absent_with_exclusion=" + (absent ? "yes" : "no")};
}

Outcome aml_round_trip() {
    std::mt19937_64 rng(77);
    int same = 0, deterministic = 0;
    for (int i = 0; i < 50; ++i) {
        auto g = fixture::twin_graph(fixture::build(fixture::random_spec(rng)), 6);
        auto a = aml::export_aml(g);
        same += graph::same_content(aml::import_aml(a.xml), g);
        deterministic += aml::export_aml(g).xml == a.xml;
    }
    return {same == 50 && deterministic == 50,
            "graphs=50 isomorphic=" + std::to_string(same) + " byte_identical=" + std::to_string(deterministic)};
}

Outcome runtime() {
    const auto& run = first_run();
    return {run.seconds < 60.0, "run_all_seconds=" + fmt(run.seconds) + " bound=60"};
}

Outcome determinism() {
    const auto& a = first_run();
    auto b = run_full("accept_b");
    int compared = 0, identical = 0;
    std::string differs;
    for (const auto& entry : fs::directory_iterator(a.config.outDir)) {
        auto name = entry.path().filename().string();
        if (name == pipeline::artifact::timing) continue;
        ++compared;
        if (util::read_file(entry.path()) == util::read_file(b.config.out(name))) {
            ++identical;
        } else {
            differs += " differs=" + name;
        }
    }
    return {compared > 0 && identical == compared,
            "files=" + std::to_string(compared) + " identical=" + std::to_string(identical) + differs};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"functional grouping exactness", functional_grouping},
        {"dtw oracle equivalence", dtw_oracle},
        {"classification accuracy", classification},
        {"mining oracle equivalence", mining_oracle},
        {"template recovery", template_recovery},
        {"aml round trip", aml_round_trip},
        {"end-to-end runtime", runtime},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::cout << "criterion " << i + 1 << ": " << (o.pass ? "PASS" : "FAIL") << " " << criteria[i].first << " | "
                  << o.detail << std::endl;
    }
    return failed ? 1 : 0;
}
