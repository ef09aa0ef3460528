#pragma once

#include "dtwin/dynamics/analysis.hpp"
#include "dtwin/graph/property_graph.hpp"
#include "dtwin/mining/templates.hpp"
#include "dtwin/plc/analysis.hpp"
#include "dtwin/synth/plant.hpp"

#include <filesystem>
#include <random>
#include <string>

namespace fixture {

// Generated plant pushed through the PLC and dynamics stages in memory.
struct Twin {
    dtwin::synth::GeneratedPlant plant;
    dtwin::plc::PlcProject project;
    dtwin::graph::PropertyGraph plc;
    dtwin::graph::PropertyGraph dynamics;
    dtwin::graph::PropertyGraph merged;
};

inline dtwin::dynamics::DynamicsInputs inputs_of(const dtwin::synth::GeneratedPlant& plant,
                                                 const dtwin::plc::PlcProject& project) {
    dtwin::dynamics::DynamicsInputs in;
    in.rootName = project.name;
    in.tags = dtwin::dynamics::tag_infos(project);
    in.io = dtwin::dynamics::parse_io_trace(plant.ioCsv).samples;
    in.rtls = dtwin::dynamics::parse_rtls_trace(plant.rtlsCsv).samples;
    in.labeledRtls = dtwin::dynamics::parse_rtls_trace(plant.labeledRtlsCsv).samples;
    return in;
}

inline Twin build(const dtwin::synth::PlantSpec& spec, const dtwin::dynamics::DynamicsConfig& config = {}) {
    Twin t;
    t.plant = dtwin::synth::generate(spec);
    t.project = dtwin::plc::prepare(dtwin::plc::parse_project(t.plant.plcXml));
    t.plc = dtwin::plc::analyze_plc(t.plant.plcXml).graph;
    t.dynamics = dtwin::dynamics::analyze_dynamics(inputs_of(t.plant, t.project), config).graph;
    t.merged = dtwin::graph::merge(t.plc, t.dynamics);
    return t;
}

inline const Twin& mini() {
    static const Twin t = build(dtwin::synth::PlantSpec::mini());
    return t;
}

// Small valid plant with random shape, extras, noise and granularity.
inline dtwin::synth::PlantSpec random_spec(std::mt19937_64& rng) {
    using dtwin::synth::ExtraScope;
    auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1)); };
    dtwin::synth::PlantSpec s;
    s.levels = pick(1, 2);
    s.rowsPerLevel = pick(1, 3);
    s.placesPerRow = pick(1, 3);
    s.trayCount = pick(1, 2);
    s.materialKinds = pick(1, 2);
    s.simDurationS = 120;
    s.rtlsNoiseSigmaM = pick(0, 1) * 0.05;
    s.seed = rng();
    s.locationGranularity = static_cast<dtwin::synth::Granularity>(pick(0, s.levels > 1 ? 2 : 1));
    if (pick(0, 1)) s.extraComponents.push_back({ExtraScope::Row, true, pick(1, 2)});
    if (s.levels > 1 && pick(0, 1)) s.extraComponents.push_back({ExtraScope::Level, false, pick(1, 3)});
    if (pick(0, 1)) s.extraComponents.push_back({ExtraScope::Plant, true, 1});
    return s;
}

// Merged graph with mined templates marked.
inline dtwin::graph::PropertyGraph twin_graph(const Twin& t, std::size_t maxNodes = 8) {
    auto mg = dtwin::mining::project_for_mining(t.merged);
    dtwin::mining::MiningParams p;
    p.maxNodes = maxNodes;
    auto templates = dtwin::mining::select_templates(dtwin::mining::mine(mg, p));
    return dtwin::mining::mark_templates(t.merged, mg, templates).graph;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("dtwin_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixture

#define CHECK_CODE(expr, expected)                                   \
    do {                                                             \
        bool thrown_ = false;                                        \
        try {                                                        \
            (void)(expr);                                            \
        } catch (const dtwin::Error& e_) {                           \
            thrown_ = true;                                          \
            CHECK_MESSAGE(e_.code() == (expected), e_.what());       \
        }                                                            \
        CHECK_MESSAGE(thrown_, "expected an error from " #expr);     \
    } while (0)
