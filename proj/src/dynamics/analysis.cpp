#include "dtwin/dynamics/analysis.hpp"

#include "dtwin/error.hpp"

#include <algorithm>
#include <set>

namespace dtwin::dynamics {

using graph::EdgeKind;
using graph::NodeKind;
using graph::Provenance;

std::vector<TagInfo> tag_infos(const plc::PlcProject& project) {
    std::vector<TagInfo> out;
    for (const auto& t : project.tags) {
        out.push_back({t.name, t.is_input() ? NodeKind::Sensor : NodeKind::Actuator,
                       t.dataType == plc::DataType::Bool ? SignalKind::Bool : SignalKind::Analog});
    }
    std::sort(out.begin(), out.end(), [](const TagInfo& a, const TagInfo& b) { return a.name < b.name; });
    return out;
}

namespace {

graph::Node root_node(const std::string& rootName) {
    return graph::make_node(NodeKind::SystemRoot, rootName, Provenance::DynamicsAnalysis);
}

}  // namespace

graph::PropertyGraph build_physical_groups(const std::map<std::string, std::string>& assignments,
                                           const std::vector<PositionEstimate>& estimates,
                                           const std::vector<TagInfo>& tags, const std::string& rootName) {
    graph::PropertyGraph g;
    const auto root_id = graph::node_id(NodeKind::SystemRoot, rootName);
    g.add_node(root_node(rootName));

    std::map<std::string, NodeKind> kind_of;
    for (const auto& t : tags) kind_of[t.name] = t.kind;
    auto device = [&](const std::string& tag) -> std::string {
        auto it = kind_of.find(tag);
        if (it == kind_of.end()) return {};
        auto id = graph::node_id(it->second, tag);
        if (!g.has_node(id)) g.add_node(graph::make_node(it->second, tag, Provenance::DynamicsAnalysis));
        return id;
    };

    for (const auto& e : estimates) {
        if (e.status != EstimateStatus::Known) continue;
        auto id = device(e.ownerTag);
        if (id.empty()) continue;
        auto& labels = g.mutable_node(id).labels;
        labels[std::string(graph::label::position_x)] = e.mean.x;
        labels[std::string(graph::label::position_y)] = e.mean.y;
        labels[std::string(graph::label::position_z)] = e.mean.z;
    }

    for (const auto& [tag, group] : assignments) {
        auto id = device(tag);
        if (id.empty()) continue;
        auto gid = graph::node_id(NodeKind::PhysicalGroup, group);
        if (!g.has_node(gid)) {
            g.add_node(graph::make_node(NodeKind::PhysicalGroup, group, Provenance::DynamicsAnalysis,
                                        {{std::string(graph::label::domain), std::string("mechanic")}}));
            g.add_edge(graph::make_edge(EdgeKind::Contains, root_id, gid));
        }
        g.add_edge(graph::make_edge(EdgeKind::MemberOfPhysical, id, gid));
    }
    return g;
}

DynamicsResult analyze_dynamics(const DynamicsInputs& in, const DynamicsConfig& config) {
    DynamicsResult result;

    std::map<std::string, std::vector<IoSample>> by_tag;
    for (const auto& s : in.io) by_tag[s.tagName].push_back(s);
    std::set<std::string> known_tags;
    for (const auto& t : in.tags) known_tags.insert(t.name);
    for (const auto& [name, samples] : by_tag) {
        if (!known_tags.contains(name)) result.warnings.push_back("trace tag '" + name + "' is not in the project");
    }

    std::map<std::string, PositionSeries> queries;
    for (const auto& tag : in.tags) {
        auto it = by_tag.find(tag.name);
        std::vector<IoSample> samples = it == by_tag.end() ? std::vector<IoSample>{} : it->second;
        EventSeries events;
        if (tag.signal == SignalKind::Bool) {
            events = detect_events(samples, SignalKind::Bool);
        } else if (!samples.empty()) {
            auto [lo, hi] = std::minmax_element(samples.begin(), samples.end(),
                                                [](const IoSample& a, const IoSample& b) { return a.value < b.value; });
            double range = hi->value - lo->value;
            events = detect_events(samples, SignalKind::Analog, lo->value + range / 2.0, range * config.hysteresisFraction);
        }
        events.tagName = tag.name;
        PositionSeries matched = match_events(events, in.rtls, config.windowMs);
        result.estimates.push_back(estimate_position(matched, config.minMatches));
        if (result.estimates.back().status == EstimateStatus::Known) {
            queries[tag.name] = config.query == QueryMode::RawTrajectory
                                    ? trajectory_around_events(events, in.rtls, config.windowMs)
                                    : std::move(matched);
        }
    }

    std::set<std::string> trackers;
    for (const auto& s : in.rtls) trackers.insert(s.trackerId);

    if (queries.empty()) {
        result.warnings.push_back("no component has a Known position; no physical groups were formed");
    } else if (config.mode == GroupingMode::Classify) {
        NnModel model = knn_train(segment_labeled_trace(in.labeledRtls), config.dtw);
        for (const auto& [tag, q] : queries) {
            auto c = knn_classify(model, q);
            result.assignments[tag] = c.label;
            result.distances[tag] = c.distance;
        }
    } else {
        result.warnings.push_back(
            "clustering mode: positions distributed along continuous trajectories may split differently "
            "and reduce accuracy compared with classification");
        auto clusters = cluster_positions(result.estimates, config.cluster);
        result.assignments = clusters.assignment;
    }

    result.graph = build_physical_groups(result.assignments, result.estimates, in.tags, in.rootName);
    const auto root_id = graph::node_id(NodeKind::SystemRoot, in.rootName);
    for (const auto& t : trackers) {
        result.graph.add_node(graph::make_node(NodeKind::MaterialTracker, t, Provenance::DynamicsAnalysis,
                                               {{std::string(graph::label::domain), std::string("mechanic")}}));
        result.graph.add_edge(graph::make_edge(EdgeKind::Contains, root_id, graph::node_id(NodeKind::MaterialTracker, t)));
    }
    return result;
}

}  // namespace dtwin::dynamics
