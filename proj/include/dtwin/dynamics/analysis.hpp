#pragma once

#include "dtwin/dynamics/classify.hpp"
#include "dtwin/dynamics/series.hpp"
#include "dtwin/graph/property_graph.hpp"
#include "dtwin/plc/project.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dtwin::dynamics {

enum class GroupingMode { Classify, Cluster };
enum class QueryMode { MatchedPositions, RawTrajectory };

struct DynamicsConfig {
    std::int64_t windowMs = 500;
    std::int64_t minMatches = 5;
    double hysteresisFraction = 0.02;  // of each analog signal's observed range
    GroupingMode mode = GroupingMode::Classify;
    QueryMode query = QueryMode::MatchedPositions;
    DtwConfig dtw;
    ClusterMethod cluster = KMeans{};
};

/// Field device as the dynamics stage sees it.
struct TagInfo {
    std::string name;
    graph::NodeKind kind = graph::NodeKind::Sensor;  // Sensor or Actuator
    SignalKind signal = SignalKind::Bool;
};

std::vector<TagInfo> tag_infos(const plc::PlcProject& project);

/// One PhysicalGroup per distinct label under the root, a MemberOfPhysical edge
/// per assigned tag, and "position.*" labels on every Known estimate's device.
/// Tags missing from `tags` are skipped.
graph::PropertyGraph build_physical_groups(const std::map<std::string, std::string>& assignments,
                                           const std::vector<PositionEstimate>& estimates,
                                           const std::vector<TagInfo>& tags, const std::string& rootName);

struct DynamicsInputs {
    std::string rootName;  // project name, shared with the PLC stage
    std::vector<TagInfo> tags;
    std::vector<IoSample> io;
    std::vector<RtlsSample> rtls;
    std::vector<RtlsSample> labeledRtls;  // required in Classify mode
};

struct DynamicsResult {
    graph::PropertyGraph graph;
    std::vector<PositionEstimate> estimates;      // tag name order
    std::map<std::string, std::string> assignments;  // tag -> location group
    std::map<std::string, double> distances;         // classification distance per tag
    std::vector<std::string> warnings;
};

/// Event detection, matching, position estimation and grouping for every tag.
DynamicsResult analyze_dynamics(const DynamicsInputs& inputs, const DynamicsConfig& config = {});

}  // namespace dtwin::dynamics
