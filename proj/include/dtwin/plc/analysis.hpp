#pragma once

#include "dtwin/graph/property_graph.hpp"
#include "dtwin/plc/project.hpp"

#include <string>
#include <vector>

namespace dtwin::plc {

struct CallTreeNode {
    std::string name;  // OB name or instance DB name
    bool isOrganizationBlock = false;
    std::size_t block = kUnresolved;   // OB index or instance DB index
    std::size_t fbType = kUnresolved;  // FunctionBlockType index, FB instances only
    std::vector<std::size_t> children;
    std::vector<std::size_t> callers;
};

/// Instance-level call structure. Nodes are OBs plus every FB instance reachable
/// from them; a shared instance has more than one caller.
struct CallTree {
    std::vector<CallTreeNode> nodes;
    std::vector<std::size_t> roots;  // OBs, in block order

    std::size_t find(std::string_view name) const;
};

/// Throws Error(RecursiveCall) naming the cycle when calls recurse.
CallTree build_call_tree(const PlcProject& project);

struct GroupingResult {
    graph::PropertyGraph graph;
    std::vector<std::string> warnings;
};

/// Rule-based functional grouping:
///  R1 every FB instance becomes a SoftwareComponent (TypedBy its FB, BackedBy its DB);
///  R2 Read/Write accesses become Reads/Writes edges;
///  R3 %I tags become Sensors, %Q tags become Actuators;
///  R4 a field device joins the group of its sole accessor, else the lowest
///     common ancestor group of all accessors;
///  R5 the call tree induces the FunctionalGroup containment.
/// Hardware becomes Plc/IoDevice/Channel nodes with WiredTo edges.
GroupingResult functional_grouping(const PlcProject& project, const CallTree& tree);

/// parse + prepare + call tree + grouping.
GroupingResult analyze_plc(std::string_view xml);

}  // namespace dtwin::plc
