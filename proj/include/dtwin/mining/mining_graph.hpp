#pragma once

#include "dtwin/graph/property_graph.hpp"

#include <set>
#include <string>
#include <vector>

namespace dtwin::mining {

struct MiningVertex {
    std::string id;     // node id in the source graph
    std::string label;  // kind, optionally with projected properties
};

struct MiningEdge {
    std::size_t src = 0;  // vertex indices
    std::size_t dst = 0;
    std::string label;  // EdgeKind
};

struct ProjectionConfig {
    std::set<graph::NodeKind> excludedKinds{graph::NodeKind::Plc, graph::NodeKind::IoDevice, graph::NodeKind::Channel,
                                            graph::NodeKind::PhysicalGroup};
    std::vector<std::string> labelProjection;  // label keys appended to the vertex label
};

struct MiningGraph {
    std::vector<MiningVertex> vertices;  // id order
    std::vector<MiningEdge> edges;       // (src, dst, label) order
    ProjectionConfig derivation;

    /// Vertex index lists of the connected components, each sorted.
    std::vector<std::vector<std::size_t>> components() const;
};

/// Vertices: nodes reached from the SystemRoot through Contains edges, where
/// the walk does not enter excluded kinds or template annotations. Edges: every
/// edge between two kept vertices.
MiningGraph project_for_mining(const graph::PropertyGraph& g, const ProjectionConfig& config = {});

/// Builds a mining graph directly, mostly for tests. Vertex ids are "v<i>".
MiningGraph make_mining_graph(const std::vector<std::string>& vertexLabels,
                              const std::vector<MiningEdge>& edges);

}  // namespace dtwin::mining
