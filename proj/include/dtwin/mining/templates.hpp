#pragma once

#include "dtwin/graph/property_graph.hpp"
#include "dtwin/mining/gspan.hpp"
#include "dtwin/mining/mining_graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dtwin::mining {

/// Largest patterns first; a pattern is kept unless it is sub-isomorphic to an
/// already kept pattern with equal or greater support. Kept patterns are
/// flagged maximal and returned in mine() order.
std::vector<Pattern> select_templates(const std::vector<Pattern>& patterns);

struct TemplateAnnotation {
    std::string templateId;  // "T1", "T2", ... in template order
    Pattern pattern;
    std::vector<std::string> instanceNodeIds;  // one per distinct occurrence vertex set
};

struct MarkResult {
    graph::PropertyGraph graph;
    std::vector<TemplateAnnotation> annotations;
};

/// Adds TemplatePattern:T<k> under the root and one TemplateInstance per
/// distinct occurrence, contained by the lowest common group of the occurrence
/// and linked to its pattern by InstanceOf. Marking again with the same
/// templates changes nothing. Throws Error(StaleEmbedding) when an embedding
/// names a node that is no longer in the graph.
MarkResult mark_templates(const graph::PropertyGraph& g, const MiningGraph& mg, const std::vector<Pattern>& templates);

struct CollapseStep {
    std::string templateId;
    std::size_t instances = 0;
    std::size_t nodes = 0;  // after collapsing this and every earlier template
    std::size_t edges = 0;
};

struct SummaryReport {
    std::size_t nodesBefore = 0;
    std::size_t edgesBefore = 0;
    std::size_t nodesAfter = 0;
    std::size_t edgesAfter = 0;
    std::vector<CollapseStep> steps;  // inner (smaller) templates first
};

/// Report-only view: the domain graph (template annotations excluded) with
/// every marked instance collapsed into a single node. Edges inside a
/// collapsed node vanish; parallel edges of one kind between two collapsed
/// nodes count once.
SummaryReport summarize(const graph::PropertyGraph& g);

std::string format_summary(const SummaryReport& report);

/// Human-readable report, one block per template.
std::string format_templates(const std::vector<TemplateAnnotation>& annotations);

}  // namespace dtwin::mining
