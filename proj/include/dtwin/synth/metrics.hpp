#pragma once

#include "dtwin/graph/property_graph.hpp"
#include "dtwin/mining/gspan.hpp"
#include "dtwin/synth/plant.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace dtwin::synth {

using Partition = std::map<std::string, std::string>;  // element -> cluster label

/// Adjusted Rand index from the contingency table. Both partitions must cover
/// the same elements (Error(UniverseMismatch)). Two single-cluster partitions
/// score 1.
double ari(const Partition& a, const Partition& b);

/// F1 of "same cluster" pairs of `predicted` against `truth`; 1 when neither
/// has a co-clustered pair.
double pairwise_f1(const Partition& truth, const Partition& predicted);

/// Fraction of expected templates matched by an isomorphic mined pattern with
/// the expected support; 1 for an empty expectation.
double template_recovery(const std::vector<ExpectedTemplate>& expected, const std::vector<mining::Pattern>& mined);

struct MetricsReport {
    double ari = 0.0;  // functional partition
    double physicalAri = 0.0;
    double pairwiseF1 = 0.0;  // physical partition
    double classificationAccuracy = 0.0;
    double templateRecovery = 0.0;
    double runtimeSeconds = 0.0;
    std::int64_t components = 0;
    std::int64_t knownComponents = 0;
    std::int64_t physicalGroups = 0;
    std::int64_t templatesExpected = 0;
    std::int64_t templatesMined = 0;
};

/// Partitions read back from a pipeline graph: the FunctionalGroup path of
/// every tag and the PhysicalGroup of every grouped tag.
Partition functional_partition(const graph::PropertyGraph& g, const GroundTruth& truth);
Partition physical_partition(const graph::PropertyGraph& g, const GroundTruth& truth);

/// Mined templates as recorded by TemplatePattern nodes.
std::vector<mining::Pattern> marked_templates(const graph::PropertyGraph& g);

MetricsReport evaluate(const graph::PropertyGraph& g, const GroundTruth& truth, double runtimeSeconds = 0.0);

/// "key = value" lines with fixed keys. Runtime is left out unless asked for,
/// so that reports of identical runs stay identical.
std::string format_metrics(const MetricsReport& report, bool withRuntime = false);

}  // namespace dtwin::synth
