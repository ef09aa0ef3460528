#pragma once

#include "dtwin/dynamics/series.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace dtwin::dynamics {

/// Classic DTW: Euclidean local cost, symmetric unit steps, no normalization.
/// A band limits |i - j| (Sakoe-Chiba) and must cover the length difference.
/// Throws Error(EmptySeries) or Error(BandTooNarrow).
double dtw_distance(const PositionSeries& a, const PositionSeries& b, std::optional<std::size_t> band = std::nullopt);

struct DtwConfig {
    std::optional<std::size_t> band;
};

struct LabeledSeries {
    PositionSeries series;
    std::string label;
};

struct NnModel {
    std::vector<LabeledSeries> training;
    DtwConfig distance;
};

/// Throws Error(EmptyTrainingSet) for an empty set or an empty training series.
NnModel knn_train(std::vector<LabeledSeries> labeledSegments, DtwConfig config = {});

struct Classification {
    std::string label;
    double distance = 0.0;
};

/// 1-NN under DTW; ties resolve to the lexicographically smallest label.
/// With a band, each pair's band is widened to at least the length difference.
Classification knn_classify(const NnModel& model, const PositionSeries& query);

/// Consecutive samples of one tracker sharing a location label become one
/// training segment; unlabeled samples are dropped.
std::vector<LabeledSeries> segment_labeled_trace(std::span<const RtlsSample> labeled);

struct KMeans {
    std::size_t k = 2;
    std::uint64_t seed = 1;
};

struct Dbscan {
    double eps = 0.5;
    std::size_t minPts = 3;
};

using ClusterMethod = std::variant<KMeans, Dbscan>;

struct ClusterResult {
    std::map<std::string, std::string> assignment;  // tag -> cluster label "C1", "C2", ...
    std::vector<std::string> rejected;               // Unknown estimates and DBSCAN noise
    std::vector<Point3> centroids;                   // per cluster label, in label order
};

/// Partitions tags with Known estimates. k-means uses seeded k-means++
/// seeding and Lloyd iterations (<= 300, or until every centroid moves less
/// than 1e-9 m); a point equidistant to two centroids joins the one first in
/// centroid order. Clusters are numbered by centroid order (x, then y, then z).
/// Throws Error(InsufficientData) when no estimate is Known.
ClusterResult cluster_positions(const std::vector<PositionEstimate>& estimates, const ClusterMethod& method);

}  // namespace dtwin::dynamics
