#pragma once

#include "dtwin/dynamics/traces.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dtwin::dynamics {

struct Point3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    bool operator==(const Point3&) const = default;
};

/// Euclidean distance; the DTW local cost.
double distance(const Point3& a, const Point3& b);

enum class EventDirection { Rising, Falling, Crossing };

struct SignalEvent {
    std::int64_t timestampMs = 0;
    EventDirection direction = EventDirection::Rising;

    bool operator==(const SignalEvent&) const = default;
};

struct EventSeries {
    std::string tagName;
    std::vector<SignalEvent> events;  // strictly increasing timestamps
};

enum class SignalKind { Bool, Analog };

struct TimedPoint {
    std::int64_t timestampMs = 0;
    Point3 position;

    bool operator==(const TimedPoint&) const = default;
};

struct PositionSeries {
    std::string ownerTag;
    std::vector<TimedPoint> points;
};

PositionSeries make_series(std::string owner, const std::vector<Point3>& points);

/// Bool: Rising on 0->1, Falling on 1->0 (values >= 0.5 count as 1).
/// Analog: a Crossing whenever the signal leaves the band
/// [threshold - hysteresis/2, threshold + hysteresis/2] on the opposite side.
/// Samples sharing a timestamp collapse to the last one.
EventSeries detect_events(std::span<const IoSample> samples, SignalKind kind, double threshold = 0.5,
                          double hysteresis = 0.0);

/// For each event, the RTLS sample (any tracker) nearest in time within the
/// window; ties go to the earlier sample, then the smaller tracker id.
/// Events without a sample in the window are skipped. `rtls` must be time-sorted.
PositionSeries match_events(const EventSeries& events, std::span<const RtlsSample> rtls, std::int64_t windowMs);

/// Every RTLS sample within the window of some event, in time order, without
/// duplicates: the raw-trajectory query used when classifying trajectories.
PositionSeries trajectory_around_events(const EventSeries& events, std::span<const RtlsSample> rtls,
                                        std::int64_t windowMs);

enum class EstimateStatus { Known, Unknown };

struct PositionEstimate {
    std::string ownerTag;
    Point3 mean;
    std::int64_t matchCount = 0;
    EstimateStatus status = EstimateStatus::Unknown;
};

/// Arithmetic mean of the matched points; Unknown below `minMatches` (>= 1).
/// Each coordinate is summed in sorted order so the mean is independent of
/// point order.
PositionEstimate estimate_position(const PositionSeries& series, std::int64_t minMatches);

}  // namespace dtwin::dynamics
