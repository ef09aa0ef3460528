#include "dtwin/dynamics/series.hpp"

#include "dtwin/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>

namespace dtwin::dynamics {

double distance(const Point3& a, const Point3& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    const double dz = a.z - b.z;
    return std::sqrt(dx * dx + dy * dy + dz * dz);
}

PositionSeries make_series(std::string owner, const std::vector<Point3>& points) {
    PositionSeries s;
    s.ownerTag = std::move(owner);
    for (std::size_t i = 0; i < points.size(); ++i) s.points.push_back({static_cast<std::int64_t>(i), points[i]});
    return s;
}

EventSeries detect_events(std::span<const IoSample> samples, SignalKind kind, double threshold, double hysteresis) {
    EventSeries out;
    if (samples.empty()) return out;
    out.tagName = samples.front().tagName;

    std::vector<IoSample> dedup;
    for (const auto& s : samples) {
        if (!dedup.empty() && dedup.back().timestampMs == s.timestampMs) {
            dedup.back() = s;
        } else {
            dedup.push_back(s);
        }
    }

    if (kind == SignalKind::Bool) {
        bool state = dedup.front().value >= 0.5;
        for (std::size_t i = 1; i < dedup.size(); ++i) {
            bool v = dedup[i].value >= 0.5;
            if (v != state) {
                out.events.push_back({dedup[i].timestampMs, v ? EventDirection::Rising : EventDirection::Falling});
                state = v;
            }
        }
        return out;
    }

    const double upper = threshold + hysteresis / 2.0;
    const double lower = threshold - hysteresis / 2.0;
    bool high = dedup.front().value >= threshold;
    for (std::size_t i = 1; i < dedup.size(); ++i) {
        double v = dedup[i].value;
        if (!high && v >= upper) {
            high = true;
            out.events.push_back({dedup[i].timestampMs, EventDirection::Crossing});
        } else if (high && (hysteresis > 0.0 ? v <= lower : v < threshold)) {
            high = false;
            out.events.push_back({dedup[i].timestampMs, EventDirection::Crossing});
        }
    }
    return out;
}

namespace {

/// Index range [first, last) of samples with |t - center| <= window.
std::pair<std::size_t, std::size_t> window_range(std::span<const RtlsSample> rtls, std::int64_t center,
                                                 std::int64_t window) {
    auto lo = std::lower_bound(rtls.begin(), rtls.end(), center - window,
                               [](const RtlsSample& s, std::int64_t t) { return s.timestampMs < t; });
    auto hi = std::upper_bound(lo, rtls.end(), center + window,
                               [](std::int64_t t, const RtlsSample& s) { return t < s.timestampMs; });
    return {static_cast<std::size_t>(lo - rtls.begin()), static_cast<std::size_t>(hi - rtls.begin())};
}

}  // namespace

PositionSeries match_events(const EventSeries& events, std::span<const RtlsSample> rtls, std::int64_t windowMs) {
    PositionSeries out;
    out.ownerTag = events.tagName;
    for (const auto& ev : events.events) {
        auto [first, last] = window_range(rtls, ev.timestampMs, windowMs);
        const RtlsSample* best = nullptr;
        std::int64_t best_dt = 0;
        for (std::size_t i = first; i < last; ++i) {
            const auto& s = rtls[i];
            std::int64_t dt = std::llabs(s.timestampMs - ev.timestampMs);
            bool better = !best || dt < best_dt ||
                          (dt == best_dt && (s.timestampMs < best->timestampMs ||
                                             (s.timestampMs == best->timestampMs && s.trackerId < best->trackerId)));
            if (better) {
                best = &s;
                best_dt = dt;
            }
        }
        if (best) out.points.push_back({best->timestampMs, {best->x, best->y, best->z}});
    }
    return out;
}

PositionSeries trajectory_around_events(const EventSeries& events, std::span<const RtlsSample> rtls,
                                        std::int64_t windowMs) {
    std::set<std::size_t> picked;
    for (const auto& ev : events.events) {
        auto [first, last] = window_range(rtls, ev.timestampMs, windowMs);
        for (std::size_t i = first; i < last; ++i) picked.insert(i);
    }
    PositionSeries out;
    out.ownerTag = events.tagName;
    for (std::size_t i : picked) out.points.push_back({rtls[i].timestampMs, {rtls[i].x, rtls[i].y, rtls[i].z}});
    return out;
}

PositionEstimate estimate_position(const PositionSeries& series, std::int64_t minMatches) {
    if (minMatches < 1) fail(ErrorCode::InvalidArgument, "minMatches must be at least 1");
    PositionEstimate e;
    e.ownerTag = series.ownerTag;
    e.matchCount = static_cast<std::int64_t>(series.points.size());
    if (e.matchCount < minMatches) return e;

    auto sorted_mean = [&](auto coord) {
        std::vector<double> v;
        v.reserve(series.points.size());
        for (const auto& p : series.points) v.push_back(coord(p.position));
        std::sort(v.begin(), v.end());
        double sum = 0.0;
        for (double x : v) sum += x;
        return sum / static_cast<double>(v.size());
    };
    e.mean = {sorted_mean([](const Point3& p) { return p.x; }), sorted_mean([](const Point3& p) { return p.y; }),
              sorted_mean([](const Point3& p) { return p.z; })};
    e.status = EstimateStatus::Known;
    return e;
}

}  // namespace dtwin::dynamics
