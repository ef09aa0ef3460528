#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtwin::dynamics {

struct IoSample {
    std::int64_t timestampMs = 0;
    std::string tagName;
    double value = 0.0;  // booleans as 0.0 / 1.0

    bool operator==(const IoSample&) const = default;
};

struct RtlsSample {
    std::int64_t timestampMs = 0;
    std::string trackerId;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    std::optional<std::string> locationLabel;  // labeled training traces only

    bool operator==(const RtlsSample&) const = default;
};

template <typename Sample>
struct TraceLoad {
    std::vector<Sample> samples;  // stable-sorted by timestamp
    std::vector<std::string> warnings;
};

inline constexpr std::string_view kIoHeader = "timestamp_ms,tag,value";
inline constexpr std::string_view kRtlsHeader = "timestamp_ms,tracker_id,x_m,y_m,z_m";
inline constexpr std::string_view kLabeledRtlsHeader = "timestamp_ms,tracker_id,x_m,y_m,z_m,location_label";

/// CSV ingestion. Malformed rows raise Error(MalformedRow) with the 1-based
/// row number (header is row 1); out-of-order clocks only add a warning.
TraceLoad<IoSample> parse_io_trace(std::string_view csv);
TraceLoad<RtlsSample> parse_rtls_trace(std::string_view csv);
TraceLoad<IoSample> load_io_trace(const std::filesystem::path& path);
TraceLoad<RtlsSample> load_rtls_trace(const std::filesystem::path& path);

}  // namespace dtwin::dynamics
