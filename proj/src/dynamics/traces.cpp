#include "dtwin/dynamics/traces.hpp"

#include "dtwin/error.hpp"
#include "dtwin/util/files.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace dtwin::dynamics {

namespace {

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

[[noreturn]] void bad_row(std::size_t row, const std::string& what) {
    fail(ErrorCode::MalformedRow, "row " + std::to_string(row) + ": " + what);
}

template <typename T>
T number(std::string_view field, std::size_t row, const char* name) {
    T v{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
        bad_row(row, std::string("field '") + name + "' is not numeric: '" + std::string(field) + "'");
    }
    if constexpr (std::is_floating_point_v<T>) {
        if (!std::isfinite(v)) bad_row(row, std::string("field '") + name + "' is not finite");
    }
    return v;
}

/// Calls `on_row(fields, row)` for each data row after validating the header.
template <typename F>
void for_each_row(std::string_view csv, std::initializer_list<std::string_view> headers, F&& on_row) {
    std::size_t row = 0;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < csv.size()) {
        auto end = csv.find('\n', pos);
        std::string_view line = csv.substr(pos, end == std::string_view::npos ? std::string_view::npos : end - pos);
        pos = end == std::string_view::npos ? csv.size() : end + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++row;
        if (!header_seen) {
            if (std::find(headers.begin(), headers.end(), line) == headers.end()) {
                bad_row(row, "unexpected header '" + std::string(line) + "'");
            }
            header_seen = true;
            continue;
        }
        if (line.empty()) continue;
        on_row(split(line), row);
    }
    if (!header_seen) bad_row(1, "missing header");
}

template <typename Sample>
void sort_by_time(TraceLoad<Sample>& load) {
    bool monotonic = std::is_sorted(load.samples.begin(), load.samples.end(),
                                    [](const auto& a, const auto& b) { return a.timestampMs < b.timestampMs; });
    if (!monotonic) {
        load.warnings.push_back("NonMonotonicClock: samples were not in time order and have been sorted");
        std::stable_sort(load.samples.begin(), load.samples.end(),
                         [](const auto& a, const auto& b) { return a.timestampMs < b.timestampMs; });
    }
}

}  // namespace

TraceLoad<IoSample> parse_io_trace(std::string_view csv) {
    TraceLoad<IoSample> out;
    for_each_row(csv, {kIoHeader}, [&](const std::vector<std::string_view>& f, std::size_t row) {
        if (f.size() != 3) bad_row(row, "expected 3 fields, got " + std::to_string(f.size()));
        if (f[1].empty()) bad_row(row, "empty tag name");
        out.samples.push_back(
            IoSample{number<std::int64_t>(f[0], row, "timestamp_ms"), std::string(f[1]), number<double>(f[2], row, "value")});
    });
    sort_by_time(out);
    return out;
}

TraceLoad<RtlsSample> parse_rtls_trace(std::string_view csv) {
    TraceLoad<RtlsSample> out;
    for_each_row(csv, {kRtlsHeader, kLabeledRtlsHeader}, [&](const std::vector<std::string_view>& f, std::size_t row) {
        if (f.size() != 5 && f.size() != 6) bad_row(row, "expected 5 or 6 fields, got " + std::to_string(f.size()));
        if (f[1].empty()) bad_row(row, "empty tracker id");
        RtlsSample s{number<std::int64_t>(f[0], row, "timestamp_ms"), std::string(f[1]), number<double>(f[2], row, "x_m"),
                     number<double>(f[3], row, "y_m"), number<double>(f[4], row, "z_m"), std::nullopt};
        if (f.size() == 6 && !f[5].empty()) s.locationLabel = std::string(f[5]);
        out.samples.push_back(std::move(s));
    });
    sort_by_time(out);
    return out;
}

TraceLoad<IoSample> load_io_trace(const std::filesystem::path& path) {
    return parse_io_trace(util::read_file(path));
}

TraceLoad<RtlsSample> load_rtls_trace(const std::filesystem::path& path) {
    return parse_rtls_trace(util::read_file(path));
}

}  // namespace dtwin::dynamics
