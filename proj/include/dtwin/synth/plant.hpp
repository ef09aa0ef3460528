#pragma once

#include "dtwin/dynamics/series.hpp"
#include "dtwin/mining/gspan.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dtwin::synth {

enum class Granularity { Place, Row, Level };
enum class ExtraScope { Row, Level, Plant };

std::string_view to_string(Granularity g) noexcept;
std::string_view to_string(ExtraScope s) noexcept;

/// "<scope>:<sensor|actuator>:<count>", e.g. "level:sensor:8". Row and level
/// extras sit at the row entrances and fire whenever a tray passes; plant
/// extras sit at the handover station and only fire while every tray rests.
struct ExtraComponent {
    ExtraScope scope = ExtraScope::Row;
    bool sensor = true;
    int count = 1;

    bool operator==(const ExtraComponent&) const = default;
};

struct PlantSpec {
    std::string name = "Warehouse";
    int levels = 1;
    int rowsPerLevel = 1;
    int placesPerRow = 2;
    std::vector<ExtraComponent> extraComponents;
    int trayCount = 1;
    int materialKinds = 1;
    double rtlsRateHz = 10.0;
    double rtlsNoiseSigmaM = 0.0;
    double simDurationS = 300.0;
    std::uint64_t seed = 42;
    Granularity locationGranularity = Granularity::Place;
    double traySpeedMps = 0.5;
    std::int64_t dwellMs = 1000;  // labeled survey dwell per location

    bool operator==(const PlantSpec&) const = default;

    /// 1 level, 1 row, 2 places, 1 tray, seed 42, per-place locations.
    static PlantSpec mini();
    /// 2 levels x 4 rows x 2 places plus lift and safety devices: 35 sensors, 25 actuators.
    static PlantSpec full_scale();
};

/// Throws Error(InvalidSpec) naming the first violated constraint.
void validate(const PlantSpec& spec);

/// key = value lines, '#' comments. Keys mirror the PlantSpec fields; extras
/// are a comma-separated list. Throws Error(InvalidSpec).
PlantSpec parse_plantspec(std::string_view text);
std::string format_plantspec(const PlantSpec& spec);

struct ExpectedTemplate {
    std::string name;  // "place", "row"
    std::int64_t support = 0;
    mining::DfsCode code;
};

struct GroundTruth {
    std::map<std::string, std::string> functionalPartition;  // tag -> group path
    std::map<std::string, std::string> physicalPartition;    // tag -> location label
    std::map<std::string, dynamics::Point3> truePositions;
    std::vector<ExpectedTemplate> templates;
    std::map<std::string, std::string> trays;  // tracker -> material kind
    std::map<std::string, std::int64_t> counts;
    double positionBound = 0.0;  // sampling interval x tray speed, metres

    std::string to_json() const;
    static GroundTruth from_json(std::string_view text);
};

struct GeneratedPlant {
    std::string plcXml;
    std::string ioCsv;
    std::string rtlsCsv;
    std::string labeledRtlsCsv;
    GroundTruth groundTruth;
};

/// Deterministic for a given spec: identical specs give byte-identical outputs.
GeneratedPlant generate(const PlantSpec& spec);

}  // namespace dtwin::synth
