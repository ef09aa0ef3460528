#pragma once

#include "dtwin/dynamics/analysis.hpp"
#include "dtwin/graph/property_graph.hpp"
#include "dtwin/mining/gspan.hpp"
#include "dtwin/mining/mining_graph.hpp"
#include "dtwin/synth/metrics.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dtwin::pipeline {

namespace fs = std::filesystem;

/// Fixed artifact names inside the output directory.
namespace artifact {
inline constexpr std::string_view plc_graph = "plc.dtgraph";
inline constexpr std::string_view dynamics_graph = "dynamics.dtgraph";
inline constexpr std::string_view merged_graph = "merged.dtgraph";
inline constexpr std::string_view twin_graph = "twin.dtgraph";
inline constexpr std::string_view aml = "twin.aml";
inline constexpr std::string_view templates = "templates.txt";
inline constexpr std::string_view summary = "summary.report";
inline constexpr std::string_view dynamics_report = "dynamics.report";
inline constexpr std::string_view metrics = "metrics.report";
inline constexpr std::string_view timing = "timing.report";
// synth outputs
inline constexpr std::string_view plc_xml = "plant.xml";
inline constexpr std::string_view io_csv = "io.csv";
inline constexpr std::string_view rtls_csv = "rtls.csv";
inline constexpr std::string_view labeled_csv = "rtls_labeled.csv";
inline constexpr std::string_view ground_truth = "groundtruth.json";
}  // namespace artifact

struct PipelineConfig {
    std::optional<fs::path> plantspec;  // synth input; run-all synthesizes first when set
    std::optional<fs::path> plcXml;
    std::optional<fs::path> ioCsv;
    std::optional<fs::path> rtlsCsv;
    std::optional<fs::path> labeledRtlsCsv;
    std::optional<fs::path> groundTruth;
    fs::path outDir = "out";
    std::optional<std::uint64_t> seed;  // overrides the plantspec seed and the k-means seed

    dynamics::DynamicsConfig dynamics;
    mining::MiningParams mining;
    mining::ProjectionConfig projection;

    fs::path out(std::string_view name) const { return outDir / name; }
};

/// Flat "key = value" text; relative paths resolve against `baseDir`.
/// Throws Error(Config) for unknown keys or out-of-range values.
PipelineConfig parse_config(std::string_view text, const fs::path& baseDir = {});
void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value, const fs::path& baseDir = {});
void check_ranges(const PipelineConfig& config);

using Log = std::function<void(const std::string&)>;

struct StageTiming {
    std::string stage;
    double seconds = 0.0;
};

/// Each stage reads and writes the declared artifacts only; missing inputs
/// raise Error(Io) naming the path.
void synth(const PipelineConfig& config, const Log& log = {});
void analyze_plc(const PipelineConfig& config, const Log& log = {});
void analyze_dynamics(const PipelineConfig& config, const Log& log = {});
void merge(const PipelineConfig& config, const Log& log = {});
void mine(const PipelineConfig& config, const Log& log = {});
void export_aml(const PipelineConfig& config, const Log& log = {});
synth::MetricsReport evaluate(const PipelineConfig& config, double runtimeSeconds = 0.0, const Log& log = {});

/// analyze-plc, analyze-dynamics, merge, mine, export and (with ground truth)
/// evaluate; synthesizes the inputs first when a plantspec is configured.
/// Writes timing.report and returns the per-stage timings.
std::vector<StageTiming> run_all(const PipelineConfig& config, const Log& log = {});

std::string format_timing(const std::vector<StageTiming>& timings);

}  // namespace dtwin::pipeline
