#include "dtwin/error.hpp"
#include "dtwin/pipeline/pipeline.hpp"
#include "dtwin/util/files.hpp"

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

namespace {

using dtwin::ErrorCode;
namespace pl = dtwin::pipeline;

int exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::Io:
        case ErrorCode::Config:
        case ErrorCode::InvalidSpec:
        case ErrorCode::XmlSyntax:
        case ErrorCode::SchemaViolation:
        case ErrorCode::MalformedRow:
        case ErrorCode::MalformedRecord:
            return 1;
        case ErrorCode::Internal:
            return 3;
        default:
            return 2;
    }
}

void report(std::string_view code, const std::string& reason) {
    std::string flat = reason;
    for (auto& ch : flat) {
        if (ch == '\n') ch = ' ';
    }
    std::cerr << "error: code=" << code << " reason=" << flat << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Digital twin skeleton reconstruction for brownfield plants"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
    std::string log_level = "info";
    std::vector<std::string> settings;
    app.add_option("--config", config_path, "key = value configuration file");
    app.add_option("--seed", seed, "seed for generation and clustering");
    app.add_option("--out-dir", out_dir, "output directory");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error or off")
        ->check(CLI::IsMember({"trace", "debug", "info", "warn", "error", "off"}));
    app.add_option("--set", settings, "override one configuration key (key=value)");

    auto* plc = app.add_subcommand("analyze-plc", "functional grouping from the PLC project");
    auto* dyn = app.add_subcommand("analyze-dynamics", "component positions and physical groups from traces");
    auto* mrg = app.add_subcommand("merge", "merge the PLC and dynamics graphs");
    auto* mine = app.add_subcommand("mine", "mine and mark repeated structures");
    auto* exp = app.add_subcommand("export", "write the AutomationML file");
    auto* syn = app.add_subcommand("synth", "generate a synthetic plant from a plantspec");
    auto* eva = app.add_subcommand("evaluate", "score the twin against ground truth");
    auto* all = app.add_subcommand("run-all", "every analysis stage in order");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        report("Config", e.what());
        return 1;
    }

    auto logger = spdlog::stderr_color_mt("dtwin");
    logger->set_pattern("[%l] %v");
    logger->set_level(spdlog::level::from_str(log_level));
    auto log = [&](const std::string& msg) {
        if (msg.rfind("warning: ", 0) == 0) {
            logger->warn("{}", msg.substr(9));
        } else {
            logger->info("{}", msg);
        }
    };

    try {
        pl::PipelineConfig config;
        if (!config_path.empty()) {
            std::filesystem::path path(config_path);
            if (!std::filesystem::exists(path)) dtwin::fail(ErrorCode::Io, "config file not found: " + config_path);
            config = pl::parse_config(dtwin::util::read_file(path), path.parent_path());
        }
        for (const auto& s : settings) {
            auto eq = s.find('=');
            if (eq == std::string::npos) dtwin::fail(ErrorCode::Config, "--set expects key=value, got '" + s + "'");
            pl::apply_setting(config, s.substr(0, eq), s.substr(eq + 1), std::filesystem::current_path());
        }
        if (seed) config.seed = seed;
        if (!out_dir.empty()) config.outDir = out_dir;
        pl::check_ranges(config);

        if (*plc) pl::analyze_plc(config, log);
        if (*dyn) pl::analyze_dynamics(config, log);
        if (*mrg) pl::merge(config, log);
        if (*mine) pl::mine(config, log);
        if (*exp) pl::export_aml(config, log);
        if (*syn) pl::synth(config, log);
        if (*eva) std::cout << dtwin::synth::format_metrics(pl::evaluate(config, 0.0, log));
        if (*all) std::cout << pl::format_timing(pl::run_all(config, log));
    } catch (const dtwin::Error& e) {
        report(dtwin::to_string(e.code()), e.what());
        return exit_code(e.code());
    } catch (const std::exception& e) {
        report("Internal", e.what());
        return 3;
    }
    return 0;
}
