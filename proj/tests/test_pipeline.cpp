#include "dtwin/error.hpp"
#include "dtwin/pipeline/pipeline.hpp"
#include "dtwin/synth/plant.hpp"
#include "dtwin/util/files.hpp"
#include "fixtures.hpp"

#include <doctest.h>

using namespace dtwin;
using namespace dtwin::pipeline;
namespace fs = std::filesystem;

namespace {

const std::vector<std::string_view> kOutputs{artifact::plc_graph, artifact::dynamics_graph, artifact::merged_graph,
                                             artifact::twin_graph, artifact::aml,           artifact::templates,
                                             artifact::summary,    artifact::dynamics_report, artifact::metrics,
                                             artifact::timing};

PipelineConfig mini_config(const std::string& name) {
    auto dir = fixture::temp_dir(name);
    util::write_file(dir / "mini.plantspec", synth::format_plantspec(synth::PlantSpec::mini()));
    return parse_config("plantspec = mini.plantspec\noutDir = out\n", dir);
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("config parsing") {
    auto c = parse_config("# comment\nplcXml = in/plant.xml\nmode = Cluster\nk = 4\nband = 3\nminSupport = 3\n"
                          "excludedKinds = Plc, Channel\nseed = 9\n",
                          "/base");
    CHECK(c.plcXml == fs::path("/base/in/plant.xml"));
    CHECK(c.dynamics.mode == dynamics::GroupingMode::Cluster);
    CHECK(std::get<dynamics::KMeans>(c.dynamics.cluster).k == 4);
    CHECK(c.dynamics.dtw.band == std::optional<std::size_t>(3));
    CHECK(c.mining.minSupport == 3);
    CHECK(c.projection.excludedKinds == std::set<graph::NodeKind>{graph::NodeKind::Plc, graph::NodeKind::Channel});
    CHECK(c.seed == std::optional<std::uint64_t>(9));
    CHECK(parse_config("excludedKinds = none\n").projection.excludedKinds.empty());
    CHECK(parse_config("outDir = /abs/out\n", "/base").outDir == fs::path("/abs/out"));

    CHECK_CODE(parse_config("colour = red\n"), ErrorCode::Config);
    CHECK_CODE(parse_config("minSupport = 1\n"), ErrorCode::Config);
    CHECK_CODE(parse_config("maxNodes = 40\n"), ErrorCode::Config);
    CHECK_CODE(parse_config("windowMs = soon\n"), ErrorCode::Config);
    CHECK_CODE(parse_config("just words\n"), ErrorCode::Config);
    CHECK_CODE(parse_config("excludedKinds = Gadget\n"), ErrorCode::Config);
}

TEST_CASE("run-all on the small fixture") {
    auto c = mini_config("run_all");
    std::vector<std::string> messages;
    auto timings = run_all(c, [&](const std::string& m) { messages.push_back(m); });
    for (auto name : kOutputs) CHECK_MESSAGE(fs::exists(c.out(name)), name);
    CHECK(timings.front().stage == "synth");
    CHECK(timings.back().stage == "evaluate");
    CHECK_FALSE(messages.empty());
    auto metrics = util::read_file(c.out(artifact::metrics));
    CHECK(metrics.find("ari = 1.000000") != std::string::npos);
    CHECK(metrics.find("classificationAccuracy = 1.000000") != std::string::npos);
    CHECK(metrics.find("templateRecovery = 1.000000") != std::string::npos);
    CHECK(util::read_file(c.out(artifact::timing)).find("total = ") != std::string::npos);
}

TEST_CASE("run-all equals the stages run one by one") {
    auto a = mini_config("stages_a");
    run_all(a);
    auto b = mini_config("stages_b");
    pipeline::synth(b);
    analyze_plc(b);
    analyze_dynamics(b);
    merge(b);
    mine(b);
    export_aml(b);
    evaluate(b);
    for (auto name : kOutputs) {
        if (name == artifact::timing) continue;
        CHECK_MESSAGE(util::read_file(a.out(name)) == util::read_file(b.out(name)), name);
    }
}

TEST_CASE("missing inputs") {
    PipelineConfig c;
    auto dir = fixture::temp_dir("missing");
    c.outDir = dir / "out";
    c.plcXml = dir / "plant.xml";
    util::write_file(*c.plcXml, synth::generate(synth::PlantSpec::mini()).plcXml);
    c.ioCsv = dir / "absent_io.csv";
    c.rtlsCsv = dir / "absent_rtls.csv";
    try {
        run_all(c);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Io);
        CHECK(std::string(e.what()).find("absent_io.csv") != std::string::npos);
    }
    CHECK_FALSE(fs::exists(c.out(artifact::plc_graph)));
    CHECK_CODE(merge(c), ErrorCode::Io);
    CHECK_CODE(pipeline::synth(c), ErrorCode::Config);
}

TEST_CASE("cluster mode without labeled traces") {
    auto c = mini_config("cluster");
    pipeline::synth(c);
    fs::remove(c.out(artifact::labeled_csv));
    c.dynamics.mode = dynamics::GroupingMode::Cluster;
    c.dynamics.cluster = dynamics::KMeans{2, 1};
    run_all(c);
    CHECK(util::read_file(c.out(artifact::dynamics_report)).find("group = C") != std::string::npos);
}

TEST_CASE("seed override") {
    auto a = mini_config("seed_a");
    a.seed = 5;
    pipeline::synth(a);
    auto b = mini_config("seed_b");
    pipeline::synth(b);
    CHECK(util::read_file(a.out(artifact::plc_xml)) == util::read_file(b.out(artifact::plc_xml)));
    CHECK(util::read_file(a.out(artifact::io_csv)) != util::read_file(b.out(artifact::io_csv)));
    auto spec = synth::PlantSpec::mini();
    spec.seed = 5;
    CHECK(util::read_file(a.out(artifact::io_csv)) == synth::generate(spec).ioCsv);
}

TEST_CASE("shipped configurations parse") {
    auto mini = parse_config(util::read_file(fs::path(DTWIN_DATA_DIR) / "mini.conf"), DTWIN_DATA_DIR);
    CHECK(mini.plantspec.has_value());
    auto spec = synth::parse_plantspec(util::read_file(*mini.plantspec));
    CHECK(spec == synth::PlantSpec::mini());
    auto full = parse_config(util::read_file(fs::path(DTWIN_DATA_DIR) / "full.conf"), DTWIN_DATA_DIR);
    CHECK(synth::parse_plantspec(util::read_file(*full.plantspec)) == synth::PlantSpec::full_scale());
}

}
