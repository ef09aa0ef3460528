#include "dtwin/error.hpp"
#include "dtwin/synth/metrics.hpp"
#include "dtwin/synth/plant.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace dtwin;
using namespace dtwin::synth;

namespace {

Partition part(const std::vector<std::pair<std::string, std::string>>& items) { return {items.begin(), items.end()}; }

std::vector<int> ids(const Partition& p) {
    std::map<std::string, int> label;
    std::vector<int> out;
    for (const auto& [e, l] : p) out.push_back(label.emplace(l, static_cast<int>(label.size())).first->second);
    return out;
}

}  // namespace

TEST_SUITE("synth") {

TEST_CASE("small plant") {
    auto plant = generate(PlantSpec::mini());
    const auto& c = plant.groundTruth.counts;
    CHECK(c.at("sensors") == 2);
    CHECK(c.at("actuators") == 2);
    CHECK(c.at("fbInstances") == 3);
    CHECK(plant.groundTruth.functionalPartition.size() == 4);
    CHECK(plant.groundTruth.physicalPartition.at("S_occ_1_1") == "L1R1P1");
    CHECK(plant.groundTruth.physicalPartition.at("A_eject_1_2") == "L1R1P2");
    CHECK(plant.groundTruth.templates.size() == 1);
    CHECK(plant.groundTruth.templates.at(0).support == 2);
}

TEST_CASE("full-scale plant") {
    auto plant = generate(PlantSpec::full_scale());
    const auto& c = plant.groundTruth.counts;
    CHECK(c.at("sensors") == 35);
    CHECK(c.at("actuators") == 25);
    std::set<std::string> rows;
    for (const auto& [tag, l] : plant.groundTruth.physicalPartition) rows.insert(l);
    CHECK(rows.count("L1R1") == 1);
    CHECK(plant.groundTruth.trays.size() == 4);
    std::int64_t row_support = 0, place_support = 0;
    for (const auto& t : plant.groundTruth.templates) {
        if (t.name == "row") row_support = t.support;
        if (t.name == "place") place_support = t.support;
    }
    CHECK(row_support == 8);
    CHECK(place_support >= 16);
}

TEST_CASE("generation is deterministic") {
    auto spec = PlantSpec::full_scale();
    spec.simDurationS = 300;
    auto a = generate(spec), b = generate(spec);
    CHECK(a.plcXml == b.plcXml);
    CHECK(a.ioCsv == b.ioCsv);
    CHECK(a.rtlsCsv == b.rtlsCsv);
    CHECK(a.labeledRtlsCsv == b.labeledRtlsCsv);
    CHECK(a.groundTruth.to_json() == b.groundTruth.to_json());
    spec.seed += 1;
    CHECK(generate(spec).rtlsCsv != a.rtlsCsv);
}

TEST_CASE("plantspec text") {
    auto spec = PlantSpec::full_scale();
    CHECK(parse_plantspec(format_plantspec(spec)) == spec);
    auto parsed = parse_plantspec("# comment\nlevels = 2\nextraComponents = row:sensor:2, plant:actuator:1\n");
    CHECK(parsed.levels == 2);
    REQUIRE(parsed.extraComponents.size() == 2);
    CHECK(parsed.extraComponents[0] == ExtraComponent{ExtraScope::Row, true, 2});
    CHECK(parsed.extraComponents[1] == ExtraComponent{ExtraScope::Plant, false, 1});
    CHECK_CODE(parse_plantspec("levels = many\n"), ErrorCode::InvalidSpec);
    CHECK_CODE(parse_plantspec("colour = blue\n"), ErrorCode::InvalidSpec);
    CHECK_CODE(parse_plantspec("extraComponents = row:sensor\n"), ErrorCode::InvalidSpec);
    CHECK_CODE(parse_plantspec("locationGranularity = Shelf\n"), ErrorCode::InvalidSpec);
}

TEST_CASE("invalid specs") {
    auto bad = [](auto change) {
        auto s = PlantSpec::mini();
        change(s);
        CHECK_CODE(validate(s), ErrorCode::InvalidSpec);
        CHECK_CODE(generate(s), ErrorCode::InvalidSpec);
    };
    bad([](PlantSpec& s) { s.levels = 0; });
    bad([](PlantSpec& s) { s.placesPerRow = 0; });
    bad([](PlantSpec& s) { s.trayCount = 0; });
    bad([](PlantSpec& s) { s.rtlsRateHz = 0; });
    bad([](PlantSpec& s) { s.rtlsNoiseSigmaM = -1; });
    bad([](PlantSpec& s) { s.extraComponents.push_back({ExtraScope::Level, true, 1}); });
    validate(PlantSpec::mini());
    validate(PlantSpec::full_scale());
}

TEST_CASE("ground truth json") {
    auto truth = generate(PlantSpec::mini()).groundTruth;
    auto back = GroundTruth::from_json(truth.to_json());
    CHECK(back.to_json() == truth.to_json());
    CHECK(back.functionalPartition == truth.functionalPartition);
    CHECK(back.templates.at(0).code == truth.templates.at(0).code);
    CHECK_CODE(GroundTruth::from_json("{"), ErrorCode::MalformedRecord);
    CHECK_CODE(GroundTruth::from_json("{\"counts\": 3}"), ErrorCode::MalformedRecord);
}

TEST_CASE("ground truth agrees with the generated project") {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 5; ++i) {
        auto spec = fixture::random_spec(rng);
        auto plant = generate(spec);
        auto project = plc::prepare(plc::parse_project(plant.plcXml));
        CHECK(project.tags.size() == plant.groundTruth.functionalPartition.size());
        CHECK(static_cast<std::int64_t>(project.tags.size()) ==
              plant.groundTruth.counts.at("sensors") + plant.groundTruth.counts.at("actuators"));
        for (const auto& t : project.tags) {
            CHECK(plant.groundTruth.physicalPartition.contains(t.name));
            CHECK(plant.groundTruth.truePositions.contains(t.name));
        }
    }
}

TEST_CASE("noise-free estimates stay within the sampling bound") {
    auto t = fixture::build(PlantSpec::mini());
    const auto& truth = t.plant.groundTruth;
    std::size_t checked = 0;
    for (const auto& [id, n] : t.dynamics.nodes()) {
        auto x = n.labels.find(graph::label::position_x);
        if (x == n.labels.end()) continue;
        const auto& p = truth.truePositions.at(n.name);
        double dx = std::get<double>(x->second) - p.x;
        double dy = std::get<double>(n.labels.at(std::string(graph::label::position_y))) - p.y;
        double dz = std::get<double>(n.labels.at(std::string(graph::label::position_z))) - p.z;
        CHECK(std::sqrt(dx * dx + dy * dy + dz * dz) <= truth.positionBound + 1e-12);
        ++checked;
    }
    CHECK(checked == 4);
}

TEST_CASE("adjusted rand index") {
    auto a = part({{"a", "1"}, {"b", "1"}, {"c", "2"}, {"d", "2"}});
    auto b = part({{"a", "1"}, {"b", "2"}, {"c", "1"}, {"d", "2"}});
    CHECK(ari(a, a) == 1.0);
    CHECK(ari(a, b) == doctest::Approx(oracle::ari_pairs({0, 0, 1, 1}, {0, 1, 0, 1})));
    CHECK(ari(a, b) == doctest::Approx(-0.5));
    auto renamed = part({{"a", "x"}, {"b", "x"}, {"c", "y"}, {"d", "y"}});
    CHECK(ari(a, renamed) == 1.0);
    CHECK(ari(part({{"a", "1"}, {"b", "1"}}), part({{"a", "2"}, {"b", "2"}})) == 1.0);
    CHECK_CODE(ari(a, part({{"a", "1"}})), ErrorCode::UniverseMismatch);
}

TEST_CASE("adjusted rand index matches pair counting") {
    std::mt19937_64 rng(8);
    for (int round = 0; round < 200; ++round) {
        int n = 2 + static_cast<int>(rng() % 19);
        int ka = 1 + static_cast<int>(rng() % 5), kb = 1 + static_cast<int>(rng() % 5);
        Partition a, b, c;
        for (int i = 0; i < n; ++i) {
            auto e = "e" + std::to_string(i);
            a[e] = std::to_string(rng() % ka);
            b[e] = std::to_string(rng() % kb);
            c[e] = "L" + b[e] + "!";
        }
        CHECK(ari(a, b) == doctest::Approx(oracle::ari_pairs(ids(a), ids(b))).epsilon(1e-12));
        CHECK(ari(a, b) == doctest::Approx(ari(a, c)));
        CHECK(ari(a, b) == doctest::Approx(ari(b, a)));
    }
}

TEST_CASE("pairwise f1") {
    auto a = part({{"a", "1"}, {"b", "1"}, {"c", "2"}, {"d", "2"}});
    CHECK(pairwise_f1(a, a) == 1.0);
    CHECK(pairwise_f1(a, part({{"a", "1"}, {"b", "2"}, {"c", "1"}, {"d", "2"}})) == 0.0);
    // predicted pairs {ab, ac, bc}; true pairs {ab, cd}; precision 1/3, recall 1/2
    CHECK(pairwise_f1(a, part({{"a", "1"}, {"b", "1"}, {"c", "1"}, {"d", "2"}})) == doctest::Approx(0.4));
    CHECK(pairwise_f1(part({{"a", "1"}, {"b", "2"}}), part({{"a", "x"}, {"b", "y"}})) == 1.0);
}

TEST_CASE("template recovery") {
    auto truth = generate(PlantSpec::mini()).groundTruth;
    mining::Pattern p;
    p.code = truth.templates.at(0).code;
    p.support = truth.templates.at(0).support;
    CHECK(template_recovery(truth.templates, {p}) == 1.0);
    CHECK(template_recovery(truth.templates, {}) == 0.0);
    p.support += 1;
    CHECK(template_recovery(truth.templates, {p}) == 0.0);
    CHECK(template_recovery({}, {}) == 1.0);
}

TEST_CASE("evaluation of the small fixture") {
    const auto& t = fixture::mini();
    auto g = fixture::twin_graph(t, 12);
    auto r = evaluate(g, t.plant.groundTruth, 0.5);
    CHECK(r.ari == 1.0);
    CHECK(r.classificationAccuracy == 1.0);
    CHECK(r.templateRecovery == 1.0);
    CHECK(r.physicalAri == 1.0);
    CHECK(r.pairwiseF1 == 1.0);
    CHECK(r.components == 4);
    CHECK(r.knownComponents == 4);
    CHECK(r.physicalGroups == 2);
    auto text = format_metrics(r);
    CHECK(text.find("ari = 1.000000\n") == 0);
    CHECK(text.find("runtimeSeconds") == std::string::npos);
    CHECK(format_metrics(r, true).find("runtimeSeconds = 0.500000") != std::string::npos);
}

}
