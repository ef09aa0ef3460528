#include "dtwin/dynamics/analysis.hpp"
#include "dtwin/dynamics/classify.hpp"
#include "dtwin/dynamics/series.hpp"
#include "dtwin/dynamics/traces.hpp"
#include "dtwin/error.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace dtwin;
using namespace dtwin::dynamics;

namespace {

std::vector<IoSample> bools(const std::vector<double>& values) {
    std::vector<IoSample> out;
    for (std::size_t i = 0; i < values.size(); ++i) out.push_back({static_cast<std::int64_t>(i + 1), "S", values[i]});
    return out;
}

RtlsSample at(std::int64_t t, double x, const std::string& tracker = "Tray1") { return {t, tracker, x, 0, 0, {}}; }

PositionSeries line(const std::vector<double>& xs) {
    std::vector<Point3> pts;
    for (double x : xs) pts.push_back({x, 0, 0});
    return make_series("q", pts);
}

PositionEstimate known(const std::string& tag, double x, double y = 0) {
    return {tag, {x, y, 0}, 5, EstimateStatus::Known};
}

std::vector<Point3> random_series(std::mt19937_64& rng, bool flat) {
    std::uniform_int_distribution<int> len(1, 50);
    std::uniform_real_distribution<double> coord(-5.0, 5.0);
    std::vector<Point3> out(static_cast<std::size_t>(len(rng)));
    for (auto& p : out) p = flat ? Point3{coord(rng), 0, 0} : Point3{coord(rng), coord(rng), coord(rng)};
    return out;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("trace parsing") {
    auto io = parse_io_trace("timestamp_ms,tag,value\n0,S1,0\n10,S1,1\n20,S2,1\n");
    CHECK(io.samples.size() == 3);
    CHECK(io.warnings.empty());
    try {
        parse_io_trace("timestamp_ms,tag,value\n0,S1,0\n10,S1,high\n");
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedRow);
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
    CHECK_CODE(parse_io_trace("time,tag,value\n"), ErrorCode::MalformedRow);
    auto late = parse_io_trace("timestamp_ms,tag,value\n10,S1,0\n5,S1,1\n");
    CHECK(late.warnings.size() == 1);
    CHECK(late.samples.front().timestampMs == 5);

    auto labeled = parse_rtls_trace("timestamp_ms,tracker_id,x_m,y_m,z_m,location_label\n0,T,1,2,3,L1R1\n100,T,1,2,3,\n");
    REQUIRE(labeled.samples.size() == 2);
    CHECK(labeled.samples[0].locationLabel == std::optional<std::string>("L1R1"));
    CHECK_FALSE(labeled.samples[1].locationLabel.has_value());
    CHECK_CODE(load_io_trace("/nonexistent/io.csv"), ErrorCode::Io);
}

TEST_CASE("generated trace sizes match the ground truth counts") {
    const auto& t = fixture::mini();
    const auto& counts = t.plant.groundTruth.counts;
    CHECK(static_cast<std::int64_t>(parse_io_trace(t.plant.ioCsv).samples.size()) == counts.at("ioSamples"));
    CHECK(static_cast<std::int64_t>(parse_rtls_trace(t.plant.rtlsCsv).samples.size()) == counts.at("rtlsSamples"));
}

TEST_CASE("event detection") {
    auto io = bools({0, 0, 1, 1, 0});
    auto ev = detect_events(io, SignalKind::Bool);
    REQUIRE(ev.events.size() == 2);
    CHECK(ev.events[0] == SignalEvent{3, EventDirection::Rising});
    CHECK(ev.events[1] == SignalEvent{5, EventDirection::Falling});
    CHECK(detect_events(bools({1, 1, 1}), SignalKind::Bool).events.empty());

    std::vector<IoSample> ramp;
    for (int i = 0; i <= 10; ++i) ramp.push_back({i * 10, "A", i * 0.1});
    auto crossing = detect_events(ramp, SignalKind::Analog, 0.45, 0.02);
    REQUIRE(crossing.events.size() == 1);
    CHECK(crossing.events[0].direction == EventDirection::Crossing);
    CHECK(crossing.events[0].timestampMs == 50);

    // wiggles inside the hysteresis band are ignored
    std::vector<IoSample> wiggle{{0, "A", 0.0}, {1, "A", 0.51}, {2, "A", 0.49}, {3, "A", 0.51}, {4, "A", 1.0}};
    CHECK(detect_events(wiggle, SignalKind::Analog, 0.5, 0.1).events.size() == 1);
}

TEST_CASE("event matching") {
    EventSeries ev{"S", {{1000, EventDirection::Rising}}};
    std::vector<RtlsSample> rtls{at(990, 1.0), at(1030, 2.0)};
    auto m = match_events(ev, rtls, 500);
    REQUIRE(m.points.size() == 1);
    CHECK(m.points[0].position.x == 1.0);

    std::vector<RtlsSample> tie{at(990, 1.0, "B"), at(990, 3.0, "A"), at(1010, 2.0)};
    CHECK(match_events(ev, tie, 500).points[0].position.x == 3.0);
    std::vector<RtlsSample> later{at(1010, 2.0), at(1020, 3.0)};
    CHECK(match_events(ev, later, 500).points[0].position.x == 2.0);

    std::vector<RtlsSample> far{at(400, 1.0), at(1600, 2.0)};
    CHECK(match_events(ev, far, 500).points.empty());

    auto window = trajectory_around_events(ev, std::vector<RtlsSample>{at(0, 0), at(900, 1), at(1000, 2), at(1400, 3), at(2000, 4)}, 500);
    CHECK(window.points.size() == 3);
}

TEST_CASE("every sensor event of the small fixture is matched") {
    const auto& t = fixture::mini();
    auto in = fixture::inputs_of(t.plant, t.project);
    for (const auto& tag : in.tags) {
        std::vector<IoSample> mine;
        for (const auto& s : in.io) {
            if (s.tagName == tag.name) mine.push_back(s);
        }
        auto ev = detect_events(mine, tag.signal);
        CHECK(match_events(ev, in.rtls, 500).points.size() == ev.events.size());
    }
}

TEST_CASE("position estimates") {
    auto e = estimate_position(make_series("S", {{0, 0, 0}, {2, 0, 0}}), 2);
    CHECK(e.status == EstimateStatus::Known);
    CHECK(e.mean == Point3{1, 0, 0});
    CHECK(estimate_position(make_series("S", {{1, 1, 1}}), 5).status == EstimateStatus::Unknown);
    auto same = estimate_position(make_series("S", {{1.0, 2.0, 0.5}, {1.0, 2.0, 0.5}, {1.0, 2.0, 0.5}}), 1);
    CHECK(same.mean == Point3{1.0, 2.0, 0.5});
    CHECK(same.matchCount == 3);
}

TEST_CASE("estimates ignore point order and follow translations") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 20; ++round) {
        auto pts = random_series(rng, false);
        auto a = estimate_position(make_series("S", pts), 1);
        std::shuffle(pts.begin(), pts.end(), rng);
        auto b = estimate_position(make_series("S", pts), 1);
        CHECK(a.mean == b.mean);
        for (auto& p : pts) p.x += 4.0;
        auto c = estimate_position(make_series("S", pts), 1);
        CHECK(c.mean.x == doctest::Approx(a.mean.x + 4.0));
    }
}

TEST_CASE("dtw basics") {
    auto a = line({0, 1, 2});
    CHECK(dtw_distance(a, a) == 0.0);
    CHECK(dtw_distance(a, line({0, 2})) == 1.0);
    CHECK_CODE(dtw_distance(a, line({})), ErrorCode::EmptySeries);
    CHECK_CODE(dtw_distance(line({0, 1, 2, 3, 4}), line({0, 1}), 1), ErrorCode::BandTooNarrow);
}

TEST_CASE("dtw matches the full-table oracle") {
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 200; ++i) {
        bool flat = i % 2 == 0;
        auto a = random_series(rng, flat), b = random_series(rng, flat);
        auto sa = make_series("a", a), sb = make_series("b", b);
        CHECK(dtw_distance(sa, sb) == oracle::dtw(a, b));
        std::size_t wide = std::max(a.size(), b.size());
        CHECK(dtw_distance(sa, sb, wide) == dtw_distance(sa, sb));
        std::size_t gap = a.size() > b.size() ? a.size() - b.size() : b.size() - a.size();
        CHECK(dtw_distance(sa, sb, gap) >= dtw_distance(sa, sb));
        CHECK(dtw_distance(sa, sb, gap) == oracle::dtw(a, b, gap));
    }
}

TEST_CASE("nearest neighbour classification") {
    CHECK_CODE(knn_train({}), ErrorCode::EmptyTrainingSet);
    CHECK_CODE(knn_train({{line({}), "x"}}), ErrorCode::EmptyTrainingSet);
    auto model = knn_train({{line({1.0, 1.1, 0.9}), "near"}, {line({3.0, 3.1, 2.9}), "far"}});
    CHECK(knn_classify(model, line({1.0, 1.1, 0.9})).label == "near");
    CHECK(knn_classify(model, line({1.0, 1.1, 0.9})).distance == 0.0);
    CHECK(knn_classify(model, line({1.05, 0.95, 1.0, 1.02})).label == "near");
    auto tie = knn_train({{line({3.0}), "rowB"}, {line({1.0}), "rowA"}});
    auto c = knn_classify(tie, line({2.0}));
    CHECK(c.label == "rowA");
    CHECK(c.distance == 1.0);
    auto banded = knn_train({{line({1, 1}), "a"}}, DtwConfig{0});
    CHECK(knn_classify(banded, line({1, 1, 1, 1})).label == "a");
}

TEST_CASE("segmenting labeled traces") {
    std::vector<RtlsSample> s{{0, "T", 1, 0, 0, "A"}, {100, "T", 1, 0, 0, "A"}, {200, "T", 2, 0, 0, {}},
                              {300, "T", 3, 0, 0, "B"}, {400, "T", 1, 0, 0, "A"}};
    auto seg = segment_labeled_trace(s);
    REQUIRE(seg.size() == 3);
    CHECK(seg[0].label == "A");
    CHECK(seg[0].series.points.size() == 2);
    CHECK(seg[1].label == "B");
    CHECK(seg[2].label == "A");
}

TEST_CASE("clustering") {
    std::vector<PositionEstimate> est{known("a", 1.0), known("b", 1.1), known("c", 0.9),
                                      known("d", 3.0), known("e", 3.1), known("f", 2.9)};
    auto r = cluster_positions(est, KMeans{2, 7});
    CHECK(r.assignment.at("a") == "C1");
    CHECK(r.assignment.at("b") == "C1");
    CHECK(r.assignment.at("c") == "C1");
    CHECK(r.assignment.at("d") == "C2");
    CHECK(r.assignment.at("f") == "C2");
    CHECK(r.centroids.size() == 2);

    auto db = cluster_positions(est, Dbscan{0.5, 2});
    CHECK(db.assignment.at("a") != db.assignment.at("d"));
    CHECK(db.rejected.empty());

    std::vector<PositionEstimate> unknown{{"a", {}, 0, EstimateStatus::Unknown}};
    CHECK_CODE(cluster_positions(unknown, KMeans{}), ErrorCode::InsufficientData);

    std::vector<PositionEstimate> ramp;
    for (int i = 0; i < 10; ++i) ramp.push_back(known("t" + std::to_string(i), i));
    auto split = cluster_positions(ramp, KMeans{2, 3});
    for (int i = 0; i < 10; ++i) CHECK(split.assignment.at("t" + std::to_string(i)) == (i < 5 ? "C1" : "C2"));
}

TEST_CASE("clustering is invariant under input order") {
    std::vector<PositionEstimate> est{known("a", 1.0, 1), known("b", 1.1, 1), known("c", 5, 0),
                                      known("d", 5.2, 0.1), known("e", 9, 3), known("f", 9.1, 3)};
    auto a = cluster_positions(est, KMeans{3, 5});
    std::reverse(est.begin(), est.end());
    auto b = cluster_positions(est, KMeans{3, 5});
    CHECK(a.assignment == b.assignment);
}

TEST_CASE("physical groups") {
    const auto& t = fixture::mini();
    auto groups = t.dynamics.query({{graph::NodeKind::PhysicalGroup}, {}, {}});
    REQUIRE(groups.size() == 2);
    for (const auto& g : groups) {
        std::size_t members = 0;
        for (const auto* e : t.dynamics.in_edges(g.id)) members += e->kind == graph::EdgeKind::MemberOfPhysical;
        CHECK(members == 2);
    }
    auto empty = build_physical_groups({}, {}, {}, "Warehouse");
    CHECK(empty.query({{graph::NodeKind::PhysicalGroup}, {}, {}}).empty());
}

TEST_CASE("raw trajectory queries classify the small fixture too") {
    DynamicsConfig config;
    config.query = QueryMode::RawTrajectory;
    auto t = fixture::build(synth::PlantSpec::mini(), config);
    CHECK(t.dynamics.query({{graph::NodeKind::PhysicalGroup}, {}, {}}).size() == 2);
}

}
