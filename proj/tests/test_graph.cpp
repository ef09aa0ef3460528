#include "dtwin/error.hpp"
#include "dtwin/graph/persistence.hpp"
#include "dtwin/graph/property_graph.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <fstream>

using namespace dtwin;
using namespace dtwin::graph;

namespace {

PropertyGraph small_graph() {
    PropertyGraph g;
    g.add_node(make_node(NodeKind::SystemRoot, "P", Provenance::PlcAnalysis));
    g.add_node(make_node(NodeKind::FunctionalGroup, "G", Provenance::PlcAnalysis));
    g.add_node(make_node(NodeKind::SoftwareComponent, "C", Provenance::PlcAnalysis));
    g.add_node(make_node(NodeKind::Sensor, "S", Provenance::PlcAnalysis, {{"address", std::string("%I0.0")}}));
    g.add_edge(make_edge(EdgeKind::Contains, "SystemRoot:P", "FunctionalGroup:G"));
    g.add_edge(make_edge(EdgeKind::Contains, "FunctionalGroup:G", "SoftwareComponent:C"));
    g.add_edge(make_edge(EdgeKind::Contains, "FunctionalGroup:G", "Sensor:S"));
    g.add_edge(make_edge(EdgeKind::Reads, "SoftwareComponent:C", "Sensor:S"));
    return g;
}

}  // namespace

TEST_SUITE("graph") {

TEST_CASE("add_node on empty graph") {
    PropertyGraph g;
    g.add_node(make_node(NodeKind::SystemRoot, "P", Provenance::PlcAnalysis));
    CHECK(g.node_count() == 1);
    CHECK(g.node("SystemRoot:P").name == "P");
}

TEST_CASE("duplicate ids") {
    PropertyGraph g = small_graph();
    CHECK_CODE(g.add_node(make_node(NodeKind::Sensor, "S", Provenance::PlcAnalysis)), ErrorCode::DuplicateId);
    CHECK_CODE(g.add_edge(make_edge(EdgeKind::Reads, "SoftwareComponent:C", "Sensor:S")), ErrorCode::DuplicateId);
    CHECK(g == small_graph());
}

TEST_CASE("edge constraints") {
    PropertyGraph g = small_graph();
    g.add_node(make_node(NodeKind::Sensor, "T", Provenance::PlcAnalysis));
    CHECK_CODE(g.add_edge(make_edge(EdgeKind::Reads, "Sensor:S", "Sensor:T")), ErrorCode::KindViolation);
    CHECK_CODE(g.add_edge(make_edge(EdgeKind::Reads, "SoftwareComponent:C", "Sensor:Nope")),
               ErrorCode::MissingEndpoint);
    CHECK_CODE(g.add_edge(make_edge(EdgeKind::Contains, "Sensor:S", "FunctionalGroup:G")), ErrorCode::HierarchyCycle);
    CHECK_CODE(g.add_edge(make_edge(EdgeKind::Contains, "SystemRoot:P", "Sensor:S")), ErrorCode::HierarchyCycle);
    g.add_edge(make_edge(EdgeKind::Reads, "SoftwareComponent:C", "Sensor:T"));
    CHECK(g.has_edge(EdgeKind::Reads, "SoftwareComponent:C", "Sensor:T"));
}

TEST_CASE("contains cycle of two") {
    PropertyGraph g;
    g.add_node(make_node(NodeKind::FunctionalGroup, "A", Provenance::PlcAnalysis));
    g.add_node(make_node(NodeKind::FunctionalGroup, "B", Provenance::PlcAnalysis));
    g.add_edge(make_edge(EdgeKind::Contains, "FunctionalGroup:A", "FunctionalGroup:B"));
    CHECK_CODE(g.add_edge(make_edge(EdgeKind::Contains, "FunctionalGroup:B", "FunctionalGroup:A")),
               ErrorCode::HierarchyCycle);
}

TEST_CASE("invalid nodes") {
    PropertyGraph g;
    CHECK_CODE(g.add_node(make_node(NodeKind::Sensor, "", Provenance::PlcAnalysis)), ErrorCode::InvalidNode);
    CHECK_CODE(g.add_node(make_node(NodeKind::Sensor, "X", Provenance::PlcAnalysis, {{"domain", std::string("magic")}})),
               ErrorCode::InvalidNode);
    CHECK(g.node_count() == 0);
}

TEST_CASE("query on the small fixture") {
    PropertyGraph mini = fixture::mini().merged;
    CHECK(mini.query({{NodeKind::Sensor}, {}, {}}).size() == 2);
    CHECK(mini.query({{}, {{std::string(label::template_id)}}, {}}).empty());
    auto grouped = mini.query({{}, {}, {{EdgeKind::MemberOfPhysical, Direction::Out}}});
    REQUIRE(grouped.size() == 4);
    for (const auto& n : grouped) CHECK((n.kind == NodeKind::Sensor || n.kind == NodeKind::Actuator));
    auto again = mini.query({{}, {}, {{EdgeKind::MemberOfPhysical, Direction::Out}}});
    CHECK(grouped == again);
    for (std::size_t i = 1; i < grouped.size(); ++i) CHECK(grouped[i - 1].id < grouped[i].id);
}

TEST_CASE("label predicates") {
    PropertyGraph g = small_graph();
    auto hit = g.query({{}, {{"address", LabelPredicate::Op::Equals, std::string("%I0.0")}}, {}});
    REQUIRE(hit.size() == 1);
    CHECK(hit[0].id == "Sensor:S");
    CHECK(g.query({{NodeKind::Sensor}, {{"address", LabelPredicate::Op::Missing}}, {}}).empty());
}

TEST_CASE("merge identity, idempotence, conflicts") {
    const auto& t = fixture::mini();
    CHECK(merge(t.merged, PropertyGraph{}) == t.merged);
    CHECK(merge(PropertyGraph{}, t.merged) == t.merged);
    CHECK(merge(t.merged, t.merged) == t.merged);
    for (const auto& s : t.merged.query({{NodeKind::Sensor}, {}, {}})) {
        CHECK(s.labels.contains(label::position_x));
        bool read = false;
        for (const auto* e : t.merged.in_edges(s.id)) read = read || e->kind == EdgeKind::Reads;
        CHECK(read);
    }
    CHECK(t.merged.assembly_violations().empty());

    PropertyGraph a, b;
    a.add_node(Node{"X:1", NodeKind::Sensor, "1", {}, Provenance::PlcAnalysis});
    b.add_node(Node{"X:1", NodeKind::Actuator, "1", {}, Provenance::PlcAnalysis});
    CHECK_CODE(merge(a, b), ErrorCode::ConflictingKind);
}

TEST_CASE("merge associativity with disjoint labels") {
    PropertyGraph a = small_graph(), b, c;
    b.add_node(make_node(NodeKind::Sensor, "S", Provenance::DynamicsAnalysis, {{"position.x", 1.0}}));
    c.add_node(make_node(NodeKind::Sensor, "S", Provenance::DynamicsAnalysis, {{"position.y", 2.0}}));
    c.add_node(make_node(NodeKind::SystemRoot, "P", Provenance::DynamicsAnalysis));
    CHECK(same_content(merge(merge(a, b), c), merge(a, merge(b, c))));
}

TEST_CASE("persistence round trip") {
    const auto& g = fixture::mini().merged;
    auto text = serialize_graph(g);
    CHECK(deserialize_graph(text) == g);
    CHECK(serialize_graph(deserialize_graph(text)) == text);

    // record order does not matter
    std::vector<std::string> lines;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    std::reverse(lines.begin(), lines.end());
    std::string reversed;
    for (const auto& l : lines) reversed += l + "\n";
    CHECK(deserialize_graph(reversed) == g);

    auto dir = fixture::temp_dir("graph");
    save_graph(g, dir / "g.dtgraph");
    CHECK(load_graph(dir / "g.dtgraph") == g);
}

TEST_CASE("persistence errors") {
    auto text = serialize_graph(small_graph());
    auto truncated = text.substr(0, text.size() / 2);
    try {
        deserialize_graph(truncated);
        FAIL("no error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MalformedRecord);
        CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
    CHECK_CODE(deserialize_graph(std::string("{\"recordType\":\"node\"}\n")), ErrorCode::MalformedRecord);
    CHECK_CODE(load_graph("/nonexistent/dir/g.dtgraph"), ErrorCode::Io);
}

TEST_CASE("empty graph persists to nothing") {
    auto text = serialize_graph(PropertyGraph{});
    CHECK(text.empty());
    CHECK(deserialize_graph(text).node_count() == 0);
}

}
