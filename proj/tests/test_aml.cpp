#include "dtwin/aml/aml.hpp"
#include "dtwin/error.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <random>

using namespace dtwin;
using namespace dtwin::aml;
using graph::EdgeKind;
using graph::NodeKind;

namespace {

std::string replace_first(std::string s, const std::string& from, const std::string& to) {
    auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
}

std::size_t occurrences(const std::string& s, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = s.find(needle); pos != std::string::npos; pos = s.find(needle, pos + 1)) ++n;
    return n;
}

std::size_t non_contains(const graph::PropertyGraph& g) {
    std::size_t n = 0;
    for (const auto& [id, e] : g.edges()) n += e.kind != EdgeKind::Contains;
    return n;
}

}  // namespace

TEST_SUITE("aml") {

TEST_CASE("profile covers every kind") {
    auto p = AmlProfile::standard();
    for (auto k : graph::all_node_kinds()) CHECK(p.roles.contains(k));
}

TEST_CASE("export of the small fixture") {
    const auto& g = fixture::mini().merged;
    auto out = export_aml(g);
    CHECK(out.counts.elements == g.node_count());
    CHECK(out.counts.links == non_contains(g));
    CHECK(occurrences(out.xml, "<InternalElement ") == g.node_count());
    CHECK(occurrences(out.xml, "<InternalLink ") == non_contains(g));
    CHECK(validate_aml(out.xml).empty());
    CHECK(export_aml(g).xml == out.xml);
}

TEST_CASE("templates become system unit classes") {
    auto g = fixture::twin_graph(fixture::mini());
    auto out = export_aml(g);
    auto patterns = g.query({{NodeKind::TemplatePattern}, {}, {}}).size();
    auto instances = g.query({{NodeKind::TemplateInstance}, {}, {}}).size();
    CHECK(out.counts.systemUnitClasses == patterns);
    CHECK(out.counts.templateReferences == instances);
    CHECK(occurrences(out.xml, "<SystemUnitClass ") == patterns);
    CHECK(occurrences(out.xml, "RefBaseSystemUnitPath=") == instances);
    CHECK(out.counts.elements == g.node_count());
}

TEST_CASE("missing root") {
    graph::PropertyGraph g;
    g.add_node(graph::make_node(NodeKind::Sensor, "S", graph::Provenance::PlcAnalysis));
    CHECK_CODE(export_aml(g), ErrorCode::InvalidGraph);
}

TEST_CASE("round trip of the small fixture") {
    auto g = fixture::twin_graph(fixture::mini());
    auto back = import_aml(export_aml(g).xml);
    CHECK(graph::same_content(g, back));
    for (const auto& [id, n] : back.nodes()) CHECK(n.provenance == graph::Provenance::Import);
    CHECK(export_aml(back).xml == export_aml(g).xml);
}

TEST_CASE("import errors") {
    auto xml = export_aml(fixture::mini().merged).xml;
    CHECK_CODE(import_aml(xml.substr(0, xml.size() / 2)), ErrorCode::XmlSyntax);
    CHECK_CODE(import_aml(replace_first(xml, "DigitalTwinRoleClassLib/Sensor", "VendorLib/Sensor")), ErrorCode::UnknownRole);
    auto dangling = replace_first(xml, "RefPartnerSideB=\"DataBlock:Place_1_1:BackedBy\"",
                                  "RefPartnerSideB=\"DataBlock:Deleted:BackedBy\"");
    CHECK_CODE(import_aml(dangling), ErrorCode::DanglingLink);
}

TEST_CASE("validation findings") {
    auto xml = export_aml(fixture::mini().merged).xml;
    CHECK(validate_aml(xml).empty());
    auto dup = replace_first(xml, "ID=\"Sensor:S_occ_1_2\"", "ID=\"Sensor:S_occ_1_1\"");
    auto findings = validate_aml(dup);
    std::size_t ids = 0;
    for (const auto& f : findings) ids += f.rfind("id:", 0) == 0;
    CHECK(ids == 1);
    auto empty = validate_aml("");
    REQUIRE(empty.size() == 1);
    CHECK(empty[0].rfind("syntax", 0) == 0);
    CHECK_FALSE(validate_aml(replace_first(xml, "DigitalTwinRoleClassLib/Sensor", "VendorLib/Sensor")).empty());
}

TEST_CASE("round trip of random generated plants") {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 12; ++i) {
        auto spec = fixture::random_spec(rng);
        CAPTURE(synth::format_plantspec(spec));
        auto g = fixture::twin_graph(fixture::build(spec), 6);
        auto a = export_aml(g);
        CHECK(graph::same_content(import_aml(a.xml), g));
        CHECK(export_aml(g).xml == a.xml);
    }
}

}
