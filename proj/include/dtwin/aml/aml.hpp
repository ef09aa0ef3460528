#pragma once

#include "dtwin/graph/property_graph.hpp"

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace dtwin::aml {

/// Node-kind driven mapping onto CAEX role classes.
struct AmlProfile {
    std::map<graph::NodeKind, std::string> roles;  // kind -> role class path
    std::string instanceHierarchyName = "DigitalTwin";
    std::string version = "1.0";
    std::string roleLibrary = "DigitalTwinRoleClassLib";
    std::string interfaceLibrary = "DigitalTwinInterfaceClassLib";
    std::string templateLibrary = "Templates";

    /// "<roleLibrary>/<NodeKind>" for every kind.
    static AmlProfile standard();
};

struct AmlCounts {
    std::size_t elements = 0;  // InternalElements plus template SystemUnitClasses
    std::size_t links = 0;
    std::size_t systemUnitClasses = 0;
    std::size_t templateReferences = 0;  // elements carrying RefBaseSystemUnitPath
};

struct AmlExport {
    std::string xml;
    AmlCounts counts;
};

/// Contains becomes element nesting, every other edge one InternalLink named
/// after its kind between interfaces of the same name. Labels become typed
/// Attributes; edge labels and provenance are not written. Throws
/// Error(InvalidGraph) listing the violated invariants.
AmlExport export_aml(const graph::PropertyGraph& g, const AmlProfile& profile = AmlProfile::standard());

/// Inverse of export_aml; every node gets provenance Import. Throws
/// Error(XmlSyntax), Error(UnknownRole) or Error(DanglingLink).
graph::PropertyGraph import_aml(std::string_view xml, const AmlProfile& profile = AmlProfile::standard());

/// Structural findings; empty when the document is valid.
std::vector<std::string> validate_aml(std::string_view xml, const AmlProfile& profile = AmlProfile::standard());

}  // namespace dtwin::aml
