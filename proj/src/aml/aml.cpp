#include "dtwin/aml/aml.hpp"

#include "dtwin/error.hpp"
#include "dtwin/xml/xml.hpp"

#include <charconv>
#include <functional>
#include <set>

namespace dtwin::aml {

using graph::EdgeKind;
using graph::NodeKind;

AmlProfile AmlProfile::standard() {
    AmlProfile p;
    for (auto k : graph::all_node_kinds()) p.roles[k] = p.roleLibrary + "/" + std::string(graph::to_string(k));
    return p;
}

namespace {

using Attrs = std::vector<std::pair<std::string, std::string>>;

const char* type_name(const graph::LabelValue& v) {
    switch (v.index()) {
    case 0: return "xs:string";
    case 1: return "xs:long";
    case 2: return "xs:double";
    default: return "xs:boolean";
    }
}

void write_attributes(xml::Writer& w, const graph::Labels& labels) {
    for (const auto& [key, value] : labels) {
        w.open("Attribute", {{"Name", key}, {"AttributeDataType", type_name(value)}});
        w.leaf("Value", {}, graph::label_to_string(value));
        w.close();
    }
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += items[i];
    }
    return out;
}

}  // namespace

AmlExport export_aml(const graph::PropertyGraph& g, const AmlProfile& profile) {
    auto violations = g.assembly_violations();
    for (auto k : graph::all_node_kinds()) {
        if (!profile.roles.contains(k)) violations.push_back("profile has no role for " + std::string(graph::to_string(k)));
    }
    for (const auto& n : g.query({{NodeKind::TemplatePattern}, {}, {}})) {
        auto p = g.parent(n.id);
        if (!p || g.node(*p).kind != NodeKind::SystemRoot || !g.children(n.id).empty()) {
            violations.push_back("template pattern '" + n.id + "' must be a leaf child of the root");
        }
    }
    if (!violations.empty()) fail(ErrorCode::InvalidGraph, "graph cannot be exported: " + join(violations, "; "));
    const auto root_id = g.roots().front();

    // Interfaces each node needs, by edge kind.
    std::map<std::string, std::set<std::string>> interfaces;
    std::vector<const graph::Edge*> links;
    for (const auto& [id, e] : g.edges()) {
        if (e.kind == EdgeKind::Contains) continue;
        auto name = std::string(graph::to_string(e.kind));
        interfaces[e.source].insert(name);
        interfaces[e.target].insert(name);
        links.push_back(&e);
    }
    std::map<std::string, std::string> instance_of;  // TemplateInstance -> template name
    for (const auto* e : links) {
        if (e->kind == EdgeKind::InstanceOf) instance_of[e->source] = g.node(e->target).name;
    }

    AmlExport out;
    xml::Writer w;
    w.open("CAEXFile", {{"FileName", profile.instanceHierarchyName + ".aml"},
                        {"SchemaVersion", "3.0"},
                        {"xmlns", "http://www.dke.de/CAEX"}});
    w.leaf("AdditionalInformation", {{"AutomationMLVersion", "2.0"}});
    w.leaf("AdditionalInformation", {{"ProfileVersion", profile.version}});

    auto write_interfaces = [&](const std::string& id) {
        auto it = interfaces.find(id);
        if (it == interfaces.end()) return;
        for (const auto& name : it->second) {
            w.leaf("ExternalInterface", {{"Name", name}, {"RefBaseClassPath", profile.interfaceLibrary + "/" + name}});
        }
    };

    w.open("InstanceHierarchy", {{"Name", profile.instanceHierarchyName}, {"Version", profile.version}});
    std::function<void(const std::string&)> element = [&](const std::string& id) {
        const auto& n = g.node(id);
        Attrs attrs{{"ID", n.id}, {"Name", n.name}};
        if (auto it = instance_of.find(id); it != instance_of.end()) {
            attrs.emplace_back("RefBaseSystemUnitPath", profile.templateLibrary + "/" + it->second);
            ++out.counts.templateReferences;
        }
        w.open("InternalElement", attrs);
        ++out.counts.elements;
        write_attributes(w, n.labels);
        write_interfaces(id);
        for (const auto& c : g.children(id)) {
            if (g.node(c).kind != NodeKind::TemplatePattern) element(c);
        }
        if (id == root_id) {
            for (const auto* e : links) {
                auto name = std::string(graph::to_string(e->kind));
                w.leaf("InternalLink", {{"Name", name},
                                        {"RefPartnerSideA", e->source + ":" + name},
                                        {"RefPartnerSideB", e->target + ":" + name}});
                ++out.counts.links;
            }
        }
        w.leaf("RoleRequirements", {{"RefBaseRoleClassPath", profile.roles.at(n.kind)}});
        w.close();
    };
    element(root_id);
    w.close();

    w.open("InterfaceClassLib", {{"Name", profile.interfaceLibrary}, {"Version", profile.version}});
    for (auto k : graph::all_edge_kinds()) {
        if (k != EdgeKind::Contains) w.leaf("InterfaceClass", {{"Name", std::string(graph::to_string(k))}});
    }
    w.close();

    w.open("RoleClassLib", {{"Name", profile.roleLibrary}, {"Version", profile.version}});
    std::set<std::string> role_names;
    for (const auto& [k, path] : profile.roles) {
        auto slash = path.rfind('/');
        role_names.insert(slash == std::string::npos ? path : path.substr(slash + 1));
    }
    for (const auto& r : role_names) w.leaf("RoleClass", {{"Name", r}});
    w.close();

    w.open("SystemUnitClassLib", {{"Name", profile.templateLibrary}, {"Version", profile.version}});
    for (const auto& c : g.children(root_id)) {
        const auto& n = g.node(c);
        if (n.kind != NodeKind::TemplatePattern) continue;
        w.open("SystemUnitClass", {{"ID", n.id}, {"Name", n.name}});
        ++out.counts.elements;
        ++out.counts.systemUnitClasses;
        write_attributes(w, n.labels);
        write_interfaces(n.id);
        w.leaf("SupportedRoleClass", {{"RefRoleClassPath", profile.roles.at(n.kind)}});
        w.close();
    }
    w.close();
    w.close();
    out.xml = w.finish();
    return out;
}

namespace {

struct ParsedElement {
    const xml::Element* element = nullptr;
    std::string id;
    std::string parent;  // empty for top level and template classes
    bool systemUnitClass = false;
    std::set<std::string> interfaces;
};

graph::LabelValue parse_value(const std::string& type, const std::string& text, const std::string& where) {
    auto bad = [&]() -> graph::LabelValue {
        fail(ErrorCode::InvalidGraph, where + ": value '" + text + "' is not a valid " + type);
    };
    if (type == "xs:string") return text;
    if (type == "xs:long") {
        std::int64_t v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size()) return bad();
        return v;
    }
    if (type == "xs:double") {
        double v = 0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size()) return bad();
        return v;
    }
    if (type == "xs:boolean") {
        if (text == "true") return true;
        if (text == "false") return false;
        return bad();
    }
    fail(ErrorCode::InvalidGraph, where + ": unsupported attribute type '" + type + "'");
}

const xml::Element* child(const xml::Element& e, std::string_view name) {
    for (const auto& c : e.children) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

std::string attr(const xml::Element& e, std::string_view key) {
    const auto* v = e.attribute(key);
    return v ? *v : std::string();
}

std::string where(const xml::Element& e) {
    return "<" + e.name + "> at line " + std::to_string(e.line);
}

/// Collects elements, template classes and links in document order.
struct Document {
    std::vector<ParsedElement> elements;
    std::vector<const xml::Element*> links;
    bool hierarchy = false;
};

void collect(const xml::Element& e, const std::string& parent, Document& doc) {
    for (const auto& c : e.children) {
        if (c.name == "InternalElement") {
            ParsedElement pe{&c, attr(c, "ID"), parent, false, {}};
            for (const auto& i : c.children) {
                if (i.name == "ExternalInterface") pe.interfaces.insert(attr(i, "Name"));
            }
            doc.elements.push_back(pe);
            collect(c, pe.id, doc);
        } else if (c.name == "InternalLink") {
            doc.links.push_back(&c);
        }
    }
}

Document read_document(const xml::Element& root) {
    Document doc;
    for (const auto& c : root.children) {
        if (c.name == "InstanceHierarchy") {
            doc.hierarchy = true;
            collect(c, "", doc);
        } else if (c.name == "SystemUnitClassLib") {
            for (const auto& s : c.children) {
                if (s.name != "SystemUnitClass") continue;
                ParsedElement pe{&s, attr(s, "ID"), "", true, {}};
                for (const auto& i : s.children) {
                    if (i.name == "ExternalInterface") pe.interfaces.insert(attr(i, "Name"));
                }
                doc.elements.push_back(pe);
            }
        }
    }
    return doc;
}

std::pair<std::string, std::string> split_side(const std::string& side) {
    auto pos = side.rfind(':');
    if (pos == std::string::npos) return {side, ""};
    return {side.substr(0, pos), side.substr(pos + 1)};
}

}  // namespace

graph::PropertyGraph import_aml(std::string_view text, const AmlProfile& profile) {
    xml::Element root = xml::parse(text);
    if (root.name != "CAEXFile") fail(ErrorCode::InvalidGraph, "document root is <" + root.name + ">, expected <CAEXFile>");
    Document doc = read_document(root);

    std::map<std::string, NodeKind> kind_of_role;
    for (const auto& [k, path] : profile.roles) kind_of_role[path] = k;

    graph::PropertyGraph g;
    std::string root_id;
    std::map<std::string, const ParsedElement*> by_id;
    for (const auto& pe : doc.elements) {
        const auto& e = *pe.element;
        const xml::Element* role = child(e, pe.systemUnitClass ? "SupportedRoleClass" : "RoleRequirements");
        std::string path = role ? attr(*role, pe.systemUnitClass ? "RefRoleClassPath" : "RefBaseRoleClassPath") : "";
        auto it = kind_of_role.find(path);
        if (it == kind_of_role.end()) fail(ErrorCode::UnknownRole, where(e) + ": unknown role class '" + path + "'");
        graph::Node n;
        n.id = pe.id;
        n.kind = it->second;
        n.name = attr(e, "Name");
        n.provenance = graph::Provenance::Import;
        for (const auto& a : e.children) {
            if (a.name != "Attribute") continue;
            const auto* v = child(a, "Value");
            n.labels[attr(a, "Name")] = parse_value(attr(a, "AttributeDataType"), v ? v->text : "", where(a));
        }
        if (n.kind == NodeKind::SystemRoot && root_id.empty()) root_id = n.id;
        g.add_node(std::move(n));
        by_id[pe.id] = &pe;
    }
    for (const auto& pe : doc.elements) {
        if (!pe.parent.empty()) {
            g.add_edge(graph::make_edge(EdgeKind::Contains, pe.parent, pe.id));
        } else if (pe.systemUnitClass && !root_id.empty()) {
            g.add_edge(graph::make_edge(EdgeKind::Contains, root_id, pe.id));
        }
    }
    for (const auto* l : doc.links) {
        auto name = attr(*l, "Name");
        auto kind = graph::parse_edge_kind(name);
        if (!kind || *kind == EdgeKind::Contains) fail(ErrorCode::UnknownRole, where(*l) + ": unknown link kind '" + name + "'");
        auto [a, ia] = split_side(attr(*l, "RefPartnerSideA"));
        auto [b, ib] = split_side(attr(*l, "RefPartnerSideB"));
        for (const auto& [id, iface] : {std::pair{a, ia}, std::pair{b, ib}}) {
            auto it = by_id.find(id);
            if (it == by_id.end() || !it->second->interfaces.contains(iface)) {
                fail(ErrorCode::DanglingLink, where(*l) + ": partner '" + id + ":" + iface + "' does not exist");
            }
        }
        g.add_edge(graph::make_edge(*kind, a, b));
    }
    return g;
}

std::vector<std::string> validate_aml(std::string_view text, const AmlProfile& profile) {
    std::vector<std::string> findings;
    xml::Element root;
    try {
        root = xml::parse(text);
    } catch (const Error& e) {
        findings.push_back("syntax: " + std::string(e.what()));
        return findings;
    }
    if (root.name != "CAEXFile") {
        findings.push_back("structure: document root is <" + root.name + ">, expected <CAEXFile>");
        return findings;
    }
    Document doc = read_document(root);
    if (!doc.hierarchy) findings.push_back("structure: no InstanceHierarchy");

    std::set<std::string> roles;
    for (const auto& [k, path] : profile.roles) roles.insert(path);
    std::map<std::string, const ParsedElement*> by_id;
    for (const auto& pe : doc.elements) {
        const auto& e = *pe.element;
        if (pe.id.empty()) {
            findings.push_back("id: " + where(e) + " has no ID");
        } else if (!by_id.emplace(pe.id, &pe).second) {
            findings.push_back("id: duplicate ID '" + pe.id + "' at " + where(e));
        }
        const xml::Element* role = child(e, pe.systemUnitClass ? "SupportedRoleClass" : "RoleRequirements");
        std::string path = role ? attr(*role, pe.systemUnitClass ? "RefRoleClassPath" : "RefBaseRoleClassPath") : "";
        if (!roles.contains(path)) findings.push_back("role: " + where(e) + " has unmapped role '" + path + "'");
    }
    for (const auto* l : doc.links) {
        for (const char* side : {"RefPartnerSideA", "RefPartnerSideB"}) {
            auto [id, iface] = split_side(attr(*l, side));
            auto it = by_id.find(id);
            if (it == by_id.end() || !it->second->interfaces.contains(iface)) {
                findings.push_back("link: " + where(*l) + " " + side + " '" + attr(*l, side) + "' does not resolve");
            }
        }
        auto kind = graph::parse_edge_kind(attr(*l, "Name"));
        if (!kind || *kind == EdgeKind::Contains) findings.push_back("link: " + where(*l) + " has unknown kind '" + attr(*l, "Name") + "'");
    }
    return findings;
}

}  // namespace dtwin::aml
