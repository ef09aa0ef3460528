#include "dtwin/graph/property_graph.hpp"

#include "dtwin/error.hpp"

#include <algorithm>
#include <array>
#include <deque>
#include <sstream>

namespace dtwin::graph {

namespace {

constexpr std::array<std::pair<NodeKind, std::string_view>, 14> kNodeKindNames{{
    {NodeKind::SystemRoot, "SystemRoot"},
    {NodeKind::Sensor, "Sensor"},
    {NodeKind::Actuator, "Actuator"},
    {NodeKind::SoftwareComponent, "SoftwareComponent"},
    {NodeKind::FunctionBlockType, "FunctionBlockType"},
    {NodeKind::DataBlock, "DataBlock"},
    {NodeKind::Plc, "Plc"},
    {NodeKind::IoDevice, "IoDevice"},
    {NodeKind::Channel, "Channel"},
    {NodeKind::FunctionalGroup, "FunctionalGroup"},
    {NodeKind::PhysicalGroup, "PhysicalGroup"},
    {NodeKind::TemplatePattern, "TemplatePattern"},
    {NodeKind::TemplateInstance, "TemplateInstance"},
    {NodeKind::MaterialTracker, "MaterialTracker"},
}};

constexpr std::array<std::pair<EdgeKind, std::string_view>, 9> kEdgeKindNames{{
    {EdgeKind::Contains, "Contains"},
    {EdgeKind::Reads, "Reads"},
    {EdgeKind::Writes, "Writes"},
    {EdgeKind::Calls, "Calls"},
    {EdgeKind::TypedBy, "TypedBy"},
    {EdgeKind::BackedBy, "BackedBy"},
    {EdgeKind::WiredTo, "WiredTo"},
    {EdgeKind::MemberOfPhysical, "MemberOfPhysical"},
    {EdgeKind::InstanceOf, "InstanceOf"},
}};

constexpr std::array<std::pair<Provenance, std::string_view>, 5> kProvenanceNames{{
    {Provenance::PlcAnalysis, "PlcAnalysis"},
    {Provenance::DynamicsAnalysis, "DynamicsAnalysis"},
    {Provenance::Mining, "Mining"},
    {Provenance::Generator, "Generator"},
    {Provenance::Import, "Import"},
}};

template <typename E, std::size_t N>
std::string_view lookup_name(const std::array<std::pair<E, std::string_view>, N>& table, E value) {
    for (const auto& [e, name] : table) {
        if (e == value) return name;
    }
    return "?";
}

template <typename E, std::size_t N>
std::optional<E> lookup_value(const std::array<std::pair<E, std::string_view>, N>& table,
                              std::string_view text) {
    for (const auto& [e, name] : table) {
        if (name == text) return e;
    }
    return std::nullopt;
}

bool is_field_device(NodeKind kind) {
    return kind == NodeKind::Sensor || kind == NodeKind::Actuator;
}

void check_label_types(const Node& node) {
    auto require = [&](std::string_view key, auto tag, std::string_view type_name) {
        using T = decltype(tag);
        auto it = node.labels.find(key);
        if (it != node.labels.end() && !std::holds_alternative<T>(it->second)) {
            fail(ErrorCode::InvalidNode, "node '" + node.id + "': label '" + std::string(key) +
                                             "' must be " + std::string(type_name));
        }
    };
    require(label::position_x, double{}, "float");
    require(label::position_y, double{}, "float");
    require(label::position_z, double{}, "float");
    require(label::template_id, std::string{}, "string");
    require(label::address, std::string{}, "string");
    require(label::domain, std::string{}, "string");
    require(label::channel_index, std::int64_t{}, "integer");
    require(label::support, std::int64_t{}, "integer");
    if (auto it = node.labels.find(label::domain); it != node.labels.end()) {
        const auto& d = std::get<std::string>(it->second);
        if (d != "mechanic" && d != "electric" && d != "software") {
            fail(ErrorCode::InvalidNode, "node '" + node.id + "': unknown domain '" + d + "'");
        }
    }
}

bool label_matches(const Labels& labels, const LabelPredicate& p) {
    auto it = labels.find(p.key);
    switch (p.op) {
    case LabelPredicate::Op::Exists: return it != labels.end();
    case LabelPredicate::Op::Missing: return it == labels.end();
    case LabelPredicate::Op::Equals: return it != labels.end() && it->second == p.value;
    }
    return false;
}

}  // namespace

std::string_view to_string(NodeKind kind) noexcept { return lookup_name(kNodeKindNames, kind); }
std::string_view to_string(EdgeKind kind) noexcept { return lookup_name(kEdgeKindNames, kind); }
std::string_view to_string(Provenance provenance) noexcept {
    return lookup_name(kProvenanceNames, provenance);
}
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept {
    return lookup_value(kNodeKindNames, text);
}
std::optional<EdgeKind> parse_edge_kind(std::string_view text) noexcept {
    return lookup_value(kEdgeKindNames, text);
}
std::optional<Provenance> parse_provenance(std::string_view text) noexcept {
    return lookup_value(kProvenanceNames, text);
}

const std::vector<NodeKind>& all_node_kinds() {
    static const std::vector<NodeKind> kinds = [] {
        std::vector<NodeKind> out;
        for (const auto& [k, _] : kNodeKindNames) out.push_back(k);
        return out;
    }();
    return kinds;
}

const std::vector<EdgeKind>& all_edge_kinds() {
    static const std::vector<EdgeKind> kinds = [] {
        std::vector<EdgeKind> out;
        for (const auto& [k, _] : kEdgeKindNames) out.push_back(k);
        return out;
    }();
    return kinds;
}

std::string label_to_string(const LabelValue& value) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>) {
                return v;
            } else if constexpr (std::is_same_v<T, bool>) {
                return v ? "true" : "false";
            } else if constexpr (std::is_same_v<T, double>) {
                std::ostringstream os;
                os.precision(17);
                os << v;
                return os.str();
            } else {
                return std::to_string(v);
            }
        },
        value);
}

std::string node_id(NodeKind kind, std::string_view canonical_name) {
    std::string id(to_string(kind));
    id += ':';
    id += canonical_name;
    return id;
}

std::string edge_id(EdgeKind kind, std::string_view source, std::string_view target) {
    std::string id(to_string(kind));
    id += ':';
    id += source;
    id += "->";
    id += target;
    return id;
}

Node make_node(NodeKind kind, std::string name, Provenance provenance, Labels labels) {
    Node n;
    n.id = node_id(kind, name);
    n.kind = kind;
    n.name = std::move(name);
    n.labels = std::move(labels);
    n.provenance = provenance;
    return n;
}

Edge make_edge(EdgeKind kind, std::string source, std::string target, Labels labels) {
    Edge e;
    e.id = edge_id(kind, source, target);
    e.kind = kind;
    e.source = std::move(source);
    e.target = std::move(target);
    e.labels = std::move(labels);
    return e;
}

void PropertyGraph::add_node(Node node) {
    if (node.id.empty()) fail(ErrorCode::InvalidNode, "node id must not be empty");
    if (node.name.empty()) fail(ErrorCode::InvalidNode, "node '" + node.id + "' has an empty name");
    if (nodes_.contains(node.id)) fail(ErrorCode::DuplicateId, "duplicate node id '" + node.id + "'");
    check_label_types(node);
    std::string id = node.id;
    nodes_.emplace(std::move(id), std::move(node));
}

void PropertyGraph::check_edge(const Edge& edge) const {
    if (edge.id.empty()) fail(ErrorCode::InvalidNode, "edge id must not be empty");
    if (edges_.contains(edge.id)) fail(ErrorCode::DuplicateId, "duplicate edge id '" + edge.id + "'");
    const Node* src = find_node(edge.source);
    const Node* dst = find_node(edge.target);
    if (!src || !dst) {
        fail(ErrorCode::MissingEndpoint, "edge '" + edge.id + "' references missing node '" +
                                             (src ? edge.target : edge.source) + "'");
    }
    if (triples_.contains({edge.kind, edge.source, edge.target})) {
        fail(ErrorCode::DuplicateId, "duplicate " + std::string(to_string(edge.kind)) + " edge " +
                                         edge.source + " -> " + edge.target);
    }

    auto violation = [&](std::string_view expected) {
        fail(ErrorCode::KindViolation, std::string(to_string(edge.kind)) + " edge " + edge.source +
                                           " -> " + edge.target + ": expected " + std::string(expected));
    };
    switch (edge.kind) {
    case EdgeKind::Reads:
    case EdgeKind::Writes:
        if (src->kind != NodeKind::SoftwareComponent || !is_field_device(dst->kind))
            violation("SoftwareComponent -> Sensor|Actuator");
        break;
    case EdgeKind::WiredTo:
        if (!is_field_device(src->kind) || dst->kind != NodeKind::Channel)
            violation("Sensor|Actuator -> Channel");
        break;
    case EdgeKind::MemberOfPhysical:
        if (!is_field_device(src->kind) || dst->kind != NodeKind::PhysicalGroup)
            violation("Sensor|Actuator -> PhysicalGroup");
        break;
    case EdgeKind::InstanceOf:
        if (src->kind != NodeKind::TemplateInstance || dst->kind != NodeKind::TemplatePattern)
            violation("TemplateInstance -> TemplatePattern");
        break;
    case EdgeKind::TypedBy:
        if (src->kind != NodeKind::SoftwareComponent || dst->kind != NodeKind::FunctionBlockType)
            violation("SoftwareComponent -> FunctionBlockType");
        break;
    case EdgeKind::BackedBy:
        if (src->kind != NodeKind::SoftwareComponent || dst->kind != NodeKind::DataBlock)
            violation("SoftwareComponent -> DataBlock");
        break;
    case EdgeKind::Calls:
        if (src->kind != NodeKind::SoftwareComponent || dst->kind != NodeKind::SoftwareComponent)
            violation("SoftwareComponent -> SoftwareComponent");
        break;
    case EdgeKind::Contains: {
        if (dst->kind == NodeKind::SystemRoot) violation("a non-root target");
        // Walk up from the source; reaching the target closes a cycle.
        for (std::optional<std::string> cur = std::string(edge.source); cur; cur = parent(*cur)) {
            if (*cur == edge.target) {
                fail(ErrorCode::HierarchyCycle,
                     "Contains " + edge.source + " -> " + edge.target + " would close a cycle");
            }
        }
        if (auto p = parent(edge.target)) {
            fail(ErrorCode::HierarchyCycle, "Contains " + edge.source + " -> " + edge.target +
                                                ": target already contained by " + *p);
        }
        break;
    }
    }
}

void PropertyGraph::add_edge(Edge edge) {
    check_edge(edge);
    triples_.emplace(edge.kind, edge.source, edge.target);
    out_[edge.source].insert(edge.id);
    in_[edge.target].insert(edge.id);
    if (edge.kind == EdgeKind::Contains) parent_[edge.target] = edge.source;
    std::string id = edge.id;
    edges_.emplace(std::move(id), std::move(edge));
}

bool PropertyGraph::has_node(std::string_view id) const { return nodes_.find(id) != nodes_.end(); }

bool PropertyGraph::has_edge(EdgeKind kind, std::string_view source, std::string_view target) const {
    return triples_.contains({kind, std::string(source), std::string(target)});
}

const Node& PropertyGraph::node(std::string_view id) const {
    const Node* n = find_node(id);
    if (!n) fail(ErrorCode::MissingEndpoint, "no node '" + std::string(id) + "'");
    return *n;
}

const Node* PropertyGraph::find_node(std::string_view id) const {
    auto it = nodes_.find(id);
    return it == nodes_.end() ? nullptr : &it->second;
}

Node& PropertyGraph::mutable_node(std::string_view id) {
    auto it = nodes_.find(id);
    if (it == nodes_.end()) fail(ErrorCode::MissingEndpoint, "no node '" + std::string(id) + "'");
    return it->second;
}

std::vector<const Edge*> PropertyGraph::out_edges(std::string_view id) const {
    std::vector<const Edge*> out;
    if (auto it = out_.find(id); it != out_.end()) {
        for (const auto& eid : it->second) out.push_back(&edges_.find(eid)->second);
    }
    return out;
}

std::vector<const Edge*> PropertyGraph::in_edges(std::string_view id) const {
    std::vector<const Edge*> out;
    if (auto it = in_.find(id); it != in_.end()) {
        for (const auto& eid : it->second) out.push_back(&edges_.find(eid)->second);
    }
    return out;
}

std::optional<std::string> PropertyGraph::parent(std::string_view id) const {
    auto it = parent_.find(id);
    if (it == parent_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> PropertyGraph::children(std::string_view id) const {
    std::vector<std::string> out;
    for (const Edge* e : out_edges(id)) {
        if (e->kind == EdgeKind::Contains) out.push_back(e->target);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> PropertyGraph::roots() const {
    std::vector<std::string> out;
    for (const auto& [id, n] : nodes_) {
        if (n.kind == NodeKind::SystemRoot) out.push_back(id);
    }
    return out;
}

std::vector<Node> PropertyGraph::query(const NodeFilter& filter) const {
    std::vector<Node> out;
    for (const auto& [id, n] : nodes_) {
        if (!filter.kinds.empty() && !filter.kinds.contains(n.kind)) continue;
        bool ok = std::all_of(filter.labels.begin(), filter.labels.end(),
                              [&](const LabelPredicate& p) { return label_matches(n.labels, p); });
        if (!ok) continue;
        for (const auto& adj : filter.adjacency) {
            auto has_kind = [&](const std::vector<const Edge*>& edges) {
                return std::any_of(edges.begin(), edges.end(),
                                   [&](const Edge* e) { return e->kind == adj.kind; });
            };
            bool found = false;
            if (adj.direction != Direction::In) found = has_kind(out_edges(id));
            if (!found && adj.direction != Direction::Out) found = has_kind(in_edges(id));
            if (!found) {
                ok = false;
                break;
            }
        }
        if (ok) out.push_back(n);
    }
    return out;
}

std::vector<std::string> PropertyGraph::assembly_violations() const {
    std::vector<std::string> out;
    auto root_ids = roots();
    if (root_ids.size() != 1) {
        out.push_back("expected exactly one SystemRoot node, found " + std::to_string(root_ids.size()));
        return out;
    }
    std::set<std::string, std::less<>> reached{root_ids.front()};
    std::deque<std::string> queue{root_ids.front()};
    while (!queue.empty()) {
        auto cur = std::move(queue.front());
        queue.pop_front();
        for (auto& c : children(cur)) {
            if (reached.insert(c).second) queue.push_back(c);
        }
    }
    for (const auto& [id, _] : nodes_) {
        if (!reached.contains(id)) out.push_back("node '" + id + "' is not reachable from the SystemRoot");
    }
    return out;
}

bool PropertyGraph::operator==(const PropertyGraph& other) const {
    return nodes_ == other.nodes_ && edges_ == other.edges_;
}

PropertyGraph merge(const PropertyGraph& base, const PropertyGraph& overlay) {
    std::map<std::string, Node, std::less<>> nodes = base.nodes();
    for (const auto& [id, n] : overlay.nodes()) {
        auto it = nodes.find(id);
        if (it == nodes.end()) {
            nodes.emplace(id, n);
            continue;
        }
        if (it->second.kind != n.kind) {
            fail(ErrorCode::ConflictingKind, "node '" + id + "' is " +
                                                 std::string(to_string(it->second.kind)) + " in base but " +
                                                 std::string(to_string(n.kind)) + " in overlay");
        }
        it->second.name = n.name;
        for (const auto& [k, v] : n.labels) it->second.labels.insert_or_assign(k, v);
    }

    PropertyGraph out;
    for (auto& [id, n] : nodes) out.add_node(n);

    std::map<std::tuple<EdgeKind, std::string, std::string>, Edge> edges;
    auto collect = [&](const PropertyGraph& g) {
        for (const auto& [id, e] : g.edges()) {
            auto key = std::make_tuple(e.kind, e.source, e.target);
            auto it = edges.find(key);
            if (it == edges.end()) {
                edges.emplace(key, e);
            } else {
                for (const auto& [k, v] : e.labels) it->second.labels.insert_or_assign(k, v);
            }
        }
    };
    collect(base);
    collect(overlay);
    // Contains edges first so that the forest check sees a consistent hierarchy.
    for (int pass = 0; pass < 2; ++pass) {
        for (const auto& [key, e] : edges) {
            if ((e.kind == EdgeKind::Contains) == (pass == 0)) out.add_edge(e);
        }
    }
    return out;
}

bool same_content(const PropertyGraph& a, const PropertyGraph& b) {
    if (a.node_count() != b.node_count() || a.edge_count() != b.edge_count()) return false;
    for (const auto& [id, n] : a.nodes()) {
        const Node* m = b.find_node(id);
        if (!m || m->kind != n.kind || m->name != n.name || m->labels != n.labels) return false;
    }
    for (const auto& [id, e] : a.edges()) {
        if (!b.has_edge(e.kind, e.source, e.target)) return false;
    }
    return true;
}

}  // namespace dtwin::graph
