#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <variant>
#include <vector>

namespace dtwin::graph {

enum class NodeKind {
    SystemRoot,
    Sensor,
    Actuator,
    SoftwareComponent,
    FunctionBlockType,
    DataBlock,
    Plc,
    IoDevice,
    Channel,
    FunctionalGroup,
    PhysicalGroup,
    TemplatePattern,
    TemplateInstance,
    MaterialTracker,
};

enum class EdgeKind {
    Contains,
    Reads,
    Writes,
    Calls,
    TypedBy,
    BackedBy,
    WiredTo,
    MemberOfPhysical,
    InstanceOf,
};

enum class Provenance { PlcAnalysis, DynamicsAnalysis, Mining, Generator, Import };

std::string_view to_string(NodeKind kind) noexcept;
std::string_view to_string(EdgeKind kind) noexcept;
std::string_view to_string(Provenance provenance) noexcept;
std::optional<NodeKind> parse_node_kind(std::string_view text) noexcept;
std::optional<EdgeKind> parse_edge_kind(std::string_view text) noexcept;
std::optional<Provenance> parse_provenance(std::string_view text) noexcept;

const std::vector<NodeKind>& all_node_kinds();
const std::vector<EdgeKind>& all_edge_kinds();

using LabelValue = std::variant<std::string, std::int64_t, double, bool>;
using Labels = std::map<std::string, LabelValue, std::less<>>;

std::string label_to_string(const LabelValue& value);

// Reserved label vocabulary. Keys not listed here are free-form.
namespace label {
inline constexpr std::string_view domain = "domain";  // mechanic | electric | software
inline constexpr std::string_view position_x = "position.x";
inline constexpr std::string_view position_y = "position.y";
inline constexpr std::string_view position_z = "position.z";
inline constexpr std::string_view address = "address";
inline constexpr std::string_view channel_index = "channelIndex";
inline constexpr std::string_view template_id = "templateId";
inline constexpr std::string_view support = "support";
}  // namespace label

struct Node {
    std::string id;
    NodeKind kind = NodeKind::SystemRoot;
    std::string name;
    Labels labels;
    Provenance provenance = Provenance::PlcAnalysis;

    bool operator==(const Node&) const = default;
};

struct Edge {
    std::string id;
    EdgeKind kind = EdgeKind::Contains;
    std::string source;
    std::string target;
    Labels labels;

    bool operator==(const Edge&) const = default;
};

/// Stable identity shared by every analysis stage: "<kind>:<canonical name>".
std::string node_id(NodeKind kind, std::string_view canonical_name);
std::string edge_id(EdgeKind kind, std::string_view source, std::string_view target);

Node make_node(NodeKind kind, std::string name, Provenance provenance, Labels labels = {});
Edge make_edge(EdgeKind kind, std::string source, std::string target, Labels labels = {});

enum class Direction { Out, In, Any };

struct LabelPredicate {
    enum class Op { Exists, Missing, Equals };
    std::string key;
    Op op = Op::Exists;
    LabelValue value{};
};

struct AdjacencyPredicate {
    EdgeKind kind = EdgeKind::Contains;
    Direction direction = Direction::Any;
};

struct NodeFilter {
    std::set<NodeKind> kinds;  // empty: any kind
    std::vector<LabelPredicate> labels;
    std::vector<AdjacencyPredicate> adjacency;
};

/// Labeled directed multigraph with a Contains forest.
///
/// Nodes and edges are keyed by id and iterate in id order, which makes every
/// traversal and every serialization deterministic. Mutations validate the
/// per-edge kind constraints and keep Contains acyclic with at most one parent.
class PropertyGraph {
public:
    void add_node(Node node);
    void add_edge(Edge edge);

    bool has_node(std::string_view id) const;
    bool has_edge(EdgeKind kind, std::string_view source, std::string_view target) const;
    const Node& node(std::string_view id) const;
    const Node* find_node(std::string_view id) const;
    Node& mutable_node(std::string_view id);

    const std::map<std::string, Node, std::less<>>& nodes() const { return nodes_; }
    const std::map<std::string, Edge, std::less<>>& edges() const { return edges_; }
    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edges_.size(); }

    /// Edge ids leaving/entering a node, in edge id order.
    std::vector<const Edge*> out_edges(std::string_view id) const;
    std::vector<const Edge*> in_edges(std::string_view id) const;

    std::optional<std::string> parent(std::string_view id) const;
    std::vector<std::string> children(std::string_view id) const;
    std::vector<std::string> roots() const;  // SystemRoot ids

    std::vector<Node> query(const NodeFilter& filter) const;

    /// Violations of the assembled-graph invariants: exactly one SystemRoot and
    /// every other node reachable from it through Contains. Empty when valid.
    std::vector<std::string> assembly_violations() const;

    bool operator==(const PropertyGraph& other) const;

private:
    void check_edge(const Edge& edge) const;

    std::map<std::string, Node, std::less<>> nodes_;
    std::map<std::string, Edge, std::less<>> edges_;
    std::set<std::tuple<EdgeKind, std::string, std::string>> triples_;
    std::map<std::string, std::set<std::string>, std::less<>> out_;
    std::map<std::string, std::set<std::string>, std::less<>> in_;
    std::map<std::string, std::string, std::less<>> parent_;
};

/// Union of two fragments using the shared identity scheme. Overlay labels win.
PropertyGraph merge(const PropertyGraph& base, const PropertyGraph& overlay);

/// Same node/edge sets with identical kinds, names, labels and endpoints;
/// provenance and edge ids are ignored.
bool same_content(const PropertyGraph& a, const PropertyGraph& b);

}  // namespace dtwin::graph
