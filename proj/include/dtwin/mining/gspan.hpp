#pragma once

#include "dtwin/mining/mining_graph.hpp"

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace dtwin::mining {

/// One DFS code entry. The edge label is oriented from `from` to `to`: a
/// sorted "|"-joined list of "<EdgeKind>>" (from -> to) and "<EdgeKind><"
/// (to -> from) entries, so parallel relations between two vertices form a
/// single composite label.
struct CodeEdge {
    int from = 0;
    int to = 0;
    std::string fromLabel;
    std::string edgeLabel;
    std::string toLabel;

    bool operator==(const CodeEdge&) const = default;
    auto operator<=>(const CodeEdge&) const = default;
};

using DfsCode = std::vector<CodeEdge>;

std::string to_string(const DfsCode& code);
std::size_t vertex_count(const DfsCode& code);
/// Inverse of to_string. Throws Error(InvalidArgument).
DfsCode parse_code(std::string_view text);

struct Pattern {
    DfsCode code;
    std::int64_t support = 0;  // minimum image based
    /// Every embedding as a map pattern vertex -> mining graph vertex index.
    std::vector<std::vector<std::uint32_t>> embeddings;
    /// No one-edge extension within the size bound keeps the support.
    bool maximal = false;

    std::size_t vertex_count() const { return mining::vertex_count(code); }
    std::size_t edge_count() const { return code.size(); }
};

struct MiningParams {
    std::int64_t minSupport = 2;
    std::size_t minNodes = 3;
    std::size_t maxNodes = 12;
    /// Only report patterns whose Contains edges reach every vertex from one
    /// pattern vertex.
    bool rootedOnly = false;
};

/// gSpan over the mining graph with MNI support. Output is sorted by
/// (-support, -vertices, -edges, code). Throws Error(InvalidArgument) when
/// minSupport < 2 or the node bounds are inconsistent.
std::vector<Pattern> mine(const MiningGraph& g, const MiningParams& params = {});

/// MNI support recomputed from a list of embeddings.
std::int64_t mni_support(const std::vector<std::vector<std::uint32_t>>& embeddings, std::size_t vertexCount);

/// Canonical (minimum) DFS code of a connected pattern given as a code.
DfsCode canonical_code(const DfsCode& code);

/// Canonical DFS code of a whole connected mining graph.
DfsCode graph_code(const MiningGraph& g);

/// True when the pattern of `small` has a (not necessarily induced) subgraph
/// isomorphism into the pattern of `big`.
bool sub_isomorphic(const DfsCode& small, const DfsCode& big);
bool isomorphic(const DfsCode& a, const DfsCode& b);

}  // namespace dtwin::mining
