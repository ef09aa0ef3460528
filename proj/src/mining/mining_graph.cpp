#include "dtwin/mining/mining_graph.hpp"

#include <algorithm>
#include <map>

namespace dtwin::mining {

using graph::EdgeKind;
using graph::NodeKind;

std::vector<std::vector<std::size_t>> MiningGraph::components() const {
    std::vector<std::size_t> parent(vertices.size());
    for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : edges) {
        auto a = find(e.src), b = find(e.dst);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::map<std::size_t, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < vertices.size(); ++i) groups[find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> out;
    for (auto& [root, members] : groups) out.push_back(std::move(members));
    return out;
}

MiningGraph project_for_mining(const graph::PropertyGraph& g, const ProjectionConfig& config) {
    MiningGraph out;
    out.derivation = config;

    auto skipped = [&](NodeKind k) {
        return config.excludedKinds.contains(k) || k == NodeKind::TemplatePattern || k == NodeKind::TemplateInstance;
    };
    std::vector<std::string> kept;
    std::vector<std::string> stack;
    for (const auto& r : g.roots()) {
        if (!skipped(NodeKind::SystemRoot)) stack.push_back(r);
    }
    while (!stack.empty()) {
        auto id = std::move(stack.back());
        stack.pop_back();
        kept.push_back(id);
        for (const auto& c : g.children(id)) {
            if (!skipped(g.node(c).kind)) stack.push_back(c);
        }
    }
    std::sort(kept.begin(), kept.end());

    std::map<std::string, std::size_t, std::less<>> index;
    for (const auto& id : kept) {
        const auto& n = g.node(id);
        std::string label(graph::to_string(n.kind));
        for (const auto& key : config.labelProjection) {
            auto it = n.labels.find(key);
            if (it != n.labels.end()) label += "[" + key + "=" + graph::label_to_string(it->second) + "]";
        }
        index.emplace(id, out.vertices.size());
        out.vertices.push_back({id, std::move(label)});
    }
    for (const auto& [eid, e] : g.edges()) {
        auto s = index.find(e.source);
        auto t = index.find(e.target);
        if (s == index.end() || t == index.end()) continue;
        out.edges.push_back({s->second, t->second, std::string(graph::to_string(e.kind))});
    }
    std::sort(out.edges.begin(), out.edges.end(), [](const MiningEdge& a, const MiningEdge& b) {
        return std::tie(a.src, a.dst, a.label) < std::tie(b.src, b.dst, b.label);
    });
    return out;
}

MiningGraph make_mining_graph(const std::vector<std::string>& vertexLabels, const std::vector<MiningEdge>& edges) {
    MiningGraph out;
    out.derivation.excludedKinds.clear();
    for (std::size_t i = 0; i < vertexLabels.size(); ++i) out.vertices.push_back({"v" + std::to_string(i), vertexLabels[i]});
    out.edges = edges;
    std::sort(out.edges.begin(), out.edges.end(), [](const MiningEdge& a, const MiningEdge& b) {
        return std::tie(a.src, a.dst, a.label) < std::tie(b.src, b.dst, b.label);
    });
    return out;
}

}  // namespace dtwin::mining
