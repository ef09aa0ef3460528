#include "dtwin/mining/templates.hpp"

#include "dtwin/error.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

namespace dtwin::mining {

using graph::EdgeKind;
using graph::NodeKind;
using graph::Provenance;

std::vector<Pattern> select_templates(const std::vector<Pattern>& patterns) {
    std::vector<std::size_t> order(patterns.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = patterns[a];
        const auto& pb = patterns[b];
        return std::make_pair(pa.vertex_count(), pa.edge_count()) > std::make_pair(pb.vertex_count(), pb.edge_count());
    });
    std::vector<std::size_t> kept;
    for (std::size_t i : order) {
        const auto& p = patterns[i];
        bool covered = false;
        for (std::size_t k : kept) {
            const auto& q = patterns[k];
            if (q.support >= p.support && sub_isomorphic(p.code, q.code)) {
                covered = true;
                break;
            }
        }
        if (!covered) kept.push_back(i);
    }
    std::sort(kept.begin(), kept.end());
    std::vector<Pattern> out;
    for (std::size_t k : kept) {
        out.push_back(patterns[k]);
        out.back().maximal = true;
    }
    return out;
}

namespace {

std::vector<std::string> ancestors(const graph::PropertyGraph& g, const std::string& id) {
    std::vector<std::string> chain{id};
    for (auto p = g.parent(id); p; p = g.parent(*p)) chain.push_back(*p);
    return chain;
}

std::string common_group(const graph::PropertyGraph& g, const std::set<std::string>& members) {
    std::vector<std::string> anchors;
    for (const auto& m : members) {
        auto p = g.parent(m);
        if (!p) {
            anchors.push_back(m);
        } else if (!members.contains(*p)) {
            anchors.push_back(*p);
        }
    }
    std::vector<std::string> common = ancestors(g, anchors.front());
    for (std::size_t i = 1; i < anchors.size(); ++i) {
        auto chain = ancestors(g, anchors[i]);
        std::set<std::string> in_chain(chain.begin(), chain.end());
        std::erase_if(common, [&](const std::string& c) { return !in_chain.contains(c); });
    }
    if (common.empty()) fail(ErrorCode::InvalidGraph, "template occurrence spans several Contains trees");
    return common.front();
}

}  // namespace

MarkResult mark_templates(const graph::PropertyGraph& g, const MiningGraph& mg, const std::vector<Pattern>& templates) {
    MarkResult result{g, {}};
    auto& out = result.graph;
    auto roots = g.roots();
    if (roots.size() != 1) fail(ErrorCode::InvalidGraph, "marking templates needs exactly one SystemRoot");
    const auto& root_id = roots.front();

    for (std::size_t t = 0; t < templates.size(); ++t) {
        const auto& p = templates[t];
        TemplateAnnotation ann{"T" + std::to_string(t + 1), p, {}};

        std::set<std::set<std::string>> occurrences;
        for (const auto& emb : p.embeddings) {
            std::set<std::string> members;
            for (auto v : emb) {
                if (v >= mg.vertices.size() || !g.has_node(mg.vertices[v].id)) {
                    fail(ErrorCode::StaleEmbedding, "template " + ann.templateId + " refers to a node that is no longer in the graph");
                }
                members.insert(mg.vertices[v].id);
            }
            occurrences.insert(std::move(members));
        }

        auto pattern_id = graph::node_id(NodeKind::TemplatePattern, ann.templateId);
        if (!out.has_node(pattern_id)) {
            out.add_node(graph::make_node(NodeKind::TemplatePattern, ann.templateId, Provenance::Mining,
                                          {{std::string(graph::label::template_id), ann.templateId},
                                           {std::string(graph::label::support), p.support},
                                           {"code", to_string(p.code)},
                                           {"vertices", static_cast<std::int64_t>(p.vertex_count())},
                                           {"edges", static_cast<std::int64_t>(p.edge_count())}}));
            out.add_edge(graph::make_edge(EdgeKind::Contains, root_id, pattern_id));
        }

        std::size_t n = 0;
        for (const auto& members : occurrences) {
            auto name = ann.templateId + "." + std::to_string(++n);
            auto inst_id = graph::node_id(NodeKind::TemplateInstance, name);
            ann.instanceNodeIds.push_back(inst_id);
            if (out.has_node(inst_id)) continue;
            std::string joined;
            for (const auto& m : members) joined += (joined.empty() ? "" : ";") + m;
            out.add_node(graph::make_node(NodeKind::TemplateInstance, name, Provenance::Mining,
                                          {{std::string(graph::label::template_id), ann.templateId}, {"members", joined}}));
            out.add_edge(graph::make_edge(EdgeKind::Contains, common_group(g, members), inst_id));
            out.add_edge(graph::make_edge(EdgeKind::InstanceOf, inst_id, pattern_id));
        }
        result.annotations.push_back(std::move(ann));
    }
    return result;
}

SummaryReport summarize(const graph::PropertyGraph& g) {
    auto annotation = [](NodeKind k) { return k == NodeKind::TemplatePattern || k == NodeKind::TemplateInstance; };
    std::map<std::string, std::size_t> index;
    for (const auto& [id, n] : g.nodes()) {
        if (!annotation(n.kind)) index.emplace(id, index.size());
    }
    std::vector<std::tuple<EdgeKind, std::size_t, std::size_t>> edges;
    for (const auto& [id, e] : g.edges()) {
        auto s = index.find(e.source);
        auto t = index.find(e.target);
        if (s != index.end() && t != index.end()) edges.emplace_back(e.kind, s->second, t->second);
    }

    std::vector<std::size_t> parent(index.size());
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    auto counts = [&]() {
        std::set<std::size_t> classes;
        for (std::size_t i = 0; i < parent.size(); ++i) classes.insert(find(i));
        std::set<std::tuple<EdgeKind, std::size_t, std::size_t>> kept;
        for (const auto& [k, s, t] : edges) {
            auto a = find(s), b = find(t);
            if (a != b) kept.emplace(k, a, b);
        }
        return std::make_pair(classes.size(), kept.size());
    };

    SummaryReport r;
    r.nodesBefore = index.size();
    r.edgesBefore = edges.size();

    // templateId -> instances (member lists)
    std::map<std::string, std::vector<std::vector<std::string>>> instances;
    for (const auto& n : g.query({{NodeKind::TemplateInstance}, {}, {}})) {
        auto tid = n.labels.find(graph::label::template_id);
        auto mem = n.labels.find("members");
        if (tid == n.labels.end() || mem == n.labels.end()) continue;
        std::vector<std::string> members;
        std::string joined = graph::label_to_string(mem->second);
        std::size_t start = 0;
        while (start <= joined.size()) {
            auto pos = joined.find(';', start);
            auto m = joined.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
            if (!m.empty()) members.push_back(m);
            if (pos == std::string::npos) break;
            start = pos + 1;
        }
        instances[graph::label_to_string(tid->second)].push_back(std::move(members));
    }
    std::vector<std::pair<std::size_t, std::string>> order;
    for (const auto& [tid, list] : instances) order.emplace_back(list.front().size(), tid);
    std::sort(order.begin(), order.end());

    for (const auto& [size, tid] : order) {
        const auto& list = instances[tid];
        for (const auto& members : list) {
            std::vector<std::size_t> ids;
            for (const auto& m : members) {
                auto it = index.find(m);
                if (it != index.end()) ids.push_back(it->second);
            }
            for (std::size_t i = 1; i < ids.size(); ++i) {
                auto a = find(ids[0]), b = find(ids[i]);
                if (a != b) parent[std::max(a, b)] = std::min(a, b);
            }
        }
        auto [nodes, edge_count] = counts();
        r.steps.push_back({tid, list.size(), nodes, edge_count});
    }
    auto [nodes, edge_count] = counts();
    r.nodesAfter = nodes;
    r.edgesAfter = edge_count;
    return r;
}

std::string format_summary(const SummaryReport& r) {
    std::ostringstream os;
    os << "nodes.before = " << r.nodesBefore << "\n";
    os << "edges.before = " << r.edgesBefore << "\n";
    for (const auto& s : r.steps) {
        os << "collapse " << s.templateId << " instances = " << s.instances << " nodes = " << s.nodes
           << " edges = " << s.edges << "\n";
    }
    os << "nodes.after = " << r.nodesAfter << "\n";
    os << "edges.after = " << r.edgesAfter << "\n";
    return os.str();
}

std::string format_templates(const std::vector<TemplateAnnotation>& annotations) {
    std::ostringstream os;
    for (std::size_t i = 0; i < annotations.size(); ++i) {
        const auto& a = annotations[i];
        if (i) os << "\n";
        os << "template " << a.templateId << "\n";
        os << "  support: " << a.pattern.support << "\n";
        os << "  vertices: " << a.pattern.vertex_count() << "\n";
        os << "  edges: " << a.pattern.edge_count() << "\n";
        os << "  embeddings: " << a.pattern.embeddings.size() << "\n";
        os << "  instances: " << a.instanceNodeIds.size() << "\n";
        os << "  code:\n";
        for (const auto& e : a.pattern.code) {
            os << "    " << e.from << " " << e.to << " " << e.fromLabel << " " << e.edgeLabel << " " << e.toLabel << "\n";
        }
    }
    return os.str();
}

}  // namespace dtwin::mining
