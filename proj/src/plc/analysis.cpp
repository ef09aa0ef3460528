#include "dtwin/plc/analysis.hpp"

#include "dtwin/error.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>

namespace dtwin::plc {

using graph::EdgeKind;
using graph::Labels;
using graph::NodeKind;
using graph::Provenance;

std::size_t CallTree::find(std::string_view name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].name == name) return i;
    }
    return kUnresolved;
}

namespace {

/// Calls performed by a block instance: the OB body, or the instance DB plus its FB type.
std::vector<const Call*> calls_of(const PlcProject& p, std::size_t block) {
    std::vector<const Call*> out;
    const Block& b = p.blocks[block];
    for (const auto& c : b.calls) out.push_back(&c);
    if (b.blockType == BlockType::InstanceDataBlock && b.type != kUnresolved) {
        for (const auto& c : p.blocks[b.type].calls) out.push_back(&c);
    }
    return out;
}

std::vector<const TagAccess*> accesses_of(const PlcProject& p, std::size_t block) {
    std::vector<const TagAccess*> out;
    const Block& b = p.blocks[block];
    for (const auto& a : b.tagAccesses) out.push_back(&a);
    if (b.blockType == BlockType::InstanceDataBlock && b.type != kUnresolved) {
        for (const auto& a : p.blocks[b.type].tagAccesses) out.push_back(&a);
    }
    return out;
}

void check_recursion(const PlcProject& p) {
    enum class Mark { None, Active, Done };
    std::vector<Mark> mark(p.blocks.size(), Mark::None);
    std::vector<std::size_t> path;
    std::function<void(std::size_t)> visit = [&](std::size_t b) {
        mark[b] = Mark::Active;
        path.push_back(b);
        for (const Call* c : calls_of(p, b)) {
            std::size_t next = c->instanceDb;
            if (mark[next] == Mark::Active) {
                std::string cycle;
                auto start = std::find(path.begin(), path.end(), next);
                for (auto it = start; it != path.end(); ++it) cycle += p.blocks[*it].name + " -> ";
                cycle += p.blocks[next].name;
                fail(ErrorCode::RecursiveCall, "recursive call: " + cycle);
            }
            if (mark[next] == Mark::None) visit(next);
        }
        path.pop_back();
        mark[b] = Mark::Done;
    };
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
        if (p.blocks[i].blockType != BlockType::FunctionBlockType && mark[i] == Mark::None) visit(i);
    }
}

std::string domain_of(NodeKind kind) {
    switch (kind) {
    case NodeKind::SoftwareComponent:
    case NodeKind::FunctionBlockType:
    case NodeKind::DataBlock: return "software";
    case NodeKind::PhysicalGroup: return "mechanic";
    default: return "electric";
    }
}

graph::Node node(NodeKind kind, const std::string& name, Labels labels = {}) {
    if (kind != NodeKind::FunctionalGroup && kind != NodeKind::SystemRoot) {
        labels.emplace(graph::label::domain, domain_of(kind));
    }
    return graph::make_node(kind, name, Provenance::PlcAnalysis, std::move(labels));
}

}  // namespace

CallTree build_call_tree(const PlcProject& p) {
    if (!p.prepared) fail(ErrorCode::InvalidArgument, "build_call_tree needs a prepared project");
    check_recursion(p);

    CallTree tree;
    std::map<std::size_t, std::size_t> node_of_block;
    std::function<std::size_t(std::size_t)> expand = [&](std::size_t block) -> std::size_t {
        if (auto it = node_of_block.find(block); it != node_of_block.end()) return it->second;
        const Block& b = p.blocks[block];
        CallTreeNode n;
        n.name = b.name;
        n.isOrganizationBlock = b.blockType == BlockType::OrganizationBlock;
        n.block = block;
        n.fbType = n.isOrganizationBlock ? kUnresolved : b.type;
        std::size_t idx = tree.nodes.size();
        tree.nodes.push_back(std::move(n));
        node_of_block.emplace(block, idx);
        for (const Call* c : calls_of(p, block)) {
            std::size_t child = expand(c->instanceDb);
            auto& kids = tree.nodes[idx].children;
            if (std::find(kids.begin(), kids.end(), child) == kids.end()) {
                kids.push_back(child);
                tree.nodes[child].callers.push_back(idx);
            }
        }
        return idx;
    };
    for (std::size_t i = 0; i < p.blocks.size(); ++i) {
        if (p.blocks[i].blockType == BlockType::OrganizationBlock) tree.roots.push_back(expand(i));
    }
    return tree;
}

GroupingResult functional_grouping(const PlcProject& p, const CallTree& tree) {
    if (!p.prepared) fail(ErrorCode::InvalidArgument, "functional_grouping needs a prepared project");
    GroupingResult result;
    auto& g = result.graph;

    const auto root_id = graph::node_id(NodeKind::SystemRoot, p.name);
    const auto top_id = graph::node_id(NodeKind::FunctionalGroup, p.name);
    g.add_node(node(NodeKind::SystemRoot, p.name));
    g.add_node(node(NodeKind::FunctionalGroup, p.name));
    g.add_edge(graph::make_edge(EdgeKind::Contains, root_id, top_id));

    // Hardware: Plc > IoDevice > Channel, program blocks under the Plc.
    std::string plc_id;
    for (const auto& d : p.devices) {
        if (d.deviceType == DeviceType::Plc) {
            plc_id = graph::node_id(NodeKind::Plc, d.id);
            g.add_node(node(NodeKind::Plc, d.id));
            g.add_edge(graph::make_edge(EdgeKind::Contains, root_id, plc_id));
        }
    }
    for (const auto& d : p.devices) {
        if (d.deviceType == DeviceType::Plc) continue;
        auto dev_id = graph::node_id(NodeKind::IoDevice, d.id);
        g.add_node(node(NodeKind::IoDevice, d.id,
                        {{"deviceType", std::string(to_string(d.deviceType))}, {"channels", d.channelCount}}));
        g.add_edge(graph::make_edge(EdgeKind::Contains, plc_id, dev_id));
        for (std::int64_t c = 0; c < d.channelCount; ++c) {
            auto ch_name = d.id + "." + std::to_string(c);
            g.add_node(node(NodeKind::Channel, ch_name, {{std::string(graph::label::channel_index), c}}));
            g.add_edge(graph::make_edge(EdgeKind::Contains, dev_id, graph::node_id(NodeKind::Channel, ch_name)));
        }
    }
    for (const auto& b : p.blocks) {
        if (b.blockType == BlockType::OrganizationBlock) continue;
        NodeKind kind = b.blockType == BlockType::FunctionBlockType ? NodeKind::FunctionBlockType : NodeKind::DataBlock;
        Labels labels;
        if (b.sharedInstance) labels.emplace("sharedInstance", true);
        g.add_node(node(kind, b.name, std::move(labels)));
        g.add_edge(graph::make_edge(EdgeKind::Contains, plc_id, graph::node_id(kind, b.name)));
    }

    // R5: one group per call-tree node. Callers precede callees in a topological
    // order; a shared instance hangs below the common ancestor of its callers.
    std::vector<std::size_t> order;
    {
        std::vector<int> pending(tree.nodes.size());
        for (std::size_t i = 0; i < tree.nodes.size(); ++i) pending[i] = static_cast<int>(tree.nodes[i].callers.size());
        std::vector<std::size_t> ready(tree.roots.rbegin(), tree.roots.rend());
        while (!ready.empty()) {
            std::size_t cur = ready.back();
            ready.pop_back();
            order.push_back(cur);
            const auto& kids = tree.nodes[cur].children;
            for (auto it = kids.rbegin(); it != kids.rend(); ++it) {
                if (--pending[*it] == 0) ready.push_back(*it);
            }
        }
    }
    std::vector<std::string> group_of(tree.nodes.size());
    std::map<std::string, std::string> group_parent;  // group id -> parent group id
    auto ancestors = [&](const std::string& gid) {
        std::vector<std::string> chain{gid};
        for (auto it = group_parent.find(gid); it != group_parent.end(); it = group_parent.find(it->second)) {
            chain.push_back(it->second);
        }
        return chain;
    };
    auto lca = [&](const std::vector<std::string>& groups) {
        std::vector<std::string> common = ancestors(groups.front());
        for (std::size_t i = 1; i < groups.size(); ++i) {
            auto chain = ancestors(groups[i]);
            std::set<std::string> in_chain(chain.begin(), chain.end());
            std::erase_if(common, [&](const std::string& c) { return !in_chain.contains(c); });
        }
        return common.empty() ? top_id : common.front();
    };
    for (std::size_t idx : order) {
        const auto& n = tree.nodes[idx];
        auto gid = graph::node_id(NodeKind::FunctionalGroup, n.name);
        std::string parent = top_id;
        if (!n.callers.empty()) {
            std::vector<std::string> caller_groups;
            for (std::size_t c : n.callers) caller_groups.push_back(group_of[c]);
            parent = caller_groups.size() == 1 ? caller_groups.front() : lca(caller_groups);
        }
        Labels labels;
        if (n.callers.size() > 1) labels.emplace("sharedInstance", true);
        g.add_node(node(NodeKind::FunctionalGroup, n.name, std::move(labels)));
        g.add_edge(graph::make_edge(EdgeKind::Contains, parent, gid));
        group_of[idx] = gid;
        group_parent[gid] = parent;
    }

    // R1: every FB instance becomes a software component, reachable or not.
    std::map<std::size_t, std::string> component_group;  // instance DB index -> group id
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
        if (!tree.nodes[i].isOrganizationBlock) component_group[tree.nodes[i].block] = group_of[i];
    }
    for (std::size_t b = 0; b < p.blocks.size(); ++b) {
        const Block& blk = p.blocks[b];
        if (blk.blockType != BlockType::InstanceDataBlock) continue;
        auto sc_id = graph::node_id(NodeKind::SoftwareComponent, blk.name);
        auto it = component_group.find(b);
        std::string parent = it == component_group.end() ? top_id : it->second;
        if (it == component_group.end()) {
            result.warnings.push_back("instance '" + blk.name + "' is never called; attached to the root group");
            component_group[b] = top_id;
        }
        g.add_node(node(NodeKind::SoftwareComponent, blk.name, {{"fbType", *blk.ofType}}));
        g.add_edge(graph::make_edge(EdgeKind::Contains, parent, sc_id));
        g.add_edge(graph::make_edge(EdgeKind::TypedBy, sc_id, graph::node_id(NodeKind::FunctionBlockType, *blk.ofType)));
        g.add_edge(graph::make_edge(EdgeKind::BackedBy, sc_id, graph::node_id(NodeKind::DataBlock, blk.name)));
    }

    // R3: field devices.
    std::vector<std::string> device_ids(p.tags.size());
    for (std::size_t t = 0; t < p.tags.size(); ++t) {
        const IoTag& tag = p.tags[t];
        NodeKind kind = tag.is_input() ? NodeKind::Sensor : NodeKind::Actuator;
        device_ids[t] = graph::node_id(kind, tag.name);
        g.add_node(node(kind, tag.name,
                        {{std::string(graph::label::address), tag.address},
                         {"dataType", std::string(to_string(tag.dataType))},
                         {"device", tag.deviceId}}));
        g.add_edge(graph::make_edge(
            EdgeKind::WiredTo, device_ids[t],
            graph::node_id(NodeKind::Channel, tag.deviceId + "." + std::to_string(tag.channelIndex))));
    }

    // R2 + R4: accesses become edges; devices join their accessor's group.
    std::vector<std::set<std::string>> accessor_groups(p.tags.size());
    auto record_access = [&](std::size_t block, const std::string& group) {
        bool instance = p.blocks[block].blockType == BlockType::InstanceDataBlock;
        for (const TagAccess* a : accesses_of(p, block)) {
            accessor_groups[a->tag].insert(group);
            if (!instance) continue;
            auto sc_id = graph::node_id(NodeKind::SoftwareComponent, p.blocks[block].name);
            EdgeKind kind = a->mode == AccessMode::Read ? EdgeKind::Reads : EdgeKind::Writes;
            if (!g.has_edge(kind, sc_id, device_ids[a->tag])) {
                g.add_edge(graph::make_edge(kind, sc_id, device_ids[a->tag]));
            }
        }
    };
    for (std::size_t i = 0; i < tree.nodes.size(); ++i) record_access(tree.nodes[i].block, group_of[i]);
    for (const auto& [b, group] : component_group) {
        if (group == top_id) record_access(b, group);
    }
    for (std::size_t t = 0; t < p.tags.size(); ++t) {
        const auto& groups = accessor_groups[t];
        std::string parent;
        if (groups.empty()) {
            parent = top_id;
            result.warnings.push_back("tag '" + p.tags[t].name + "' is never accessed; attached to the root group");
        } else if (groups.size() == 1) {
            parent = *groups.begin();
        } else {
            parent = lca(std::vector<std::string>(groups.begin(), groups.end()));
        }
        g.add_edge(graph::make_edge(EdgeKind::Contains, parent, device_ids[t]));
    }
    return result;
}

GroupingResult analyze_plc(std::string_view xml) {
    PlcProject project = prepare(parse_project(xml));
    CallTree tree = build_call_tree(project);
    return functional_grouping(project, tree);
}

}  // namespace dtwin::plc
