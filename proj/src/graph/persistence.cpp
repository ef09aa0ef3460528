#include "dtwin/graph/persistence.hpp"

#include "dtwin/error.hpp"
#include "dtwin/util/files.hpp"

#include <json.hpp>

#include <istream>
#include <sstream>

namespace dtwin::graph {

using nlohmann::json;

namespace {

json labels_to_json(const Labels& labels) {
    json out = json::object();
    for (const auto& [k, v] : labels) {
        std::visit([&](const auto& x) { out[k] = x; }, v);
    }
    return out;
}

Labels labels_from_json(const json& j, std::size_t line) {
    if (!j.is_object()) fail(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": labels must be an object");
    Labels out;
    for (const auto& [k, v] : j.items()) {
        if (v.is_string()) {
            out.emplace(k, v.get<std::string>());
        } else if (v.is_boolean()) {
            out.emplace(k, v.get<bool>());
        } else if (v.is_number_integer()) {
            out.emplace(k, v.get<std::int64_t>());
        } else if (v.is_number_float()) {
            out.emplace(k, v.get<double>());
        } else {
            fail(ErrorCode::MalformedRecord,
                 "line " + std::to_string(line) + ": label '" + k + "' is not a scalar");
        }
    }
    return out;
}

const std::string& required_string(const json& j, const char* key, std::size_t line) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_string()) {
        fail(ErrorCode::MalformedRecord,
             "line " + std::to_string(line) + ": missing string field '" + key + "'");
    }
    return it->get_ref<const std::string&>();
}

}  // namespace

std::string serialize_graph(const PropertyGraph& graph) {
    std::string out;
    for (const auto& [id, n] : graph.nodes()) {
        json j{{"recordType", "node"},
               {"id", n.id},
               {"kind", std::string(to_string(n.kind))},
               {"name", n.name},
               {"labels", labels_to_json(n.labels)},
               {"provenance", std::string(to_string(n.provenance))}};
        out += j.dump();
        out += '\n';
    }
    for (const auto& [id, e] : graph.edges()) {
        json j{{"recordType", "edge"},
               {"id", e.id},
               {"kind", std::string(to_string(e.kind))},
               {"source", e.source},
               {"target", e.target},
               {"labels", labels_to_json(e.labels)}};
        out += j.dump();
        out += '\n';
    }
    return out;
}

PropertyGraph deserialize_graph(std::istream& in) {
    std::vector<std::pair<std::size_t, Node>> nodes;
    std::vector<std::pair<std::size_t, Edge>> edges;
    std::string text;
    std::size_t line = 0;
    while (std::getline(in, text)) {
        ++line;
        if (text.empty()) continue;
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            fail(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": not a JSON object");
        }
        const auto& type = required_string(j, "recordType", line);
        auto labels_it = j.find("labels");
        Labels labels = labels_it == j.end() ? Labels{} : labels_from_json(*labels_it, line);
        if (type == "node") {
            Node n;
            n.id = required_string(j, "id", line);
            n.name = required_string(j, "name", line);
            auto kind = parse_node_kind(required_string(j, "kind", line));
            auto prov = parse_provenance(required_string(j, "provenance", line));
            if (!kind || !prov) {
                fail(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": unknown kind or provenance");
            }
            n.kind = *kind;
            n.provenance = *prov;
            n.labels = std::move(labels);
            nodes.emplace_back(line, std::move(n));
        } else if (type == "edge") {
            Edge e;
            e.id = required_string(j, "id", line);
            e.source = required_string(j, "source", line);
            e.target = required_string(j, "target", line);
            auto kind = parse_edge_kind(required_string(j, "kind", line));
            if (!kind) fail(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": unknown edge kind");
            e.kind = *kind;
            e.labels = std::move(labels);
            edges.emplace_back(line, std::move(e));
        } else {
            fail(ErrorCode::MalformedRecord, "line " + std::to_string(line) + ": unknown recordType '" + type + "'");
        }
    }

    PropertyGraph g;
    auto add = [](std::size_t at, auto&& fn) {
        try {
            fn();
        } catch (const Error& err) {
            fail(ErrorCode::MalformedRecord, "line " + std::to_string(at) + ": " + err.what());
        }
    };
    for (auto& [at, n] : nodes) add(at, [&] { g.add_node(std::move(n)); });
    // Any subset of a forest is a forest, so record order cannot trip the hierarchy checks.
    for (auto& [at, e] : edges) add(at, [&] { g.add_edge(std::move(e)); });
    return g;
}

PropertyGraph deserialize_graph(const std::string& text) {
    std::istringstream in(text);
    return deserialize_graph(in);
}

void save_graph(const PropertyGraph& graph, const std::filesystem::path& path) {
    util::write_file(path, serialize_graph(graph));
}

PropertyGraph load_graph(const std::filesystem::path& path) {
    std::istringstream in(util::read_file(path));
    return deserialize_graph(in);
}

}  // namespace dtwin::graph
