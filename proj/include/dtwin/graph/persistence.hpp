#pragma once

#include "dtwin/graph/property_graph.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace dtwin::graph {

// The .dtgraph format: one JSON object per line, keys sorted, node records
// (recordType "node") before edge records (recordType "edge"), each group in
// id order. Loading accepts records in any order.

std::string serialize_graph(const PropertyGraph& graph);
PropertyGraph deserialize_graph(std::istream& in);
PropertyGraph deserialize_graph(const std::string& text);

void save_graph(const PropertyGraph& graph, const std::filesystem::path& path);
PropertyGraph load_graph(const std::filesystem::path& path);

}  // namespace dtwin::graph
