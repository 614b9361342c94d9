#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "advlcd/graph.hpp"

namespace advlcd {

/// JSON-lines dataset format, one graph per line:
///   {"id": "g0001", "y": 1, "split": "train",
///    "nodes": [{"id": 0, "label": "chair", "tier": "object"}, ...],
///    "edges": [{"u": 0, "v": 3, "w": 0.42}, ...]}
/// "split" is optional (defaults to train). Node ids must be 0..n-1 in order.
/// Unknown fields are rejected.
GraphDataset read_dataset(const std::filesystem::path& path);
GraphDataset parse_dataset(std::istream& in);

void write_dataset(const GraphDataset& ds, const std::filesystem::path& path);
void write_dataset(const GraphDataset& ds, std::ostream& out);

/// One canonical line (no trailing newline).
std::string graph_record(const LabeledGraph& g, ClassLabel y, Split split);

}  // namespace advlcd
