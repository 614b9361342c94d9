#include "advlcd/dataset_io.hpp"

#include <fstream>
#include <initializer_list>
#include <sstream>

#include "advlcd/error.hpp"
#include "json.hpp"

namespace advlcd {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string at_line(std::size_t line) { return "line " + std::to_string(line) + ": "; }

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where, std::size_t line) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) known = known || it.key() == key;
    if (!known) {
      fail(ErrorCode::SchemaError, at_line(line) + "unknown field \"" + where + it.key() + "\"");
    }
  }
}

const json& require(const json& obj, const char* key, const std::string& where,
                    std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    fail(ErrorCode::SchemaError, at_line(line) + "missing field \"" + where + key + "\"");
  }
  return *it;
}

std::int64_t require_int(const json& obj, const char* key, const std::string& where,
                         std::size_t line) {
  const json& v = require(obj, key, where, line);
  if (!v.is_number_integer()) {
    fail(ErrorCode::SchemaError, at_line(line) + "field \"" + where + key + "\" must be an integer");
  }
  return v.get<std::int64_t>();
}

std::string require_string(const json& obj, const char* key, const std::string& where,
                           std::size_t line) {
  const json& v = require(obj, key, where, line);
  if (!v.is_string()) {
    fail(ErrorCode::SchemaError, at_line(line) + "field \"" + where + key + "\" must be a string");
  }
  return v.get<std::string>();
}

struct Record {
  LabeledGraph graph;
  ClassLabel y;
  Split split;
};

Record parse_record(const std::string& text, std::size_t line) {
  json obj;
  try {
    obj = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(ErrorCode::ParseError, at_line(line) + e.what());
  }
  if (!obj.is_object()) fail(ErrorCode::ParseError, at_line(line) + "record must be a JSON object");
  reject_unknown(obj, {"id", "y", "split", "nodes", "edges"}, "", line);

  std::string id = require_string(obj, "id", "", line);
  const std::int64_t y_raw = require_int(obj, "y", "", line);
  if (y_raw != 1 && y_raw != -1) {
    fail(ErrorCode::SchemaError, at_line(line) + "field \"y\" must be 1 or -1");
  }
  Split split = Split::Train;
  if (obj.contains("split")) {
    const std::string s = require_string(obj, "split", "", line);
    if (s == "train") {
      split = Split::Train;
    } else if (s == "test") {
      split = Split::Test;
    } else {
      fail(ErrorCode::SchemaError, at_line(line) + "field \"split\" must be train or test");
    }
  }

  const json& nodes_json = require(obj, "nodes", "", line);
  if (!nodes_json.is_array()) fail(ErrorCode::SchemaError, at_line(line) + "field \"nodes\" must be an array");
  std::vector<Node> nodes;
  nodes.reserve(nodes_json.size());
  for (std::size_t i = 0; i < nodes_json.size(); ++i) {
    const json& nj = nodes_json[i];
    if (!nj.is_object()) fail(ErrorCode::SchemaError, at_line(line) + "nodes[] entries must be objects");
    reject_unknown(nj, {"id", "label", "tier"}, "nodes[].", line);
    if (require_int(nj, "id", "nodes[].", line) != static_cast<std::int64_t>(i)) {
      fail(ErrorCode::SchemaError,
           at_line(line) + "field \"nodes[].id\" must be contiguous 0..n-1 (entry " +
               std::to_string(i) + ")");
    }
    Node node;
    node.label = require_string(nj, "label", "nodes[].", line);
    try {
      node.tier = parse_tier(require_string(nj, "tier", "nodes[].", line));
    } catch (const Error& e) {
      fail(ErrorCode::SchemaError, at_line(line) + "nodes[]." + e.what());
    }
    nodes.push_back(std::move(node));
  }

  const json& edges_json = require(obj, "edges", "", line);
  if (!edges_json.is_array()) fail(ErrorCode::SchemaError, at_line(line) + "field \"edges\" must be an array");
  std::vector<Edge> edges;
  edges.reserve(edges_json.size());
  for (const json& ej : edges_json) {
    if (!ej.is_object()) fail(ErrorCode::SchemaError, at_line(line) + "edges[] entries must be objects");
    reject_unknown(ej, {"u", "v", "w"}, "edges[].", line);
    const std::int64_t u = require_int(ej, "u", "edges[].", line);
    const std::int64_t v = require_int(ej, "v", "edges[].", line);
    const json& w = require(ej, "w", "edges[].", line);
    if (!w.is_number()) fail(ErrorCode::SchemaError, at_line(line) + "field \"edges[].w\" must be a number");
    if (u < 0 || v < 0) fail(ErrorCode::ParseError, at_line(line) + "negative edge endpoint");
    edges.push_back(Edge{static_cast<NodeId>(u), static_cast<NodeId>(v), w.get<double>()});
  }

  try {
    return Record{LabeledGraph(std::move(id), std::move(nodes), std::move(edges)),
                  class_label_from_int(static_cast<int>(y_raw)), split};
  } catch (const Error& e) {
    // Structural invariant violations (self loops, duplicates, ranges).
    fail(ErrorCode::ParseError, at_line(line) + e.what());
  }
}

}  // namespace

GraphDataset parse_dataset(std::istream& in) {
  std::vector<LabeledGraph> graphs;
  std::vector<ClassLabel> labels;
  std::vector<Split> splits;
  std::string text;
  std::size_t line = 0;
  while (std::getline(in, text)) {
    ++line;
    if (text.find_first_not_of(" \t\r") == std::string::npos) continue;
    Record r = parse_record(text, line);
    graphs.push_back(std::move(r.graph));
    labels.push_back(r.y);
    splits.push_back(r.split);
  }
  return GraphDataset(std::move(graphs), std::move(labels), std::move(splits));
}

GraphDataset read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open dataset " + path.string());
  return parse_dataset(in);
}

std::string graph_record(const LabeledGraph& g, ClassLabel y, Split split) {
  ordered_json obj;
  obj["id"] = g.id();
  obj["y"] = sign_of(y);
  obj["split"] = to_string(split);
  ordered_json nodes = ordered_json::array();
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    ordered_json nj;
    nj["id"] = i;
    nj["label"] = g.node(static_cast<NodeId>(i)).label;
    nj["tier"] = to_string(g.node(static_cast<NodeId>(i)).tier);
    nodes.push_back(std::move(nj));
  }
  obj["nodes"] = std::move(nodes);
  ordered_json edges = ordered_json::array();
  for (const auto& e : g.edges()) {
    ordered_json ej;
    ej["u"] = e.u;
    ej["v"] = e.v;
    ej["w"] = e.weight;
    edges.push_back(std::move(ej));
  }
  obj["edges"] = std::move(edges);
  return obj.dump();
}

void write_dataset(const GraphDataset& ds, std::ostream& out) {
  for (std::size_t i = 0; i < ds.size(); ++i) {
    out << graph_record(ds.graph(i), ds.label(i), ds.split(i)) << '\n';
  }
}

void write_dataset(const GraphDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot write dataset " + path.string());
  write_dataset(ds, out);
  if (!out) fail(ErrorCode::IoError, "write failed for " + path.string());
}

}  // namespace advlcd
