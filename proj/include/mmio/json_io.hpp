#pragma once

// json_io.hpp — serialization: CDAG JSON (schema cdag/1), schedule traces
// (JSON Lines, schema sched/1), and DOT export.
//
// All emission orders are canonical, so serializing the same graph twice
// yields byte-identical documents.

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "mmio/cdag.hpp"
#include "mmio/pebbles.hpp"

namespace mmio {

inline Json to_json(const Cdag& g) {
  Json doc;
  doc["schema"] = "cdag/1";
  doc["meta"] = g.meta.is_null() ? Json::object() : g.meta;
  Json verts = Json::array();
  for (int32_t v = 0; v < g.n_vertices(); ++v) {
    Json rec;
    rec["id"] = to_string(g.ids[v]);
    rec["role"] = role_name(g.roles[v]);
    verts.push_back(std::move(rec));
  }
  doc["vertices"] = std::move(verts);
  Json edges = Json::array();
  for (int32_t u = 0; u < g.n_vertices(); ++u)
    for (int32_t v : g.succs(u))
      edges.push_back(Json::array({to_string(g.ids[u]), to_string(g.ids[v])}));
  doc["edges"] = std::move(edges);
  Json ins = Json::array(), outs = Json::array();
  for (int32_t v : g.inputs) ins.push_back(to_string(g.ids[v]));
  for (int32_t v : g.outputs) outs.push_back(to_string(g.ids[v]));
  doc["inputs"] = std::move(ins);
  doc["outputs"] = std::move(outs);
  return doc;
}

inline Cdag from_json(const Json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("cdag json: not an object");
  for (const char* key : {"schema", "vertices", "edges", "inputs", "outputs"})
    if (!doc.contains(key)) throw std::invalid_argument(std::string("cdag json: missing key \"") + key + "\"");
  if (doc["schema"] != "cdag/1")
    throw std::invalid_argument("cdag json: unsupported schema " + doc["schema"].dump());

  DraftCdag d;
  for (const auto& rec : doc["vertices"]) {
    if (!rec.contains("id") || !rec.contains("role"))
      throw std::invalid_argument("cdag json: vertex record missing id/role");
    VertexId id = parse_vertex_id(rec["id"].get<std::string>());
    Role r = role_from_name(rec["role"].get<std::string>());
    if (r != id.role)
      throw std::invalid_argument("cdag json: role field disagrees with id token for " +
                                  rec["id"].get<std::string>());
    d.add_vertex(id);
  }
  for (const auto& e : doc["edges"]) {
    if (!e.is_array() || e.size() != 2) throw std::invalid_argument("cdag json: malformed edge");
    d.add_edge(parse_vertex_id(e[0].get<std::string>()), parse_vertex_id(e[1].get<std::string>()));
  }
  for (const auto& o : doc["outputs"]) d.mark_output(parse_vertex_id(o.get<std::string>()));

  Json meta = doc.contains("meta") ? doc["meta"] : Json::object();
  Cdag g = std::move(d).seal(std::move(meta), /*fragment=*/true);

  // The declared input list must be exactly the derived in-degree-0 set.
  std::vector<int32_t> declared;
  for (const auto& i : doc["inputs"]) declared.push_back(g.at(parse_vertex_id(i.get<std::string>())));
  std::sort(declared.begin(), declared.end());
  if (declared != g.inputs)
    throw std::invalid_argument("cdag json: declared inputs differ from the in-degree-0 set");
  return g;
}

inline std::string to_json_text(const Cdag& g) { return to_json(g).dump(2) + "\n"; }

inline Cdag from_json_text(const std::string& text) { return from_json(Json::parse(text)); }

// ---------------------------------------------------------------------------
// Schedule traces: header line {"schema":"sched/1","cache":M}, then one move
// per line {"op":"load|store|compute|evict","v":"<vertex-id>"}.

inline const char* op_name(Op op) {
  switch (op) {
    case Op::Load: return "load";
    case Op::Store: return "store";
    case Op::Compute: return "compute";
    case Op::Evict: return "evict";
  }
  throw std::logic_error("op_name: bad op");
}

inline Op op_from_name(const std::string& s) {
  if (s == "load") return Op::Load;
  if (s == "store") return Op::Store;
  if (s == "compute") return Op::Compute;
  if (s == "evict") return Op::Evict;
  throw std::invalid_argument("unknown schedule op: \"" + s + "\"");
}

inline void write_schedule_jsonl(std::ostream& os, const Cdag& g, const Schedule& s) {
  Json head;
  head["schema"] = "sched/1";
  head["cache"] = s.cache;
  os << head.dump() << "\n";
  for (const Move& m : s.moves) {
    Json rec;
    rec["op"] = op_name(m.op);
    rec["v"] = to_string(g.ids[m.vertex]);
    os << rec.dump() << "\n";
  }
}

inline Schedule read_schedule_jsonl(std::istream& is, const Cdag& g) {
  Schedule s;
  std::string line;
  int64_t lineno = 0;
  bool have_header = false;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json rec;
    try {
      rec = Json::parse(line);
    } catch (const std::exception& e) {
      throw std::invalid_argument("trace line " + std::to_string(lineno) + ": bad json: " + e.what());
    }
    if (!have_header) {
      if (!rec.contains("schema") || rec["schema"] != "sched/1")
        throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                    ": expected header with schema sched/1");
      if (!rec.contains("cache") || !rec["cache"].is_number_integer())
        throw std::invalid_argument("trace header: missing integer \"cache\"");
      s.cache = rec["cache"].get<int64_t>();
      have_header = true;
      continue;
    }
    if (!rec.contains("op") || !rec.contains("v"))
      throw std::invalid_argument("trace line " + std::to_string(lineno) + ": missing op/v");
    Move m;
    m.op = op_from_name(rec["op"].get<std::string>());
    const std::string vid = rec["v"].get<std::string>();
    int32_t idx = g.find(parse_vertex_id(vid));
    if (idx < 0)
      throw std::invalid_argument("trace line " + std::to_string(lineno) +
                                  ": vertex not in graph: " + vid);
    m.vertex = idx;
    s.moves.push_back(m);
  }
  if (!have_header) throw std::invalid_argument("trace: missing header line");
  return s;
}

// ---------------------------------------------------------------------------
// DOT export.  When a level-1 family is supplied, each member becomes one
// cluster; remaining vertices (top-level combinations, global inputs used by
// non-pass positions, root decoder sums) stay outside any cluster.

inline std::string to_dot(const Cdag& g, const SubCdagFamily* level1 = nullptr) {
  std::ostringstream os;
  os << "digraph cdag {\n  rankdir=TB;\n  node [fontsize=10];\n";
  auto style = [](Role r) -> const char* {
    switch (r) {
      case Role::InputA:
      case Role::InputB: return "shape=box,style=filled,fillcolor=lightblue";
      case Role::EncAOut:
      case Role::EncBOut: return "shape=ellipse";
      case Role::Product: return "shape=diamond,style=filled,fillcolor=lightyellow";
      case Role::DecOut: return "shape=ellipse,style=filled,fillcolor=lightgray";
    }
    return "shape=ellipse";
  };
  std::vector<char> clustered(g.n_vertices(), 0);
  if (level1 != nullptr) {
    for (size_t k = 0; k < level1->members.size(); ++k) {
      const auto& m = level1->members[k];
      os << "  subgraph cluster_" << k << " {\n    label=\"sub-CDAG ";
      for (size_t i = 0; i < m.path.size(); ++i) {
        if (i) os << '.';
        os << static_cast<int>(m.path[i]);
      }
      os << "\";\n";
      for (int32_t v : m.verts) {
        clustered[v] = 1;
        os << "    \"" << to_string(g.ids[v]) << "\" [" << style(g.roles[v]) << "];\n";
      }
      os << "  }\n";
    }
  }
  for (int32_t v = 0; v < g.n_vertices(); ++v)
    if (!clustered[v]) os << "  \"" << to_string(g.ids[v]) << "\" [" << style(g.roles[v]) << "];\n";
  for (int32_t u = 0; u < g.n_vertices(); ++u)
    for (int32_t v : g.succs(u))
      os << "  \"" << to_string(g.ids[u]) << "\" -> \"" << to_string(g.ids[v]) << "\";\n";
  os << "}\n";
  return os.str();
}

}  // namespace mmio
