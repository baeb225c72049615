#pragma once

// cdag.hpp — immutable computational DAG with construction-time validation.
//
// A Cdag stores its vertices in canonical id order (see vertex_id.hpp), with
// CSR adjacency in both directions, the derived input list (exactly the
// in-degree-0 vertices), the declared output list, and a cached deterministic
// topological order.  Graphs are built through DraftCdag and validated by
// seal(); after seal the structure is never mutated.

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mmio/common.hpp"
#include "mmio/vertex_id.hpp"

namespace mmio {

struct Cdag {
  Json meta;  // {"builder": str, "params": obj}

  std::vector<VertexId> ids;  // canonical order; position == vertex index
  std::vector<Role> roles;

  std::vector<int32_t> pred_off, pred_dat;  // in-edges, CSR, neighbor lists sorted
  std::vector<int32_t> succ_off, succ_dat;  // out-edges, CSR, neighbor lists sorted

  std::vector<int32_t> inputs;   // == all in-degree-0 vertices, ascending
  std::vector<int32_t> outputs;  // declared, ascending
  std::vector<char> input_flag, output_flag;

  std::vector<int32_t> topo;  // deterministic topological order (Kahn, min-index tie-break)

  int32_t n_vertices() const { return static_cast<int32_t>(ids.size()); }
  int64_t n_edges() const { return static_cast<int64_t>(pred_dat.size()); }

  std::span<const int32_t> preds(int32_t v) const {
    return {pred_dat.data() + pred_off[v], pred_dat.data() + pred_off[v + 1]};
  }
  std::span<const int32_t> succs(int32_t v) const {
    return {succ_dat.data() + succ_off[v], succ_dat.data() + succ_off[v + 1]};
  }
  int32_t in_degree(int32_t v) const { return pred_off[v + 1] - pred_off[v]; }
  int32_t out_degree(int32_t v) const { return succ_off[v + 1] - succ_off[v]; }
  bool is_input(int32_t v) const { return input_flag[v] != 0; }
  bool is_output(int32_t v) const { return output_flag[v] != 0; }

  // Index of an id, or -1 when absent.  Binary search over the canonical order.
  int32_t find(const VertexId& id) const {
    auto it = std::lower_bound(ids.begin(), ids.end(), id, VertexIdLess{});
    if (it != ids.end() && *it == id) return static_cast<int32_t>(it - ids.begin());
    return -1;
  }
  int32_t at(const VertexId& id) const {
    int32_t i = find(id);
    if (i < 0) throw std::out_of_range("vertex not in graph: " + to_string(id));
    return i;
  }
};

// One member of a vertex-disjoint sub-CDAG family: the vertex set of a
// recursion sub-graph (its input frontier included), plus that frontier and
// the member's own outputs, all as vertex indices into the owning Cdag.
struct SubCdagMember {
  std::vector<uint8_t> path;  // recursion path of the member's root
  std::vector<int32_t> verts;
  std::vector<int32_t> inputs;
  std::vector<int32_t> outputs;
};

struct SubCdagFamily {
  int level = 0;
  int64_t claimed_count = 0;  // 7^i for Strassen; the guaranteed m0^(i-2) for Strassen-like
  std::vector<SubCdagMember> members;
};

// Structural equality: same ids, roles, edges, inputs and outputs.
// Meta is deliberately ignored (two builders may produce the same graph).
inline bool cdag_equal(const Cdag& a, const Cdag& b) {
  return a.ids == b.ids && a.roles == b.roles && a.pred_off == b.pred_off &&
         a.pred_dat == b.pred_dat && a.inputs == b.inputs && a.outputs == b.outputs;
}

class DraftCdag {
 public:
  // fragment mode relaxes whole-graph conventions: derived inputs may carry
  // any role, outputs may be empty or overlap inputs.  Used for induced
  // subgraphs and for the standalone encoder/decoder building blocks.
  void add_vertex(const VertexId& id, bool allow_existing = false) {
    auto [it, fresh] = index_.try_emplace(id, static_cast<int32_t>(verts_.size()));
    if (!fresh) {
      if (allow_existing) return;
      throw std::invalid_argument("duplicate vertex id: " + to_string(id));
    }
    verts_.push_back(id);
  }

  bool has_vertex(const VertexId& id) const { return index_.count(id) != 0; }

  void add_edge(const VertexId& u, const VertexId& v) {
    auto iu = index_.find(u);
    auto iv = index_.find(v);
    if (iu == index_.end()) throw std::invalid_argument("edge endpoint not declared: " + to_string(u));
    if (iv == index_.end()) throw std::invalid_argument("edge endpoint not declared: " + to_string(v));
    edges_.emplace_back(iu->second, iv->second);
  }

  void mark_output(const VertexId& id) {
    auto it = index_.find(id);
    if (it == index_.end()) throw std::invalid_argument("output not declared: " + to_string(id));
    marked_outputs_.push_back(it->second);
  }

  size_t vertex_count() const { return verts_.size(); }

  Cdag seal(Json meta, bool fragment = false) && {
    Cdag g;
    g.meta = std::move(meta);
    const int32_t n = static_cast<int32_t>(verts_.size());
    if (n == 0) throw std::invalid_argument("seal: empty graph");

    // Canonical order and the old-index -> new-index permutation.
    std::vector<int32_t> order(n);
    for (int32_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [this](int32_t a, int32_t b) {
      return canonical_less(verts_[a], verts_[b]);
    });
    std::vector<int32_t> rank(n);
    for (int32_t i = 0; i < n; ++i) rank[order[i]] = i;

    g.ids.resize(n);
    g.roles.resize(n);
    for (int32_t i = 0; i < n; ++i) {
      g.ids[i] = std::move(verts_[order[i]]);
      g.roles[i] = g.ids[i].role;
    }

    // Edges: remap, sort, reject self-loops and duplicates, build both CSRs.
    for (auto& [u, v] : edges_) {
      u = rank[u];
      v = rank[v];
      if (u == v) throw std::invalid_argument("self-loop on vertex: " + to_string(g.ids[u]));
    }
    std::sort(edges_.begin(), edges_.end());
    if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
      throw std::invalid_argument("duplicate edge in draft");
    g.pred_off.assign(n + 1, 0);
    g.succ_off.assign(n + 1, 0);
    for (auto [u, v] : edges_) {
      ++g.pred_off[v + 1];
      ++g.succ_off[u + 1];
    }
    for (int32_t i = 0; i < n; ++i) {
      g.pred_off[i + 1] += g.pred_off[i];
      g.succ_off[i + 1] += g.succ_off[i];
    }
    g.pred_dat.resize(edges_.size());
    g.succ_dat.resize(edges_.size());
    {
      std::vector<int32_t> pfill = g.pred_off, sfill = g.succ_off;
      for (auto [u, v] : edges_) {  // edges sorted by (u,v): succ lists come out sorted
        g.succ_dat[sfill[u]++] = v;
        g.pred_dat[pfill[v]++] = u;
      }
      for (int32_t v = 0; v < n; ++v)
        std::sort(g.pred_dat.begin() + g.pred_off[v], g.pred_dat.begin() + g.pred_off[v + 1]);
    }

    // Deterministic Kahn order (min canonical index first) + cycle check.
    {
      std::vector<int32_t> indeg(n);
      for (int32_t v = 0; v < n; ++v) indeg[v] = g.in_degree(v);
      // A min-heap over a sorted universe: use an ordered set-like vector walk.
      std::vector<int32_t> heap;
      heap.reserve(n);
      auto cmp = [](int32_t a, int32_t b) { return a > b; };
      for (int32_t v = 0; v < n; ++v)
        if (indeg[v] == 0) heap.push_back(v);
      std::make_heap(heap.begin(), heap.end(), cmp);
      g.topo.reserve(n);
      while (!heap.empty()) {
        std::pop_heap(heap.begin(), heap.end(), cmp);
        int32_t v = heap.back();
        heap.pop_back();
        g.topo.push_back(v);
        for (int32_t w : g.succs(v)) {
          if (--indeg[w] == 0) {
            heap.push_back(w);
            std::push_heap(heap.begin(), heap.end(), cmp);
          }
        }
      }
      if (static_cast<int32_t>(g.topo.size()) != n) throw std::invalid_argument("cycle detected");
    }

    // Inputs are exactly the in-degree-0 vertices.
    g.input_flag.assign(n, 0);
    for (int32_t v = 0; v < n; ++v) {
      if (g.in_degree(v) == 0) {
        g.inputs.push_back(v);
        g.input_flag[v] = 1;
        if (!fragment && g.roles[v] != Role::InputA && g.roles[v] != Role::InputB)
          throw std::invalid_argument("in-degree-0 vertex with non-input role: " + to_string(g.ids[v]));
      } else if (g.roles[v] == Role::InputA || g.roles[v] == Role::InputB) {
        throw std::invalid_argument("input with nonzero in-degree: " + to_string(g.ids[v]));
      }
    }

    // Outputs: declared ones, deduplicated, ascending.
    g.output_flag.assign(n, 0);
    for (int32_t old : marked_outputs_) g.output_flag[rank[old]] = 1;
    for (int32_t v = 0; v < n; ++v)
      if (g.output_flag[v]) g.outputs.push_back(v);
    if (!fragment) {
      if (g.outputs.empty()) throw std::invalid_argument("graph declares no outputs");
      for (int32_t v : g.outputs)
        if (g.input_flag[v])
          throw std::invalid_argument("vertex is both input and output: " + to_string(g.ids[v]));
    }
    return g;
  }

 private:
  std::vector<VertexId> verts_;
  std::unordered_map<VertexId, int32_t, VertexIdHash> index_;
  std::vector<std::pair<int32_t, int32_t>> edges_;
  std::vector<int32_t> marked_outputs_;
};

// Induced subgraph on `members` (vertex indices of g).  Edges with both
// endpoints inside are kept; inputs are re-derived (no in-edge from inside);
// outputs are the sinks of the induced graph.  Always sealed as a fragment.
inline Cdag induced_sub_cdag(const Cdag& g, const std::vector<int32_t>& members) {
  DraftCdag d;
  std::vector<char> in_set(g.n_vertices(), 0);
  for (int32_t v : members) {
    if (v < 0 || v >= g.n_vertices()) throw std::out_of_range("induced_sub_cdag: member out of range");
    if (in_set[v]) throw std::invalid_argument("induced_sub_cdag: duplicate member");
    in_set[v] = 1;
    d.add_vertex(g.ids[v]);
  }
  for (int32_t v : members) {
    if (!in_set[v]) continue;
    for (int32_t w : g.succs(v))
      if (in_set[w]) d.add_edge(g.ids[v], g.ids[w]);
  }
  for (int32_t v : members) {
    bool sink = true;
    for (int32_t w : g.succs(v))
      if (in_set[w]) { sink = false; break; }
    if (sink) d.mark_output(g.ids[v]);
  }
  Json meta;
  meta["builder"] = "induced";
  meta["params"] = Json::object();
  meta["params"]["from"] = g.meta.contains("builder") ? g.meta["builder"] : Json("unknown");
  meta["params"]["members"] = static_cast<int64_t>(members.size());
  return std::move(d).seal(std::move(meta), /*fragment=*/true);
}

// Rewrites every vertex with fan-in k > 2 as a left-fold chain of 2-ary
// sums: partial t takes the previous partial and predecessor t+1 (canonical
// predecessor order), named by extending the vertex's index tuple with the
// step number; the final step keeps the original id, so outputs and
// downstream references survive.  Only linear roles may exceed fan-in 2.
inline Cdag expand_high_fanin(const Cdag& g) {
  DraftCdag d;
  for (int32_t v = 0; v < g.n_vertices(); ++v) d.add_vertex(g.ids[v]);
  for (int32_t v = 0; v < g.n_vertices(); ++v) {
    auto ps = g.preds(v);
    const int32_t k = static_cast<int32_t>(ps.size());
    if (k <= 2) {
      for (int32_t u : ps) d.add_edge(g.ids[u], g.ids[v]);
      continue;
    }
    Role r = g.roles[v];
    if (r != Role::EncAOut && r != Role::EncBOut && r != Role::DecOut)
      throw std::invalid_argument("expand_high_fanin: non-linear vertex with fan-in > 2: " +
                                  to_string(g.ids[v]));
    VertexId prev;
    for (int32_t t = 1; t <= k - 1; ++t) {
      VertexId step;
      if (t < k - 1) {
        step = g.ids[v];
        step.index.push_back(t);
        d.add_vertex(step);
      } else {
        step = g.ids[v];
      }
      if (t == 1) {
        d.add_edge(g.ids[ps[0]], step);
        d.add_edge(g.ids[ps[1]], step);
      } else {
        d.add_edge(prev, step);
        d.add_edge(g.ids[ps[t]], step);
      }
      prev = step;
    }
  }
  for (int32_t v : g.outputs) d.mark_output(g.ids[v]);
  Json meta = g.meta;
  if (!meta.contains("params") || !meta["params"].is_object()) meta["params"] = Json::object();
  meta["params"]["expanded"] = true;
  return std::move(d).seal(std::move(meta), /*fragment=*/false);
}

}  // namespace mmio
