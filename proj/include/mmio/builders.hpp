#pragma once

// builders.hpp — CDAG constructions: recursive Strassen-like graphs driven by
// an MmSpec, the classical cubic algorithm, standalone encoder/decoder
// fragments, disjoint unions, the recursive sub-CDAG family bookkeeping, and
// an exact field-evaluation oracle over the built graphs.

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "mmio/cdag.hpp"
#include "mmio/common.hpp"
#include "mmio/mmspec.hpp"
#include "mmio/vertex_id.hpp"

namespace mmio {

struct BuildReport {
  int64_t n_vertices = 0;
  int64_t n_edges = 0;
  std::vector<SubCdagFamily> families;  // indexed by recursion level
};

struct BuildResult {
  Cdag g;
  BuildReport report;
};

namespace detail {

// Resolves and emits the recursive wiring of a Strassen-like CDAG.  A node at
// `path` (digits are 1-based child ranks below `root`) with operand size s
// either is a single product vertex (s == 1) or consists of encoder
// combination vertices, m0 child nodes of size s/n0, and s^2 decoder output
// vertices.  A pass-through combination row materializes no vertex: a child's
// operand reference resolves through it to an ancestor's combination vertex
// or, ultimately, to a global input element.
class StrassenWiring {
 public:
  StrassenWiring(const MmSpec& spec, int64_t n, std::vector<uint8_t> root = {})
      : spec_(spec), n_(n), root_(std::move(root)) {
    if (spec_.m0 > 255) throw std::invalid_argument("m0 too large for path encoding");
    if (n_ < 1 || exact_log(spec_.n0, n_) < 0)
      throw std::invalid_argument(spec_.n0 == 2
                                      ? std::string("n must be a power of 2")
                                      : "n must be a power of " + std::to_string(spec_.n0));
  }

  // The vertex holding element (r, c) of the `side` operand (s x s) of the
  // node at `path`.
  VertexId input_vertex(std::vector<uint8_t> path, char side, int64_t s, int64_t r,
                        int64_t c) const {
    while (path.size() > root_.size()) {
      const int k = path.back();
      path.pop_back();
      const int pos = spec_.pass_input(side, k);
      if (pos < 0)
        return VertexId{std::move(path), side == 'A' ? Role::EncAOut : Role::EncBOut,
                        {k, static_cast<int32_t>(r), static_cast<int32_t>(c)}};
      r += (pos / spec_.n0) * s;
      c += (pos % spec_.n0) * s;
      s *= spec_.n0;
    }
    return VertexId{std::move(path), side == 'A' ? Role::InputA : Role::InputB,
                    {static_cast<int32_t>(r), static_cast<int32_t>(c)}};
  }

  // The vertex holding output element (r, c) of the node at `path` (size s).
  VertexId node_out(std::vector<uint8_t> path, int64_t s, int64_t r, int64_t c) const {
    if (s == 1) return VertexId{std::move(path), Role::Product, {}};
    return VertexId{std::move(path), Role::DecOut,
                    {static_cast<int32_t>(r), static_cast<int32_t>(c)}};
  }

  void emit(DraftCdag& d, const std::vector<uint8_t>& path, int64_t s) const {
    if (s == 1) {
      const VertexId me{path, Role::Product, {}};
      d.add_vertex(me);
      for (char side : {'A', 'B'}) {
        VertexId src = input_vertex(path, side, 1, 0, 0);
        ensure_source(d, src);
        d.add_edge(src, me);
      }
      return;
    }
    const int64_t h = s / spec_.n0;
    for (char side : {'A', 'B'}) {
      const Role role = side == 'A' ? Role::EncAOut : Role::EncBOut;
      for (int k = 1; k <= spec_.m0; ++k) {
        if (!spec_.row_nontrivial(side, k)) continue;
        const auto& row = spec_.enc(side)[k - 1];
        for (int64_t r = 0; r < h; ++r)
          for (int64_t c = 0; c < h; ++c) {
            const VertexId me{path, role,
                              {k, static_cast<int32_t>(r), static_cast<int32_t>(c)}};
            d.add_vertex(me);
            for (int t = 0; t < spec_.n0 * spec_.n0; ++t) {
              if (row[t] == 0) continue;
              VertexId src = input_vertex(path, side, s, (t / spec_.n0) * h + r,
                                          (t % spec_.n0) * h + c);
              ensure_source(d, src);
              d.add_edge(src, me);
            }
          }
      }
    }
    for (int k = 1; k <= spec_.m0; ++k) {
      std::vector<uint8_t> child = path;
      child.push_back(static_cast<uint8_t>(k));
      emit(d, child, h);
    }
    for (int64_t I = 0; I < s; ++I)
      for (int64_t J = 0; J < s; ++J) {
        const VertexId me{path, Role::DecOut,
                          {static_cast<int32_t>(I), static_cast<int32_t>(J)}};
        d.add_vertex(me);
        const int t = static_cast<int>(I / h) * spec_.n0 + static_cast<int>(J / h);
        for (int k = 1; k <= spec_.m0; ++k) {
          if (spec_.dec[t][k - 1] == 0) continue;
          std::vector<uint8_t> child = path;
          child.push_back(static_cast<uint8_t>(k));
          d.add_edge(node_out(std::move(child), h, I % h, J % h), me);
        }
      }
  }

  const MmSpec& spec() const { return spec_; }
  int64_t n() const { return n_; }

 private:
  // Global inputs materialize on first reference; a resolved combination
  // vertex must already exist (ancestors are emitted before descendants).
  static void ensure_source(DraftCdag& d, const VertexId& src) {
    if (src.role == Role::InputA || src.role == Role::InputB) d.add_vertex(src, true);
  }

  const MmSpec& spec_;
  int64_t n_;
  std::vector<uint8_t> root_;
};

// Graph-only construction of a single Strassen-like CDAG rooted at `root`.
inline Cdag build_like_graph(const MmSpec& spec, int64_t n, Json meta,
                             const std::vector<uint8_t>& root = {}) {
  StrassenWiring w(spec, n, root);
  DraftCdag d;
  w.emit(d, root, n);
  if (n == 1) {
    d.mark_output(VertexId{root, Role::Product, {}});
  } else {
    for (int64_t I = 0; I < n; ++I)
      for (int64_t J = 0; J < n; ++J)
        d.mark_output(VertexId{root, Role::DecOut,
                               {static_cast<int32_t>(I), static_cast<int32_t>(J)}});
  }
  return std::move(d).seal(std::move(meta));
}

enum class FamilyMode { AllPaths, Lemma5 };

inline std::vector<std::vector<uint8_t>> paths_of_length(int m0, int len) {
  std::vector<std::vector<uint8_t>> out;
  std::vector<uint8_t> cur(static_cast<size_t>(len), 1);
  while (true) {
    out.push_back(cur);
    int i = len - 1;
    while (i >= 0 && cur[i] == m0) {
      cur[i] = 1;
      --i;
    }
    if (i < 0) break;
    ++cur[i];
  }
  return out;
}

inline std::vector<SubCdagFamily> materialize_families(const Cdag& g, const MmSpec& spec,
                                                       int64_t n, FamilyMode mode) {
  const StrassenWiring w(spec, n, {});
  const int levels = static_cast<int>(exact_log(spec.n0, n));
  const int kA = spec.lowest_nontrivial_row('A');
  const int kB = spec.lowest_nontrivial_row('B');
  if (mode == FamilyMode::Lemma5 && (kA < 0 || kB < 0))
    throw std::invalid_argument("spec is not Strassen-like: a side has no nontrivial row");

  std::vector<SubCdagFamily> fams;
  for (int lvl = 0; lvl <= levels; ++lvl) {
    SubCdagFamily fam;
    fam.level = lvl;
    std::vector<std::vector<uint8_t>> paths;
    if (mode == FamilyMode::AllPaths) {
      fam.claimed_count = ipow_checked(spec.m0, lvl);
      paths = paths_of_length(spec.m0, lvl);
    } else {
      fam.claimed_count = ipow_checked(spec.m0, std::max(0, lvl - 2));
      if (lvl == 0) {
        paths = {{}};
      } else if (lvl == 1) {
        paths = {{static_cast<uint8_t>(kA)}};
      } else {
        for (auto& p : paths_of_length(spec.m0, lvl - 2)) {
          p.push_back(static_cast<uint8_t>(kA));
          p.push_back(static_cast<uint8_t>(kB));
          paths.push_back(std::move(p));
        }
      }
    }
    // `paths` is in lexicographic order by construction.
    fam.members.resize(paths.size());
    int64_t s = n;
    for (int i = 0; i < lvl; ++i) s /= spec.n0;
    std::unordered_set<int32_t> input_of_level;
    for (size_t mi = 0; mi < paths.size(); ++mi) {
      SubCdagMember& m = fam.members[mi];
      m.path = paths[mi];
      for (char side : {'A', 'B'})
        for (int64_t r = 0; r < s; ++r)
          for (int64_t c = 0; c < s; ++c) {
            const int32_t v = g.find(w.input_vertex(m.path, side, s, r, c));
            if (v < 0) throw std::logic_error("family input vertex missing from graph");
            m.inputs.push_back(v);
          }
      std::sort(m.inputs.begin(), m.inputs.end());
      if (std::adjacent_find(m.inputs.begin(), m.inputs.end()) != m.inputs.end())
        throw std::logic_error("family member has duplicate input vertices");
      if (s == 1) {
        const int32_t v = g.find(VertexId{m.path, Role::Product, {}});
        if (v < 0) throw std::logic_error("family output vertex missing from graph");
        m.outputs.push_back(v);
      } else {
        for (int64_t I = 0; I < s; ++I)
          for (int64_t J = 0; J < s; ++J) {
            const int32_t v = g.find(VertexId{
                m.path, Role::DecOut, {static_cast<int32_t>(I), static_cast<int32_t>(J)}});
            if (v < 0) throw std::logic_error("family output vertex missing from graph");
            m.outputs.push_back(v);
          }
        std::sort(m.outputs.begin(), m.outputs.end());
      }
      input_of_level.insert(m.inputs.begin(), m.inputs.end());
    }
    // Created vertices: everything whose path extends the member path, minus
    // the member's own (resolved) input vertices.  Only the level-0 member
    // can have resolved inputs inside its own subtree.
    for (int32_t v = 0; v < static_cast<int32_t>(g.n_vertices()); ++v) {
      const VertexId& id = g.ids[v];
      if (static_cast<int>(id.path.size()) < lvl) continue;
      const std::vector<uint8_t> prefix(id.path.begin(), id.path.begin() + lvl);
      const auto it = std::lower_bound(paths.begin(), paths.end(), prefix);
      if (it == paths.end() || *it != prefix) continue;
      SubCdagMember& m = fam.members[static_cast<size_t>(it - paths.begin())];
      if (lvl == 0 && input_of_level.count(v)) continue;
      m.verts.push_back(v);
    }
    fams.push_back(std::move(fam));
  }
  return fams;
}

}  // namespace detail

// Checks that a family member is an isomorphic embedded copy of the
// standalone CDAG for its size: the canonical bijection maps the fresh
// graph's vertices onto the member (created part by path prefixing, inputs by
// operand resolution), every fresh edge to a graph edge, and the member
// induces no extra edges.  `fresh` may supply a pre-built standalone graph of
// the member's size to avoid rebuilding it per member.
inline bool member_isomorphic(const Cdag& g, const MmSpec& spec, int64_t n,
                              const SubCdagMember& m, const Cdag* fresh = nullptr) {
  const int lvl = static_cast<int>(m.path.size());
  int64_t s = n;
  for (int i = 0; i < lvl; ++i) s /= spec.n0;
  Cdag local;
  if (fresh == nullptr) {
    Json meta;
    meta["builder"] = "template";
    meta["params"]["n"] = s;
    local = detail::build_like_graph(spec, s, std::move(meta));
    fresh = &local;
  }
  const Cdag& f = *fresh;
  if (f.n_vertices() != static_cast<int64_t>(m.verts.size() + m.inputs.size())) return false;

  std::unordered_set<int32_t> mem;
  mem.insert(m.verts.begin(), m.verts.end());
  mem.insert(m.inputs.begin(), m.inputs.end());
  if (mem.size() != m.verts.size() + m.inputs.size()) return false;  // overlap

  const detail::StrassenWiring w(spec, n, {});
  std::vector<int32_t> sigma(f.n_vertices(), -1);
  std::unordered_set<int32_t> image;
  for (int32_t fv = 0; fv < static_cast<int32_t>(f.n_vertices()); ++fv) {
    const VertexId& fid = f.ids[fv];
    VertexId gid;
    if (fid.role == Role::InputA || fid.role == Role::InputB) {
      gid = w.input_vertex(m.path, fid.role == Role::InputA ? 'A' : 'B', s, fid.index[0],
                           fid.index[1]);
    } else {
      gid.path = m.path;
      gid.path.insert(gid.path.end(), fid.path.begin(), fid.path.end());
      gid.role = fid.role;
      gid.index = fid.index;
    }
    const int32_t gv = g.find(gid);
    if (gv < 0 || !mem.count(gv)) return false;
    if (!image.insert(gv).second) return false;  // not injective
    sigma[fv] = gv;
  }
  for (int32_t fv = 0; fv < static_cast<int32_t>(f.n_vertices()); ++fv) {
    const auto gp = g.preds(sigma[fv]);
    for (const int32_t fu : f.preds(fv))
      if (!std::binary_search(gp.begin(), gp.end(), sigma[fu])) return false;
  }
  int64_t induced_edges = 0;
  for (const int32_t gv : mem)
    for (const int32_t gw : g.succs(gv))
      if (mem.count(gw)) ++induced_edges;
  return induced_edges == f.n_edges();
}

inline BuildResult build_strassen(int64_t n, bool with_families = true) {
  const MmSpec& spec = strassen_2x7_spec();
  Json meta;
  meta["builder"] = "strassen";
  meta["params"]["n"] = n;
  meta["params"]["spec"] = to_json(spec);
  BuildResult res;
  res.g = detail::build_like_graph(spec, n, std::move(meta));
  res.report.n_vertices = res.g.n_vertices();
  res.report.n_edges = res.g.n_edges();
  if (with_families)
    res.report.families =
        detail::materialize_families(res.g, spec, n, detail::FamilyMode::AllPaths);
  return res;
}

inline BuildResult build_strassen_like(const MmSpec& spec, int64_t n,
                                       bool with_families = true) {
  validate_mmspec(spec);
  if (spec.lowest_nontrivial_row('A') < 0 || spec.lowest_nontrivial_row('B') < 0)
    throw std::invalid_argument("spec is not Strassen-like: a side has no nontrivial row");
  Json meta;
  meta["builder"] = "strassen-like";
  meta["params"]["n"] = n;
  meta["params"]["spec"] = to_json(spec);
  BuildResult res;
  res.g = detail::build_like_graph(spec, n, std::move(meta));
  res.report.n_vertices = res.g.n_vertices();
  res.report.n_edges = res.g.n_edges();
  if (with_families)
    res.report.families =
        detail::materialize_families(res.g, spec, n, detail::FamilyMode::Lemma5);
  return res;
}

inline BuildResult build_naive(int64_t n) {
  if (n < 1 || !is_pow2(n)) throw std::invalid_argument("n must be a power of 2");
  DraftCdag d;
  for (int64_t r = 0; r < n; ++r)
    for (int64_t c = 0; c < n; ++c) {
      d.add_vertex(VertexId{{}, Role::InputA, {static_cast<int32_t>(r), static_cast<int32_t>(c)}});
      d.add_vertex(VertexId{{}, Role::InputB, {static_cast<int32_t>(r), static_cast<int32_t>(c)}});
    }
  auto in_id = [](Role role, int64_t r, int64_t c) {
    return VertexId{{}, role, {static_cast<int32_t>(r), static_cast<int32_t>(c)}};
  };
  if (n == 1) {
    const VertexId me{{}, Role::Product, {}};
    d.add_vertex(me);
    d.add_edge(in_id(Role::InputA, 0, 0), me);
    d.add_edge(in_id(Role::InputB, 0, 0), me);
    d.mark_output(me);
  } else {
    auto mul_id = [](int64_t i, int64_t k, int64_t j) {
      return VertexId{{}, Role::Product,
                      {static_cast<int32_t>(i), static_cast<int32_t>(k), static_cast<int32_t>(j)}};
    };
    for (int64_t i = 0; i < n; ++i)
      for (int64_t k = 0; k < n; ++k)
        for (int64_t j = 0; j < n; ++j) {
          const VertexId me = mul_id(i, k, j);
          d.add_vertex(me);
          d.add_edge(in_id(Role::InputA, i, k), me);
          d.add_edge(in_id(Role::InputB, k, j), me);
        }
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < n; ++j) {
        VertexId prev = mul_id(i, 0, j);
        for (int64_t t = 1; t < n; ++t) {
          VertexId cur =
              t == n - 1
                  ? VertexId{{}, Role::DecOut,
                             {static_cast<int32_t>(i), static_cast<int32_t>(j)}}
                  : VertexId{{}, Role::DecOut,
                             {static_cast<int32_t>(i), static_cast<int32_t>(j),
                              static_cast<int32_t>(t)}};
          d.add_vertex(cur);
          d.add_edge(prev, cur);
          d.add_edge(mul_id(i, t, j), cur);
          prev = cur;
        }
        d.mark_output(prev);
      }
  }
  Json meta;
  meta["builder"] = "naive";
  meta["params"]["n"] = n;
  BuildResult res;
  res.g = std::move(d).seal(std::move(meta));
  res.report.n_vertices = res.g.n_vertices();
  res.report.n_edges = res.g.n_edges();
  return res;
}

// q vertex-disjoint copies of the Strassen-like CDAG; copy c lives under the
// path prefix [c] (c = 1..q).
inline BuildResult build_disjoint_copies(const MmSpec& spec, int64_t n, int q) {
  validate_mmspec(spec);
  if (q < 1 || q > 255) throw std::invalid_argument("q must be in [1, 255]");
  DraftCdag d;
  for (int copy = 1; copy <= q; ++copy) {
    const std::vector<uint8_t> root{static_cast<uint8_t>(copy)};
    detail::StrassenWiring w(spec, n, root);
    w.emit(d, root, n);
    if (n == 1) {
      d.mark_output(VertexId{root, Role::Product, {}});
    } else {
      for (int64_t I = 0; I < n; ++I)
        for (int64_t J = 0; J < n; ++J)
          d.mark_output(VertexId{root, Role::DecOut,
                                 {static_cast<int32_t>(I), static_cast<int32_t>(J)}});
    }
  }
  Json meta;
  meta["builder"] = "disjoint-copies";
  meta["params"]["n"] = n;
  meta["params"]["q"] = q;
  meta["params"]["spec"] = to_json(spec);
  BuildResult res;
  res.g = std::move(d).seal(std::move(meta));
  res.report.n_vertices = res.g.n_vertices();
  res.report.n_edges = res.g.n_edges();
  return res;
}

// Standalone encoder fragment for one side, at unit block granularity:
// n0^2 input elements feeding the m0 combination outputs.  A pass-through
// row's output IS the corresponding input vertex (merged), so the fragment's
// output list may include input vertices.
inline Cdag build_encoder(const MmSpec& spec, char side) {
  validate_mmspec(spec);
  if (side != 'A' && side != 'B') throw std::invalid_argument("side must be 'A' or 'B'");
  const Role in_role = side == 'A' ? Role::InputA : Role::InputB;
  const Role out_role = side == 'A' ? Role::EncAOut : Role::EncBOut;
  DraftCdag d;
  for (int i = 0; i < spec.n0; ++i)
    for (int j = 0; j < spec.n0; ++j) d.add_vertex(VertexId{{}, in_role, {i, j}});
  for (int k = 1; k <= spec.m0; ++k) {
    const int pos = spec.pass_input(side, k);
    if (pos >= 0) {
      d.mark_output(VertexId{{}, in_role, {pos / spec.n0, pos % spec.n0}});
      continue;
    }
    const VertexId me{{}, out_role, {k, 0, 0}};
    d.add_vertex(me);
    const auto& row = spec.enc(side)[k - 1];
    for (int t = 0; t < spec.n0 * spec.n0; ++t)
      if (row[t] != 0) d.add_edge(VertexId{{}, in_role, {t / spec.n0, t % spec.n0}}, me);
    d.mark_output(me);
  }
  Json meta;
  meta["builder"] = "encoder";
  meta["params"]["side"] = std::string(1, side);
  meta["params"]["spec"] = to_json(spec);
  return std::move(d).seal(std::move(meta), /*fragment=*/true);
}

// Standalone decoder fragment: m0 product vertices feeding the n0^2 output
// elements.
inline Cdag build_decoder(const MmSpec& spec) {
  validate_mmspec(spec);
  DraftCdag d;
  auto prod_id = [](int k) { return VertexId{{static_cast<uint8_t>(k)}, Role::Product, {}}; };
  for (int k = 1; k <= spec.m0; ++k) d.add_vertex(prod_id(k));
  for (int t = 0; t < spec.n0 * spec.n0; ++t) {
    const VertexId me{{}, Role::DecOut, {t / spec.n0, t % spec.n0}};
    d.add_vertex(me);
    for (int k = 1; k <= spec.m0; ++k)
      if (spec.dec[t][k - 1] != 0) d.add_edge(prod_id(k), me);
    d.mark_output(me);
  }
  Json meta;
  meta["builder"] = "decoder";
  meta["params"]["spec"] = to_json(spec);
  return std::move(d).seal(std::move(meta), /*fragment=*/true);
}

// Exact evaluation of a built CDAG over Z_p: assigns the n^2-element operands
// (row-major), walks the topological order, and re-derives every vertex's
// operation from its identity — cross-checking the derived predecessor set
// against the actual wiring at each step.  Returns the n^2 output elements
// row-major.  Throws on any wiring mismatch.
inline std::vector<int64_t> evaluate_cdag(const Cdag& g, const std::vector<int64_t>& a,
                                          const std::vector<int64_t>& b, int64_t p) {
  if (!g.meta.contains("builder")) throw std::invalid_argument("evaluate: graph has no builder metadata");
  const std::string builder = g.meta["builder"].get<std::string>();
  if (g.meta.contains("params") && g.meta["params"].contains("expanded") &&
      g.meta["params"]["expanded"].get<bool>())
    throw std::invalid_argument("evaluate: expanded graphs are not evaluable");
  const bool spec_driven = builder == "strassen" || builder == "strassen-like";
  if (!spec_driven && builder != "naive")
    throw std::invalid_argument("evaluate: unsupported builder \"" + builder + "\"");
  const int64_t n = g.meta["params"]["n"].get<int64_t>();
  if (static_cast<int64_t>(a.size()) != n * n || static_cast<int64_t>(b.size()) != n * n)
    throw std::invalid_argument("evaluate: operand size must be n^2");
  if (p < 2) throw std::invalid_argument("evaluate: modulus must be >= 2");

  MmSpec spec;
  if (spec_driven) spec = load_mmspec(g.meta["params"]["spec"]);
  const detail::StrassenWiring* w = nullptr;
  detail::StrassenWiring wire = spec_driven ? detail::StrassenWiring(spec, n, {})
                                            : detail::StrassenWiring(strassen_2x7_spec(), 1, {});
  if (spec_driven) w = &wire;

  auto resolve = [&g](const VertexId& id) {
    const int32_t v = g.find(id);
    if (v < 0) throw std::logic_error("evaluate: derived vertex missing: " + to_string(id));
    return v;
  };
  auto check_preds = [&g](int32_t v, std::vector<int32_t> derived) {
    std::sort(derived.begin(), derived.end());
    const auto actual = g.preds(v);
    if (!std::equal(derived.begin(), derived.end(), actual.begin(), actual.end()))
      throw std::logic_error("evaluate: wiring mismatch at " + to_string(g.ids[v]));
  };

  std::vector<int64_t> val(g.n_vertices(), 0);
  for (const int32_t v : g.topo) {
    const VertexId& id = g.ids[v];
    switch (id.role) {
      case Role::InputA:
        val[v] = mod_norm(a[id.index[0] * n + id.index[1]], p);
        break;
      case Role::InputB:
        val[v] = mod_norm(b[id.index[0] * n + id.index[1]], p);
        break;
      case Role::Product: {
        std::vector<int32_t> derived;
        if (spec_driven) {
          derived = {resolve(w->input_vertex(id.path, 'A', 1, 0, 0)),
                     resolve(w->input_vertex(id.path, 'B', 1, 0, 0))};
        } else if (id.index.empty()) {  // n == 1
          derived = {resolve(VertexId{{}, Role::InputA, {0, 0}}),
                     resolve(VertexId{{}, Role::InputB, {0, 0}})};
        } else {
          derived = {resolve(VertexId{{}, Role::InputA, {id.index[0], id.index[1]}}),
                     resolve(VertexId{{}, Role::InputB, {id.index[1], id.index[2]}})};
        }
        check_preds(v, derived);
        const auto pr = g.preds(v);
        val[v] = mod_mul(val[pr[0]], val[pr[1]], p);
        break;
      }
      case Role::EncAOut:
      case Role::EncBOut: {
        const char side = id.role == Role::EncAOut ? 'A' : 'B';
        int64_t s = n;
        for (size_t i = 0; i < id.path.size(); ++i) s /= spec.n0;
        const int64_t h = s / spec.n0;
        const int k = id.index[0];
        const int64_t r = id.index[1], c = id.index[2];
        const auto& row = spec.enc(side)[k - 1];
        std::vector<int32_t> derived;
        int64_t acc = 0;
        for (int t = 0; t < spec.n0 * spec.n0; ++t) {
          if (row[t] == 0) continue;
          const int32_t src = resolve(w->input_vertex(
              id.path, side, s, (t / spec.n0) * h + r, (t % spec.n0) * h + c));
          derived.push_back(src);
          acc = mod_add(acc, mod_mul(mod_norm(row[t], p), val[src], p), p);
        }
        check_preds(v, std::move(derived));
        val[v] = acc;
        break;
      }
      case Role::DecOut: {
        if (spec_driven) {
          int64_t s = n;
          for (size_t i = 0; i < id.path.size(); ++i) s /= spec.n0;
          const int64_t h = s / spec.n0;
          const int64_t I = id.index[0], J = id.index[1];
          const int t = static_cast<int>(I / h) * spec.n0 + static_cast<int>(J / h);
          std::vector<int32_t> derived;
          int64_t acc = 0;
          for (int k = 1; k <= spec.m0; ++k) {
            if (spec.dec[t][k - 1] == 0) continue;
            std::vector<uint8_t> child = id.path;
            child.push_back(static_cast<uint8_t>(k));
            const int32_t src = resolve(w->node_out(std::move(child), h, I % h, J % h));
            derived.push_back(src);
            acc = mod_add(acc, mod_mul(mod_norm(spec.dec[t][k - 1], p), val[src], p), p);
          }
          check_preds(v, std::move(derived));
          val[v] = acc;
        } else {
          const int64_t i = id.index[0], j = id.index[1];
          const int64_t t_eff = id.index.size() == 3 ? id.index[2] : n - 1;
          auto mul_id = [](int64_t i2, int64_t k2, int64_t j2) {
            return VertexId{{}, Role::Product,
                            {static_cast<int32_t>(i2), static_cast<int32_t>(k2),
                             static_cast<int32_t>(j2)}};
          };
          std::vector<int32_t> derived;
          derived.push_back(resolve(mul_id(i, t_eff, j)));
          if (t_eff == 1)
            derived.push_back(resolve(mul_id(i, 0, j)));
          else
            derived.push_back(resolve(VertexId{{}, Role::DecOut,
                                               {static_cast<int32_t>(i), static_cast<int32_t>(j),
                                                static_cast<int32_t>(t_eff - 1)}}));
          check_preds(v, std::move(derived));
          int64_t acc = 0;
          for (const int32_t u : g.preds(v)) acc = mod_add(acc, val[u], p);
          val[v] = acc;
        }
        break;
      }
    }
  }

  std::vector<int64_t> out(static_cast<size_t>(n * n), 0);
  if (static_cast<int64_t>(g.outputs.size()) != n * n)
    throw std::logic_error("evaluate: output count mismatch");
  for (const int32_t v : g.outputs) {
    const VertexId& id = g.ids[v];
    if (id.role == Role::Product && id.index.empty() && n == 1)
      out[0] = val[v];
    else if (id.role == Role::DecOut && id.index.size() == 2)
      out[id.index[0] * n + id.index[1]] = val[v];
    else
      throw std::logic_error("evaluate: unexpected output vertex " + to_string(id));
  }
  return out;
}

}  // namespace mmio
