#pragma once

// domflow.hpp — minimum dominator / post-dominator computation as a
// unit-capacity vertex min-cut (vertex-splitting + max flow), a brute-force
// oracle over small instances, the closed-form information-flow value w(u,v)
// of square matrix multiplication, and its empirical counterpart measured by
// exhaustive enumeration over small finite rings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_set>
#include <vector>

#include "mmio/cdag.hpp"
#include "mmio/common.hpp"

namespace mmio {

struct DominatorResult {
  int64_t size = 0;
  std::vector<int32_t> witness;  // one minimum cutting set, ascending
  std::string method;            // "mincut" or "brute"
};

// True when removing `cut` leaves no source→target path (a vertex lying in
// `cut` blocks paths through itself, including zero-length ones).
inline bool cuts_all_paths(const Cdag& g, const std::vector<int32_t>& sources,
                           const std::vector<int32_t>& targets,
                           const std::vector<int32_t>& cut) {
  std::vector<char> blocked(g.n_vertices(), 0), seen(g.n_vertices(), 0);
  for (const int32_t v : cut) blocked[v] = 1;
  std::vector<char> is_target(g.n_vertices(), 0);
  for (const int32_t t : targets) is_target[t] = 1;
  std::deque<int32_t> q;
  for (const int32_t s : sources)
    if (!blocked[s] && !seen[s]) {
      seen[s] = 1;
      q.push_back(s);
    }
  while (!q.empty()) {
    const int32_t x = q.front();
    q.pop_front();
    if (is_target[x]) return false;
    for (const int32_t w : g.succs(x))
      if (!blocked[w] && !seen[w]) {
        seen[w] = 1;
        q.push_back(w);
      }
  }
  return true;
}

// Exact minimum vertex cut between a source set and a target set, where every
// vertex — sources and targets included — may be cut.  Built once per graph;
// solve() may be called repeatedly with different source/target sets.
class MinVertexCut {
 public:
  explicit MinVertexCut(const Cdag& g) : g_(g) {
    const int32_t V = static_cast<int32_t>(g.n_vertices());
    S_ = 2 * V;
    T_ = 2 * V + 1;
    adj_.resize(static_cast<size_t>(2 * V + 2));
    for (int32_t v = 0; v < V; ++v) add_arc(2 * v, 2 * v + 1, 1);  // split arc, cap 1
    for (int32_t v = 0; v < V; ++v)
      for (const int32_t w : g.succs(v)) add_arc(2 * v + 1, 2 * w, kInf);
    static_arcs_ = arcs_.size();
    static_caps_.reserve(static_arcs_);
    for (const Arc& a : arcs_) static_caps_.push_back(a.cap);
  }

  DominatorResult solve(std::vector<int32_t> sources, std::vector<int32_t> targets) {
    const int32_t V = static_cast<int32_t>(g_.n_vertices());
    if (targets.empty()) throw std::invalid_argument("empty targets");
    auto canon = [V](std::vector<int32_t>& xs, const char* what) {
      std::sort(xs.begin(), xs.end());
      xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
      if (!xs.empty() && (xs.front() < 0 || xs.back() >= V))
        throw std::invalid_argument(std::string(what) + " out of range");
    };
    canon(sources, "sources");
    canon(targets, "targets");

    for (const int32_t s : sources) add_arc(S_, 2 * s, kInf);
    for (const int32_t t : targets) add_arc(2 * t + 1, T_, kInf);

    const int64_t flow = dinic();

    // Residual reachability from S: a vertex is in the cut exactly when its
    // in-node is reached but its out-node is not (only split arcs are finite,
    // so the min cut consists of split arcs alone).
    std::vector<char> reach(adj_.size(), 0);
    {
      std::deque<int32_t> q{S_};
      reach[S_] = 1;
      while (!q.empty()) {
        const int32_t x = q.front();
        q.pop_front();
        for (const int32_t id : adj_[x]) {
          const Arc& a = arcs_[id];
          if (a.cap > 0 && !reach[a.to]) {
            reach[a.to] = 1;
            q.push_back(a.to);
          }
        }
      }
    }
    DominatorResult res;
    res.method = "mincut";
    res.size = flow;
    for (int32_t v = 0; v < V; ++v)
      if (reach[2 * v] && !reach[2 * v + 1]) res.witness.push_back(v);

    // Undo the query arcs and restore pristine capacities.
    adj_[S_].clear();
    adj_[T_].clear();
    for (const int32_t s : sources) adj_[2 * s].pop_back();
    for (const int32_t t : targets) adj_[2 * t + 1].pop_back();
    arcs_.resize(static_arcs_);
    for (size_t i = 0; i < static_arcs_; ++i) arcs_[i].cap = static_caps_[i];

    // Re-verify on every call: the witness must cut all source→target paths
    // (path search on the original graph) and match the flow value (Menger).
    if (static_cast<int64_t>(res.witness.size()) != flow)
      throw std::logic_error("min cut witness size does not match flow value");
    if (!cuts_all_paths(g_, sources, targets, res.witness))
      throw std::logic_error("min cut witness fails path verification");
    return res;
  }

 private:
  static constexpr int64_t kInf = int64_t{1} << 40;

  struct Arc {
    int32_t to;
    int64_t cap;
  };

  void add_arc(int32_t u, int32_t v, int64_t cap) {
    adj_[u].push_back(static_cast<int32_t>(arcs_.size()));
    arcs_.push_back({v, cap});
    adj_[v].push_back(static_cast<int32_t>(arcs_.size()));
    arcs_.push_back({u, 0});
  }

  int64_t dinic() {
    int64_t flow = 0;
    std::vector<int32_t> level(adj_.size()), iter(adj_.size());
    while (true) {
      std::fill(level.begin(), level.end(), -1);
      std::deque<int32_t> q{S_};
      level[S_] = 0;
      while (!q.empty()) {
        const int32_t x = q.front();
        q.pop_front();
        for (const int32_t id : adj_[x]) {
          const Arc& a = arcs_[id];
          if (a.cap > 0 && level[a.to] < 0) {
            level[a.to] = level[x] + 1;
            q.push_back(a.to);
          }
        }
      }
      if (level[T_] < 0) break;
      std::fill(iter.begin(), iter.end(), 0);
      while (true) {
        const int64_t pushed = dfs(S_, kInf, level, iter);
        if (pushed == 0) break;
        flow += pushed;
      }
    }
    return flow;
  }

  int64_t dfs(int32_t x, int64_t limit, const std::vector<int32_t>& level,
              std::vector<int32_t>& iter) {
    if (x == T_) return limit;
    for (int32_t& i = iter[x]; i < static_cast<int32_t>(adj_[x].size()); ++i) {
      const int32_t id = adj_[x][i];
      Arc& a = arcs_[id];
      if (a.cap <= 0 || level[a.to] != level[x] + 1) continue;
      const int64_t pushed = dfs(a.to, std::min(limit, a.cap), level, iter);
      if (pushed > 0) {
        a.cap -= pushed;
        arcs_[id ^ 1].cap += pushed;
        return pushed;
      }
    }
    return 0;
  }

  const Cdag& g_;
  int32_t S_ = 0, T_ = 0;
  std::vector<Arc> arcs_;
  std::vector<std::vector<int32_t>> adj_;
  size_t static_arcs_ = 0;
  std::vector<int64_t> static_caps_;
};

// Minimum dominator of `targets`: smallest vertex set meeting every path from
// the graph inputs to a target.
inline DominatorResult min_dominator(const Cdag& g, const std::vector<int32_t>& targets) {
  MinVertexCut mc(g);
  std::vector<int32_t> sources(g.inputs.begin(), g.inputs.end());
  return mc.solve(std::move(sources), targets);
}

// Minimum post-dominator: smallest vertex set meeting every path from
// `sources` to the output subset `targets`.  Sources must not be outputs.
inline DominatorResult min_postdominator(const Cdag& g, const std::vector<int32_t>& sources,
                                         const std::vector<int32_t>& targets) {
  for (const int32_t s : sources)
    if (s >= 0 && s < static_cast<int32_t>(g.n_vertices()) && g.is_output(s))
      throw std::invalid_argument("post-dominator sources must exclude outputs");
  for (const int32_t t : targets)
    if (t < 0 || t >= static_cast<int32_t>(g.n_vertices()) || !g.is_output(t))
      throw std::invalid_argument("post-dominator targets must be output vertices");
  MinVertexCut mc(g);
  return mc.solve(sources, targets);
}

// Oracle: enumerate vertex subsets by increasing cardinality (then
// lexicographically) and return the first one that cuts all source→target
// paths.  Returns nullopt when every subset up to max_size fails.
inline std::optional<DominatorResult> brute_force_min_dominator(
    const Cdag& g, const std::vector<int32_t>& sources, const std::vector<int32_t>& targets,
    int64_t max_size) {
  const int32_t V = static_cast<int32_t>(g.n_vertices());
  if (V > 40 && max_size > 4)
    throw std::invalid_argument("brute force requires <= 40 vertices or max_size <= 4");
  if (targets.empty()) throw std::invalid_argument("empty targets");
  max_size = std::min<int64_t>(max_size, V);
  for (int64_t k = 0; k <= max_size; ++k) {
    CombinationGen gen(V, static_cast<int32_t>(k));
    std::vector<int32_t> comb;
    while (gen.next(comb)) {
      if (cuts_all_paths(g, sources, targets, comb)) {
        DominatorResult res;
        res.size = k;
        res.witness = comb;
        res.method = "brute";
        return res;
      }
    }
  }
  return std::nullopt;
}

// Closed-form information-flow value of n×n matrix multiplication for an
// input subset of size u and an output subset of size v:
//   w(u, v) = max(0, (v·4n² − (2n² − u)²) / 8n²)
// kept as an exact rational alongside its double value and ceiling.
struct FlowValue {
  int64_t num = 0;  // numerator before clamping (may be negative)
  int64_t den = 1;
  double value = 0.0;   // max(0, num/den)
  int64_t ceil_w = 0;   // ⌈max(0, num/den)⌉
};

inline FlowValue flow_lower_bound(int64_t u, int64_t v, int64_t n) {
  if (n < 1) throw std::invalid_argument("flow: n must be >= 1");
  if (u < 0 || u > 2 * n * n) throw std::invalid_argument("flow: u out of range [0, 2n^2]");
  if (v < 0 || v > n * n) throw std::invalid_argument("flow: v out of range [0, n^2]");
  FlowValue f;
  const int64_t d = 2 * n * n - u;
  f.num = v * 4 * n * n - d * d;
  f.den = 8 * n * n;
  f.value = f.num <= 0 ? 0.0 : static_cast<double>(f.num) / static_cast<double>(f.den);
  f.ceil_w = f.num <= 0 ? 0 : ceil_div(f.num, f.den);
  return f;
}

// Empirical flow over Z_p: fix the inputs outside X1 to every possible
// assignment; for each, count the distinct projections onto Y1 of A·B as the
// X1 inputs range over all assignments; return the maximum count.  Input
// slots 0..n²−1 are A row-major, n²..2n²−1 are B row-major; output slots are
// C row-major.  Enumeration is capped at 2^30 evaluations.
inline int64_t empirical_flow(int64_t n, int64_t p, const std::vector<int32_t>& X1,
                              const std::vector<int32_t>& Y1) {
  if (n < 1) throw std::invalid_argument("empirical_flow: n must be >= 1");
  if (p < 2) throw std::invalid_argument("empirical_flow: modulus must be >= 2");
  const int64_t m = 2 * n * n;
  {  // enumeration cap: p^m <= 2^30
    int64_t total = 1;
    for (int64_t i = 0; i < m; ++i) {
      total *= p;
      if (total > (int64_t{1} << 30)) throw std::invalid_argument("enumeration cap exceeded");
    }
  }
  auto check_slots = [](const std::vector<int32_t>& xs, int64_t limit, const char* what) {
    std::unordered_set<int32_t> seen;
    for (const int32_t x : xs) {
      if (x < 0 || x >= limit) throw std::invalid_argument(std::string(what) + " slot out of range");
      if (!seen.insert(x).second) throw std::invalid_argument(std::string(what) + " slots repeat");
    }
  };
  check_slots(X1, m, "X1");
  check_slots(Y1, n * n, "Y1");

  std::vector<int32_t> X2;
  {
    std::vector<char> in1(static_cast<size_t>(m), 0);
    for (const int32_t x : X1) in1[x] = 1;
    for (int32_t i = 0; i < m; ++i)
      if (!in1[i]) X2.push_back(i);
  }
  const int64_t u = static_cast<int64_t>(X1.size());
  int64_t n1 = 1, n2 = 1;
  for (int64_t i = 0; i < u; ++i) n1 *= p;
  for (int64_t i = 0; i < m - u; ++i) n2 *= p;

  std::vector<int64_t> slots(static_cast<size_t>(m), 0);
  std::vector<int64_t> c(static_cast<size_t>(n * n), 0);
  int64_t best = 0;
  for (int64_t a2 = 0; a2 < n2; ++a2) {
    int64_t rem = a2;
    for (const int32_t s : X2) {
      slots[s] = rem % p;
      rem /= p;
    }
    std::unordered_set<int64_t> images;
    for (int64_t a1 = 0; a1 < n1; ++a1) {
      int64_t r1 = a1;
      for (const int32_t s : X1) {
        slots[s] = r1 % p;
        r1 /= p;
      }
      for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < n; ++j) {
          int64_t acc = 0;
          for (int64_t k = 0; k < n; ++k)
            acc = (acc + slots[i * n + k] * slots[n * n + k * n + j]) % p;
          c[i * n + j] = acc;
        }
      int64_t code = 0;
      for (const int32_t y : Y1) code = code * p + c[y];
      images.insert(code);
    }
    best = std::max<int64_t>(best, static_cast<int64_t>(images.size()));
  }
  return best;
}

// Internal-flow bound check on a sub-CDAG family: given an output subset O′
// of the family and a set Γ of internal (non-input, non-output) family
// vertices with |Γ| ≤ 2|O′|, computes I′ = graph inputs with a directed path
// to O′ avoiding Γ, asserts |I′| ≥ 2n√(|O′| − 2|Γ|) whenever the radicand is
// positive (n = member dimension), and returns |I′|.
inline int64_t check_internal_flow_bound(const Cdag& g, const SubCdagFamily& family,
                                         const std::vector<int32_t>& o_prime,
                                         const std::vector<int32_t>& gamma) {
  if (family.members.empty()) throw std::invalid_argument("empty family");
  const int32_t V = static_cast<int32_t>(g.n_vertices());
  std::vector<char> in_family(V, 0), family_io(V, 0), family_out(V, 0);
  for (const SubCdagMember& m : family.members) {
    for (const int32_t v : m.verts) in_family[v] = 1;
    for (const int32_t v : m.inputs) family_io[v] = 1;
    for (const int32_t v : m.outputs) family_out[v] = 1;
  }
  for (const int32_t v : gamma) {
    if (v < 0 || v >= V) throw std::invalid_argument("gamma vertex out of range");
    if (g.is_input(v) || family_io[v])
      throw std::invalid_argument("gamma contains input vertices");
    if (!in_family[v] || family_out[v])
      throw std::invalid_argument("gamma must be internal to the family");
  }
  for (const int32_t v : o_prime)
    if (v < 0 || v >= V || !family_out[v])
      throw std::invalid_argument("O' must be family output vertices");
  if (o_prime.empty()) throw std::invalid_argument("empty O'");
  if (static_cast<int64_t>(gamma.size()) > 2 * static_cast<int64_t>(o_prime.size()))
    throw std::invalid_argument("|Gamma| exceeds 2|O'|");

  // Reverse reachability from O′ avoiding Γ.
  std::vector<char> blocked(V, 0), seen(V, 0);
  for (const int32_t v : gamma) blocked[v] = 1;
  std::deque<int32_t> q;
  for (const int32_t t : o_prime)
    if (!seen[t]) {
      seen[t] = 1;
      q.push_back(t);
    }
  while (!q.empty()) {
    const int32_t x = q.front();
    q.pop_front();
    for (const int32_t w : g.preds(x))
      if (!blocked[w] && !seen[w]) {
        seen[w] = 1;
        q.push_back(w);
      }
  }
  int64_t i_prime = 0;
  for (const int32_t v : g.inputs) i_prime += seen[v];

  // Member dimension n from the (square) output count.
  const int64_t out_count = static_cast<int64_t>(family.members.front().outputs.size());
  int64_t nm = 1;
  while (nm * nm < out_count) ++nm;
  if (nm * nm != out_count)
    throw std::invalid_argument("family member output count is not a square");

  const int64_t radicand =
      static_cast<int64_t>(o_prime.size()) - 2 * static_cast<int64_t>(gamma.size());
  if (radicand > 0) {
    const double bound = 2.0 * static_cast<double>(nm) * std::sqrt(static_cast<double>(radicand));
    if (static_cast<double>(i_prime) + 1e-9 < bound)
      throw std::logic_error("internal flow bound violated");
  }
  return i_prime;
}

}  // namespace mmio
