#pragma once

// schedules.hpp — schedule generators for the red-blue pebble game: the
// cache-blocked recursive schedule for Strassen-like CDAGs and the blocked
// classical schedule for the cubic CDAG.  Both emit a deterministic compute
// order and hand cache management to a furthest-next-use (Belady) executor
// that inserts loads, stores, and evictions; every generated schedule is
// no-recompute valid by construction.  Each generator evaluates every
// admissible blocking cutoff and returns the schedule with minimum I/O, which
// makes measured I/O monotone non-increasing in the cache size.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mmio/builders.hpp"
#include "mmio/cdag.hpp"
#include "mmio/common.hpp"
#include "mmio/mmspec.hpp"
#include "mmio/pebbles.hpp"

namespace mmio {

inline int64_t max_fanin(const Cdag& g) {
  int64_t best = 0;
  for (int32_t v = 0; v < static_cast<int32_t>(g.n_vertices()); ++v)
    best = std::max<int64_t>(best, g.in_degree(v));
  return best;
}

// Smallest cache for which any schedule of g can execute at all: a fan-in-k
// compute holds k operands plus its result in cache, and the minimal
// load-load-compute run needs 3 pebbles.
inline int64_t min_schedule_cache(const Cdag& g) { return std::max<int64_t>(3, max_fanin(g) + 1); }

namespace detail {

// Peak number of simultaneously-live values when executing `order` (all
// non-input vertices, topologically consistent) entirely in cache: inputs
// appear when first consumed, values disappear as soon as their last consumer
// has run, outputs never disappear.  This is the red-pebble demand of an
// in-cache execution of the order.
inline int64_t live_peak_of_order(const Cdag& f, const std::vector<int32_t>& order) {
  std::vector<int32_t> remaining_succ(f.n_vertices());
  std::vector<char> present(f.n_vertices(), 0);
  for (int32_t v = 0; v < static_cast<int32_t>(f.n_vertices()); ++v)
    remaining_succ[v] = static_cast<int32_t>(f.out_degree(v));
  int64_t live = 0, peak = 0;
  for (const int32_t v : order) {
    for (const int32_t p : f.preds(v)) {
      if (present[p]) continue;
      if (!f.is_input(p)) throw std::logic_error("live_peak_of_order: order not topological");
      present[p] = 1;
      ++live;
    }
    present[v] = 1;
    ++live;
    peak = std::max(peak, live);
    for (const int32_t p : f.preds(v)) {
      if (--remaining_succ[p] == 0 && !f.is_output(p) && present[p]) {
        present[p] = 0;
        --live;
      }
    }
  }
  return peak;
}

struct InCacheInfo {
  std::vector<int32_t> order;  // all non-input vertices
  int64_t peak_live = 0;       // working set of this order
};

// A topological order of the non-input vertices chosen greedily to keep the
// in-cache working set small: at each step pick the ready vertex with the
// smallest net change in live values (new loads plus itself minus dying
// predecessors), tie-broken by canonical index.  Falls back to the canonical
// topological order for large graphs.
inline InCacheInfo in_cache_order(const Cdag& f) {
  InCacheInfo info;
  const int32_t V = static_cast<int32_t>(f.n_vertices());
  if (V > 3000) {
    for (const int32_t v : f.topo)
      if (!f.is_input(v)) info.order.push_back(v);
    info.peak_live = live_peak_of_order(f, info.order);
    return info;
  }
  std::vector<int32_t> remaining_nonin_preds(V, 0), remaining_succ(V);
  std::vector<char> present(V, 0);
  for (int32_t v = 0; v < V; ++v) {
    remaining_succ[v] = static_cast<int32_t>(f.out_degree(v));
    if (f.is_input(v)) continue;
    int32_t cnt = 0;
    for (const int32_t p : f.preds(v))
      if (!f.is_input(p)) ++cnt;
    remaining_nonin_preds[v] = cnt;
  }
  std::set<int32_t> ready;
  for (int32_t v = 0; v < V; ++v)
    if (!f.is_input(v) && remaining_nonin_preds[v] == 0) ready.insert(v);
  int64_t live = 0, peak = 0;
  while (!ready.empty()) {
    int32_t best = -1;
    int64_t best_delta = std::numeric_limits<int64_t>::max();
    for (const int32_t v : ready) {
      int64_t delta = 1;
      for (const int32_t p : f.preds(v)) {
        if (!present[p]) ++delta;  // an input that must be brought in
        if (remaining_succ[p] == 1 && !f.is_output(p)) --delta;
      }
      if (delta < best_delta) {
        best_delta = delta;
        best = v;
      }
    }
    ready.erase(best);
    for (const int32_t p : f.preds(best)) {
      if (present[p]) continue;
      present[p] = 1;
      ++live;
    }
    present[best] = 1;
    ++live;
    peak = std::max(peak, live);
    for (const int32_t p : f.preds(best)) {
      if (--remaining_succ[p] == 0 && !f.is_output(p) && present[p]) {
        present[p] = 0;
        --live;
      }
    }
    for (const int32_t s : f.succs(best))
      if (--remaining_nonin_preds[s] == 0) ready.insert(s);
    info.order.push_back(best);
  }
  if (static_cast<int32_t>(info.order.size()) + static_cast<int32_t>(f.inputs.size()) != V)
    throw std::logic_error("in_cache_order: order incomplete");
  info.peak_live = peak;
  return info;
}

// Executes a compute order under a furthest-next-use eviction policy,
// emitting the full move sequence.  A dirty victim is stored only when its
// value is needed again or it is an output; dead intermediates are dropped
// for free.  Victim preference: furthest next use, then store-free, then
// canonical index.
inline Schedule belady_execute(const Cdag& g, const std::vector<int32_t>& order, int64_t M) {
  constexpr int64_t kNever = std::numeric_limits<int64_t>::max();
  const int32_t V = static_cast<int32_t>(g.n_vertices());

  // use_positions[v]: order positions at which v is consumed.
  std::vector<std::vector<int64_t>> use_positions(V);
  for (int64_t t = 0; t < static_cast<int64_t>(order.size()); ++t)
    for (const int32_t p : g.preds(order[t])) use_positions[p].push_back(t);
  std::vector<size_t> use_ptr(V, 0);
  auto next_use = [&](int32_t v) {
    return use_ptr[v] < use_positions[v].size() ? use_positions[v][use_ptr[v]] : kNever;
  };

  std::vector<char> red(V, 0), dirty(V, 0), stored_ever(V, 0), computed_ever(V, 0);
  auto needs_store = [&](int32_t v) {
    return dirty[v] && (next_use(v) != kNever || g.is_output(v));
  };
  // Victims ordered: furthest next use first, then store-free, then index.
  using Key = std::tuple<int64_t, int, int32_t>;  // (-next_use, needs_store, v)
  std::set<Key> victims;
  auto key_of = [&](int32_t v) {
    const int64_t nu = next_use(v);
    return Key{nu == kNever ? std::numeric_limits<int64_t>::min() : -nu,
               needs_store(v) ? 1 : 0, v};
  };

  Schedule sched;
  sched.cache = M;
  int64_t red_count = 0;
  auto evict_one = [&](const char* why) {
    if (victims.empty()) throw std::invalid_argument(std::string("cache too small: ") + why);
    const int32_t u = std::get<2>(*victims.begin());
    victims.erase(victims.begin());
    if (needs_store(u)) {
      sched.moves.push_back({Op::Store, u});
      stored_ever[u] = 1;
      dirty[u] = 0;
    }
    sched.moves.push_back({Op::Evict, u});
    red[u] = 0;
    --red_count;
  };

  for (int64_t t = 0; t < static_cast<int64_t>(order.size()); ++t) {
    const int32_t v = order[t];
    if (v < 0 || v >= V || g.is_input(v) || computed_ever[v])
      throw std::logic_error("belady_execute: order must list each non-input vertex exactly once");
    computed_ever[v] = 1;
    // Pin operands for the duration of this step.
    for (const int32_t p : g.preds(v))
      if (red[p]) victims.erase(key_of(p));
    for (const int32_t p : g.preds(v)) {
      if (red[p]) continue;
      if (!g.is_input(p) && !stored_ever[p])
        throw std::logic_error("belady_execute: operand lost before use (order not valid)");
      while (red_count >= M) evict_one("operand load");
      sched.moves.push_back({Op::Load, p});
      red[p] = 1;
      dirty[p] = 0;
      ++red_count;
    }
    while (red_count >= M) evict_one("compute");
    sched.moves.push_back({Op::Compute, v});
    red[v] = 1;
    dirty[v] = 1;
    ++red_count;
    // Consume: advance each operand's next-use pointer past t.
    for (const int32_t p : g.preds(v)) {
      while (use_ptr[p] < use_positions[p].size() && use_positions[p][use_ptr[p]] <= t)
        ++use_ptr[p];
      victims.insert(key_of(p));
    }
    victims.insert(key_of(v));
  }
  // Flush: every output must end blue.
  for (const int32_t v : g.outputs) {
    if (stored_ever[v]) continue;
    if (!red[v]) throw std::logic_error("belady_execute: output lost without store");
    sched.moves.push_back({Op::Store, v});
    stored_ever[v] = 1;
    dirty[v] = 0;
  }
  return sched;
}

inline int64_t schedule_io(const Schedule& s) {
  int64_t io = 0;
  for (const Move& m : s.moves) io += (m.op == Op::Load || m.op == Op::Store) ? 1 : 0;
  return io;
}

// Depth-first compute order for a Strassen-like CDAG with in-cache splicing
// below the cutoff block size s0.  For a composition node above the cutoff:
// encoder combinations (side A then B, row-major), the m0 children
// depth-first, then the decoder outputs row-major; expansion partials are
// emitted immediately before their final vertex.  At and below the cutoff the
// whole sub-CDAG is emitted in the working-set-minimizing in-cache order of a
// standalone graph of that size, mapped into g by path prefixing.
class BlockedOrderBuilder {
 public:
  BlockedOrderBuilder(const Cdag& g, const MmSpec& spec, int64_t n, bool expanded)
      : g_(g), spec_(spec), n_(n), expanded_(expanded) {}

  // Working set of the in-cache order for block size s (template cached).
  int64_t working_set(int64_t s) { return splice_for(s).info.peak_live; }

  std::vector<int32_t> order_with_cutoff(int64_t s0) {
    std::vector<int32_t> out;
    out.reserve(static_cast<size_t>(g_.n_vertices()));
    rec(out, {}, n_, s0);
    if (out.size() + g_.inputs.size() != static_cast<size_t>(g_.n_vertices()))
      throw std::logic_error("blocked order incomplete");
    return out;
  }

 private:
  struct FreshSplice {
    Cdag graph;               // standalone template (unused when whole == true)
    InCacheInfo info;
    bool whole = false;       // template is g_ itself
  };

  FreshSplice& splice_for(int64_t s) {
    auto it = splices_.find(s);
    if (it != splices_.end()) return it->second;
    FreshSplice fs;
    if (s == n_) {
      fs.whole = true;
      fs.info = in_cache_order(g_);
    } else {
      Json meta;
      meta["builder"] = "template";
      meta["params"]["n"] = s;
      Cdag fresh = detail::build_like_graph(spec_, s, std::move(meta));
      if (expanded_) fresh = expand_high_fanin(fresh);
      fs.info = in_cache_order(fresh);
      fs.graph = std::move(fresh);
    }
    return splices_.emplace(s, std::move(fs)).first->second;
  }

  void emit_chain(std::vector<int32_t>& out, const VertexId& base) const {
    for (int32_t t = 1;; ++t) {
      VertexId probe = base;
      probe.index.push_back(t);
      const int32_t idx = g_.find(probe);
      if (idx < 0) break;
      out.push_back(idx);
    }
    const int32_t idx = g_.find(base);
    if (idx < 0) throw std::logic_error("blocked order: vertex missing: " + to_string(base));
    out.push_back(idx);
  }

  void rec(std::vector<int32_t>& out, const std::vector<uint8_t>& path, int64_t s, int64_t s0) {
    if (s <= s0) {
      FreshSplice& fs = splice_for(s);
      if (fs.whole) {
        out.insert(out.end(), fs.info.order.begin(), fs.info.order.end());
        return;
      }
      for (const int32_t fv : fs.info.order) {
        const VertexId& fid = fs.graph.ids[fv];
        VertexId gid;
        gid.path = path;
        gid.path.insert(gid.path.end(), fid.path.begin(), fid.path.end());
        gid.role = fid.role;
        gid.index = fid.index;
        const int32_t idx = g_.find(gid);
        if (idx < 0) throw std::logic_error("blocked order: spliced vertex missing: " + to_string(gid));
        out.push_back(idx);
      }
      return;
    }
    const int64_t h = s / spec_.n0;
    // Element-major emission: for one (r,c) all encoder rows are emitted
    // together, so the few input-block elements they share stay resident.
    for (char side : {'A', 'B'}) {
      const Role role = side == 'A' ? Role::EncAOut : Role::EncBOut;
      for (int64_t r = 0; r < h; ++r)
        for (int64_t c = 0; c < h; ++c)
          for (int k = 1; k <= spec_.m0; ++k) {
            if (!spec_.row_nontrivial(side, k)) continue;
            emit_chain(out, VertexId{path, role,
                                     {k, static_cast<int32_t>(r), static_cast<int32_t>(c)}});
          }
    }
    for (int k = 1; k <= spec_.m0; ++k) {
      std::vector<uint8_t> child = path;
      child.push_back(static_cast<uint8_t>(k));
      rec(out, child, h, s0);
    }
    // Same for the decoder: all n0² outputs touching one child-block element
    // position (rr,cc) are emitted together.
    for (int64_t rr = 0; rr < h; ++rr)
      for (int64_t cc = 0; cc < h; ++cc)
        for (int t = 0; t < spec_.n0 * spec_.n0; ++t) {
          const int64_t I = (t / spec_.n0) * h + rr;
          const int64_t J = (t % spec_.n0) * h + cc;
          emit_chain(out, VertexId{path, Role::DecOut,
                                   {static_cast<int32_t>(I), static_cast<int32_t>(J)}});
        }
  }

  const Cdag& g_;
  const MmSpec& spec_;
  int64_t n_;
  bool expanded_;
  std::map<int64_t, FreshSplice> splices_;
};

}  // namespace detail

// Cache-blocked recursive schedule for a Strassen-like CDAG (possibly with
// expanded fan-in).  Every admissible cutoff block size is tried and the
// schedule with the smallest I/O is returned (ties go to the larger cutoff).
inline Schedule generate_blocked_schedule(const Cdag& g, int64_t M) {
  if (!g.meta.contains("builder")) throw std::invalid_argument("blocked: graph has no builder metadata");
  const std::string builder = g.meta["builder"].get<std::string>();
  if (builder != "strassen" && builder != "strassen-like")
    throw std::invalid_argument("blocked strategy requires a strassen or strassen-like graph");
  const int64_t minM = min_schedule_cache(g);
  if (M < minM)
    throw std::invalid_argument("M below minimum (need M >= " + std::to_string(minM) +
                                " for this graph)");
  const MmSpec spec = load_mmspec(g.meta["params"]["spec"]);
  const int64_t n = g.meta["params"]["n"].get<int64_t>();
  const bool expanded = g.meta["params"].contains("expanded") &&
                        g.meta["params"]["expanded"].get<bool>();

  detail::BlockedOrderBuilder bob(g, spec, n, expanded);
  bool have = false;
  Schedule best;
  int64_t best_io = 0, best_s0 = 0;
  for (int64_t s = 1; s <= n; s *= spec.n0) {
    if (s * s > M) break;  // the s^2 outputs alone exceed the cache
    if (bob.working_set(s) > M) continue;
    Schedule cand = detail::belady_execute(g, bob.order_with_cutoff(s), M);
    const int64_t io = detail::schedule_io(cand);
    if (!have || io < best_io || (io == best_io && s > best_s0)) {
      have = true;
      best = std::move(cand);
      best_io = io;
      best_s0 = s;
    }
  }
  if (!have) throw std::invalid_argument("M below minimum (no admissible cutoff)");
  return best;
}

// Blocked classical schedule for the cubic CDAG: loop over b-sized index
// blocks (i-blocks, then j, then k), multiply-then-accumulate inside.
inline Schedule generate_naive_schedule(const Cdag& g, int64_t M) {
  if (!g.meta.contains("builder") || g.meta["builder"].get<std::string>() != "naive")
    throw std::invalid_argument("naive strategy requires a naive-builder graph");
  if (M < 4) throw std::invalid_argument("M below minimum (need M >= 4)");
  const int64_t n = g.meta["params"]["n"].get<int64_t>();

  auto order_for_block = [&](int64_t b) {
    std::vector<int32_t> out;
    out.reserve(static_cast<size_t>(g.n_vertices()));
    if (n == 1) {
      out.push_back(g.find(VertexId{{}, Role::Product, {}}));
      return out;
    }
    auto mul_id = [](int64_t i, int64_t k, int64_t j) {
      return VertexId{{}, Role::Product,
                      {static_cast<int32_t>(i), static_cast<int32_t>(k), static_cast<int32_t>(j)}};
    };
    for (int64_t bi = 0; bi < n; bi += b)
      for (int64_t bj = 0; bj < n; bj += b)
        for (int64_t bk = 0; bk < n; bk += b)
          for (int64_t i = bi; i < bi + b; ++i)
            for (int64_t j = bj; j < bj + b; ++j)
              for (int64_t k = bk; k < bk + b; ++k) {
                out.push_back(g.find(mul_id(i, k, j)));
                if (k == 0) continue;
                const VertexId add =
                    k == n - 1 ? VertexId{{}, Role::DecOut,
                                          {static_cast<int32_t>(i), static_cast<int32_t>(j)}}
                               : VertexId{{}, Role::DecOut,
                                          {static_cast<int32_t>(i), static_cast<int32_t>(j),
                                           static_cast<int32_t>(k)}};
                out.push_back(g.find(add));
              }
    for (const int32_t v : out)
      if (v < 0) throw std::logic_error("naive order: vertex missing");
    return out;
  };

  bool have = false;
  Schedule best;
  int64_t best_io = 0, best_b = 0;
  for (int64_t b = 1; b <= n; b *= 2) {
    if (b > 1 && 3 * b * b + 2 > M) break;  // block working set: A, B, C tiles + 2 transients
    Schedule cand = detail::belady_execute(g, order_for_block(b), M);
    const int64_t io = detail::schedule_io(cand);
    if (!have || io < best_io || (io == best_io && b > best_b)) {
      have = true;
      best = std::move(cand);
      best_io = io;
      best_b = b;
    }
  }
  if (!have) throw std::invalid_argument("M below minimum (no admissible block size)");
  return best;
}

// Builds the canonical Strassen CDAG for n and a blocked schedule for it at
// cache size M, expanding high-fan-in vertices first when M cannot hold a
// fan-in-4 compute.  Returns the (possibly expanded) graph together with the
// schedule that validates against it.
inline std::pair<Cdag, Schedule> make_blocked_run(int64_t n, int64_t M) {
  BuildResult br = build_strassen(n, /*with_families=*/false);
  Cdag g = std::move(br.g);
  if (M < max_fanin(g) + 1) g = expand_high_fanin(g);
  Schedule s = generate_blocked_schedule(g, M);
  return {std::move(g), std::move(s)};
}

struct IoComparison {
  int64_t measured_io = 0;
  double bound_value = 0.0;
  double ratio = 0.0;  // measured / max(bound, 1)
  bool violation = false;
};

// Replays the schedule through the validator and compares measured I/O
// against a lower-bound value.  A measured value below the bound flags a
// violation (which would falsify the implementation, not the theory).
inline IoComparison io_lower_report(const Cdag& g, const Schedule& s, int64_t M, double bound) {
  const ValidationResult vr = validate_schedule(g, s, M, PebbleMode::Free);
  if (!vr.ok)
    throw std::invalid_argument(std::string("io_lower_report: invalid schedule: ") +
                                pebble_error_name(vr.error->kind) + " at move " +
                                std::to_string(vr.error->move_index));
  IoComparison cmp;
  cmp.measured_io = vr.stats.io_total();
  cmp.bound_value = bound;
  cmp.ratio = static_cast<double>(cmp.measured_io) / std::max(bound, 1.0);
  cmp.violation = static_cast<double>(cmp.measured_io) < bound;
  return cmp;
}

}  // namespace mmio
