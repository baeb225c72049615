#pragma once

// pebbles.hpp — red-blue pebble game semantics: schedules, replay validation
// and I/O accounting.
//
// Conventions (documented once, enforced here):
//   * all inputs start blue, nothing starts red;
//   * Load(v) requires v blue, makes it red, costs one I/O;
//   * Store(v) requires v red, makes it blue, costs one I/O;
//   * Compute(v) requires v non-input with every predecessor red, makes v
//     red — operands are not consumed, so a fan-in-k compute needs k+1 red
//     slots (no "slide");
//   * Evict(v) requires v red and removes the red pebble, free of charge;
//   * blue pebbles are permanent (there is no blue-removal move);
//   * |red| <= M must hold after every move;
//   * every declared output must be blue when the schedule ends;
//   * no-recompute mode additionally rejects a second Compute of any vertex.
//
// The validator is total: adversarial move sequences produce a typed error
// naming the offending move, never a crash.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mmio/cdag.hpp"

namespace mmio {

enum class Op : uint8_t { Load, Store, Compute, Evict };

struct Move {
  Op op;
  int32_t vertex;
};

struct Schedule {
  int64_t cache = 0;  // declared cache size M
  std::vector<Move> moves;
};

enum class PebbleMode { Free, NoRecompute };

enum class PebbleErrorKind {
  BadVertex,
  CacheOverflow,
  LoadNotBlue,
  StoreNotRed,
  ComputeOfInput,
  PredNotRed,
  Recompute,
  EvictNotRed,
  OutputNotBlue,
};

inline const char* pebble_error_name(PebbleErrorKind k) {
  switch (k) {
    case PebbleErrorKind::BadVertex: return "bad-vertex";
    case PebbleErrorKind::CacheOverflow: return "cache-overflow";
    case PebbleErrorKind::LoadNotBlue: return "load-not-blue";
    case PebbleErrorKind::StoreNotRed: return "store-not-red";
    case PebbleErrorKind::ComputeOfInput: return "compute-of-input";
    case PebbleErrorKind::PredNotRed: return "pred-not-red";
    case PebbleErrorKind::Recompute: return "recompute";
    case PebbleErrorKind::EvictNotRed: return "evict-not-red";
    case PebbleErrorKind::OutputNotBlue: return "output-not-blue";
  }
  return "unknown";
}

struct PebbleError {
  PebbleErrorKind kind;
  int64_t move_index;  // 0-based; == moves.size() for end-state errors
  int32_t vertex;
  std::string detail;
};

struct IoStats {
  int64_t loads = 0;
  int64_t stores = 0;
  int64_t computes = 0;
  int64_t peak_red = 0;
  int64_t recomputed_vertices = 0;
  int64_t io_total() const { return loads + stores; }
};

struct ValidationResult {
  bool ok = false;
  IoStats stats;
  std::optional<PebbleError> error;
};

inline ValidationResult validate_schedule(const Cdag& g, const Schedule& s, int64_t M,
                                          PebbleMode mode) {
  if (M < 1) throw std::invalid_argument("validate_schedule: M must be >= 1");
  ValidationResult res;
  const int32_t n = g.n_vertices();
  std::vector<char> red(n, 0);
  std::vector<char> blue(n, 0);
  std::vector<uint8_t> computed(n, 0);
  for (int32_t v : g.inputs) blue[v] = 1;
  int64_t red_count = 0;

  auto fail = [&](PebbleErrorKind kind, int64_t idx, int32_t v, std::string detail) {
    res.ok = false;
    res.error = PebbleError{kind, idx, v, std::move(detail)};
    return res;
  };

  for (int64_t i = 0; i < static_cast<int64_t>(s.moves.size()); ++i) {
    const Move& m = s.moves[i];
    const int32_t v = m.vertex;
    if (v < 0 || v >= n)
      return fail(PebbleErrorKind::BadVertex, i, v, "vertex index out of range");
    switch (m.op) {
      case Op::Load:
        if (!blue[v])
          return fail(PebbleErrorKind::LoadNotBlue, i, v,
                      "load of " + to_string(g.ids[v]) + " which is not in slow memory");
        ++res.stats.loads;
        if (!red[v]) {
          red[v] = 1;
          ++red_count;
        }
        break;
      case Op::Store:
        if (!red[v])
          return fail(PebbleErrorKind::StoreNotRed, i, v,
                      "store of " + to_string(g.ids[v]) + " which is not in cache");
        blue[v] = 1;
        ++res.stats.stores;
        break;
      case Op::Compute: {
        if (g.is_input(v))
          return fail(PebbleErrorKind::ComputeOfInput, i, v,
                      "compute of input " + to_string(g.ids[v]));
        for (int32_t u : g.preds(v))
          if (!red[u])
            return fail(PebbleErrorKind::PredNotRed, i, v,
                        "compute of " + to_string(g.ids[v]) + " with operand " +
                            to_string(g.ids[u]) + " not in cache");
        if (computed[v] >= 1 && mode == PebbleMode::NoRecompute)
          return fail(PebbleErrorKind::Recompute, i, v,
                      "recompute of " + to_string(g.ids[v]) + " in no-recompute mode");
        if (computed[v] < 2) ++computed[v];
        ++res.stats.computes;
        if (!red[v]) {
          red[v] = 1;
          ++red_count;
        }
        break;
      }
      case Op::Evict:
        if (!red[v])
          return fail(PebbleErrorKind::EvictNotRed, i, v,
                      "evict of " + to_string(g.ids[v]) + " which is not in cache");
        red[v] = 0;
        --red_count;
        break;
    }
    if (red_count > M)
      return fail(PebbleErrorKind::CacheOverflow, i, v,
                  "cache holds " + std::to_string(red_count) + " > M = " + std::to_string(M) +
                      " after move on " + to_string(g.ids[v]));
    if (red_count > res.stats.peak_red) res.stats.peak_red = red_count;
  }

  for (int32_t v : g.outputs)
    if (!blue[v])
      return fail(PebbleErrorKind::OutputNotBlue, static_cast<int64_t>(s.moves.size()), v,
                  "output " + to_string(g.ids[v]) + " not in slow memory at schedule end");

  for (int32_t v = 0; v < n; ++v)
    if (computed[v] > 1) ++res.stats.recomputed_vertices;
  res.ok = true;
  return res;
}

}  // namespace mmio
