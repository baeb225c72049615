#pragma once

// mmspec.hpp — (n0, m0)-Strassen-like algorithm specification: the three
// coefficient matrices that define how n0×n0 blocks are combined, multiplied
// and recombined.  A spec is validated structurally and by randomized
// evaluation over a large prime field before any CDAG is built from it.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mmio/common.hpp"

namespace mmio {

struct MmSpec {
  std::string name;
  int n0 = 0;  // base block dimension
  int m0 = 0;  // number of base multiplications
  // encA, encB: m0 rows x n0^2 columns (block positions row-major).
  // dec: n0^2 rows (output positions row-major) x m0 columns.
  std::vector<std::vector<int64_t>> encA, encB, dec;

  const std::vector<std::vector<int64_t>>& enc(char side) const {
    return side == 'A' ? encA : encB;
  }

  // A pass-through row has exactly one nonzero coefficient equal to +1: the
  // "combination" is the input block itself and is merged with it.
  // Returns the flattened block position, or -1 when the row is nontrivial.
  int pass_input(char side, int k) const {  // k is 1-based
    const auto& row = enc(side)[k - 1];
    int pos = -1;
    for (int t = 0; t < static_cast<int>(row.size()); ++t) {
      if (row[t] == 0) continue;
      if (pos >= 0) return -1;  // second nonzero
      pos = t;
    }
    if (pos < 0) return -1;  // all-zero rows are rejected at validation
    return row[pos] == 1 ? pos : -1;
  }

  bool row_nontrivial(char side, int k) const { return pass_input(side, k) < 0; }

  // Lowest 1-based row index whose `side` combination is nontrivial; -1 when
  // every row is a pass-through (such a spec cannot be Strassen-like).
  int lowest_nontrivial_row(char side) const {
    for (int k = 1; k <= m0; ++k)
      if (row_nontrivial(side, k)) return k;
    return -1;
  }
};

inline Json to_json(const MmSpec& spec) {
  Json doc;
  doc["schema"] = "mmspec/1";
  doc["name"] = spec.name;
  doc["n0"] = spec.n0;
  doc["m0"] = spec.m0;
  doc["encA"] = spec.encA;
  doc["encB"] = spec.encB;
  doc["dec"] = spec.dec;
  return doc;
}

inline MmSpec load_mmspec(const Json& doc) {
  if (!doc.is_object()) throw std::invalid_argument("mmspec json: not an object");
  for (const char* key : {"schema", "n0", "m0", "encA", "encB", "dec"})
    if (!doc.contains(key)) throw std::invalid_argument(std::string("mmspec json: missing key \"") + key + "\"");
  if (doc["schema"] != "mmspec/1")
    throw std::invalid_argument("mmspec json: unsupported schema " + doc["schema"].dump());
  MmSpec s;
  s.name = doc.contains("name") ? doc["name"].get<std::string>() : std::string("unnamed");
  s.n0 = doc["n0"].get<int>();
  s.m0 = doc["m0"].get<int>();
  s.encA = doc["encA"].get<std::vector<std::vector<int64_t>>>();
  s.encB = doc["encB"].get<std::vector<std::vector<int64_t>>>();
  s.dec = doc["dec"].get<std::vector<std::vector<int64_t>>>();
  return s;
}

// Direct block multiply through the spec's three matrices, mod p.
// a, b are n0^2 vectors (row-major); returns the n0^2 output vector.
inline std::vector<int64_t> apply_mmspec(const MmSpec& s, const std::vector<int64_t>& a,
                                         const std::vector<int64_t>& b, int64_t p) {
  const int nn = s.n0 * s.n0;
  std::vector<int64_t> prods(s.m0);
  for (int k = 0; k < s.m0; ++k) {
    int64_t xa = 0, xb = 0;
    for (int t = 0; t < nn; ++t) {
      if (s.encA[k][t] != 0) xa = mod_add(xa, mod_mul(mod_norm(s.encA[k][t], p), a[t], p), p);
      if (s.encB[k][t] != 0) xb = mod_add(xb, mod_mul(mod_norm(s.encB[k][t], p), b[t], p), p);
    }
    prods[k] = mod_mul(xa, xb, p);
  }
  std::vector<int64_t> c(nn, 0);
  for (int t = 0; t < nn; ++t)
    for (int k = 0; k < s.m0; ++k)
      if (s.dec[t][k] != 0) c[t] = mod_add(c[t], mod_mul(mod_norm(s.dec[t][k], p), prods[k], p), p);
  return c;
}

// Structural checks plus a randomized field check that the spec multiplies
// correctly: dec · ((encA·vec(A)) ⊙ (encB·vec(B))) = vec(A·B) over Z_p for
// `trials` random matrix pairs.  Throws on any violation.
inline void validate_mmspec(const MmSpec& s, uint64_t seed = 0x5eed5eedull, int trials = 8) {
  if (s.n0 < 2) throw std::invalid_argument("mmspec: n0 must be >= 2");
  if (s.m0 < 1) throw std::invalid_argument("mmspec: m0 must be >= 1");
  const int nn = s.n0 * s.n0;
  if (static_cast<int>(s.encA.size()) != s.m0 || static_cast<int>(s.encB.size()) != s.m0)
    throw std::invalid_argument("mmspec: encoder must have m0 rows");
  if (static_cast<int>(s.dec.size()) != nn)
    throw std::invalid_argument("mmspec: decoder must have n0^2 rows");
  for (const auto& r : s.encA)
    if (static_cast<int>(r.size()) != nn) throw std::invalid_argument("mmspec: encA row width != n0^2");
  for (const auto& r : s.encB)
    if (static_cast<int>(r.size()) != nn) throw std::invalid_argument("mmspec: encB row width != n0^2");
  for (const auto& r : s.dec)
    if (static_cast<int>(r.size()) != s.m0) throw std::invalid_argument("mmspec: dec row width != m0");

  for (char side : {'A', 'B'}) {
    const auto& enc = s.enc(side);
    for (int k = 0; k < s.m0; ++k) {
      bool nonzero = false;
      for (int64_t c : enc[k]) nonzero |= (c != 0);
      if (!nonzero)
        throw std::invalid_argument(std::string("mmspec: all-zero enc") + side + " row " +
                                    std::to_string(k + 1));
      // Each linear combination must feed exactly one multiplication:
      // duplicate rows would reuse one combination for two products.
      for (int j = 0; j < k; ++j)
        if (enc[j] == enc[k])
          throw std::invalid_argument(std::string("mmspec: enc") + side + " rows " +
                                      std::to_string(j + 1) + " and " + std::to_string(k + 1) +
                                      " are identical (combination reused)");
    }
  }

  const int64_t p = kFieldPrime;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int64_t> dist(0, p - 1);
  for (int t = 0; t < trials; ++t) {
    std::vector<int64_t> a(nn), b(nn);
    for (auto& x : a) x = dist(rng);
    for (auto& x : b) x = dist(rng);
    std::vector<int64_t> got = apply_mmspec(s, a, b, p);
    for (int i = 0; i < s.n0; ++i)
      for (int j = 0; j < s.n0; ++j) {
        int64_t want = 0;
        for (int k = 0; k < s.n0; ++k)
          want = mod_add(want, mod_mul(a[i * s.n0 + k], b[k * s.n0 + j], p), p);
        if (got[i * s.n0 + j] != want)
          throw std::invalid_argument("mmspec: field check failed at output (" + std::to_string(i) +
                                      "," + std::to_string(j) + "), trial " + std::to_string(t));
      }
  }
}

// The classical 2x2-by-7 coefficients; mirrors the bundled spec file.
inline const MmSpec& strassen_2x7_spec() {
  static const MmSpec spec = [] {
    MmSpec s;
    s.name = "strassen-2x7";
    s.n0 = 2;
    s.m0 = 7;
    s.encA = {{1, 0, 0, 1}, {0, 0, 1, 1}, {1, 0, 0, 0}, {0, 0, 0, 1},
              {1, 1, 0, 0}, {-1, 0, 1, 0}, {0, 1, 0, -1}};
    s.encB = {{1, 0, 0, 1}, {1, 0, 0, 0}, {0, 1, 0, -1}, {-1, 0, 1, 0},
              {0, 0, 0, 1}, {1, 1, 0, 0}, {0, 0, 1, 1}};
    s.dec = {{1, 0, 0, 1, -1, 0, 1}, {0, 0, 1, 0, 1, 0, 0}, {0, 1, 0, 1, 0, 0, 0},
             {1, -1, 1, 0, 0, 1, 0}};
    return s;
  }();
  return spec;
}

}  // namespace mmio
