#pragma once

// common.hpp — small numeric helpers shared across the library.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace mmio {

// Insertion-ordered JSON keeps every serialized artifact byte-stable.
using Json = nlohmann::ordered_json;

// 31-bit Mersenne prime used by all randomized field checks.
inline constexpr int64_t kFieldPrime = 2147483647;  // 2^31 - 1

inline int64_t mod_norm(int64_t x, int64_t p) {
  int64_t r = x % p;
  return r < 0 ? r + p : r;
}

inline int64_t mod_mul(int64_t a, int64_t b, int64_t p) {
  return static_cast<int64_t>(static_cast<__int128>(a) * b % p);
}

inline int64_t mod_add(int64_t a, int64_t b, int64_t p) {
  int64_t r = a + b;
  return r >= p ? r - p : r;
}

inline bool is_pow2(int64_t x) { return x > 0 && (x & (x - 1)) == 0; }

inline int ilog2(int64_t x) {
  if (!is_pow2(x)) throw std::invalid_argument("ilog2: not a power of two: " + std::to_string(x));
  int k = 0;
  while (x > 1) { x >>= 1; ++k; }
  return k;
}

// x^e over the integers; throws on overflow instead of wrapping.
inline int64_t ipow_checked(int64_t x, int e) {
  int64_t r = 1;
  for (int i = 0; i < e; ++i) {
    if (x != 0 && r > std::numeric_limits<int64_t>::max() / x)
      throw std::overflow_error("ipow_checked: overflow");
    r *= x;
  }
  return r;
}

inline int64_t ceil_div(int64_t a, int64_t b) { return (a + b - 1) / b; }

// log_b(x) for exact integer powers; returns -1 when x is not a power of b.
inline int exact_log(int64_t base, int64_t x) {
  if (base < 2 || x < 1) return -1;
  int k = 0;
  int64_t v = 1;
  while (v < x) {
    if (v > std::numeric_limits<int64_t>::max() / base) return -1;
    v *= base;
    ++k;
  }
  return v == x ? k : -1;
}

// Lexicographic k-combination generator over {0..n-1}.  Each next() call
// fills `comb` with the following combination and returns true, or returns
// false once the sequence is exhausted.  k = 0 yields exactly one empty
// combination; k > n yields nothing.
class CombinationGen {
 public:
  CombinationGen(int32_t n, int32_t k) : n_(n), k_(k) {}

  bool next(std::vector<int32_t>& comb) {
    if (k_ < 0 || k_ > n_) return false;
    if (fresh_) {
      fresh_ = false;
      comb.resize(static_cast<size_t>(k_));
      for (int32_t i = 0; i < k_; ++i) comb[static_cast<size_t>(i)] = i;
      return true;
    }
    int32_t i = k_ - 1;
    while (i >= 0 && comb[static_cast<size_t>(i)] == n_ - k_ + i) --i;
    if (i < 0) return false;
    ++comb[static_cast<size_t>(i)];
    for (int32_t j = i + 1; j < k_; ++j)
      comb[static_cast<size_t>(j)] = comb[static_cast<size_t>(j - 1)] + 1;
    return true;
  }

 private:
  int32_t n_;
  int32_t k_;
  bool fresh_ = true;
};

}  // namespace mmio
