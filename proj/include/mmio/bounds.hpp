#pragma once

// bounds.hpp — closed-form evaluators for the I/O lower bounds, sequential
// and parallel.  Whenever the block ratio is an exact power of the recursion
// base the value is computed in exact integer arithmetic (no floating-point
// drift in acceptance comparisons); otherwise double precision is used.
// Below the main regime every bound degrades to the trivial 3n² fallback
// (read 2n² inputs, write n² outputs).

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "mmio/common.hpp"

namespace mmio {

struct BoundValue {
  double value = 0.0;
  std::string formula_id;
  std::string regime;  // "main" or "trivial-fallback"
};

namespace detail {

inline void check_nM(int64_t n, int64_t M) {
  if (n < 1 || !is_pow2(n)) throw std::invalid_argument("bound: n must be a power of 2");
  if (M < 1) throw std::invalid_argument("bound: M must be >= 1");
}

}  // namespace detail

// (1/7)·(n/√M)^{log₂7}·M for n ≥ 2√M; 3n² below that.  Exact integers when
// n²/M is a power of 4 (then the value is 7^{k−1}·M).
inline BoundValue strassen_seq_bound(int64_t n, int64_t M) {
  detail::check_nM(n, M);
  BoundValue b;
  b.formula_id = "strassen-seq";
  if (n * n < 4 * M) {
    b.regime = "trivial-fallback";
    b.value = static_cast<double>(3 * n * n);
    return b;
  }
  b.regime = "main";
  if ((n * n) % M == 0) {
    const int64_t k = exact_log(4, (n * n) / M);
    if (k >= 1) {
      b.value = static_cast<double>(ipow_checked(7, k - 1) * M);
      return b;
    }
  }
  b.value = std::pow(static_cast<double>(n) / std::sqrt(static_cast<double>(M)),
                     std::log2(7.0)) *
            static_cast<double>(M) / 7.0;
  return b;
}

// Sequential value divided by P; requires M·P ≥ 2n².
inline BoundValue strassen_par_bound(int64_t n, int64_t M, int64_t P) {
  detail::check_nM(n, M);
  if (P < 1) throw std::invalid_argument("bound: P must be >= 1");
  if (M * P < 2 * n * n)
    throw std::invalid_argument("parallel bound requires M*P >= 2n^2");
  BoundValue b = strassen_seq_bound(n, M);
  b.formula_id = "strassen-par";
  b.value /= static_cast<double>(P);
  return b;
}

// qM (generic recursive-family theorem).
inline BoundValue generic_qM_bound(int64_t q, int64_t M) {
  if (q < 0) throw std::invalid_argument("bound: q must be >= 0");
  if (M < 1) throw std::invalid_argument("bound: M must be >= 1");
  BoundValue b;
  b.formula_id = "generic-qm";
  b.regime = "main";
  b.value = static_cast<double>(q) * static_cast<double>(M);
  return b;
}

// qM/P.
inline BoundValue generic_qM_par_bound(int64_t q, int64_t M, int64_t P) {
  if (P < 1) throw std::invalid_argument("bound: P must be >= 1");
  BoundValue b = generic_qM_bound(q, M);
  b.formula_id = "generic-qm-par";
  b.value /= static_cast<double>(P);
  return b;
}

// Explicit-constant Strassen-like bound (1/m₀²)·(n/(2√M))^{log_{n₀}m₀}·M,
// which equals m₀^{i−2}·M at integer i = log_{n₀}(n/(2√M)).  Main regime
// requires i ≥ 2; below it the family guarantee is vacuous and the value
// falls back to 3n².
inline BoundValue strassen_like_bound(int64_t n, int64_t M, int64_t n0, int64_t m0) {
  if (n0 < 2) throw std::invalid_argument("bound: n0 must be >= 2");
  if (m0 < 1) throw std::invalid_argument("bound: m0 must be >= 1");
  if (M < 1) throw std::invalid_argument("bound: M must be >= 1");
  if (n < 1 || exact_log(n0, n) < 0)
    throw std::invalid_argument("bound: n must be a power of n0");
  BoundValue b;
  b.formula_id = "strassen-like(1/m0^2)";
  // Main regime: x = n/(2√M) with log_{n0} x ≥ 2, i.e. n² ≥ 4M·n0⁴.
  if (n * n < 4 * M * n0 * n0 * n0 * n0) {
    b.regime = "trivial-fallback";
    b.value = static_cast<double>(3 * n * n);
    return b;
  }
  b.regime = "main";
  if ((n * n) % (4 * M) == 0) {
    const int64_t j = exact_log(n0, (n * n) / (4 * M));  // x² = n0^j
    if (j >= 4 && j % 2 == 0) {
      const int64_t i = j / 2;
      b.value = static_cast<double>(ipow_checked(m0, i - 2) * M);
      return b;
    }
  }
  const double x = static_cast<double>(n) / (2.0 * std::sqrt(static_cast<double>(M)));
  b.value = std::pow(x, std::log(static_cast<double>(m0)) / std::log(static_cast<double>(n0))) *
            static_cast<double>(M) / (static_cast<double>(m0) * static_cast<double>(m0));
  return b;
}

inline BoundValue strassen_like_par_bound(int64_t n, int64_t M, int64_t n0, int64_t m0,
                                          int64_t P) {
  if (P < 1) throw std::invalid_argument("bound: P must be >= 1");
  if (M * P < 2 * n * n)
    throw std::invalid_argument("parallel bound requires M*P >= 2n^2");
  BoundValue b = strassen_like_bound(n, M, n0, m0);
  b.formula_id = "strassen-like-par(1/m0^2)";
  b.value /= static_cast<double>(P);
  return b;
}

// |𝒵| = 4M·(n/(2√M))^{log₂7}: total output count of the 2√M-level sub-CDAG
// family.  Requires the ratio n/(2√M) to be an exact power of 2.
inline int64_t count_Z(int64_t n, int64_t M) {
  detail::check_nM(n, M);
  if (n * n < 4 * M) throw std::invalid_argument("count_Z: requires n >= 2*sqrt(M)");
  if ((n * n) % (4 * M) != 0)
    throw std::invalid_argument("count_Z: n/(2*sqrt(M)) must be a power of 2");
  const int64_t j = exact_log(4, (n * n) / (4 * M));  // (n/(2√M))² = 4^j
  if (j < 0) throw std::invalid_argument("count_Z: n/(2*sqrt(M)) must be a power of 2");
  return 4 * M * ipow_checked(7, j);
}

}  // namespace mmio
