#pragma once

#include <optional>
#include <string>

#include "exact/rational.hpp"
#include "exact/real.hpp"

namespace canheight {

/// l_n = log2 psi(n) for psi(1) = 2, psi(n) = 2^(n psi(n-1)).
/// Held exactly while psi(n-1) fits (n <= 4); beyond that l_n = n * 2^(l_{n-1})
/// is kept symbolically.
struct TowerLog {
  unsigned n = 1;
  std::optional<Int> exact;

  bool is_exact() const { return exact.has_value(); }
  std::string to_string() const;
};

TowerLog psi_log2(unsigned n);

struct DivergentAverage {
  unsigned n = 1;
  TowerLog ell;
  /// 2^-l_n sum over 2^l_n-th roots of unity w of log|w - beta|.
  Real value;
  Real bound;  // log pi + 1 - n log 2 + log 2
  /// log2 of a bound on |value - computed value|; -inf when below any
  /// representable exponent.
  double error_log2 = 0;
  std::string method;  // "direct" or "log-space"
};

/// 1 <= n <= 6.
DivergentAverage divergent_average(unsigned n, mpfr_prec_t bits = 256);

}  // namespace canheight
