#include "divergence/tower.hpp"

#include <cmath>
#include <limits>

#include "exact/error.hpp"

namespace canheight {

namespace {

constexpr unsigned kMaxN = 6;

// psi(n) fits as an integer only while l_n is small.
constexpr unsigned long kExactPsiBits = 1ul << 20;

}  // namespace

std::string TowerLog::to_string() const {
  if (exact) return canheight::to_string(*exact);
  return std::to_string(n) + "*2^(" + psi_log2(n - 1).to_string() + ")";
}

TowerLog psi_log2(unsigned n) {
  if (n < 1) fail(ErrorKind::Input, "n must be at least 1");
  TowerLog t;
  t.n = n;
  if (n == 1) {
    t.exact = Int(1);
    return t;
  }
  const TowerLog prev = psi_log2(n - 1);
  if (prev.is_exact() && *prev.exact <= Int(kExactPsiBits)) {
    Int psi_prev;
    mpz_ui_pow_ui(psi_prev.get_mpz_t(), 2, prev.exact->get_ui());
    t.exact = Int(n) * psi_prev;
  }
  return t;
}

DivergentAverage divergent_average(unsigned n, mpfr_prec_t bits) {
  if (n < 1 || n > kMaxN) fail(ErrorKind::Input, "n must be between 1 and " + std::to_string(kMaxN));
  DivergentAverage out;
  out.n = n;
  out.ell = psi_log2(n);
  const Real log2v = log2_const(bits);
  out.bound = log(pi(bits)) + Real(1.0, bits) - Real(static_cast<double>(n), bits) * log2v + log2v;

  const TowerLog next = psi_log2(n + 1);
  if (n <= 2) {
    // frac(psi(n) alpha) = sum_{m>n} 2^(l_n - l_m); terms past m = 3 are below 2^(l_n - 2^50).
    const long ln = out.ell.exact->get_si();
    Real x(bits);
    for (unsigned m = n + 1; m <= 3; ++m) x += ldexp(Real(1.0, bits), ln - psi_log2(m).exact->get_si());
    out.value = log(Real(2.0, bits) * sin(pi(bits) * x)) / ldexp(Real(1.0, bits), ln);
    out.error_log2 = static_cast<double>(ln) - std::ldexp(1.0, 50);
    out.method = "direct";
    return out;
  }

  // log|beta^psi(n) - 1| = log 2pi + (l_n - l_{n+1}) log 2 + eps, with eps of
  // order 2^(2(l_n - l_{n+1})), and l_{n+1} = (n+1) psi(n).
  out.method = "log-space";
  out.value = -Real(static_cast<double>(n + 1), bits) * log2v;
  if (!out.ell.is_exact()) {
    out.error_log2 = -std::numeric_limits<double>::infinity();
  } else if (const Int& ln = *out.ell.exact; ln <= Int(kExactPsiBits)) {
    const Real correction = log(Real(2.0, bits) * pi(bits)) + Real(ln, bits) * log2v;
    out.value += ldexp(correction, -ln.get_si());
    out.error_log2 = next.is_exact() ? -2 * (Real(*next.exact, 64) - Real(ln, 64)).to_double() - ln.get_d()
                                     : -std::numeric_limits<double>::infinity();
  } else {
    // Dropped correction is below 2^(log2(l_n) + 3 - l_n).
    out.error_log2 = std::log2(ln.get_d()) + 3 - ln.get_d();
  }
  return out;
}

}  // namespace canheight
