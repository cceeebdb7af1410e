#include "exact/roots.hpp"

#include <algorithm>
#include <cmath>

#include "exact/error.hpp"

namespace canheight {

Complex horner(const std::vector<Complex>& coeffs, const Complex& z) {
  Complex acc(z.bits());
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    acc *= z;
    acc += *it;
  }
  return acc;
}

namespace {

// Evaluates p(z) and p'(z) together.
void eval_with_derivative(const std::vector<Complex>& c, const Complex& z, Complex& p, Complex& dp) {
  p = Complex(z.bits());
  dp = Complex(z.bits());
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    dp *= z;
    dp += p;
    p *= z;
    p += *it;
  }
}

Real horner_abs(const std::vector<Real>& c, const Real& r) {
  Real acc(r.bits());
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * r + *it;
  return acc;
}

}  // namespace

std::vector<Complex> complex_roots(const PolyQ& f, mpfr_prec_t bits) {
  const int n = f.degree();
  if (n < 1) fail(ErrorKind::Input, "root finding needs degree at least 1");
  const PolyQ m = f.monic();
  if (n == 1) return {Complex(-m.coeff(0), bits)};

  std::vector<Complex> c;
  c.reserve(static_cast<std::size_t>(n) + 1);
  for (const Rat& q : m.coeffs()) c.emplace_back(q, bits);

  // Fujiwara-type radius for the starting circle.
  double radius = 0;
  for (int i = 0; i < n; ++i) {
    const double a = std::fabs(m.coeff(i).get_d());
    if (a > 0) radius = std::max(radius, std::pow(a, 1.0 / (n - i)));
  }
  radius = std::max(2 * radius, 1e-3);

  std::vector<Complex> z;
  z.reserve(static_cast<std::size_t>(n));
  const Real two_pi = pi(bits) * Real(2.0, bits);
  for (int i = 0; i < n; ++i) {
    const Real angle = two_pi * Real((i + 0.4) / n, bits) + Real(0.7, bits);
    z.emplace_back(cos(angle) * Real(radius, bits), sin(angle) * Real(radius, bits));
  }

  std::vector<Real> c_abs;
  for (const Complex& x : c) c_abs.push_back(abs(x));
  const Real noise = ldexp(Real(static_cast<double>(4 * n + 4), bits), -static_cast<long>(bits));
  const Real tiny = ldexp(Real(1.0, bits), -static_cast<long>(bits) + 12);
  const int max_iter = 200 + 40 * n + static_cast<int>(bits / 4);
  std::vector<bool> done(static_cast<std::size_t>(n), false);
  Complex p(bits), dp(bits);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool all_done = true;
    for (int i = 0; i < n; ++i) {
      if (done[static_cast<std::size_t>(i)]) continue;
      eval_with_derivative(c, z[static_cast<std::size_t>(i)], p, dp);
      // Stop once |p| is at the rounding level of the evaluation.
      if (abs(p) <= noise * horner_abs(c_abs, abs(z[static_cast<std::size_t>(i)]))) {
        done[static_cast<std::size_t>(i)] = true;
        continue;
      }
      Complex ratio = p / dp;
      Complex sum(bits);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        Complex one(Rat(1), bits);
        sum += one / (z[static_cast<std::size_t>(i)] - z[static_cast<std::size_t>(j)]);
      }
      Complex denom = Complex(Rat(1), bits) - ratio * sum;
      Complex step = ratio / denom;
      z[static_cast<std::size_t>(i)] -= step;
      const Real scale = max(Real(1.0, bits), abs(z[static_cast<std::size_t>(i)]));
      if (abs(step) <= tiny * scale)
        done[static_cast<std::size_t>(i)] = true;
      else
        all_done = false;
    }
    if (all_done) return z;
  }
  fail(ErrorKind::Precision, "root finding did not converge for " + to_string(f));
}

}  // namespace canheight
