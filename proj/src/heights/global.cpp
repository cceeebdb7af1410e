#include "heights/global.hpp"

#include <algorithm>

#include "dyn/iterate.hpp"
#include "exact/error.hpp"
#include "exact/roots.hpp"

namespace canheight {

Real weil_height(const ProjPoint& x, mpfr_prec_t bits) {
  const Int m = std::max(abs(x.a()), abs(x.b()));
  return log_abs(m, bits);
}

std::vector<Place> height_support(const RationalMap& map, const ProjPoint& x, const FactorBudget& budget) {
  std::vector<Int> primes = bad_primes(map);
  if (!x.is_infinity()) primes = merge_primes(primes, prime_support(Rat(x.b()), budget));
  std::vector<Place> out{Place::infinity()};
  for (const Int& p : primes) out.push_back(Place::prime(p));
  return out;
}

namespace {

void assemble(HeightResult& r, mpfr_prec_t bits) {
  r.value = Real(bits);
  r.error_estimate = Real(bits);
  r.precision_bits = bits;
  for (const auto& lh : r.per_place) {
    r.value += lh.value;
    r.error_estimate += lh.error;
    r.k_used = std::max(r.k_used, lh.k_used);
    r.approximate = r.approximate || lh.approximate;
    r.precision_bits = std::max(r.precision_bits, lh.bits);
  }
}

}  // namespace

std::optional<DirectEstimate> direct_height(const RationalMap& map, const ProjPoint& x, unsigned long cap,
                                            mpfr_prec_t bits) {
  if (cap == 0) return std::nullopt;
  unsigned long k = 0;
  while (degree_power(map.degree(), k + 1, cap) != 0) ++k;
  if (k == 0) return std::nullopt;
  const ProjPoint y = iterate_exact(map, x, k);
  DirectEstimate out;
  out.k = k;
  out.value = weil_height(y, bits) / Real(Int(pow(Int(map.degree()), k)), bits);
  return out;
}

HeightResult canonical_height(const RationalMap& map, const ProjPoint& x, const HeightOptions& opt) {
  HeightResult r;
  for (const Place& v : height_support(map, x, opt.budget)) r.per_place.push_back(local_canonical_height(map, x, v, opt));
  assemble(r, opt.bits);
  r.direct = direct_height(map, x, opt.direct_cap, r.precision_bits);
  return r;
}

LocalHeight archimedean_conjugate_sum(const RationalMap& map, const PolyQ& f, const HeightOptions& opt) {
  return with_precision_check(
      [&](mpfr_prec_t bits) {
        LocalHeight sum{Place::infinity(), Real(bits), Rat(0), 0, bits, Real(bits), false, false};
        for (const Complex& beta : complex_roots(f, bits)) {
          LocalHeight one = archimedean_limit(map, beta, Complex(Rat(1), bits), opt);
          sum.value += one.value;
          sum.error += one.error;
          sum.k_used = std::max(sum.k_used, one.k_used);
          sum.approximate = sum.approximate || one.approximate;
        }
        return sum;
      },
      opt);
}

namespace {

PolyQ mulmod(const PolyQ& a, const PolyQ& b, const PolyQ& f) { return divrem(a * b, f).remainder; }

PolyQ eval_form_mod(const std::vector<Int>& c, const PolyQ& x, const PolyQ& y, const PolyQ& f) {
  PolyQ acc = PolyQ::constant(Rat(c[0]));
  PolyQ ypow = y;
  for (std::size_t i = 1; i < c.size(); ++i) {
    acc = mulmod(acc, x, f) + ypow * Rat(c[i]);
    if (i + 1 < c.size()) ypow = mulmod(ypow, y, f);
  }
  return acc;
}

// max over [l:m] in P^1(F_p) of -v_p(N(l x + m y)), N the norm from Q[t]/(F).
// Only deg F + 1 residues are needed: at most deg F of them can lose the max.
Rat max_norm_coeff(const PolyQ& f, const PolyQ& x, const PolyQ& y, const Int& p) {
  const int n = f.degree();
  std::optional<long> best;
  Int lambda(1), mu(0);
  for (int i = 0; i <= n; ++i) {
    if (i == 1) {
      lambda = 0;
      mu = 1;
    } else if (i >= 2) {
      lambda = 1;
      mu = i - 1;
    }
    const PolyQ z = x * Rat(lambda) + y * Rat(mu);
    if (z.is_zero()) continue;
    const Rat norm = resultant(f, z) / pow(f.leading(), static_cast<unsigned long>(std::max(z.degree(), 0)));
    if (norm == 0) continue;
    const long v = -val_p(norm, p);
    if (!best || v > *best) best = v;
  }
  if (!best) fail(ErrorKind::Computation, "norm vanished at every residue");
  return Rat(*best);
}

}  // namespace

LocalHeight finite_conjugate_sum(const RationalMap& map, const PolyQ& f, const Int& p, const HeightOptions& opt) {
  const int n = f.degree();
  const int d = map.degree();
  if (p + 1 <= n) fail(ErrorKind::Computation, "prime " + to_string(p) + " is too small for the norm method");
  LocalHeight out{Place::prime(p), Real(opt.bits), Rat(0), 0, opt.bits, Real(opt.bits), false, n > 1};
  const long r = val_p(map.int_resultant(), p);
  const Rat kappa_part = Rat(-n * val_p(map.kappa(), p), d - 1);
  PolyQ x{0, 1}, y{1};
  if (n == 1) {
    x = PolyQ::constant(-f.coeff(0) / f.coeff(1));
  }
  const Real logp = log(Real(p, opt.bits));
  Rat coeff = max_norm_coeff(f, x, y, p);
  unsigned long k = 0;
  if (r > 0) {
    // Tail after k steps lies in [-n r / (d^k (d-1)), 0] (in units of log p).
    while (k < opt.finite_kmax) {
      const Rat bound = Rat(n * r) / (pow(Rat(d), k) * (d - 1));
      if (Real(bound, opt.bits) * logp < Real(opt.tol, opt.bits)) break;
      if (degree_power(d, k + 1, 1ul << 16) == 0) break;
      PolyQ nx = eval_form_mod(map.p_int(), x, y, f);
      PolyQ ny = eval_form_mod(map.q_int(), x, y, f);
      x = std::move(nx);
      y = std::move(ny);
      ++k;
      coeff = max_norm_coeff(f, x, y, p) / pow(Rat(d), k);
    }
    const Rat bound = Rat(n * r) / (pow(Rat(d), k) * (d - 1));
    out.error = Real(bound, opt.bits) * logp;
    out.approximate = out.error.to_double() > opt.tol;
  }
  out.k_used = k;
  out.log_p_coeff = coeff + kappa_part;
  out.value = Real(out.log_p_coeff, opt.bits) * logp;
  return out;
}

HeightResult canonical_height_algebraic(const RationalMap& map, const PolyQ& f_in, const HeightOptions& opt) {
  if (f_in.is_zero() || f_in.degree() < 1) fail(ErrorKind::Input, "F must have degree at least 1");
  if (gcd(f_in, f_in.derivative()).degree() > 0) fail(ErrorKind::Input, "repeated roots");
  const ContentSplit cs = primitive_part(f_in.coeffs());
  const PolyQ f(std::vector<Rat>(cs.primitive.begin(), cs.primitive.end()));
  const int n = f.degree();
  const Real inv_n(Rat(1, n), opt.bits);

  HeightResult r;
  r.per_place.push_back(archimedean_conjugate_sum(map, f, opt));
  const std::vector<Int> primes = merge_primes(bad_primes(map), prime_support(Rat(f.leading()), opt.budget));
  for (const Int& p : primes) r.per_place.push_back(finite_conjugate_sum(map, f, p, opt));
  for (auto& lh : r.per_place) {
    lh.value *= inv_n;
    lh.error *= inv_n;
    lh.log_p_coeff /= n;
  }
  assemble(r, opt.bits);
  return r;
}

LocalHeight functional_eq_residual(const RationalMap& map, const ProjPoint& x, const Place& v, const HeightOptions& opt) {
  if (x.is_infinity()) fail(ErrorKind::Input, "the functional equation needs an affine point");
  const Rat q = map.q_affine().eval(x.value());
  if (q == 0) fail(ErrorKind::Input, "pole of the dehomogenized Q");
  const ProjPoint y = iterate_exact(map, x, 1);
  const LocalHeight hx = local_canonical_height(map, x, v, opt);
  const LocalHeight hy = local_canonical_height(map, y, v, opt);
  LocalHeight out = hy;
  const Real d(static_cast<double>(map.degree()), opt.bits);
  if (v.is_infinity()) {
    out.value = abs(hy.value - d * hx.value + log_abs(q, hy.bits));
  } else {
    out.log_p_coeff = hy.log_p_coeff - map.degree() * hx.log_p_coeff - val_p(q, v.p);
    if (out.log_p_coeff < 0) out.log_p_coeff = -out.log_p_coeff;
    out.value = Real(out.log_p_coeff, opt.bits) * log(Real(v.p, opt.bits));
  }
  out.error = hy.error + d * hx.error;
  out.approximate = hx.approximate || hy.approximate;
  out.k_used = std::max(hx.k_used, hy.k_used);
  return out;
}

}  // namespace canheight
