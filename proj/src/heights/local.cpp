#include "heights/local.hpp"

#include <cmath>
#include <map>
#include <set>

#include "dyn/iterate.hpp"
#include "exact/error.hpp"

namespace canheight {

Place parse_place(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "oo") return Place::infinity();
  Rat q;
  try {
    q = parse_rational(text);
  } catch (const Error&) {
    fail(ErrorKind::Input, "place must be inf or a prime, got '" + text + "'");
  }
  if (q.get_den() != 1 || q < 2 || mpz_probab_prime_p(q.get_num_mpz_t(), 30) == 0)
    fail(ErrorKind::Input, "place must be inf or a prime, got '" + text + "'");
  return Place::prime(q.get_num());
}

ScaledPair::ScaledPair(const RationalMap& map, Complex x, Complex y, Norm norm)
    : map_(&map), norm_(norm), a_(std::move(x)), b_(std::move(y)) {
  const mpfr_prec_t bits = a_.bits();
  for (const Rat& c : map.p()) pc_.emplace_back(c, bits);
  for (const Rat& c : map.q()) qc_.emplace_back(c, bits);
  log_scale_ = normalize();
  value_ = log_scale_;
  inc_ = log_scale_;
  inv_dk_ = Real(1.0, bits);
}

Real ScaledPair::normalize() {
  Real n = norm_ == Norm::Max ? max(abs(a_), abs(b_)) : hypot(abs(a_), abs(b_));
  if (n.is_zero() || !n.is_finite()) fail(ErrorKind::Precision, "scaled pair collapsed to zero");
  a_ /= n;
  b_ /= n;
  return log(n);
}

void ScaledPair::step() {
  Complex x = eval_form(pc_, a_, b_);
  Complex y = eval_form(qc_, a_, b_);
  a_ = std::move(x);
  b_ = std::move(y);
  const Real lm = normalize();
  const Real d(static_cast<double>(map_->degree()), a_.bits());
  ++k_;
  inv_dk_ /= d;
  log_scale_ = d * log_scale_ + lm;
  inc_ = lm * inv_dk_;
  value_ += inc_;
}

LocalHeight archimedean_limit(const RationalMap& map, const Complex& x, const Complex& y, const HeightOptions& opt) {
  const mpfr_prec_t bits = x.bits();
  const double d = map.degree();
  const Real threshold(opt.tol * (1 - 1 / d), bits);
  ScaledPair sp(map, x, y, opt.norm);
  bool prev_small = false;
  LocalHeight out{Place::infinity(), Real(bits), Rat(0), 0, bits, Real(bits), false, false};
  while (true) {
    sp.step();
    const bool small = abs(sp.last_increment()) < threshold;
    if ((small && prev_small && sp.k() >= opt.kmin) || sp.k() >= opt.kmax) {
      out.value = sp.value();
      out.k_used = sp.k();
      out.error = abs(sp.last_increment()) * Real(d / (d - 1), bits);
      out.approximate = !(small && prev_small);
      return out;
    }
    prev_small = small;
  }
}

LocalHeight with_precision_check(const std::function<LocalHeight(mpfr_prec_t)>& at_bits, const HeightOptions& opt) {
  mpfr_prec_t bits = opt.bits;
  LocalHeight prev = at_bits(bits);
  if (!opt.precision_check) return prev;
  while (true) {
    const mpfr_prec_t next = bits * 2;
    LocalHeight cur = at_bits(next);
    const Real diff = abs(cur.value - prev.value);
    if (diff.to_double() <= opt.tol) {
      cur.error += diff;
      return cur;
    }
    if (next >= opt.max_bits) {
      cur.approximate = true;
      cur.error += diff;
      return cur;
    }
    bits = next;
    prev = std::move(cur);
  }
}

namespace {

Int mod_p(const Int& z, const Int& p) {
  Int r;
  mpz_mod(r.get_mpz_t(), z.get_mpz_t(), p.get_mpz_t());
  return r;
}

// Walks the reduction of phi on P^1(F_p). Returns true if the orbit of the
// residue of (x, y) never meets a residue where both P' and Q' vanish.
class ResidueWalker {
 public:
  ResidueWalker(const RationalMap& map, const Int& p) : map_(map), p_(p) {}

  bool safe(const Int& x, const Int& y) {
    std::set<Int> path;
    Int s0 = mod_p(x, p_), s1 = mod_p(y, p_);
    for (unsigned long steps = 0; steps < kMaxSteps; ++steps) {
      const Int key = encode(s0, s1);
      if (safe_.count(key)) return remember(path);
      if (!path.insert(key).second) return remember(path);
      Int t0 = mod_p(eval_form(map_.p_int(), s0, s1), p_);
      Int t1 = mod_p(eval_form(map_.q_int(), s0, s1), p_);
      if (t0 == 0 && t1 == 0) return false;
      s0 = std::move(t0);
      s1 = std::move(t1);
    }
    return false;
  }

 private:
  static constexpr unsigned long kMaxSteps = 1ul << 18;

  // [s0:s1] -> s0/s1 in [0, p) or p for the residue at infinity.
  Int encode(Int& s0, Int& s1) const {
    if (s1 == 0) {
      s0 = 1;
      return p_;
    }
    Int inv;
    mpz_invert(inv.get_mpz_t(), s1.get_mpz_t(), p_.get_mpz_t());
    s0 = mod_p(s0 * inv, p_);
    s1 = 1;
    return s0;
  }

  bool remember(const std::set<Int>& path) {
    safe_.insert(path.begin(), path.end());
    return true;
  }

  const RationalMap& map_;
  Int p_;
  std::set<Int> safe_;
};

long min_val(const Int& x, const Int& y, const Int& p) {
  if (x == 0) return val_p(y, p);
  if (y == 0) return val_p(x, p);
  return std::min(val_p(x, p), val_p(y, p));
}

// Valuation of z modulo p^n, capped at n.
long capped_val(const Int& z, const Int& p, long n) {
  if (z == 0) return n;
  return std::min(val_p(z, p), n);
}

constexpr std::size_t kExactOrbitBits = std::size_t{1} << 16;

}  // namespace

LocalHeight finite_local_height(const RationalMap& map, const ProjPoint& x, const Int& p, const HeightOptions& opt) {
  const int d = map.degree();
  const long r = val_p(map.int_resultant(), p);
  Rat coeff(x.is_infinity() ? 0 : val_p(x.b(), p));
  coeff -= Rat(val_p(map.kappa(), p), d - 1);

  LocalHeight out{Place::prime(p), Real(opt.bits), Rat(0), 0, opt.bits, Real(opt.bits), false, false};
  Rat tail(0);
  bool done = r == 0;
  unsigned long k = 0;
  if (!done) {
    ResidueWalker walker(map, p);
    Rat weight(1, d);  // d^-(k+1)
    std::map<ProjPoint, unsigned long> seen;
    std::vector<Rat> terms;
    ProjPoint cur = x;
    bool exact_orbit = true;
    Int xa, xb, modulus;
    long digits = 0;
    for (; k < opt.finite_kmax && !done; ++k) {
      long m;
      if (exact_orbit) {
        auto [it, fresh] = seen.emplace(cur, k);
        if (!fresh) {
          Rat cycle(0);
          for (unsigned long j = it->second; j < k; ++j) cycle += terms[j];
          tail += cycle / (pow(Rat(d), k - it->second) - 1);
          done = true;
          break;
        }
        auto [P, Q] = map.apply_int(cur.a(), cur.b());
        m = min_val(P, Q, p);
        if (m == 0 && walker.safe(cur.a(), cur.b())) {
          done = true;
          break;
        }
        cur = ProjPoint(P, Q);
        if (mpz_sizeinbase(cur.a().get_mpz_t(), 2) + mpz_sizeinbase(cur.b().get_mpz_t(), 2) > kExactOrbitBits) {
          // Continue p-adically with enough digits for the remaining steps.
          exact_orbit = false;
          digits = r * static_cast<long>(opt.finite_kmax - k) + r + 1;
          modulus = pow(p, static_cast<unsigned long>(digits));
          xa = mod_p(cur.a(), modulus);
          xb = mod_p(cur.b(), modulus);
        }
      } else {
        if (capped_val(xa, p, 1) == 0 || capped_val(xb, p, 1) == 0) {
          if (walker.safe(xa, xb)) {
            m = 0;
            done = true;
            break;
          }
        }
        Int P = mod_p(eval_form(map.p_int(), xa, xb), modulus);
        Int Q = mod_p(eval_form(map.q_int(), xa, xb), modulus);
        m = std::min(capped_val(P, p, digits), capped_val(Q, p, digits));
        if (m >= digits) break;  // precision exhausted
        const Int pm = pow(p, static_cast<unsigned long>(m));
        digits -= m;
        modulus /= pm;
        xa = mod_p(Int(P / pm), modulus);
        xb = mod_p(Int(Q / pm), modulus);
      }
      terms.push_back(Rat(m) * weight);
      tail += terms.back();
      weight /= d;
    }
  }
  coeff -= tail;
  out.log_p_coeff = coeff;
  out.k_used = k;
  const Real logp = log(Real(p, opt.bits));
  out.value = Real(coeff, opt.bits) * logp;
  if (!done) {
    // Remaining terms are in [0, r] each.
    out.approximate = true;
    const Rat bound = Rat(r) / (pow(Rat(d), k) * (d - 1));
    out.error = Real(bound, opt.bits) * logp;
  }
  return out;
}

LocalHeight local_canonical_height(const RationalMap& map, const ProjPoint& x, const Place& v, const HeightOptions& opt) {
  if (!v.is_infinity()) return finite_local_height(map, x, v.p, opt);
  return with_precision_check(
      [&](mpfr_prec_t bits) {
        if (x.is_infinity()) return archimedean_limit(map, Complex(Rat(1), bits), Complex(Rat(0), bits), opt);
        return archimedean_limit(map, Complex(x.value(), bits), Complex(Rat(1), bits), opt);
      },
      opt);
}

LocalHeight local_height_infinity_point(const RationalMap& map, const Place& v, const HeightOptions& opt) {
  return local_canonical_height(map, ProjPoint::infinity(), v, opt);
}

}  // namespace canheight
