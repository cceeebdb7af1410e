#include "equidist/averages.hpp"

#include <algorithm>

#include "exact/error.hpp"
#include "exact/roots.hpp"

namespace canheight {

Mode parse_mode(const std::string& text) {
  if (text == "exact") return Mode::Exact;
  if (text == "numeric") return Mode::Numeric;
  if (text == "auto") return Mode::Auto;
  fail(ErrorKind::Input, "mode must be exact, numeric or auto, got '" + text + "'");
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Exact:
      return "exact";
    case Mode::Numeric:
      return "numeric";
    default:
      return "auto";
  }
}

ExactRootSum exact_root_sum(const PolyQ& r, const PolyQ& f) {
  ExactRootSum out;
  Stripped s = strip_common_roots(r, f);
  out.cofactor = std::move(s.cofactor);
  out.removed_degree = s.removed_degree;
  out.res = resultant(out.cofactor, f);
  return out;
}

namespace {

// Raised inside the numeric path when a root of F sits (numerically) on a
// root of R_k or S_k; the caller decides between exact fallback and failure.
struct NeedExact {
  std::string why;
};

std::vector<Complex> complex_coeffs(const PolyQ& p, mpfr_prec_t bits) {
  std::vector<Complex> c;
  for (const Rat& q : p.coeffs()) c.emplace_back(q, bits);
  return c;
}

Real log_abs_at(const Rat& q, const Place& v, mpfr_prec_t bits) {
  if (v.is_infinity()) return log_abs(q, bits);
  return Real(Rat(-val_p(q, v.p)), bits) * log(Real(v.p, bits));
}

std::vector<unsigned long> divisors(unsigned long k) {
  std::vector<unsigned long> out;
  for (unsigned long l = 1; l <= k; ++l)
    if (k % l == 0) out.push_back(l);
  return out;
}

// Orbit of (beta, 1) together with d/dw of the pair, normalized by the same
// constants at every step: P_k(w,1) = e^L a, d/dw P_k(w,1) = e^L da.
class OrbitJet {
 public:
  OrbitJet(const RationalMap& map, const Complex& beta, mpfr_prec_t bits)
      : d_(map.degree()), a_(beta), b_(Rat(1), bits), da_(Rat(1), bits), db_(Rat(0), bits), log_scale_(Rat(0), bits) {
    forms(map.p(), pc_, px_, py_, bits);
    forms(map.q(), qc_, qx_, qy_, bits);
  }

  void step() {
    Complex a = eval_form(pc_, a_, b_), b = eval_form(qc_, a_, b_);
    Complex da = eval_form(px_, a_, b_) * da_ + eval_form(py_, a_, b_) * db_;
    Complex db = eval_form(qx_, a_, b_) * da_ + eval_form(qy_, a_, b_) * db_;
    const Real n = max(abs(a), abs(b));
    if (n.is_zero() || !n.is_finite()) fail(ErrorKind::Precision, "scaled pair collapsed to zero");
    a_ = std::move(a /= n);
    b_ = std::move(b /= n);
    da_ = std::move(da /= n);
    db_ = std::move(db /= n);
    log_scale_ = Real(static_cast<double>(d_), n.bits()) * log_scale_ + log(n);
  }

  const Complex& a() const { return a_; }
  const Complex& b() const { return b_; }
  const Complex& da() const { return da_; }
  const Complex& db() const { return db_; }
  const Real& log_scale() const { return log_scale_; }

 private:
  static void forms(const std::vector<Rat>& c, std::vector<Complex>& f, std::vector<Complex>& fx,
                    std::vector<Complex>& fy, mpfr_prec_t bits) {
    const long d = static_cast<long>(c.size()) - 1;
    for (long i = 0; i <= d; ++i) {
      f.emplace_back(c[i], bits);
      if (i < d) fx.emplace_back(Rat(d - i) * c[i], bits);
      if (i > 0) fy.emplace_back(Rat(i) * c[i], bits);
    }
  }

  int d_;
  Complex a_, b_, da_, db_;
  Real log_scale_;
  std::vector<Complex> pc_, px_, py_, qc_, qx_, qy_;
};

}  // namespace

AverageEngine::AverageEngine(const RationalMap& map, EquidistOptions opt)
    : map_(map), opt_(opt), cache_(map_, opt.caps) {}

bool AverageEngine::within_cap(unsigned long k) const {
  return degree_power(map_.degree(), k, opt_.caps.poly_degree) != 0;
}

PolyQ AverageEngine::exact_poly(Target t, const ProjPoint& alpha, unsigned long k) {
  if (t == Target::Preimage) return preimage_poly(map_, alpha, k, opt_.caps, &cache_).sk;
  auto it = periodic_polys_.find(k);
  if (it != periodic_polys_.end()) return it->second;
  PolyQ r = fixed_point_poly(map_, k, opt_.caps, &cache_).rk;
  periodic_polys_.emplace(k, r);
  return r;
}

AverageValue AverageEngine::exact(Target t, const PolyQ& f, const ProjPoint& alpha, const Place& v, unsigned long k) {
  const mpfr_prec_t bits = opt_.height.bits;
  const ExactRootSum s = exact_root_sum(exact_poly(t, alpha, k), f);
  const Rat dk = pow(Rat(map_.degree()), k);
  const long n = f.degree();
  AverageValue out;
  out.mode_used = Mode::Exact;
  out.removed_degree = s.removed_degree;
  out.bits = bits;
  if (v.is_infinity()) {
    out.value = (log_abs(s.res, bits) - Real(static_cast<double>(n), bits) * log_abs(s.cofactor.leading(), bits)) /
                Real(dk, bits);
  } else {
    out.log_p_coeff = Rat(-val_p(s.res, v.p) + n * val_p(s.cofactor.leading(), v.p)) / dk;
    out.value = Real(out.log_p_coeff, bits) * log(Real(v.p, bits));
  }
  return out;
}

AverageValue AverageEngine::numeric_checked(const std::function<AverageValue(mpfr_prec_t)>& run) {
  mpfr_prec_t bits = opt_.height.bits;
  AverageValue prev = run(bits);
  if (!opt_.height.precision_check) return prev;
  while (true) {
    const mpfr_prec_t next = bits * 2;
    AverageValue cur = run(next);
    if (abs(cur.value - prev.value).to_double() <= opt_.height.tol) return cur;
    if (next >= opt_.height.max_bits)
      fail(ErrorKind::Precision, "numeric average did not stabilize under precision doubling");
    bits = next;
    prev = std::move(cur);
  }
}

AverageValue AverageEngine::numeric_periodic(const PolyQ& f, unsigned long k, mpfr_prec_t bits) {
  const int d = map_.degree();
  const LeadingAtInfinity lead = fixed_point_leading(map_, k);
  const Real log_gamma = lead.log_abs(bits);
  const Real threshold = -Real(static_cast<double>(bits / 2), bits) * log2_const(bits);
  const Int dk = pow(Int(d), k);

  struct Root {
    Complex beta;
    int e;
    unsigned long period;
  };
  std::vector<Root> roots;
  for (const auto& part : square_free_decomposition(f)) {
    PolyQ rest = part.part;
    for (unsigned long l : divisors(k)) {
      if (!within_cap(l) || rest.degree() < 1) continue;
      const PolyQ g = gcd(rest, exact_poly(Target::Periodic, ProjPoint(), l));
      if (g.degree() < 1) continue;
      for (auto& z : complex_roots(g, bits)) roots.push_back({std::move(z), part.multiplicity, l});
      rest = divrem(rest, g).quotient;
    }
    if (rest.degree() >= 1)
      for (auto& z : complex_roots(rest, bits)) roots.push_back({std::move(z), part.multiplicity, 0});
  }

  long removed = 0;
  for (const auto& r : roots) removed += r.period ? 1 : 0;
  const Int deg_cofactor = dk + 1 - lead.inf_mult - removed;

  const auto [da, db] = derivative_pair(map_);
  const auto ca = complex_coeffs(da, bits), cb = complex_coeffs(db, bits);
  const auto cp = complex_coeffs(map_.p_affine(), bits), cq = complex_coeffs(map_.q_affine(), bits);

  Real sum = f.degree() >= 0 ? Real(deg_cofactor, bits) * log_abs(f.leading(), bits) : Real(bits);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const Complex& beta = roots[i].beta;
    ScaledPair sp(map_, beta, Complex(Rat(1), bits));
    for (unsigned long j = 0; j < k; ++j) sp.step();
    Real val(bits);
    if (roots[i].period == 0) {
      const Real lg = log_abs(sp.a() - beta * sp.b());
      if (lg < threshold) throw NeedExact{"a root of F is numerically " + std::to_string(k) + "-periodic"};
      val = sp.log_scale() + lg;
    } else {
      // R_k'(beta) = Q_k(beta, 1) (lambda^(k/l) - 1) at a periodic point.
      Complex x = beta;
      Complex lambda(Rat(1), bits);
      for (unsigned long j = 0; j < roots[i].period; ++j) {
        const Complex qx = horner(cq, x);
        if (log_abs(qx) < threshold) throw NeedExact{"a periodic root of F has a cycle through infinity"};
        lambda *= horner(ca, x) / horner(cb, x);
        x = horner(cp, x) / qx;
      }
      Complex power(Rat(1), bits);
      for (unsigned long j = 0; j < k / roots[i].period; ++j) power *= lambda;
      const Real lm = log_abs(power - Complex(Rat(1), bits));
      if (lm < threshold) throw NeedExact{"a periodic root of F is parabolic"};
      val = sp.log_scale() + log_abs(sp.b()) + lm;
    }
    Real term = val - log_gamma;
    for (std::size_t j = 0; j < roots.size(); ++j)
      if (j != i && roots[j].period) term -= log_abs(beta - roots[j].beta);
    sum += Real(static_cast<double>(roots[i].e), bits) * term;
  }
  AverageValue out;
  out.mode_used = Mode::Numeric;
  out.removed_degree = removed;
  out.bits = bits;
  out.value = sum / Real(dk, bits);
  return out;
}

AverageValue AverageEngine::numeric_preimage(const PolyQ& f, const ProjPoint& alpha, unsigned long k,
                                             mpfr_prec_t bits) {
  const int d = map_.degree();
  const LeadingAtInfinity lead = preimage_leading(map_, alpha, k);
  const Real log_eta = lead.log_abs(bits);
  const Real threshold = -Real(static_cast<double>(bits / 2), bits) * log2_const(bits);
  const Int dk = pow(Int(d), k);
  const Complex s(Rat(alpha.a()), bits), u(Rat(alpha.b()), bits);

  const PreimageSplit& split = preimage_split(f, alpha, k);
  auto on_sk = [&](long j) {
    const unsigned long uj = static_cast<unsigned long>(j);
    return j >= 0 && (uj == k || (uj < k && split.alpha_period && (k - uj) % split.alpha_period == 0));
  };
  struct Root {
    Complex beta;
    int e;
    bool removed;
  };
  std::vector<Root> roots;
  for (const auto& piece : split.pieces)
    for (auto& z : complex_roots(piece.factor, bits)) roots.push_back({std::move(z), piece.multiplicity, on_sk(piece.level)});
  long removed = 0;
  for (const auto& r : roots) removed += r.removed ? 1 : 0;

  Real sum = Real(Int(dk - lead.inf_mult - removed), bits) * log_abs(f.leading(), bits);
  for (std::size_t i = 0; i < roots.size(); ++i) {
    const Complex& beta = roots[i].beta;
    OrbitJet jet(map_, beta, bits);
    for (unsigned long j = 0; j < k; ++j) jet.step();
    Real lg(bits);
    if (!roots[i].removed) {
      lg = log_abs(u * jet.a() - s * jet.b());
      if (lg < threshold) throw NeedExact{"a root of F is numerically a preimage of the target"};
    } else {
      lg = log_abs(u * jet.da() - s * jet.db());
      if (lg < threshold) throw NeedExact{"a root of F is a critical preimage of the target"};
    }
    Real term = jet.log_scale() + lg - log_eta;
    for (std::size_t j = 0; j < roots.size(); ++j)
      if (j != i && roots[j].removed) term -= log_abs(beta - roots[j].beta);
    sum += Real(static_cast<double>(roots[i].e), bits) * term;
  }
  AverageValue out;
  out.mode_used = Mode::Numeric;
  out.removed_degree = removed;
  out.bits = bits;
  out.value = sum / Real(dk, bits);
  return out;
}

// Roots of F that are exact j-th preimages of alpha for small j; such a root
// lies on S_k when alpha returns to itself after k - j steps.
// Levels are searched up to k (or the cap); a later call with larger k redoes the split.
const AverageEngine::PreimageSplit& AverageEngine::preimage_split(const PolyQ& f, const ProjPoint& alpha,
                                                                  unsigned long k) {
  unsigned long top = 0;
  while (top < k && within_cap(top + 1)) ++top;
  const std::string key = to_string(alpha) + "|" + to_string(f);
  auto it = preimage_splits_.find(key);
  if (it != preimage_splits_.end() && it->second.searched >= top) return it->second;
  PreimageSplit split;
  split.searched = top;
  // Periodic points have bounded height, so an orbit that grows past a few
  // thousand bits is treated as wandering; a long cycle missed here still
  // shows up as a numerical near-root.
  std::map<ProjPoint, unsigned long> seen{{alpha, 0}};
  ProjPoint cur = alpha;
  for (unsigned long j = 1; j <= 64; ++j) {
    cur = iterate_exact(map_, cur, 1);
    if (mpz_sizeinbase(cur.a().get_mpz_t(), 2) + mpz_sizeinbase(cur.b().get_mpz_t(), 2) > 4096) break;
    if (cur == alpha) {
      split.alpha_period = j;
      break;
    }
    if (!seen.emplace(cur, j).second) break;
  }
  for (const auto& part : square_free_decomposition(f)) {
    PolyQ rest = part.part;
    for (unsigned long j = 0; j <= top && rest.degree() >= 1; ++j) {
      const PolyQ sj = j == 0 ? PolyQ(std::vector<Rat>{-Rat(alpha.a()), Rat(alpha.b())})
                              : exact_poly(Target::Preimage, alpha, j);
      const PolyQ g = gcd(rest, sj);
      if (g.degree() < 1) continue;
      split.pieces.push_back({g, part.multiplicity, static_cast<long>(j)});
      rest = divrem(rest, g).quotient;
    }
    if (rest.degree() >= 1) split.pieces.push_back({rest, part.multiplicity, -1});
  }
  return preimage_splits_[key] = std::move(split);
}

AverageValue AverageEngine::periodic(const PolyQ& f, const Place& v, unsigned long k, Mode mode) {
  if (f.is_zero()) fail(ErrorKind::Input, "F must be nonzero");
  if (k < 1) fail(ErrorKind::Input, "period k must be at least 1");
  if (mode == Mode::Auto) mode = within_cap(k) || !v.is_infinity() ? Mode::Exact : Mode::Numeric;
  if (mode == Mode::Exact) return exact(Target::Periodic, f, ProjPoint(), v, k);
  if (!v.is_infinity()) fail(ErrorKind::Input, "numeric mode is only available at the archimedean place");
  try {
    return numeric_checked([&](mpfr_prec_t bits) { return numeric_periodic(f, k, bits); });
  } catch (const NeedExact& e) {
    if (!within_cap(k)) fail(ErrorKind::Precision, e.why + " beyond the exact construction cap");
    AverageValue out = exact(Target::Periodic, f, ProjPoint(), v, k);
    out.fell_back = true;
    return out;
  }
}

AverageValue AverageEngine::preimage(const PolyQ& f, const ProjPoint& alpha, const Place& v, unsigned long k,
                                     Mode mode) {
  if (f.is_zero()) fail(ErrorKind::Input, "F must be nonzero");
  if (is_exceptional(map_, alpha)) fail(ErrorKind::ExceptionalTarget, "exceptional target");
  if (mode == Mode::Auto) mode = within_cap(k) || !v.is_infinity() ? Mode::Exact : Mode::Numeric;
  if (mode == Mode::Exact) return exact(Target::Preimage, f, alpha, v, k);
  if (!v.is_infinity()) fail(ErrorKind::Input, "numeric mode is only available at the archimedean place");
  try {
    return numeric_checked([&](mpfr_prec_t bits) { return numeric_preimage(f, alpha, k, bits); });
  } catch (const NeedExact& e) {
    if (!within_cap(k)) fail(ErrorKind::Precision, e.why + " beyond the exact construction cap");
    AverageValue out = exact(Target::Preimage, f, alpha, v, k);
    out.fell_back = true;
    return out;
  }
}

AverageValue periodic_average(const RationalMap& map, const PolyQ& f, const Place& v, unsigned long k, Mode mode,
                              const EquidistOptions& opt) {
  AverageEngine engine(map, opt);
  return engine.periodic(f, v, k, mode);
}

AverageValue preimage_average(const RationalMap& map, const PolyQ& f, const ProjPoint& alpha, const Place& v,
                              unsigned long k, Mode mode, const EquidistOptions& opt) {
  AverageEngine engine(map, opt);
  return engine.preimage(f, alpha, v, k, mode);
}

LocalHeight mahler_measure(const RationalMap& map, const PolyQ& f, const Place& v, const HeightOptions& opt) {
  if (f.is_zero()) fail(ErrorKind::Input, "F must be nonzero");
  const mpfr_prec_t bits = opt.bits;
  LocalHeight out{v, Real(bits), Rat(0), 0, bits, Real(bits), false, false};
  const long n = f.degree();
  const auto parts = square_free_decomposition(f);
  auto absorb = [&](const LocalHeight& h, long weight) {
    const Real w(static_cast<double>(weight), h.value.bits());
    out.value += w * h.value;
    out.error += abs(w) * h.error;
    out.log_p_coeff += Rat(weight) * h.log_p_coeff;
    out.k_used = std::max(out.k_used, h.k_used);
    out.bits = std::max(out.bits, h.bits);
    out.approximate = out.approximate || h.approximate;
    out.aggregated = out.aggregated || h.aggregated;
  };
  if (v.is_infinity()) {
    out.value = log_abs(f.leading(), bits);
    for (const auto& part : parts) absorb(archimedean_conjugate_sum(map, part.part, opt), part.multiplicity);
  } else {
    out.log_p_coeff = Rat(-val_p(f.leading(), v.p));
    out.value = Real(out.log_p_coeff, bits) * log(Real(v.p, bits));
    for (const auto& part : parts) {
      if (part.part.degree() == 1)
        absorb(finite_local_height(map, ProjPoint::affine(-part.part.coeff(0)), v.p, opt), part.multiplicity);
      else
        absorb(finite_conjugate_sum(map, part.part, v.p, opt), part.multiplicity);
    }
  }
  if (n > 0) absorb(local_height_infinity_point(map, v, opt), -n);
  if (!v.is_infinity() && !out.approximate) out.value = Real(out.log_p_coeff, bits) * log(Real(v.p, bits));
  return out;
}

namespace {

ConvergenceSeries run_series(unsigned long kmin, unsigned long kmax, double tol,
                             const std::function<AverageValue(unsigned long)>& row, const RowCallback& on_row) {
  if (kmin < 1) fail(ErrorKind::Input, "kmin must be at least 1");
  if (kmax < kmin) fail(ErrorKind::Input, "kmax must be at least kmin");
  ConvergenceSeries out;
  for (unsigned long k = kmin; k <= kmax; ++k) {
    const AverageValue v = row(k);
    SeriesRow r;
    r.k = k;
    r.value = v.value;
    r.mode_used = v.mode_used;
    r.fell_back = v.fell_back;
    if (!out.rows.empty()) r.delta = v.value - out.rows.back().value;
    if (on_row) on_row(r);
    out.rows.push_back(std::move(r));
  }
  out.limit_estimate = out.rows.back().value;
  const std::size_t n = out.rows.size();
  out.converged = n >= 3 && abs(*out.rows[n - 1].delta).to_double() < tol && abs(*out.rows[n - 2].delta).to_double() < tol;
  return out;
}

}  // namespace

ConvergenceSeries average_series(AverageEngine& engine, const AverageSpec& spec, unsigned long kmin,
                                 unsigned long kmax, double tol, const RowCallback& on_row) {
  if (spec.target == Target::Preimage && is_exceptional(engine.map(), spec.alpha))
    fail(ErrorKind::ExceptionalTarget, "exceptional target");
  return run_series(
      kmin, kmax, tol,
      [&](unsigned long k) {
        return spec.target == Target::Periodic ? engine.periodic(spec.f, spec.place, k, spec.mode)
                                               : engine.preimage(spec.f, spec.alpha, spec.place, k, spec.mode);
      },
      on_row);
}

ConvergenceSeries lyapunov(AverageEngine& engine, unsigned long kmin, unsigned long kmax, double tol, Mode mode,
                           const RowCallback& on_row) {
  const auto [a, b] = derivative_pair(engine.map());
  return run_series(
      kmin, kmax, tol,
      [&](unsigned long k) {
        AverageValue va = engine.periodic(a, Place::infinity(), k, mode);
        const AverageValue vb = engine.periodic(b, Place::infinity(), k, mode);
        va.value -= vb.value;
        va.fell_back = va.fell_back || vb.fell_back;
        va.removed_degree += vb.removed_degree;
        return va;
      },
      on_row);
}

GlobalIdentity global_periodic_identity(const RationalMap& map, const PolyQ& f, unsigned long k,
                                        const EquidistOptions& opt) {
  if (f.is_zero() || f.degree() < 1) fail(ErrorKind::Input, "F must have degree at least 1");
  const mpfr_prec_t bits = opt.height.bits;
  AverageEngine engine(map, opt);
  const ExactRootSum s = exact_root_sum(engine.exact_poly(Target::Periodic, ProjPoint(), k), f);

  const ContentSplit cs = primitive_part(f.coeffs());
  std::vector<Int> primes = bad_primes(map);
  primes = merge_primes(primes, prime_support(cs.content, opt.height.budget));
  primes = merge_primes(primes, prime_support(Rat(cs.primitive.back()), opt.height.budget));

  GlobalIdentity out;
  out.k = k;
  out.resultant = s.res;
  out.product_formula_holds = product_formula_check(s.res, opt.height.budget);
  const Rat dk = pow(Rat(map.degree()), k);
  const long n = f.degree();
  out.total = Real(bits);
  std::vector<Place> places{Place::infinity()};
  for (const Int& p : primes) places.push_back(Place::prime(p));
  for (const Place& v : places) {
    AverageValue a;
    a.mode_used = Mode::Exact;
    a.removed_degree = s.removed_degree;
    a.bits = bits;
    if (v.is_infinity()) {
      a.value = (log_abs_at(s.res, v, bits) - Real(static_cast<double>(n), bits) * log_abs_at(s.cofactor.leading(), v, bits)) /
                Real(dk, bits);
    } else {
      a.log_p_coeff = Rat(-val_p(s.res, v.p) + n * val_p(s.cofactor.leading(), v.p)) / dk;
      a.value = Real(a.log_p_coeff, bits) * log(Real(v.p, bits));
    }
    out.total += a.value;
    out.per_place.emplace_back(v, std::move(a));
  }
  out.h_beta = canonical_height_algebraic(map, f, opt.height).value;
  out.h_infinity = canonical_height(map, ProjPoint::infinity(), opt.height).value;
  out.target = Real(static_cast<double>(n), bits) * (out.h_beta - out.h_infinity);
  return out;
}

}  // namespace canheight
