#include <doctest.h>

#include <cmath>
#include <complex>

#include "equidist/averages.hpp"
#include "exact/error.hpp"
#include "exact/roots.hpp"

using namespace canheight;

namespace {

std::vector<Rat> coeffs(std::initializer_list<long> v) {
  std::vector<Rat> out;
  for (long x : v) out.emplace_back(x);
  return out;
}

RationalMap make(std::initializer_list<long> p, std::initializer_list<long> q) {
  return RationalMap::create(coeffs(p), coeffs(q));
}

// Ascending coefficients, as PolyQ stores them.
PolyQ poly(std::initializer_list<long> v) { return PolyQ(coeffs(v)); }

const RationalMap squaring = make({1, 0, 0}, {0, 0, 1});
const RationalMap z2p1 = make({1, 0, 1}, {0, 0, 1});
const RationalMap chebyshev = make({1, 0, -2}, {0, 0, 1});
const RationalMap half_square = make({1, 0, 0}, {0, 0, 2});
const RationalMap joukowski = make({1, 0, 1}, {0, 1, 0});
const RationalMap cubic = make({1, 0, -1, 1}, {0, 0, 0, 3});
const RationalMap mixed = make({2, 0, -1}, {1, 0, 3});

const PolyQ t_minus_2 = poly({-2, 1});
const PolyQ t_minus_1 = poly({-1, 1});
const PolyQ golden = poly({-1, -1, 1});

double ln(double x) { return std::log(x); }

double periodic(const RationalMap& m, const PolyQ& f, const Place& v, unsigned long k, Mode mode) {
  return periodic_average(m, f, v, k, mode).value.to_double();
}

// Brute force: roots of the numerator of phi^k(z) - z, straight from composing
// the affine map, summed with log|F| evaluated in complex doubles.
double brute_periodic(const RationalMap& m, const PolyQ& f, unsigned long k) {
  PolyQ num = PolyQ::monomial(Rat(1), 1), den = PolyQ::constant(Rat(1));
  const std::vector<Rat> p = m.p_affine().coeffs();
  const std::vector<Rat> q = m.q_affine().coeffs();
  const int d = m.degree();
  for (unsigned long step = 0; step < k; ++step) {
    // Homogenize p(num/den), q(num/den) with den^d.
    auto hom = [&](const std::vector<Rat>& c) {
      PolyQ acc;
      for (int i = 0; i < d + 1; ++i) {
        PolyQ term = PolyQ::constant(i < static_cast<int>(c.size()) ? c[i] : Rat(0));
        for (int j = 0; j < i; ++j) term = term * num;
        for (int j = i; j < d; ++j) term = term * den;
        acc = acc + term;
      }
      return acc;
    };
    PolyQ a = hom(p), b = hom(q);
    num = a;
    den = b;
  }
  const PolyQ r = num - PolyQ::monomial(Rat(1), 1) * den;
  const PolyQ fixed_out = gcd(r, f.degree() > 0 ? f : PolyQ::constant(Rat(1)));
  const PolyQ cof = fixed_out.degree() > 0 ? divrem(r, fixed_out).quotient : r;
  double sum = 0;
  for (const auto& part : square_free_decomposition(cof)) {
    for (const Complex& z : complex_roots(part.part, 256)) {
      const std::complex<double> w(z.re.to_double(), z.im.to_double());
      std::complex<double> fv = 0;
      for (auto it = f.coeffs().rbegin(); it != f.coeffs().rend(); ++it) fv = fv * w + it->get_d();
      sum += part.multiplicity * std::log(std::abs(fv));
    }
  }
  return sum / std::pow(static_cast<double>(d), static_cast<double>(k));
}

// Classical Mahler measure by Jensen: log|lc| + sum log max(1, |root|).
double jensen(const PolyQ& f) {
  double s = std::log(std::fabs(f.leading().get_d()));
  for (const auto& part : square_free_decomposition(f))
    for (const Complex& z : complex_roots(part.part, 128))
      s += part.multiplicity * std::max(0.0, std::log(std::hypot(z.re.to_double(), z.im.to_double())));
  return s;
}

}  // namespace

TEST_CASE("modes") {
  CHECK(parse_mode("exact") == Mode::Exact);
  CHECK(parse_mode("numeric") == Mode::Numeric);
  CHECK(parse_mode("auto") == Mode::Auto);
  CHECK_THROWS_AS(parse_mode("fast"), Error);
  CHECK(to_string(Mode::Numeric) == "numeric");
}

TEST_CASE("periodic averages for squaring") {
  CHECK(periodic(squaring, t_minus_2, Place::infinity(), 1, Mode::Exact) == doctest::Approx(ln(2) / 2).epsilon(1e-14));
  CHECK(periodic(squaring, t_minus_2, Place::infinity(), 2, Mode::Exact) ==
        doctest::Approx((ln(2) + ln(7)) / 4).epsilon(1e-14));
  for (unsigned long k = 1; k <= 10; ++k) {
    const double closed = (ln(2) + std::log(std::pow(2.0, std::pow(2.0, k) - 1) - 1)) / std::pow(2.0, k);
    CHECK(periodic(squaring, t_minus_2, Place::infinity(), k, Mode::Exact) == doctest::Approx(closed).epsilon(1e-13));
  }
  // Root 1 of F is fixed: the remaining roots 0, w, w^2 give log 3.
  const auto v = periodic_average(squaring, t_minus_1, Place::infinity(), 2, Mode::Exact);
  CHECK(v.value.to_double() == doctest::Approx(ln(3) / 4).epsilon(1e-14));
  CHECK(v.removed_degree == 1);
}

TEST_CASE("preimage averages for squaring") {
  const ProjPoint one(Int(1), Int(1));
  CHECK(preimage_average(squaring, t_minus_2, one, Place::infinity(), 1, Mode::Exact).value.to_double() ==
        doctest::Approx(ln(3) / 2).epsilon(1e-14));
  CHECK(preimage_average(squaring, t_minus_2, one, Place::infinity(), 3, Mode::Exact).value.to_double() ==
        doctest::Approx(ln(255) / 8).epsilon(1e-14));
  CHECK(preimage_average(squaring, t_minus_2, one, Place::infinity(), 3, Mode::Numeric).value.to_double() ==
        doctest::Approx(ln(255) / 8).epsilon(1e-12));
  try {
    preimage_average(squaring, t_minus_2, ProjPoint(Int(0), Int(1)), Place::infinity(), 2, Mode::Exact);
    FAIL("expected exceptional target");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ExceptionalTarget);
    CHECK(std::string(e.what()) == "exceptional target");
  }
  CHECK_THROWS_AS(preimage_average(squaring, t_minus_2, ProjPoint::infinity(), Place::infinity(), 2, Mode::Exact),
                  Error);
}

TEST_CASE("brute-force oracle") {
  struct Case {
    const RationalMap* map;
    PolyQ f;
    unsigned long kmax;
  };
  const std::vector<Case> cases{{&squaring, t_minus_2, 5}, {&squaring, t_minus_1, 5},   {&z2p1, golden, 5},
                                {&z2p1, poly({3, 0, 1}), 5}, {&mixed, poly({1, 2}), 4}, {&cubic, poly({-5, 0, 2}), 3},
                                {&joukowski, poly({-1, 1}), 4}};
  for (const auto& c : cases)
    for (unsigned long k = 1; k <= c.kmax; ++k)
      CHECK(periodic(*c.map, c.f, Place::infinity(), k, Mode::Exact) ==
            doctest::Approx(brute_periodic(*c.map, c.f, k)).epsilon(1e-9));
}

TEST_CASE("exact and numeric agree") {
  struct Case {
    const RationalMap* map;
    PolyQ f;
  };
  const std::vector<Case> cases{{&squaring, t_minus_2},  {&squaring, t_minus_1},       {&z2p1, golden},
                                {&z2p1, poly({3, 0, 1})}, {&chebyshev, poly({-2, 1})},  {&mixed, poly({1, 2})},
                                {&cubic, poly({-5, 0, 2})}, {&joukowski, poly({-1, 1})}, {&half_square, poly({-3, 1})},
                                {&half_square, poly({0, 0, 7})}};
  for (const auto& c : cases) {
    for (unsigned long k = 1; k <= 6; ++k) {
      CAPTURE(k);
      const double e = periodic(*c.map, c.f, Place::infinity(), k, Mode::Exact);
      const auto n = periodic_average(*c.map, c.f, Place::infinity(), k, Mode::Numeric);
      CHECK(std::fabs(e - n.value.to_double()) < 1e-9);
      const ProjPoint alpha(Int(3), Int(1));
      const double pe = preimage_average(*c.map, c.f, alpha, Place::infinity(), k, Mode::Exact).value.to_double();
      const double pn = preimage_average(*c.map, c.f, alpha, Place::infinity(), k, Mode::Numeric).value.to_double();
      CHECK(std::fabs(pe - pn) < 1e-9);
    }
  }
}

TEST_CASE("numeric mode handles periodic roots of F") {
  // 0 is fixed by squaring; 1 and the cube roots of unity are periodic.
  const PolyQ f = poly({0, -1, 0, 1});  // t^3 - t
  for (unsigned long k = 1; k <= 6; ++k) {
    const auto e = periodic_average(squaring, f, Place::infinity(), k, Mode::Exact);
    const auto n = periodic_average(squaring, f, Place::infinity(), k, Mode::Numeric);
    CHECK(std::fabs(e.value.to_double() - n.value.to_double()) < 1e-9);
    CHECK(e.removed_degree == n.removed_degree);
  }
  // Parabolic fixed point: z^2 + 1/4 at 1/2.
  const RationalMap parabolic = RationalMap::create({Rat(1), Rat(0), Rat(1, 4)}, {Rat(0), Rat(0), Rat(1)});
  const auto v = periodic_average(parabolic, poly({-1, 2}), Place::infinity(), 3, Mode::Numeric);
  CHECK(v.fell_back);
  CHECK(v.value.to_double() ==
        doctest::Approx(periodic(parabolic, poly({-1, 2}), Place::infinity(), 3, Mode::Exact)).epsilon(1e-12));
}

TEST_CASE("finite places") {
  // prod (2 - w) over periodic points = 2 (2^(2^k - 1) - 1): v_2 = 1.
  for (unsigned long k = 1; k <= 8; ++k) {
    const auto v = periodic_average(squaring, t_minus_2, Place::prime(Int(2)), k, Mode::Auto);
    CHECK(v.log_p_coeff == Rat(1) / pow(Rat(2), k) * Rat(-1));
  }
  CHECK_THROWS_AS(periodic_average(squaring, t_minus_2, Place::prime(Int(2)), 2, Mode::Numeric), Error);
  const auto m = mahler_measure(squaring, t_minus_2, Place::prime(Int(2)));
  CHECK(m.value.is_zero());
}

TEST_CASE("additivity and scaling") {
  const PolyQ f = poly({-3, 1}), g = poly({5, 0, 1}), fg = f * g;
  for (const Place& v : {Place::infinity(), Place::prime(Int(3)), Place::prime(Int(2))}) {
    for (unsigned long k = 1; k <= 5; ++k) {
      const auto a = periodic_average(mixed, f, v, k, Mode::Exact);
      const auto b = periodic_average(mixed, g, v, k, Mode::Exact);
      const auto c = periodic_average(mixed, fg, v, k, Mode::Exact);
      if (v.is_infinity())
        CHECK(std::fabs((a.value + b.value - c.value).to_double()) < 1e-40);
      else
        CHECK(a.log_p_coeff + b.log_p_coeff == c.log_p_coeff);
    }
  }
  // F -> cF adds deg(R_k) log|c| / d^k.
  const Rat c(5, 2);
  for (unsigned long k = 1; k <= 5; ++k) {
    const auto a = periodic_average(z2p1, golden, Place::infinity(), k, Mode::Exact);
    const auto b = periodic_average(z2p1, golden * PolyQ::constant(c), Place::infinity(), k, Mode::Exact);
    const double expected = (std::pow(2.0, k) + 0) * std::log(2.5) / std::pow(2.0, k);
    CHECK((b.value - a.value).to_double() == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("Mahler measures") {
  CHECK(mahler_measure(squaring, t_minus_2, Place::infinity()).value.to_double() ==
        doctest::Approx(ln(2)).epsilon(1e-12));
  const double g = ln((1 + std::sqrt(5.0)) / 2);
  CHECK(mahler_measure(squaring, golden, Place::infinity()).value.to_double() == doctest::Approx(g).epsilon(1e-12));
  for (const PolyQ& f : {poly({3, -7, 0, 2}), poly({1, 1, 1, 1, 5}), poly({-6, 0, 0, 1})})
    CHECK(mahler_measure(squaring, f, Place::infinity()).value.to_double() == doctest::Approx(jensen(f)).epsilon(1e-10));

  auto m = mahler_measure(half_square, t_minus_2, Place::prime(Int(2)));
  CHECK(m.log_p_coeff == -1);
  CHECK(m.value.to_double() == doctest::Approx(-ln(2)).epsilon(1e-14));
  CHECK_THROWS_AS(mahler_measure(squaring, PolyQ(), Place::infinity()), Error);
}

TEST_CASE("averages approach Mahler measures") {
  AverageEngine engine(squaring);
  const auto s = average_series(engine, {t_minus_2, Place::infinity()}, 1, 12, 1e-9);
  REQUIRE(s.rows.size() == 12);
  CHECK(std::fabs(s.rows.back().value.to_double() - ln(2)) < 3e-4);
  CHECK_FALSE(s.rows.front().delta.has_value());
  for (std::size_t i = 6; i < s.rows.size(); ++i) CHECK(s.rows[i].delta->to_double() >= 0);

  const auto conv = average_series(engine, {t_minus_2, Place::prime(Int(2))}, 1, 10, 1e-2);
  CHECK(conv.converged);
  CHECK(std::fabs(conv.limit_estimate.to_double()) < 1e-2);

  AverageEngine e2(z2p1);
  AverageSpec spec{golden, Place::infinity(), Mode::Numeric};
  const auto s2 = average_series(e2, spec, 10, 14, 1e-3);
  const double target = mahler_measure(z2p1, golden, Place::infinity()).value.to_double();
  CHECK(std::fabs(s2.limit_estimate.to_double() - target) < 1e-2);

  AverageEngine e3(half_square);
  const auto s3 = average_series(e3, {poly({-3, 1}), Place::prime(Int(2))}, 1, 10, 1e-2);
  CHECK(std::fabs(s3.limit_estimate.to_double()) < 1e-2);
  CHECK_THROWS_AS(average_series(engine, {t_minus_2, Place::infinity()}, 0, 3, 1e-9), Error);
}

TEST_CASE("row callback streams rows in order") {
  AverageEngine engine(squaring);
  std::vector<unsigned long> seen;
  average_series(engine, {t_minus_2, Place::infinity()}, 3, 6, 1e-9,
                 [&](const SeriesRow& r) { seen.push_back(r.k); });
  CHECK(seen == std::vector<unsigned long>{3, 4, 5, 6});
}

TEST_CASE("Lyapunov exponents") {
  AverageEngine sq(squaring);
  const auto l = lyapunov(sq, 1, 12, 1e-9, Mode::Auto);
  // Exactly log 2 - log 2 / 2^k: the excluded critical point 0 is a fixed point.
  for (const auto& r : l.rows)
    CHECK(r.value.to_double() == doctest::Approx(ln(2) - ln(2) / std::pow(2.0, r.k)).epsilon(1e-12));

  AverageEngine ch(chebyshev);
  const auto lc = lyapunov(ch, 14, 16, 1e-9, Mode::Numeric);
  CHECK(std::fabs(lc.limit_estimate.to_double() - ln(2)) < 1e-3);

  AverageEngine zp(z2p1);
  const double exact10 = lyapunov(zp, 10, 10, 1e-9, Mode::Exact).limit_estimate.to_double();
  const double numeric14 = lyapunov(zp, 14, 14, 1e-9, Mode::Numeric).limit_estimate.to_double();
  CHECK(std::fabs(exact10 - numeric14) < 1e-3);
}

TEST_CASE("global periodic identity") {
  const auto g = global_periodic_identity(squaring, t_minus_2, 8);
  CHECK(g.product_formula_holds);
  CHECK(std::fabs(g.total.to_double() - ln(2)) < 5e-3);
  CHECK(g.target.to_double() == doctest::Approx(ln(2)).epsilon(1e-10));
  REQUIRE(g.per_place.size() == 1);
  CHECK(g.per_place[0].first.is_infinity());

  const auto h = global_periodic_identity(half_square, poly({-3, 1}), 8);
  CHECK(h.product_formula_holds);
  CHECK(h.target.to_double() == doctest::Approx(ln(3)).epsilon(1e-9));
  CHECK(std::fabs(h.total.to_double() - h.target.to_double()) < 1e-2);

  const auto gold = global_periodic_identity(squaring, golden, 8);
  CHECK(gold.target.to_double() == doctest::Approx(ln((1 + std::sqrt(5.0)) / 2)).epsilon(1e-9));
  CHECK(std::fabs(gold.total.to_double() - gold.target.to_double()) < 1e-2);

  const auto m = global_periodic_identity(mixed, poly({-1, 3, 2}), 6);
  CHECK(m.product_formula_holds);
  CHECK(std::fabs(m.total.to_double() - m.target.to_double()) < 5e-2);
}

TEST_CASE("periodic and preimage series converge to the Mahler measure across the corpus") {
  const RationalMap z2m1 = make({1, 0, -1}, {0, 0, 1});
  const std::vector<const RationalMap*> maps{&squaring, &z2p1, &z2m1, &half_square, &joukowski};
  const std::vector<PolyQ> polys{poly({-2, 1}), poly({-3, 1}), golden, poly({1, 0, 1})};
  const double tol = 1e-8;
  for (const RationalMap* m : maps) {
    EquidistOptions opt;
    opt.height.tol = 1e-12;
    AverageEngine engine(*m, opt);
    ProjPoint alpha(Int(1), Int(1));
    if (is_exceptional(*m, alpha)) alpha = ProjPoint(Int(2), Int(1));
    REQUIRE_FALSE(is_exceptional(*m, alpha));
    for (const PolyQ& f : polys) {
      CAPTURE(to_string(m->p()[0]));
      CAPTURE(to_string(f));
      const double target = mahler_measure(*m, f, Place::infinity()).value.to_double();
      const auto per = average_series(engine, {f, Place::infinity(), Mode::Numeric}, 38, 40, tol);
      const auto pre =
          average_series(engine, {f, Place::infinity(), Mode::Numeric, Target::Preimage, alpha}, 38, 40, tol);
      CHECK(per.converged);
      CHECK(pre.converged);
      CHECK(std::fabs(per.limit_estimate.to_double() - target) < 10 * tol);
      CHECK(std::fabs(pre.limit_estimate.to_double() - target) < 10 * tol);
    }
  }
}

TEST_CASE("finite-place series approach the Mahler measure at bad primes") {
  // Exact rows stop at the construction cap, so the tolerance is loose.
  const RationalMap z2m1 = make({1, 0, -1}, {0, 0, 1});
  const std::vector<const RationalMap*> maps{&half_square, &joukowski, &mixed, &cubic};
  const std::vector<PolyQ> polys{poly({-2, 1}), poly({-3, 1}), golden, poly({1, 0, 1})};
  for (const RationalMap* m : maps) {
    AverageEngine engine(*m);
    for (const Int& p : bad_primes(*m)) {
      for (const PolyQ& f : polys) {
        CAPTURE(to_string(p));
        CAPTURE(to_string(f));
        const double target = mahler_measure(*m, f, Place::prime(p)).value.to_double();
        const unsigned long kmax = m->degree() == 2 ? 12 : 7;
        const auto s = average_series(engine, {f, Place::prime(p), Mode::Exact}, kmax - 2, kmax, 1e-2);
        CHECK(std::fabs(s.limit_estimate.to_double() - target) < 1e-2);
      }
    }
  }
}

TEST_CASE("removed periodic factors stay bounded") {
  const RationalMap parabolic = make({1, 1, 0}, {0, 0, 1});
  const RationalMap z2m1 = make({1, 0, -1}, {0, 0, 1});
  const std::vector<std::pair<const RationalMap*, PolyQ>> cases{
      {&parabolic, poly({0, 1})}, {&z2m1, golden}, {&z2m1, poly({0, 1})}, {&squaring, poly({0, -1, 0, 1})}};
  for (const auto& [m, f] : cases) {
    long most = 0;
    for (unsigned long k = 1; k <= 12; ++k) {
      const auto v = periodic_average(*m, f, Place::infinity(), k, Mode::Exact);
      most = std::max(most, v.removed_degree);
    }
    CHECK(most > 0);
    CHECK(most <= f.degree() + 1);
  }
}

TEST_CASE("numeric mode removes roots of F that are preimages of alpha") {
  // +-i and 1 lie over 1 under squaring; -2 lies over the fixed point 2 of z^2 - 2.
  const RationalMap z2m1 = make({1, 0, -1}, {0, 0, 1});
  struct Case {
    const RationalMap* map;
    PolyQ f;
    ProjPoint alpha;
  };
  const std::vector<Case> cases{{&squaring, poly({1, 0, 1}), ProjPoint(Int(1), Int(1))},
                                {&squaring, poly({-1, 1, -1, 1}), ProjPoint(Int(1), Int(1))},
                                {&chebyshev, poly({2, 1}), ProjPoint(Int(2), Int(1))},
                                {&chebyshev, poly({-4, 0, 0, 1}), ProjPoint(Int(2), Int(1))},
                                {&z2m1, poly({1, 3, 1}), ProjPoint(Int(0), Int(1))}};
  for (const auto& c : cases) {
    CAPTURE(to_string(c.f));
    for (unsigned long k = 1; k <= 8; ++k) {
      CAPTURE(k);
      const auto e = preimage_average(*c.map, c.f, c.alpha, Place::infinity(), k, Mode::Exact);
      const auto n = preimage_average(*c.map, c.f, c.alpha, Place::infinity(), k, Mode::Numeric);
      CHECK(std::fabs(e.value.to_double() - n.value.to_double()) < 1e-9);
      CHECK(e.removed_degree == n.removed_degree);
      CHECK_FALSE(n.fell_back);
    }
  }
  // -1 reaches the 2-cycle of z^2 - 1 through the critical point 0, a double
  // root of S_k for odd k > 1, which needs the exact path.
  for (unsigned long k = 1; k <= 6; ++k) {
    const auto n = preimage_average(z2m1, poly({1, 1}), ProjPoint(Int(0), Int(1)), Place::infinity(), k, Mode::Numeric);
    CHECK(n.fell_back == (k % 2 == 1 && k > 1));
  }
  // Far beyond the cap the removed roots keep the average finite and near zero.
  const auto far = preimage_average(squaring, poly({1, 0, 1}), ProjPoint(Int(1), Int(1)), Place::infinity(), 30,
                                    Mode::Numeric);
  CHECK(far.removed_degree == 2);
  CHECK(std::fabs(far.value.to_double()) < 1e-6);
}
