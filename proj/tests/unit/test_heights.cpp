#include <doctest.h>

#include <cmath>
#include <random>

#include "dyn/iterate.hpp"
#include "exact/error.hpp"
#include "heights/global.hpp"

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

const RationalMap squaring = make({1, 0, 0}, {0, 0, 1});
const RationalMap z2p1 = make({1, 0, 1}, {0, 0, 1});
const RationalMap half_square = make({1, 0, 0}, {0, 0, 2});
const RationalMap joukowski = make({1, 0, 1}, {0, 1, 0});
const RationalMap lattes_like = make({1, 0, -2}, {0, 4, 0});

ProjPoint pt(long a, long b = 1) { return ProjPoint(Int(a), Int(b)); }
Place prime(long p) { return Place::prime(Int(p)); }

double ln(double x) { return std::log(x); }

}  // namespace

TEST_CASE("places") {
  CHECK(parse_place("inf").is_infinity());
  CHECK(parse_place("7") == prime(7));
  CHECK_THROWS_AS(parse_place("6"), Error);
  CHECK_THROWS_AS(parse_place("1"), Error);
  CHECK_THROWS_AS(parse_place("x"), Error);
}

TEST_CASE("Weil height") {
  CHECK(weil_height(pt(2, 3)).to_double() == doctest::Approx(ln(3)).epsilon(1e-15));
  CHECK(weil_height(ProjPoint::infinity()).is_zero());
  CHECK(weil_height(pt(7)).to_double() == doctest::Approx(ln(7)).epsilon(1e-15));
}

TEST_CASE("local canonical heights") {
  auto h = local_canonical_height(squaring, pt(2), Place::infinity());
  CHECK(std::fabs(h.value.to_double() - ln(2)) < 1e-12);
  CHECK_FALSE(h.approximate);

  h = local_canonical_height(squaring, pt(2), prime(2));
  CHECK(h.log_p_coeff == 0);
  CHECK_FALSE(h.approximate);

  h = local_canonical_height(half_square, pt(2), prime(2));
  CHECK(h.log_p_coeff == -1);
  CHECK_FALSE(h.approximate);

  CHECK(local_height_infinity_point(squaring, Place::infinity()).value.to_double() == doctest::Approx(0).epsilon(1e-12));
  CHECK(local_height_infinity_point(half_square, prime(2)).log_p_coeff == 0);
  // For z^2/2 at infinity, hat-h(x) = max(log|x|, log 2) - log 2 + ... ; at x = 2 the point is fixed.
  h = local_canonical_height(half_square, pt(2), Place::infinity());
  CHECK(std::fabs(h.value.to_double() - ln(2)) < 1e-12);
}

TEST_CASE("archimedean local height matches the unnormalized limit") {
  // L_k / d^k from exact rationals, with tail at most C / (d^k (d-1)).
  for (const RationalMap* m : {&joukowski, &lattes_like, &z2p1}) {
    for (const ProjPoint& x : {pt(3, 7), pt(-5, 2), ProjPoint::infinity()}) {
      const Rat a = x.is_infinity() ? Rat(1) : x.value();
      const Rat b = x.is_infinity() ? Rat(0) : Rat(1);
      auto [pk, qk] = iterate_raw(*m, a, b, 18);
      const Rat big = abs(pk) > abs(qk) ? Rat(abs(pk)) : Rat(abs(qk));
      const double direct = log_abs(big, 128).to_double() / std::pow(2.0, 18);
      const auto h = local_canonical_height(*m, x, Place::infinity());
      CHECK(std::fabs(h.value.to_double() - direct) < 2e-5);
    }
  }
}

TEST_CASE("max norm and Fubini-Study agree") {
  HeightOptions fs;
  fs.norm = Norm::FubiniStudy;
  for (const RationalMap* m : {&joukowski, &lattes_like, &z2p1, &half_square}) {
    for (const ProjPoint& x : {pt(3, 7), pt(-5, 2), pt(0), ProjPoint::infinity()}) {
      const auto a = local_canonical_height(*m, x, Place::infinity());
      const auto b = local_canonical_height(*m, x, Place::infinity(), fs);
      CHECK(std::fabs(a.value.to_double() - b.value.to_double()) < 1e-9);
    }
  }
}

TEST_CASE("global canonical heights") {
  auto r = canonical_height(squaring, pt(2, 3));
  CHECK(std::fabs(r.value.to_double() - ln(3)) < 1e-12);

  r = canonical_height(half_square, pt(2));
  CHECK(std::fabs(r.value.to_double()) < 1e-9);
  REQUIRE(r.per_place.size() == 2);
  CHECK(r.per_place[1].place == prime(2));
  CHECK(r.per_place[1].log_p_coeff == -1);

  // Oracle: a_{k+1} = a_k^2 + 1 from 2, log(a_k) / 2^k at k = 20.
  Int a(2);
  for (int k = 0; k < 20; ++k) a = a * a + 1;
  const double oracle = log_abs(a, 256).to_double() / std::pow(2.0, 20);
  r = canonical_height(z2p1, pt(2));
  CHECK(std::fabs(r.value.to_double() - oracle) < 1e-12);
  CHECK(std::fabs(r.value.to_double() - 0.81471) < 1e-5);
  REQUIRE(r.direct.has_value());
  CHECK(std::fabs(r.direct->value.to_double() - r.value.to_double()) < 1e-9);
}

TEST_CASE("per-place sum matches direct iteration when the budget allows k >= 12") {
  for (const RationalMap* m : {&z2p1, &squaring, &half_square}) {
    for (const ProjPoint& x : {pt(3, 2), pt(5), pt(-7, 3)}) {
      HeightOptions opt;
      opt.direct_cap = 1ul << 22;
      const auto r = canonical_height(*m, x, opt);
      REQUIRE(r.direct.has_value());
      CHECK(r.direct->k >= 12);
      CHECK(std::fabs(r.direct->value.to_double() - r.value.to_double()) < 1e-6);
    }
  }
}

TEST_CASE("functional equation of the global height") {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<long> c(-5, 5);
  int tested = 0;
  while (tested < 12) {
    std::vector<Rat> p(3), q(3);
    for (auto& x : p) x = c(rng);
    for (auto& x : q) x = c(rng);
    if (form_resultant(p, q) == 0) continue;
    const auto m = RationalMap::create(p, q);
    const ProjPoint x(Int(c(rng)), Int(std::abs(c(rng)) + 1));
    HeightOptions opt;
    opt.tol = 1e-10;
    const auto hx = canonical_height(m, x, opt);
    const auto hy = canonical_height(m, iterate_exact(m, x, 1), opt);
    const double slack = 2 * opt.tol + hy.error_estimate.to_double() + 2 * hx.error_estimate.to_double();
    CHECK(std::fabs(hy.value.to_double() - 2 * hx.value.to_double()) <= slack + 1e-12);
    CHECK(hx.value.to_double() >= -1e-9);
    ++tested;
  }
}

TEST_CASE("canonical height stays within a bounded distance of the Weil height") {
  std::mt19937_64 rng(37);
  std::uniform_int_distribution<long> c(-1000, 1000);
  for (const RationalMap* m : {&z2p1, &joukowski}) {
    // |log max(|P(x,y)|,|Q(x,y)|) - 2 log max(|x|,|y|)| <= log 3 for both maps at
    // every place, so the gap is at most log 3 / (d - 1) at infinity and 0 elsewhere.
    for (int i = 0; i < 25; ++i) {
      const ProjPoint x(Int(c(rng)), Int(std::abs(c(rng)) + 1));
      const auto r = canonical_height(*m, x);
      CHECK(std::fabs(r.value.to_double() - weil_height(x).to_double()) <= ln(3) + 1e-9);
    }
  }
}

TEST_CASE("good reduction gives exact zero at unit points") {
  const Int primes[] = {3, 5, 7, 11, 13};
  const long units[] = {1, 2, 4, 6, 9};
  for (const Int& p : primes) {
    for (long u : units) {
      if (u % p.get_si() == 0) continue;
      for (const RationalMap* m : {&z2p1, &squaring, &joukowski}) {
        const auto h = finite_local_height(*m, pt(u), p, HeightOptions{});
        CHECK(h.log_p_coeff == 0);
        CHECK_FALSE(h.approximate);
      }
    }
  }
}

TEST_CASE("finite local height equals the sum of its valuation series") {
  // Oracle: -(1/d^k) min(v_p(P_k), v_p(Q_k)) from exact unreduced iteration.
  const auto m = RationalMap::create(coeffs({1, 0, 3}), coeffs({0, 3, 9}));
  for (const ProjPoint& x : {pt(1), pt(2), pt(5, 3), pt(7, 9)}) {
    const Int p(3);
    const auto h = finite_local_height(m, x, p, HeightOptions{});
    auto [pk, qk] = iterate_raw(m, x.value(), 1, 12);
    const long v = std::min(pk == 0 ? 1000000 : val_p(pk, p), qk == 0 ? 1000000 : val_p(qk, p));
    const double oracle = -v / std::pow(2.0, 12);
    CHECK(std::fabs(h.log_p_coeff.get_d() - oracle) <= 2.0 / 4096 + 1e-12);
  }
}

TEST_CASE("functional equation residuals") {
  auto r = functional_eq_residual(squaring, pt(2), Place::infinity());
  CHECK(r.value.to_double() < 1e-12);
  r = functional_eq_residual(half_square, pt(3), prime(2));
  CHECK(r.log_p_coeff == 0);
  r = functional_eq_residual(z2p1, pt(2), Place::infinity());
  CHECK(r.value.to_double() < 1e-9);
  CHECK_THROWS_WITH(functional_eq_residual(joukowski, pt(0), Place::infinity()), "pole of the dehomogenized Q");
}

TEST_CASE("functional equation grid") {
  const RationalMap maps[] = {squaring, z2p1, half_square, joukowski, lattes_like};
  const ProjPoint pts[] = {pt(2), pt(-3, 2), pt(5, 4), pt(7), pt(1, 6)};
  for (const auto& m : maps)
    for (const auto& x : pts) {
      for (const Place& v : {Place::infinity(), prime(2), prime(3)}) {
        const auto r = functional_eq_residual(m, x, v);
        if (v.is_infinity())
          CHECK(r.value.to_double() < 1e-9);
        else if (!r.approximate)
          CHECK(r.log_p_coeff == 0);
        else
          CHECK(r.value.to_double() <= r.error.to_double() + 1e-15);
      }
    }
}

TEST_CASE("algebraic points") {
  const PolyQ golden{-1, -1, 1};
  auto r = canonical_height_algebraic(squaring, golden);
  const double phi = (1 + std::sqrt(5.0)) / 2;
  // Jensen: sum over conjugates of log max(|beta|, 1), divided by deg F.
  CHECK(std::fabs(r.value.to_double() - ln(phi) / 2) < 1e-12);

  r = canonical_height_algebraic(squaring, PolyQ{-2, 1});
  CHECK(std::fabs(r.value.to_double() - ln(2)) < 1e-12);

  r = canonical_height_algebraic(squaring, PolyQ{1, 0, 1});
  CHECK(std::fabs(r.value.to_double()) < 1e-12);

  // Non-monic: roots of 3t^2 - 2 have 3-adic absolute value sqrt(3).
  r = canonical_height_algebraic(squaring, PolyQ{-2, 0, 3});
  CHECK(std::fabs(r.value.to_double() - ln(3) / 2) < 1e-12);

  CHECK_THROWS_WITH(canonical_height_algebraic(squaring, PolyQ{1, 2, 1}), "repeated roots");
}

TEST_CASE("norm path agrees with rational local heights") {
  const auto m = RationalMap::create(coeffs({1, 0, 3}), coeffs({0, 3, 9}));
  HeightOptions opt;
  opt.tol = 1e-4;
  const PolyQ f = PolyQ{-2, 1} * PolyQ{-5, 3};
  const auto s = finite_conjugate_sum(m, f, Int(3), opt);
  const auto a = finite_local_height(m, pt(2), Int(3), opt);
  const auto b = finite_local_height(m, pt(5, 3), Int(3), opt);
  const double expect = a.value.to_double() + b.value.to_double();
  CHECK(std::fabs(s.value.to_double() - expect) <= s.error.to_double() + a.error.to_double() + b.error.to_double() + 1e-12);

  const auto lin = finite_conjugate_sum(half_square, PolyQ{-3, 1}, Int(2), opt);
  const auto direct = finite_local_height(half_square, pt(3), Int(2), opt);
  CHECK(std::fabs(lin.value.to_double() - direct.value.to_double()) <= lin.error.to_double() + 1e-12);
}
