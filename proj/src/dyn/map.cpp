#include "dyn/map.hpp"

#include <algorithm>

#include "exact/error.hpp"
#include "exact/valuation.hpp"

namespace canheight {

ProjPoint::ProjPoint(const Int& a, const Int& b) : a_(a), b_(b) {
  if (a_ == 0 && b_ == 0) fail(ErrorKind::Input, "the point [0:0] is not in P^1");
  Int g;
  mpz_gcd(g.get_mpz_t(), a_.get_mpz_t(), b_.get_mpz_t());
  a_ /= g;
  b_ /= g;
  if (b_ < 0 || (b_ == 0 && a_ < 0)) {
    a_ = -a_;
    b_ = -b_;
  }
}

Rat ProjPoint::value() const {
  if (is_infinity()) fail(ErrorKind::Input, "the point at infinity has no affine value");
  return Rat(a_, b_);
}

ProjPoint parse_point(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (s == "inf" || s == "infinity" || s == "oo") return ProjPoint::infinity();
  return ProjPoint::affine(parse_rational(s));
}

std::string to_string(const ProjPoint& x) {
  if (x.is_infinity()) return "inf";
  return to_string(x.value());
}

Rat form_resultant(const std::vector<Rat>& p, const std::vector<Rat>& q) {
  const std::size_t d = p.size() - 1;
  const std::size_t n = 2 * d;
  std::vector<std::vector<Rat>> m(n, std::vector<Rat>(n));
  for (std::size_t r = 0; r < d; ++r)
    for (std::size_t i = 0; i <= d; ++i) {
      m[r][r + i] = p[i];
      m[d + r][r + i] = q[i];
    }
  Rat det(1);
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && m[piv][c] == 0) ++piv;
    if (piv == n) return Rat(0);
    if (piv != c) {
      std::swap(m[piv], m[c]);
      det = -det;
    }
    det *= m[c][c];
    for (std::size_t r = c + 1; r < n; ++r) {
      if (m[r][c] == 0) continue;
      const Rat f = m[r][c] / m[c][c];
      for (std::size_t k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return det;
}

RationalMap RationalMap::create(std::vector<Rat> p, std::vector<Rat> q) {
  if (p.size() != q.size()) fail(ErrorKind::Input, "P and Q must have the same number of coefficients");
  if (p.size() < 3) fail(ErrorKind::Input, "degree must exceed 1");
  RationalMap m;
  m.d_ = static_cast<int>(p.size()) - 1;
  m.p_ = std::move(p);
  m.q_ = std::move(q);
  m.res_ = canheight::form_resultant(m.p_, m.q_);
  if (m.res_ == 0) fail(ErrorKind::DegenerateMap, "degenerate map");

  std::vector<Rat> joint = m.p_;
  joint.insert(joint.end(), m.q_.begin(), m.q_.end());
  ContentSplit cs = primitive_part(joint);
  m.kappa_ = cs.content;
  m.pi_.assign(cs.primitive.begin(), cs.primitive.begin() + m.d_ + 1);
  m.qi_.assign(cs.primitive.begin() + m.d_ + 1, cs.primitive.end());
  std::vector<Rat> pr(m.pi_.begin(), m.pi_.end()), qr(m.qi_.begin(), m.qi_.end());
  m.res_int_ = canheight::form_resultant(pr, qr).get_num();
  return m;
}

PolyQ RationalMap::p_affine() const { return PolyQ(std::vector<Rat>(p_.rbegin(), p_.rend())); }
PolyQ RationalMap::q_affine() const { return PolyQ(std::vector<Rat>(q_.rbegin(), q_.rend())); }

bool RationalMap::is_polynomial() const {
  return std::all_of(q_.begin(), q_.end() - 1, [](const Rat& c) { return c == 0; });
}

std::pair<Rat, Rat> RationalMap::apply(const Rat& x, const Rat& y) const {
  return {eval_form(p_, x, y), eval_form(q_, x, y)};
}

std::pair<Int, Int> RationalMap::apply_int(const Int& x, const Int& y) const {
  return {eval_form(pi_, x, y), eval_form(qi_, x, y)};
}

Json RationalMap::to_json() const {
  Json j;
  j["d"] = d_;
  Json p = Json::array(), q = Json::array();
  for (const Rat& c : p_) p.push_back(rat_to_json(c));
  for (const Rat& c : q_) q.push_back(rat_to_json(c));
  j["P"] = p;
  j["Q"] = q;
  return j;
}

RationalMap RationalMap::from_json(const Json& j) {
  if (!j.is_object() || !j.contains("P") || !j.contains("Q"))
    fail(ErrorKind::Input, "map JSON needs fields \"P\" and \"Q\"");
  const Json& jp = j.at("P");
  const Json& jq = j.at("Q");
  if (!jp.is_array() || !jq.is_array()) fail(ErrorKind::Input, "map coefficients must be arrays");
  std::vector<Rat> p, q;
  for (const auto& e : jp) p.push_back(rat_from_json(e));
  for (const auto& e : jq) q.push_back(rat_from_json(e));
  if (j.contains("d")) {
    if (!j.at("d").is_number_integer()) fail(ErrorKind::Input, "map degree must be an integer");
    const long d = j.at("d").get<long>();
    if (d < 2) fail(ErrorKind::Input, "degree must exceed 1");
    if (p.size() != static_cast<std::size_t>(d) + 1 || q.size() != static_cast<std::size_t>(d) + 1)
      fail(ErrorKind::Input, "map coefficient arrays must have d+1 entries");
  }
  return create(std::move(p), std::move(q));
}

std::vector<Int> bad_primes(const RationalMap& map) {
  return merge_primes(prime_support(Rat(map.int_resultant())), prime_support(map.kappa()));
}

}  // namespace canheight
