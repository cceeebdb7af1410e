#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "exact/poly.hpp"
#include "exact/serialize.hpp"

namespace canheight {

/// A point [a:b] of P^1(Q) with coprime integer coordinates, b >= 0, and
/// a > 0 when b = 0. Infinity is [1:0].
class ProjPoint {
 public:
  ProjPoint() : a_(1), b_(0) {}
  /// Normalizes (a, b); throws Error(Input) for (0, 0).
  ProjPoint(const Int& a, const Int& b);
  static ProjPoint infinity() { return ProjPoint(); }
  static ProjPoint affine(const Rat& x) { return ProjPoint(x.get_num(), x.get_den()); }

  const Int& a() const { return a_; }
  const Int& b() const { return b_; }
  bool is_infinity() const { return b_ == 0; }
  /// a/b; throws for infinity.
  Rat value() const;

  friend bool operator==(const ProjPoint&, const ProjPoint&) = default;
  friend bool operator<(const ProjPoint& x, const ProjPoint& y) {
    return x.b_ != y.b_ ? x.b_ < y.b_ : x.a_ < y.a_;
  }

 private:
  Int a_, b_;
};

/// "inf", "n" or "p/q".
ProjPoint parse_point(std::string_view text);
std::string to_string(const ProjPoint& x);

/// Construction limits. `poly_degree` bounds d^k for exact R_k / S_k;
/// `iteration_degree` bounds d^k for unreduced exact iteration.
struct Caps {
  unsigned long poly_degree = 4096;
  unsigned long iteration_degree = 1ul << 22;
};

/// phi = [P:Q] with P, Q binary forms of degree d >= 2 and no common zero.
/// Coefficients are stored in the order T0^d, T0^(d-1) T1, ..., T1^d.
///
/// Internally P = kappa * P', Q = kappa * Q' with P', Q' integer forms whose
/// coefficients are jointly coprime, so P_k = kappa^e_k * P'_k with
/// e_k = (d^k - 1)/(d - 1).
class RationalMap {
 public:
  static RationalMap create(std::vector<Rat> p, std::vector<Rat> q);

  int degree() const { return d_; }
  const std::vector<Rat>& p() const { return p_; }
  const std::vector<Rat>& q() const { return q_; }
  /// Binary-form resultant Res(P, Q), nonzero.
  const Rat& form_resultant() const { return res_; }

  const Rat& kappa() const { return kappa_; }
  const std::vector<Int>& p_int() const { return pi_; }
  const std::vector<Int>& q_int() const { return qi_; }
  const Int& int_resultant() const { return res_int_; }

  /// P(t, 1) and Q(t, 1).
  PolyQ p_affine() const;
  PolyQ q_affine() const;
  bool is_polynomial() const;

  /// (P(x, y), Q(x, y)) exactly.
  std::pair<Rat, Rat> apply(const Rat& x, const Rat& y) const;
  /// (P'(x, y), Q'(x, y)) on integers.
  std::pair<Int, Int> apply_int(const Int& x, const Int& y) const;

  Json to_json() const;
  static RationalMap from_json(const Json& j);

 private:
  int d_ = 0;
  std::vector<Rat> p_, q_;
  Rat res_, kappa_;
  std::vector<Int> pi_, qi_;
  Int res_int_;
};

/// Determinant of the 2d x 2d Sylvester matrix of two forms of degree d.
Rat form_resultant(const std::vector<Rat>& p, const std::vector<Rat>& q);

/// Evaluates a binary form (coefficients T0^d ... T1^d) at (x, y).
template <class T>
T eval_form(const std::vector<T>& c, const T& x, const T& y) {
  // Horner in x with powers of y accumulated alongside.
  T acc = c[0];
  T ypow = y;
  for (std::size_t i = 1; i < c.size(); ++i) {
    acc = acc * x + c[i] * ypow;
    if (i + 1 < c.size()) ypow *= y;
  }
  return acc;
}

std::vector<Int> bad_primes(const RationalMap& map);

}  // namespace canheight
