#pragma once

#include <vector>

#include "exact/rational.hpp"

namespace canheight {

/// Dense univariate polynomial over Q, coefficients in ascending degree.
/// Always trimmed: the leading coefficient is nonzero unless the polynomial
/// is zero, in which case the coefficient vector is empty and degree() is -1.
class PolyQ {
 public:
  PolyQ() = default;
  explicit PolyQ(std::vector<Rat> coeffs);
  PolyQ(std::initializer_list<long> small);

  static PolyQ constant(const Rat& c);
  static PolyQ monomial(const Rat& c, int degree);
  /// t - r
  static PolyQ linear_root(const Rat& r);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rat>& coeffs() const { return c_; }
  /// Coefficient of t^i; zero outside the stored range.
  Rat coeff(int i) const;
  const Rat& leading() const;

  Rat eval(const Rat& x) const;
  PolyQ derivative() const;
  PolyQ monic() const;
  /// Lowest i with a nonzero coefficient (the order of vanishing at 0).
  int low_order() const;

  PolyQ& operator+=(const PolyQ& o);
  PolyQ& operator-=(const PolyQ& o);
  PolyQ& operator*=(const PolyQ& o);
  PolyQ& operator*=(const Rat& s);

  friend PolyQ operator+(PolyQ a, const PolyQ& b) { return a += b; }
  friend PolyQ operator-(PolyQ a, const PolyQ& b) { return a -= b; }
  friend PolyQ operator*(const PolyQ& a, const PolyQ& b);
  friend PolyQ operator*(PolyQ a, const Rat& s) { return a *= s; }
  friend PolyQ operator*(const Rat& s, PolyQ a) { return a *= s; }
  friend PolyQ operator-(const PolyQ& a);
  friend bool operator==(const PolyQ& a, const PolyQ& b) { return a.c_ == b.c_; }

 private:
  void trim();
  std::vector<Rat> c_;
};

struct DivRem {
  PolyQ quotient;
  PolyQ remainder;
};

/// Exact Euclidean division. Throws Error(Input, "zero divisor") when b = 0.
DivRem divrem(const PolyQ& a, const PolyQ& b);

/// Monic gcd. Throws when both inputs are zero.
PolyQ gcd(const PolyQ& a, const PolyQ& b);

/// Pseudo-remainder lc(b)^(deg a - deg b + 1) * a mod b.
PolyQ pseudo_remainder(const PolyQ& a, const PolyQ& b);

/// Classical resultant via the subresultant pseudo-remainder sequence.
/// Res(a, c) = c^deg(a) for a nonzero constant c. Throws on zero input.
Rat resultant(const PolyQ& a, const PolyQ& b);

struct Stripped {
  PolyQ cofactor;
  int removed_degree = 0;
};
/// Removes from `a` every root it shares with `f` (with full multiplicity),
/// by repeated exact division by gcd(a, f).
Stripped strip_common_roots(const PolyQ& a, const PolyQ& f);

/// Square-free factorization: a = lc * prod_i part_i^multiplicity_i with each
/// part monic, square-free and pairwise coprime.
struct SquareFreePart {
  PolyQ part;
  int multiplicity;
};
std::vector<SquareFreePart> square_free_decomposition(const PolyQ& a);

/// Integer content helpers: a = content * primitive with primitive having
/// coprime integer coefficients and positive leading coefficient.
struct ContentSplit {
  Rat content;
  std::vector<Int> primitive;
};
ContentSplit primitive_part(const std::vector<Rat>& coeffs);

/// Product of integer polynomials (ascending coefficients) by Kronecker
/// substitution onto a single GMP multiplication.
std::vector<Int> multiply(const std::vector<Int>& a, const std::vector<Int>& b);

std::string to_string(const PolyQ& p);

}  // namespace canheight
