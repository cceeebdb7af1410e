#pragma once

#include <mpfr.h>

#include <string>

#include "exact/rational.hpp"

namespace canheight {

/// Working precision for archimedean evaluation. The default matches the CLI.
struct RealCtx {
  mpfr_prec_t bits = 256;

  RealCtx doubled() const { return RealCtx{bits * 2}; }
};

/// Owning MPFR float. Binary operations round to the larger of the operand
/// precisions; there is no global default precision.
class Real {
 public:
  explicit Real(mpfr_prec_t bits = 256);
  Real(double x, mpfr_prec_t bits);
  Real(const Int& z, mpfr_prec_t bits);
  Real(const Rat& q, mpfr_prec_t bits);
  Real(const Real& other);
  Real(Real&& other) noexcept;
  Real& operator=(const Real& other);
  Real& operator=(Real&& other) noexcept;
  ~Real();

  mpfr_prec_t bits() const { return mpfr_get_prec(v_); }
  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  /// Scientific notation with `digits` significant digits, e.g. "6.9314718e-1".
  std::string to_string(int digits) const;

  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);
  friend Real operator-(const Real& a);
  friend bool operator<(const Real& a, const Real& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const Real& a, const Real& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const Real& a, const Real& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const Real& a, const Real& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }

 private:
  mpfr_t v_;
};

Real abs(const Real& x);
Real sqrt(const Real& x);
Real log(const Real& x);
Real exp(const Real& x);
Real sin(const Real& x);
Real cos(const Real& x);
Real hypot(const Real& a, const Real& b);
Real max(const Real& a, const Real& b);
Real pi(mpfr_prec_t bits);
Real log2_const(mpfr_prec_t bits);
/// x * 2^e without rounding error.
Real ldexp(const Real& x, long e);
/// log |z| for a nonzero big integer or rational, computed without forming a
/// huge intermediate float.
Real log_abs(const Int& z, mpfr_prec_t bits);
Real log_abs(const Rat& q, mpfr_prec_t bits);

/// Complex number over two Reals; just enough arithmetic for polynomial
/// evaluation, root finding and the scaled iteration.
struct Complex {
  Real re;
  Real im;

  explicit Complex(mpfr_prec_t bits = 256) : re(bits), im(bits) {}
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}
  Complex(const Rat& q, mpfr_prec_t bits) : re(q, bits), im(bits) {}

  mpfr_prec_t bits() const { return re.bits(); }

  Complex& operator+=(const Complex& o);
  Complex& operator-=(const Complex& o);
  Complex& operator*=(const Complex& o);
  Complex& operator/=(const Complex& o);
  Complex& operator*=(const Real& s);
  Complex& operator/=(const Real& s);
};

Complex operator+(Complex a, const Complex& b);
Complex operator-(Complex a, const Complex& b);
Complex operator*(Complex a, const Complex& b);
Complex operator/(Complex a, const Complex& b);
Complex operator*(Complex a, const Real& s);
Complex operator-(const Complex& a);
Real abs(const Complex& z);
Real log_abs(const Complex& z);

}  // namespace canheight
