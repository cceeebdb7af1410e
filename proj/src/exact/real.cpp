#include "exact/real.hpp"

#include <algorithm>
#include <cstdio>
#include <utility>
#include <vector>

namespace canheight {

Real::Real(mpfr_prec_t bits) {
  mpfr_init2(v_, bits);
  mpfr_set_zero(v_, 1);
}

Real::Real(double x, mpfr_prec_t bits) {
  mpfr_init2(v_, bits);
  mpfr_set_d(v_, x, MPFR_RNDN);
}

Real::Real(const Int& z, mpfr_prec_t bits) {
  mpfr_init2(v_, bits);
  mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN);
}

Real::Real(const Rat& q, mpfr_prec_t bits) {
  mpfr_init2(v_, bits);
  mpfr_set_q(v_, q.get_mpq_t(), MPFR_RNDN);
}

Real::Real(const Real& other) {
  mpfr_init2(v_, other.bits());
  mpfr_set(v_, other.v_, MPFR_RNDN);
}

Real::Real(Real&& other) noexcept {
  mpfr_init2(v_, MPFR_PREC_MIN);
  mpfr_swap(v_, other.v_);
}

Real& Real::operator=(const Real& other) {
  if (this != &other) {
    mpfr_set_prec(v_, other.bits());
    mpfr_set(v_, other.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& other) noexcept {
  mpfr_swap(v_, other.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

std::string Real::to_string(int digits) const {
  if (mpfr_nan_p(v_)) return "nan";
  if (mpfr_inf_p(v_)) return mpfr_sgn(v_) > 0 ? "inf" : "-inf";
  std::vector<char> buf(static_cast<std::size_t>(digits) + 64);
  mpfr_snprintf(buf.data(), buf.size(), "%.*Re", std::max(digits - 1, 0), v_);
  return std::string(buf.data());
}

namespace {

mpfr_prec_t wider(const Real& a, const Real& b) { return std::max(a.bits(), b.bits()); }

template <class Op>
Real binary(const Real& a, const Real& b, Op op) {
  Real r(wider(a, b));
  op(r.get(), a.get(), b.get(), MPFR_RNDN);
  return r;
}

template <class Op>
Real unary(const Real& a, Op op) {
  Real r(a.bits());
  op(r.get(), a.get(), MPFR_RNDN);
  return r;
}

}  // namespace

Real& Real::operator+=(const Real& o) { return *this = *this + o; }
Real& Real::operator-=(const Real& o) { return *this = *this - o; }
Real& Real::operator*=(const Real& o) { return *this = *this * o; }
Real& Real::operator/=(const Real& o) { return *this = *this / o; }

Real operator+(const Real& a, const Real& b) { return binary(a, b, mpfr_add); }
Real operator-(const Real& a, const Real& b) { return binary(a, b, mpfr_sub); }
Real operator*(const Real& a, const Real& b) { return binary(a, b, mpfr_mul); }
Real operator/(const Real& a, const Real& b) { return binary(a, b, mpfr_div); }
Real operator-(const Real& a) { return unary(a, mpfr_neg); }

Real abs(const Real& x) { return unary(x, mpfr_abs); }
Real sqrt(const Real& x) { return unary(x, mpfr_sqrt); }
Real log(const Real& x) { return unary(x, mpfr_log); }
Real exp(const Real& x) { return unary(x, mpfr_exp); }
Real sin(const Real& x) { return unary(x, mpfr_sin); }
Real cos(const Real& x) { return unary(x, mpfr_cos); }
Real hypot(const Real& a, const Real& b) { return binary(a, b, mpfr_hypot); }
Real max(const Real& a, const Real& b) { return a < b ? b : a; }

Real pi(mpfr_prec_t bits) {
  Real r(bits);
  mpfr_const_pi(r.get(), MPFR_RNDN);
  return r;
}

Real log2_const(mpfr_prec_t bits) {
  Real r(bits);
  mpfr_const_log2(r.get(), MPFR_RNDN);
  return r;
}

Real ldexp(const Real& x, long e) {
  Real r(x.bits());
  mpfr_mul_2si(r.get(), x.get(), e, MPFR_RNDN);
  return r;
}

Real log_abs(const Int& z, mpfr_prec_t bits) {
  // log|z| = log(m) + e*log 2 with z = m * 2^e and m in [1/2, 1).
  Real r(bits + 32);
  mpfr_set_z_2exp(r.get(), z.get_mpz_t(), 0, MPFR_RNDN);
  mpfr_abs(r.get(), r.get(), MPFR_RNDN);
  const long e = static_cast<long>(mpz_sizeinbase(z.get_mpz_t(), 2));
  mpfr_div_2si(r.get(), r.get(), e, MPFR_RNDN);
  Real out = log(r) + Real(e, bits + 32) * log2_const(bits + 32);
  Real rounded(bits);
  mpfr_set(rounded.get(), out.get(), MPFR_RNDN);
  return rounded;
}

Real log_abs(const Rat& q, mpfr_prec_t bits) {
  return log_abs(q.get_num(), bits) - log_abs(q.get_den(), bits);
}

Complex& Complex::operator+=(const Complex& o) {
  re += o.re;
  im += o.im;
  return *this;
}

Complex& Complex::operator-=(const Complex& o) {
  re -= o.re;
  im -= o.im;
  return *this;
}

Complex& Complex::operator*=(const Complex& o) {
  Real r = re * o.re - im * o.im;
  Real i = re * o.im + im * o.re;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

Complex& Complex::operator/=(const Complex& o) {
  const Real den = o.re * o.re + o.im * o.im;
  Real r = (re * o.re + im * o.im) / den;
  Real i = (im * o.re - re * o.im) / den;
  re = std::move(r);
  im = std::move(i);
  return *this;
}

Complex& Complex::operator*=(const Real& s) {
  re *= s;
  im *= s;
  return *this;
}

Complex& Complex::operator/=(const Real& s) {
  re /= s;
  im /= s;
  return *this;
}

Complex operator+(Complex a, const Complex& b) { return a += b; }
Complex operator-(Complex a, const Complex& b) { return a -= b; }
Complex operator*(Complex a, const Complex& b) { return a *= b; }
Complex operator/(Complex a, const Complex& b) { return a /= b; }
Complex operator*(Complex a, const Real& s) { return a *= s; }
Complex operator-(const Complex& a) { return Complex(-a.re, -a.im); }

Real abs(const Complex& z) { return hypot(z.re, z.im); }
Real log_abs(const Complex& z) { return log(abs(z)); }

}  // namespace canheight
