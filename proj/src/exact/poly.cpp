#include "exact/poly.hpp"

#include <algorithm>
#include <sstream>
#include <utility>

#include "exact/error.hpp"

namespace canheight {

PolyQ::PolyQ(std::vector<Rat> coeffs) : c_(std::move(coeffs)) { trim(); }

PolyQ::PolyQ(std::initializer_list<long> small) {
  c_.reserve(small.size());
  for (long v : small) c_.emplace_back(v);
  trim();
}

PolyQ PolyQ::constant(const Rat& c) { return PolyQ(std::vector<Rat>{c}); }

PolyQ PolyQ::monomial(const Rat& c, int degree) {
  std::vector<Rat> v(static_cast<std::size_t>(degree) + 1);
  v.back() = c;
  return PolyQ(std::move(v));
}

PolyQ PolyQ::linear_root(const Rat& r) { return PolyQ(std::vector<Rat>{-r, Rat(1)}); }

void PolyQ::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rat PolyQ::coeff(int i) const {
  if (i < 0 || i > degree()) return Rat(0);
  return c_[static_cast<std::size_t>(i)];
}

const Rat& PolyQ::leading() const {
  if (c_.empty()) fail(ErrorKind::Computation, "leading coefficient of the zero polynomial");
  return c_.back();
}

Rat PolyQ::eval(const Rat& x) const {
  Rat acc(0);
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + *it;
  return acc;
}

PolyQ PolyQ::derivative() const {
  if (c_.size() <= 1) return PolyQ();
  std::vector<Rat> d(c_.size() - 1);
  for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
  return PolyQ(std::move(d));
}

PolyQ PolyQ::monic() const {
  if (is_zero()) return *this;
  PolyQ r = *this;
  const Rat lc = leading();
  for (auto& c : r.c_) c /= lc;
  return r;
}

int PolyQ::low_order() const {
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (c_[i] != 0) return static_cast<int>(i);
  return -1;
}

PolyQ& PolyQ::operator+=(const PolyQ& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
  trim();
  return *this;
}

PolyQ& PolyQ::operator-=(const PolyQ& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size());
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
  trim();
  return *this;
}

PolyQ& PolyQ::operator*=(const PolyQ& o) { return *this = *this * o; }

PolyQ& PolyQ::operator*=(const Rat& s) {
  if (s == 0) {
    c_.clear();
    return *this;
  }
  for (auto& c : c_) c *= s;
  return *this;
}

PolyQ operator-(const PolyQ& a) { return a * Rat(-1); }

ContentSplit primitive_part(const std::vector<Rat>& coeffs) {
  ContentSplit out;
  Int lcm_den(1);
  for (const auto& c : coeffs) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), c.get_den_mpz_t());
  Int g(0);
  out.primitive.reserve(coeffs.size());
  for (const auto& c : coeffs) {
    Int v = c.get_num() * (lcm_den / c.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    out.primitive.push_back(std::move(v));
  }
  if (g == 0) {
    out.content = 0;
    return out;
  }
  // Leading coefficient is the last nonzero entry; make it positive.
  auto last = std::find_if(out.primitive.rbegin(), out.primitive.rend(), [](const Int& v) { return v != 0; });
  if (*last < 0) g = -g;
  for (auto& v : out.primitive) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
  out.content = Rat(g, lcm_den);
  out.content.canonicalize();
  return out;
}

namespace {

std::size_t max_bits(const std::vector<Int>& v) {
  std::size_t m = 1;
  for (const auto& x : v) m = std::max(m, mpz_sizeinbase(x.get_mpz_t(), 2));
  return m;
}

Int pack(const std::vector<Int>& v, mp_bitcnt_t slot) {
  Int acc(0);
  for (auto it = v.rbegin(); it != v.rend(); ++it) {
    mpz_mul_2exp(acc.get_mpz_t(), acc.get_mpz_t(), slot);
    acc += *it;
  }
  return acc;
}

// Splits a packed signed value into `count` slots. Every true slot value
// satisfies |c| < 2^(slot-2), which makes the balanced split exact.
void unpack(const Int& packed, mp_bitcnt_t slot, std::size_t first, std::size_t count, std::vector<Int>& out) {
  if (count == 1) {
    out[first] = packed;
    return;
  }
  const std::size_t lo_count = count / 2;
  const mp_bitcnt_t lo_bits = slot * lo_count;
  Int lo, hi;
  mpz_fdiv_r_2exp(lo.get_mpz_t(), packed.get_mpz_t(), lo_bits);
  mpz_fdiv_q_2exp(hi.get_mpz_t(), packed.get_mpz_t(), lo_bits);
  if (mpz_sizeinbase(lo.get_mpz_t(), 2) >= lo_bits && lo != 0) {
    Int full(1);
    mpz_mul_2exp(full.get_mpz_t(), full.get_mpz_t(), lo_bits);
    lo -= full;
    hi += 1;
  }
  unpack(lo, slot, first, lo_count, out);
  unpack(hi, slot, first + lo_count, count - lo_count, out);
}

std::vector<Int> schoolbook(const std::vector<Int>& a, const std::vector<Int>& b) {
  std::vector<Int> r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) mpz_addmul(r[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
  }
  return r;
}

}  // namespace

std::vector<Int> multiply(const std::vector<Int>& a, const std::vector<Int>& b) {
  if (a.empty() || b.empty()) return {};
  if (std::min(a.size(), b.size()) <= 8) return schoolbook(a, b);
  const std::size_t n = a.size() + b.size() - 1;
  std::size_t len_bits = 1;
  while ((std::size_t{1} << len_bits) < std::min(a.size(), b.size())) ++len_bits;
  const mp_bitcnt_t slot = max_bits(a) + max_bits(b) + len_bits + 3;
  const Int product = pack(a, slot) * pack(b, slot);
  std::vector<Int> out(n);
  unpack(product, slot, 0, n, out);
  return out;
}

PolyQ operator*(const PolyQ& a, const PolyQ& b) {
  if (a.is_zero() || b.is_zero()) return PolyQ();
  ContentSplit ca = primitive_part(a.coeffs());
  ContentSplit cb = primitive_part(b.coeffs());
  std::vector<Int> prod = multiply(ca.primitive, cb.primitive);
  const Rat scale = ca.content * cb.content;
  std::vector<Rat> out;
  out.reserve(prod.size());
  for (auto& v : prod) {
    Rat q(v);
    q *= scale;
    out.push_back(std::move(q));
  }
  return PolyQ(std::move(out));
}

DivRem divrem(const PolyQ& a, const PolyQ& b) {
  if (b.is_zero()) fail(ErrorKind::Input, "zero divisor");
  if (a.degree() < b.degree()) return {PolyQ(), a};
  std::vector<Rat> rem = a.coeffs();
  const int db = b.degree();
  const Rat inv_lc = 1 / b.leading();
  std::vector<Rat> quot(static_cast<std::size_t>(a.degree() - db) + 1);
  for (int i = a.degree() - db; i >= 0; --i) {
    const Rat& top = rem[static_cast<std::size_t>(i + db)];
    if (top == 0) continue;
    Rat q = top * inv_lc;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(i + j)] -= q * b.coeffs()[static_cast<std::size_t>(j)];
    quot[static_cast<std::size_t>(i)] = std::move(q);
  }
  rem.resize(static_cast<std::size_t>(db));
  return {PolyQ(std::move(quot)), PolyQ(std::move(rem))};
}

PolyQ gcd(const PolyQ& a, const PolyQ& b) {
  if (a.is_zero() && b.is_zero()) fail(ErrorKind::Input, "gcd of two zero polynomials");
  PolyQ x = a.monic();
  PolyQ y = b.monic();
  if (x.degree() < y.degree()) std::swap(x, y);
  while (!y.is_zero()) {
    PolyQ r = divrem(x, y).remainder.monic();
    x = std::move(y);
    y = std::move(r);
  }
  return x;
}

PolyQ pseudo_remainder(const PolyQ& a, const PolyQ& b) {
  if (b.is_zero()) fail(ErrorKind::Input, "zero divisor");
  if (a.degree() < b.degree()) return a;
  const unsigned long e = static_cast<unsigned long>(a.degree() - b.degree() + 1);
  return divrem(a * pow(b.leading(), e), b).remainder;
}

Rat resultant(const PolyQ& a_in, const PolyQ& b_in) {
  if (a_in.is_zero() || b_in.is_zero()) fail(ErrorKind::Input, "resultant of a zero polynomial");
  PolyQ a = a_in;
  PolyQ b = b_in;
  if (b.degree() == 0) return pow(b.leading(), static_cast<unsigned long>(a.degree()));
  if (a.degree() == 0) return pow(a.leading(), static_cast<unsigned long>(b.degree()));

  // One exact Euclidean step first: Res(a, b) = (-1)^(deg a deg b) lc(b)^(deg a - deg r) Res(b, r)
  // with r = a mod b. This keeps the pseudo-remainder sequence small when
  // one input is much longer than the other.
  if (a.degree() < b.degree()) {
    const int sgn = (a.degree() % 2 == 1 && b.degree() % 2 == 1) ? -1 : 1;
    return Rat(sgn) * resultant(b, a);
  }
  if (a.degree() > b.degree() + 1) {
    const PolyQ r = divrem(a, b).remainder;
    if (r.is_zero()) return Rat(0);
    const int sgn = (a.degree() % 2 == 1 && b.degree() % 2 == 1) ? -1 : 1;
    return Rat(sgn) * pow(b.leading(), static_cast<unsigned long>(a.degree() - r.degree())) * resultant(b, r);
  }

  int s = 1;
  if (a.degree() < b.degree()) {
    std::swap(a, b);
    if (a.degree() % 2 == 1 && b.degree() % 2 == 1) s = -s;
  }
  const ContentSplit ca = primitive_part(a.coeffs());
  const ContentSplit cb = primitive_part(b.coeffs());
  const Rat t = pow(ca.content, static_cast<unsigned long>(b.degree())) *
                pow(cb.content, static_cast<unsigned long>(a.degree()));
  a = a * (1 / ca.content);
  b = b * (1 / cb.content);

  Rat g(1), h(1);
  while (true) {
    const int delta = a.degree() - b.degree();
    if (a.degree() % 2 == 1 && b.degree() % 2 == 1) s = -s;
    PolyQ r = pseudo_remainder(a, b);
    a = std::move(b);
    if (r.is_zero()) return Rat(0);
    b = r * (1 / (g * pow(h, static_cast<unsigned long>(delta))));
    g = a.leading();
    if (delta >= 1) h = pow(g, static_cast<unsigned long>(delta)) / pow(h, static_cast<unsigned long>(delta - 1));
    if (b.degree() == 0) {
      const unsigned long da = static_cast<unsigned long>(a.degree());
      h = pow(b.leading(), da) / pow(h, da - 1);
      return Rat(s) * t * h;
    }
  }
}

Stripped strip_common_roots(const PolyQ& a, const PolyQ& f) {
  if (a.is_zero()) fail(ErrorKind::Input, "cannot strip roots from the zero polynomial");
  Stripped out{a, 0};
  if (f.is_zero() || f.degree() == 0) return out;
  while (true) {
    PolyQ g = gcd(out.cofactor, f);
    if (g.degree() < 1) break;
    DivRem qr = divrem(out.cofactor, g);
    out.cofactor = std::move(qr.quotient);
    out.removed_degree += g.degree();
  }
  return out;
}

std::vector<SquareFreePart> square_free_decomposition(const PolyQ& a_in) {
  if (a_in.is_zero()) fail(ErrorKind::Input, "square-free decomposition of zero");
  std::vector<SquareFreePart> out;
  if (a_in.degree() == 0) return out;
  const PolyQ a = a_in.monic();
  PolyQ c = gcd(a, a.derivative());
  PolyQ w = divrem(a, c).quotient;
  int i = 1;
  while (c.degree() > 0) {
    PolyQ y = gcd(w, c);
    PolyQ z = divrem(w, y).quotient;
    if (z.degree() > 0) out.push_back({z.monic(), i});
    ++i;
    w = y;
    c = divrem(c, y).quotient;
  }
  if (w.degree() > 0) out.push_back({w.monic(), i});
  return out;
}

std::string to_string(const PolyQ& p) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = p.degree(); i >= 0; --i) {
    const Rat c = p.coeff(i);
    if (c == 0) continue;
    const bool neg = c < 0;
    const Rat mag = neg ? Rat(-c) : c;
    if (first)
      os << (neg ? "-" : "");
    else
      os << (neg ? " - " : " + ");
    first = false;
    const bool unit = mag == 1;
    if (!unit || i == 0) os << to_string(mag);
    if (i >= 1) os << (unit ? "" : "*") << "t";
    if (i >= 2) os << "^" << i;
  }
  return os.str();
}

}  // namespace canheight
