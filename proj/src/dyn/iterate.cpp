#include "dyn/iterate.hpp"

#include <map>

#include "exact/error.hpp"

namespace canheight {

namespace {

constexpr std::size_t kMaxOrbitBits = std::size_t{1} << 28;

std::vector<Int> truncated(std::vector<Int> v, std::size_t n) {
  if (n && v.size() > n) v.resize(n);
  return v;
}

void add_scaled(std::vector<Int>& acc, const Int& c, const std::vector<Int>& v) {
  if (c == 0) return;
  if (acc.size() < v.size()) acc.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) mpz_addmul(acc[i].get_mpz_t(), c.get_mpz_t(), v[i].get_mpz_t());
}

// One outer step (p, q) -> (P'(p, q), Q'(p, q)) on coefficient vectors,
// truncated to n terms when n > 0.
void compose(const RationalMap& map, const std::vector<Int>& p, const std::vector<Int>& q, std::size_t n,
             std::vector<Int>& op, std::vector<Int>& oq) {
  const int d = map.degree();
  std::vector<std::vector<Int>> pp(static_cast<std::size_t>(d) + 1), qq(static_cast<std::size_t>(d) + 1);
  pp[0] = {Int(1)};
  qq[0] = {Int(1)};
  for (int j = 1; j <= d; ++j) {
    pp[static_cast<std::size_t>(j)] = truncated(multiply(pp[static_cast<std::size_t>(j) - 1], p), n);
    qq[static_cast<std::size_t>(j)] = truncated(multiply(qq[static_cast<std::size_t>(j) - 1], q), n);
  }
  op.clear();
  oq.clear();
  for (int i = 0; i <= d; ++i) {
    const auto& Pi = map.p_int()[static_cast<std::size_t>(i)];
    const auto& Qi = map.q_int()[static_cast<std::size_t>(i)];
    if (Pi == 0 && Qi == 0) continue;
    const std::vector<Int> term =
        truncated(multiply(pp[static_cast<std::size_t>(d - i)], qq[static_cast<std::size_t>(i)]), n);
    add_scaled(op, Pi, term);
    add_scaled(oq, Qi, term);
  }
}

std::size_t bit_size(const Int& z) { return mpz_sizeinbase(z.get_mpz_t(), 2); }

}  // namespace

unsigned long degree_power(int d, unsigned long k, unsigned long limit) {
  unsigned long n = 1;
  for (unsigned long i = 0; i < k; ++i) {
    if (n > limit / static_cast<unsigned long>(d)) return 0;
    n *= static_cast<unsigned long>(d);
  }
  return n <= limit ? n : 0;
}

Int kappa_exponent(int d, unsigned long k) { return (pow(Int(d), k) - 1) / (d - 1); }

ProjPoint iterate_exact(const RationalMap& map, const ProjPoint& x, unsigned long k) {
  ProjPoint cur = x;
  for (unsigned long i = 0; i < k; ++i) {
    auto [a, b] = map.apply_int(cur.a(), cur.b());
    cur = ProjPoint(a, b);
    if (bit_size(cur.a()) + bit_size(cur.b()) > kMaxOrbitBits)
      fail(ErrorKind::Budget, "exact iteration budget exceeded");
  }
  return cur;
}

std::pair<Rat, Rat> iterate_raw(const RationalMap& map, const Rat& a, const Rat& b, unsigned long k,
                                const Caps& caps) {
  if (a == 0 && b == 0) fail(ErrorKind::Input, "the point [0:0] is not in P^1");
  if (degree_power(map.degree(), k, caps.iteration_degree) == 0)
    fail(ErrorKind::Budget, "exact iteration budget exceeded");
  Rat x = a, y = b;
  for (unsigned long i = 0; i < k; ++i) std::tie(x, y) = map.apply(x, y);
  return {x, y};
}

AffineIterates::AffineIterates(const RationalMap& map, const Caps& caps) : map_(&map), caps_(caps) {
  p_.push_back({Int(0), Int(1)});
  q_.push_back({Int(1), Int(0)});
}

void AffineIterates::extend(unsigned long k) {
  if (degree_power(map_->degree(), k, caps_.poly_degree) == 0)
    fail(ErrorKind::Budget, "exact polynomial construction cap exceeded (d^k > " +
                                std::to_string(caps_.poly_degree) + ")");
  while (p_.size() <= k) {
    std::vector<Int> np, nq;
    compose(*map_, p_.back(), q_.back(), 0, np, nq);
    const std::size_t len = (p_.back().size() - 1) * static_cast<std::size_t>(map_->degree()) + 1;
    np.resize(len);
    nq.resize(len);
    p_.push_back(std::move(np));
    q_.push_back(std::move(nq));
  }
}

const std::vector<Int>& AffineIterates::p(unsigned long k) {
  extend(k);
  return p_[k];
}

const std::vector<Int>& AffineIterates::q(unsigned long k) {
  extend(k);
  return q_[k];
}

namespace {

PolyQ scaled_poly(const std::vector<Int>& v, const Rat& scale) {
  std::vector<Rat> c;
  c.reserve(v.size());
  for (const Int& z : v) c.emplace_back(Rat(z) * scale);
  return PolyQ(std::move(c));
}

Rat kappa_power(const RationalMap& map, unsigned long k) {
  return pow(map.kappa(), kappa_exponent(map.degree(), k).get_ui());
}

}  // namespace

FixedPointPoly fixed_point_poly(const RationalMap& map, unsigned long k, const Caps& caps, AffineIterates* cache) {
  if (k < 1) fail(ErrorKind::Input, "period k must be at least 1");
  AffineIterates local(map, caps);
  AffineIterates& it = cache ? *cache : local;
  const auto& p = it.p(k);
  const auto& q = it.q(k);
  std::vector<Int> r(p.size() + 1);
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = p[i];
  for (std::size_t i = 0; i < q.size(); ++i) r[i + 1] -= q[i];
  FixedPointPoly out;
  out.k = k;
  out.rk = scaled_poly(r, kappa_power(map, k));
  out.gamma = out.rk.leading();
  out.inf_mult = static_cast<int>(p.size()) - out.rk.degree();
  return out;
}

PreimagePoly preimage_poly(const RationalMap& map, const ProjPoint& alpha, unsigned long k, const Caps& caps,
                           AffineIterates* cache) {
  if (is_exceptional(map, alpha)) fail(ErrorKind::ExceptionalTarget, "exceptional target");
  AffineIterates local(map, caps);
  AffineIterates& it = cache ? *cache : local;
  const auto& p = it.p(k);
  const auto& q = it.q(k);
  std::vector<Int> s(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) s[i] = alpha.b() * p[i] - alpha.a() * q[i];
  PreimagePoly out;
  out.k = k;
  out.alpha = alpha;
  out.sk = scaled_poly(s, kappa_power(map, k));
  out.eta = out.sk.leading();
  out.inf_mult = static_cast<int>(p.size()) - 1 - out.sk.degree();
  return out;
}

Real LeadingAtInfinity::log_abs(mpfr_prec_t bits) const {
  Real v = canheight::log_abs(scaled, bits);
  if (kappa_exp != 0 && abs(kappa) != 1) v += Real(kappa_exp, bits) * canheight::log_abs(kappa, bits);
  return v;
}

Rat LeadingAtInfinity::exact() const {
  if (abs(kappa) == 1) return mpz_odd_p(kappa_exp.get_mpz_t()) && kappa < 0 ? Rat(-scaled) : scaled;
  if (kappa_exp > 1000000) fail(ErrorKind::Budget, "leading coefficient too large to form exactly");
  return scaled * pow(kappa, kappa_exp.get_ui());
}

namespace {

template <class Combine>
LeadingAtInfinity leading_from_series(const RationalMap& map, unsigned long k, Combine combine) {
  const unsigned long full = degree_power(map.degree(), k, 1ul << 40);
  for (std::size_t n = 8;; n *= 2) {
    std::vector<Int> x{Int(1)}, y{Int(0), Int(1)};
    for (unsigned long i = 0; i < k; ++i) {
      std::vector<Int> nx, ny;
      compose(map, x, y, n, nx, ny);
      x = std::move(nx);
      y = std::move(ny);
    }
    x.resize(n);
    y.resize(n);
    const std::vector<Int> b = combine(x, y, n);
    for (std::size_t i = 0; i < b.size(); ++i) {
      if (b[i] != 0) {
        LeadingAtInfinity out;
        out.inf_mult = static_cast<int>(i);
        out.scaled = Rat(b[i]);
        out.kappa = map.kappa();
        out.kappa_exp = kappa_exponent(map.degree(), k);
        return out;
      }
    }
    if (full != 0 && n > full + 2) fail(ErrorKind::Computation, "iterate form vanishes identically");
  }
}

}  // namespace

LeadingAtInfinity fixed_point_leading(const RationalMap& map, unsigned long k) {
  if (k < 1) fail(ErrorKind::Input, "period k must be at least 1");
  return leading_from_series(map, k, [](const std::vector<Int>& x, const std::vector<Int>& y, std::size_t n) {
    std::vector<Int> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = (i ? x[i - 1] : Int(0)) - y[i];
    return b;
  });
}

LeadingAtInfinity preimage_leading(const RationalMap& map, const ProjPoint& alpha, unsigned long k) {
  if (is_exceptional(map, alpha)) fail(ErrorKind::ExceptionalTarget, "exceptional target");
  return leading_from_series(map, k, [&](const std::vector<Int>& x, const std::vector<Int>& y, std::size_t n) {
    std::vector<Int> b(n);
    for (std::size_t i = 0; i < n; ++i) b[i] = alpha.b() * x[i] - alpha.a() * y[i];
    return b;
  });
}

std::pair<PolyQ, PolyQ> derivative_pair(const RationalMap& map) {
  const PolyQ p = map.p_affine();
  const PolyQ q = map.q_affine();
  return {p.derivative() * q - p * q.derivative(), q * q};
}

bool is_exceptional(const RationalMap& map, const ProjPoint& x) {
  if (iterate_exact(map, x, 2) != x) return false;
  AffineIterates it(map, Caps{1ul << 20, 1ul << 22});
  const auto& p = it.p(2);
  const auto& q = it.q(2);
  const std::size_t n = p.size();  // d^2 + 1
  std::vector<Int> s(n);
  for (std::size_t i = 0; i < n; ++i) s[i] = x.b() * p[i] - x.a() * q[i];
  // (b t - a)^(d^2) as a formal vector of the same length.
  std::vector<Int> e{Int(1)};
  for (std::size_t i = 1; i < n; ++i) e = multiply(e, std::vector<Int>{Int(-x.a()), x.b()});
  e.resize(n);
  std::size_t j0 = 0;
  while (e[j0] == 0) ++j0;
  if (s[j0] == 0) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (s[i] * e[j0] != e[i] * s[j0]) return false;
  return true;
}

OrbitClass classify_point(const RationalMap& map, const ProjPoint& x, unsigned long bound) {
  if (bound < 1) fail(ErrorKind::Input, "orbit bound must be at least 1");
  OrbitClass out;
  out.bound = bound;
  out.exceptional = is_exceptional(map, x);
  std::map<ProjPoint, unsigned long> seen;
  ProjPoint cur = x;
  seen.emplace(cur, 0);
  for (unsigned long j = 1; j <= bound; ++j) {
    cur = iterate_exact(map, cur, 1);
    auto [pos, inserted] = seen.emplace(cur, j);
    if (!inserted) {
      out.tail = pos->second;
      out.period = j - pos->second;
      out.kind = out.tail == 0 ? OrbitKind::Periodic : OrbitKind::Preperiodic;
      return out;
    }
  }
  return out;
}

}  // namespace canheight
