#include "exact/valuation.hpp"

#include <algorithm>
#include <map>

#include "exact/error.hpp"

namespace canheight {

long val_p(const Int& n, const Int& p) {
  if (n == 0) fail(ErrorKind::Input, "valuation of zero");
  if (p < 2) fail(ErrorKind::Input, "valuation at a non-prime");
  Int m = n;
  return static_cast<long>(mpz_remove(m.get_mpz_t(), m.get_mpz_t(), p.get_mpz_t()));
}

long val_p(const Rat& q, const Int& p) {
  if (q == 0) fail(ErrorKind::Input, "valuation of zero");
  return val_p(q.get_num(), p) - val_p(q.get_den(), p);
}

namespace {

bool is_probable_prime(const Int& n) { return mpz_probab_prime_p(n.get_mpz_t(), 30) > 0; }

// Brent's variant of Pollard rho. Returns a nontrivial divisor or 0.
Int rho(const Int& n, unsigned long c0, unsigned long& budget) {
  if (mpz_even_p(n.get_mpz_t())) return Int(2);
  Int c(c0), y(2), x, q(1), g(1), ys, t;
  const unsigned long m = 128;
  unsigned long r = 1;
  auto step = [&](Int& v) {
    v = v * v + c;
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), n.get_mpz_t());
  };
  while (g == 1) {
    x = y;
    for (unsigned long i = 0; i < r; ++i) step(y);
    unsigned long k = 0;
    while (k < r && g == 1) {
      ys = y;
      const unsigned long lim = std::min(m, r - k);
      for (unsigned long i = 0; i < lim; ++i) {
        step(y);
        t = x - y;
        q = q * abs(t);
        mpz_mod(q.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      }
      mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
      k += lim;
      if (budget <= lim) return Int(0);
      budget -= lim;
    }
    r *= 2;
  }
  if (g == n) {
    do {
      step(ys);
      t = x - ys;
      t = abs(t);
      mpz_gcd(g.get_mpz_t(), t.get_mpz_t(), n.get_mpz_t());
    } while (g == 1);
  }
  return g == n ? Int(0) : g;
}

void split(const Int& n, std::map<Int, long>& primes, std::vector<Int>& stuck, unsigned long& budget) {
  if (n == 1) return;
  if (is_probable_prime(n)) {
    ++primes[n];
    return;
  }
  if (mpz_perfect_square_p(n.get_mpz_t())) {
    Int r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    split(r, primes, stuck, budget);
    split(r, primes, stuck, budget);
    return;
  }
  for (unsigned long c = 1; c <= 8 && budget > 0; ++c) {
    Int d = rho(n, c, budget);
    if (d != 0) {
      split(d, primes, stuck, budget);
      split(Int(n / d), primes, stuck, budget);
      return;
    }
  }
  stuck.push_back(n);
}

}  // namespace

Factorization factor(const Int& n_in, const FactorBudget& budget) {
  if (n_in == 0) fail(ErrorKind::Input, "cannot factor zero");
  Int n = abs(n_in);
  Factorization out;
  for (unsigned long p = 2; p <= budget.trial_bound && n > 1; p += (p == 2 ? 1 : 2)) {
    if (Int(p) * p > n) break;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
      long e = 0;
      while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
        mpz_divexact_ui(n.get_mpz_t(), n.get_mpz_t(), p);
        ++e;
      }
      out.primes.emplace_back(Int(p), e);
    }
  }
  if (n == 1) return out;

  std::map<Int, long> primes;
  for (auto& [p, e] : out.primes) primes[p] = e;
  std::vector<Int> stuck;
  unsigned long left = budget.rho_iterations;
  split(n, primes, stuck, left);
  out.primes.assign(primes.begin(), primes.end());

  // Make the unsplit pieces pairwise coprime and record their exponents.
  std::vector<Int> blocks;
  for (const Int& s : stuck) {
    Int cur = s;
    for (const auto& [p, e] : out.primes) mpz_remove(cur.get_mpz_t(), cur.get_mpz_t(), p.get_mpz_t());
    if (cur == 1) continue;
    bool merged = false;
    for (auto& b : blocks) {
      if (b == cur) {
        merged = true;
        break;
      }
    }
    if (!merged) blocks.push_back(cur);
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < blocks.size() && !changed; ++i)
      for (std::size_t j = i + 1; j < blocks.size() && !changed; ++j) {
        Int g;
        mpz_gcd(g.get_mpz_t(), blocks[i].get_mpz_t(), blocks[j].get_mpz_t());
        if (g == 1) continue;
        Int a = blocks[i] / g, b = blocks[j] / g;
        blocks.erase(blocks.begin() + static_cast<long>(j));
        blocks.erase(blocks.begin() + static_cast<long>(i));
        for (Int v : {g, a, b})
          if (v != 1) blocks.push_back(v);
        changed = true;
      }
  }
  Int rest = n;
  for (const auto& [p, e] : out.primes) mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), p.get_mpz_t());
  std::sort(blocks.begin(), blocks.end());
  for (const Int& b : blocks) {
    const long e = static_cast<long>(mpz_remove(rest.get_mpz_t(), rest.get_mpz_t(), b.get_mpz_t()));
    if (e > 0) out.blocks.emplace_back(b, e);
  }
  if (rest != 1) fail(ErrorKind::Computation, "factorization lost a cofactor");
  return out;
}

std::vector<Int> merge_primes(std::vector<Int> a, const std::vector<Int>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

std::vector<Int> prime_support(const Rat& q, const FactorBudget& budget) {
  if (q == 0) fail(ErrorKind::Input, "prime support of zero");
  std::vector<Int> out;
  for (const Int& part : {Int(q.get_num()), Int(q.get_den())}) {
    Factorization f = factor(part, budget);
    if (!f.complete()) fail(ErrorKind::Budget, "factorization budget exceeded for " + to_string(f.blocks.front().first));
    for (auto& [p, e] : f.primes) out.push_back(p);
  }
  return merge_primes(std::move(out), {});
}

bool product_formula_check(const Rat& q, const FactorBudget& budget) {
  if (q == 0) fail(ErrorKind::Input, "product formula of zero");
  // Accumulate prod_v |q|_v over the finite places as an exact rational and
  // multiply by the archimedean absolute value.
  Rat prod(abs(q));
  for (const Int& part : {Int(q.get_num()), Int(q.get_den())}) {
    const Factorization f = factor(part, budget);
    auto apply = [&](const Int& p) {
      const long v = val_p(q, p);
      const Rat pv = pow(Rat(p), static_cast<unsigned long>(std::labs(v)));
      if (v > 0)
        prod /= pv;
      else
        prod *= pv;
    };
    for (const auto& [p, e] : f.primes) apply(p);
    for (const auto& [b, e] : f.blocks) apply(b);
  }
  return prod == 1;
}

}  // namespace canheight
