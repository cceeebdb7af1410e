#pragma once

#include <vector>

#include "dyn/map.hpp"
#include "exact/real.hpp"

namespace canheight {

/// [P_k(a,b) : Q_k(a,b)] reduced. k = 0 is the identity.
ProjPoint iterate_exact(const RationalMap& map, const ProjPoint& x, unsigned long k);

/// Unreduced (P_k(a,b), Q_k(a,b)). Throws "exact iteration budget exceeded"
/// when d^k exceeds caps.iteration_degree.
std::pair<Rat, Rat> iterate_raw(const RationalMap& map, const Rat& a, const Rat& b, unsigned long k,
                                const Caps& caps = {});

/// d^k as an integer, or 0 when it exceeds `limit`.
unsigned long degree_power(int d, unsigned long k, unsigned long limit);

/// Incrementally built affine iterates p'_k(t) = P'_k(t,1), q'_k(t) = Q'_k(t,1)
/// of the integer forms. Owned by the caller; not thread-safe.
class AffineIterates {
 public:
  AffineIterates(const RationalMap& map, const Caps& caps = {});

  /// Ascending integer coefficients, padded to length d^k + 1.
  const std::vector<Int>& p(unsigned long k);
  const std::vector<Int>& q(unsigned long k);

 private:
  void extend(unsigned long k);

  const RationalMap* map_;
  Caps caps_;
  std::vector<std::vector<Int>> p_, q_;
};

/// (d^k - 1)/(d - 1): the power of kappa in P_k = kappa^e P'_k.
Int kappa_exponent(int d, unsigned long k);

struct FixedPointPoly {
  unsigned long k = 0;
  PolyQ rk;  // P_k(t,1) - t Q_k(t,1)
  Rat gamma;
  int inf_mult = 0;
};

struct PreimagePoly {
  unsigned long k = 0;
  ProjPoint alpha;
  PolyQ sk;  // u P_k(t,1) - s Q_k(t,1) for alpha = [s:u]
  Rat eta;
  int inf_mult = 0;
};

FixedPointPoly fixed_point_poly(const RationalMap& map, unsigned long k, const Caps& caps = {},
                                AffineIterates* cache = nullptr);
/// Throws Error(ExceptionalTarget, "exceptional target") for exceptional alpha.
PreimagePoly preimage_poly(const RationalMap& map, const ProjPoint& alpha, unsigned long k,
                           const Caps& caps = {}, AffineIterates* cache = nullptr);

/// Leading coefficient and multiplicity of infinity for R_k or S_k, read off
/// the truncated expansions of P'_k(1,x), Q'_k(1,x) at x = 0. Works for k far
/// beyond the polynomial construction cap. The true leading coefficient is
/// kappa^kappa_exp * scaled.
struct LeadingAtInfinity {
  int inf_mult = 0;
  Rat scaled;
  Rat kappa;
  Int kappa_exp;

  Real log_abs(mpfr_prec_t bits) const;
  /// The exact coefficient; throws Error(Budget) when kappa^kappa_exp is too big to form.
  Rat exact() const;
};

LeadingAtInfinity fixed_point_leading(const RationalMap& map, unsigned long k);
LeadingAtInfinity preimage_leading(const RationalMap& map, const ProjPoint& alpha, unsigned long k);

/// phi' = A/B with A = p'q - pq', B = q^2 for p = P(t,1), q = Q(t,1).
std::pair<PolyQ, PolyQ> derivative_pair(const RationalMap& map);

enum class OrbitKind { Periodic, Preperiodic, Wandering };

struct OrbitClass {
  OrbitKind kind = OrbitKind::Wandering;
  unsigned long tail = 0;
  unsigned long period = 0;
  unsigned long bound = 0;
  bool exceptional = false;
};

OrbitClass classify_point(const RationalMap& map, const ProjPoint& x, unsigned long bound);
bool is_exceptional(const RationalMap& map, const ProjPoint& x);

}  // namespace canheight
