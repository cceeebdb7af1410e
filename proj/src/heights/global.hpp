#pragma once

#include <optional>
#include <vector>

#include "heights/local.hpp"

namespace canheight {

/// log max(|a|, |b|) for the reduced coordinates.
Real weil_height(const ProjPoint& x, mpfr_prec_t bits = 256);

struct DirectEstimate {
  unsigned long k = 0;
  Real value;  // h(phi^k(x)) / d^k
};

struct HeightResult {
  Real value;
  std::vector<LocalHeight> per_place;  // infinity first, then primes ascending
  unsigned long k_used = 0;
  mpfr_prec_t precision_bits = 0;
  Real error_estimate;
  bool approximate = false;
  std::optional<DirectEstimate> direct;
};

/// Places where a local height of (a/b, 1) can be nonzero: infinity, the bad
/// primes of the map, and the primes dividing b.
std::vector<Place> height_support(const RationalMap& map, const ProjPoint& x, const FactorBudget& budget = {});

HeightResult canonical_height(const RationalMap& map, const ProjPoint& x, const HeightOptions& opt = {});

/// h(phi^k(x))/d^k by reduced big-integer iteration, largest k with d^k <= cap.
std::optional<DirectEstimate> direct_height(const RationalMap& map, const ProjPoint& x, unsigned long cap,
                                            mpfr_prec_t bits);

/// Conjugate-averaged canonical height of a root of the square-free F.
/// per_place holds the conjugate sums at each place divided by deg F.
HeightResult canonical_height_algebraic(const RationalMap& map, const PolyQ& f, const HeightOptions& opt = {});

/// Conjugate sum over the roots of F of the archimedean local height of (beta, 1).
LocalHeight archimedean_conjugate_sum(const RationalMap& map, const PolyQ& f, const HeightOptions& opt);

/// Conjugate sum over the roots of F of the p-adic local height of (beta, 1),
/// via norms from Q[t]/(F). Exact at primes of good reduction.
LocalHeight finite_conjugate_sum(const RationalMap& map, const PolyQ& f, const Int& p, const HeightOptions& opt);

/// |hat-h_v(phi(x)) - d hat-h_v(x) + log|Q(x,1)|_v| for affine x.
/// Throws "pole of the dehomogenized Q" when Q(x,1) = 0.
LocalHeight functional_eq_residual(const RationalMap& map, const ProjPoint& x, const Place& v,
                                   const HeightOptions& opt = {});

}  // namespace canheight
