#pragma once

#include <functional>
#include <string>
#include <utility>

#include "dyn/map.hpp"
#include "exact/real.hpp"
#include "exact/valuation.hpp"

namespace canheight {

/// A place of Q: infinity (p = 0) or a prime p.
struct Place {
  Int p;

  static Place infinity() { return Place{Int(0)}; }
  static Place prime(const Int& q) { return Place{q}; }
  bool is_infinity() const { return p == 0; }
  std::string label() const { return is_infinity() ? "inf" : canheight::to_string(p); }

  friend bool operator==(const Place&, const Place&) = default;
  /// Infinity first, then primes ascending.
  friend bool operator<(const Place& x, const Place& y) { return x.p < y.p; }
};

/// "inf" or a prime; throws Error(Input) otherwise.
Place parse_place(const std::string& text);

enum class Norm { Max, FubiniStudy };

struct HeightOptions {
  double tol = 1e-12;
  mpfr_prec_t bits = 256;
  mpfr_prec_t max_bits = 4096;
  Norm norm = Norm::Max;
  /// Archimedean iteration cap and minimum depth.
  unsigned long kmax = 128;
  unsigned long kmin = 8;
  /// Finite-place iteration cap.
  unsigned long finite_kmax = 64;
  /// Recompute at doubled precision and require agreement to tol.
  bool precision_check = true;
  /// d^k bound for the direct big-integer cross-check; 0 disables it.
  unsigned long direct_cap = 1ul << 16;
  FactorBudget budget;
};

struct LocalHeight {
  Place place;
  Real value;
  /// Finite places: value = log_p_coeff * log p, exact unless `approximate`.
  Rat log_p_coeff;
  unsigned long k_used = 0;
  mpfr_prec_t bits = 0;
  Real error;
  bool approximate = false;
  /// Conjugate-summed value at a finite place (algebraic points).
  bool aggregated = false;
};

/// Archimedean normalized iteration of a complex pair. After k steps the pair
/// (a, b) has norm 1 and log_scale() = log ||(P_k(x,y), Q_k(x,y))||.
class ScaledPair {
 public:
  ScaledPair(const RationalMap& map, Complex x, Complex y, Norm norm = Norm::Max);

  void step();
  unsigned long k() const { return k_; }
  const Complex& a() const { return a_; }
  const Complex& b() const { return b_; }
  const Real& log_scale() const { return log_scale_; }
  /// log_scale / d^k
  const Real& value() const { return value_; }
  const Real& last_increment() const { return inc_; }

 private:
  Real normalize();

  const RationalMap* map_;
  Norm norm_;
  std::vector<Complex> pc_, qc_;
  Complex a_, b_;
  Real log_scale_, value_, inc_, inv_dk_;
  unsigned long k_ = 0;
};

/// One archimedean limit at fixed precision, with the two-small-increments
/// stopping rule. The result is flagged approximate if kmax is reached.
LocalHeight archimedean_limit(const RationalMap& map, const Complex& x, const Complex& y, const HeightOptions& opt);

/// Runs `at_bits` at the working precision and at doubled precision until two
/// consecutive runs agree to tol (or max_bits is reached, flagged approximate).
LocalHeight with_precision_check(const std::function<LocalHeight(mpfr_prec_t)>& at_bits, const HeightOptions& opt);

/// hat-h_v of the representative (a/b, 1), or (1, 0) for infinity.
LocalHeight local_canonical_height(const RationalMap& map, const ProjPoint& x, const Place& v,
                                   const HeightOptions& opt = {});
LocalHeight local_height_infinity_point(const RationalMap& map, const Place& v, const HeightOptions& opt = {});

/// Exact finite-place local height of (a/b, 1) by valuation recurrence.
LocalHeight finite_local_height(const RationalMap& map, const ProjPoint& x, const Int& p, const HeightOptions& opt);

}  // namespace canheight
