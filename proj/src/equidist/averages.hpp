#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "dyn/iterate.hpp"
#include "heights/global.hpp"

namespace canheight {

/// Exact uses R_k / S_k built exactly (any place). Numeric iterates each root of
/// F (archimedean place only). Auto picks exact within the cap, else numeric.
enum class Mode { Exact, Numeric, Auto };
enum class Target { Periodic, Preimage };

Mode parse_mode(const std::string& text);
std::string to_string(Mode m);

struct EquidistOptions {
  HeightOptions height;
  Caps caps;
};

/// One finite-k average (1/d^k) sum log|F(w)|_v.
struct AverageValue {
  Real value;
  /// Finite places: value = log_p_coeff * log p exactly.
  Rat log_p_coeff;
  Mode mode_used = Mode::Exact;
  /// Degree of R_k (or S_k) removed because its roots are roots of F.
  long removed_degree = 0;
  bool fell_back = false;
  mpfr_prec_t bits = 0;
};

/// Root-sum data from the exact construction: sum over roots w of the cofactor
/// of log|F(w)|_v = log|res|_v - deg F log|lc cofactor|_v.
struct ExactRootSum {
  PolyQ cofactor;
  Rat res;
  long removed_degree = 0;
};

ExactRootSum exact_root_sum(const PolyQ& r, const PolyQ& f);

/// Holds a copy of the map and its iterate cache; use one engine per thread.
class AverageEngine {
 public:
  AverageEngine(const RationalMap& map, EquidistOptions opt = {});
  AverageEngine(const AverageEngine&) = delete;
  AverageEngine& operator=(const AverageEngine&) = delete;

  AverageValue periodic(const PolyQ& f, const Place& v, unsigned long k, Mode mode);
  /// Throws Error(ExceptionalTarget, "exceptional target") for exceptional alpha.
  AverageValue preimage(const PolyQ& f, const ProjPoint& alpha, const Place& v, unsigned long k, Mode mode);

  const RationalMap& map() const { return map_; }
  const EquidistOptions& options() const { return opt_; }
  PolyQ exact_poly(Target t, const ProjPoint& alpha, unsigned long k);

 private:
  AverageValue exact(Target t, const PolyQ& f, const ProjPoint& alpha, const Place& v, unsigned long k);
  AverageValue numeric_periodic(const PolyQ& f, unsigned long k, mpfr_prec_t bits);
  AverageValue numeric_preimage(const PolyQ& f, const ProjPoint& alpha, unsigned long k, mpfr_prec_t bits);
  AverageValue numeric_checked(const std::function<AverageValue(mpfr_prec_t)>& run);
  bool within_cap(unsigned long k) const;

  struct PreimagePiece {
    PolyQ factor;
    int multiplicity = 1;
    long level = -1;  // first j with factor | S_j, -1 if none within the cap
  };
  struct PreimageSplit {
    unsigned long alpha_period = 0;
    unsigned long searched = 0;
    std::vector<PreimagePiece> pieces;
  };
  const PreimageSplit& preimage_split(const PolyQ& f, const ProjPoint& alpha, unsigned long k);

  RationalMap map_;
  EquidistOptions opt_;
  AffineIterates cache_;
  std::map<unsigned long, PolyQ> periodic_polys_;
  std::map<std::string, PreimageSplit> preimage_splits_;
};

AverageValue periodic_average(const RationalMap& map, const PolyQ& f, const Place& v, unsigned long k, Mode mode,
                              const EquidistOptions& opt = {});
AverageValue preimage_average(const RationalMap& map, const PolyQ& f, const ProjPoint& alpha, const Place& v,
                              unsigned long k, Mode mode, const EquidistOptions& opt = {});

/// log|lc F|_v + sum over roots of F of (hat-h_v(root) - hat-h_v(inf)).
/// At a finite place, irreducible factors of degree > 1 contribute through
/// the norm path and mark the result aggregated.
LocalHeight mahler_measure(const RationalMap& map, const PolyQ& f, const Place& v, const HeightOptions& opt = {});

struct SeriesRow {
  unsigned long k = 0;
  Real value;
  std::optional<Real> delta;
  Mode mode_used = Mode::Exact;
  bool fell_back = false;
};

struct ConvergenceSeries {
  std::vector<SeriesRow> rows;
  Real limit_estimate;
  bool converged = false;
};

using RowCallback = std::function<void(const SeriesRow&)>;

struct AverageSpec {
  PolyQ f;
  Place place;
  Mode mode = Mode::Auto;
  Target target = Target::Periodic;
  ProjPoint alpha;
};

/// Rows for k = kmin..kmax. converged iff the last two deltas are below tol.
ConvergenceSeries average_series(AverageEngine& engine, const AverageSpec& spec, unsigned long kmin,
                                 unsigned long kmax, double tol, const RowCallback& on_row = {});

/// Rows of periodic_average(A) - periodic_average(B) at infinity, phi' = A/B.
ConvergenceSeries lyapunov(AverageEngine& engine, unsigned long kmin, unsigned long kmax, double tol, Mode mode,
                           const RowCallback& on_row = {});

struct GlobalIdentity {
  unsigned long k = 0;
  std::vector<std::pair<Place, AverageValue>> per_place;
  Real total;
  Rat resultant;
  bool product_formula_holds = false;
  Real h_beta;      // canonical height of a root of F
  Real h_infinity;  // canonical height of [1:0]
  Real target;      // deg F (h_beta - h_infinity)
};

/// Exact finite-k averages over the fixed support: infinity, bad primes, the
/// primes of the content of F and of the leading coefficient of its primitive part.
GlobalIdentity global_periodic_identity(const RationalMap& map, const PolyQ& f, unsigned long k,
                                        const EquidistOptions& opt = {});

}  // namespace canheight
