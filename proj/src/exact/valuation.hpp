#pragma once

#include <utility>
#include <vector>

#include "exact/rational.hpp"

namespace canheight {

/// Exponent of p in n. Throws Error(Input, "valuation of zero") for n = 0.
long val_p(const Int& n, const Int& p);
long val_p(const Rat& q, const Int& p);

/// Prime-power factorization of |n| with a bounded rho search. Cofactors the
/// search could not split are kept as composite blocks, each coprime to the
/// listed primes and to the other blocks.
struct Factorization {
  std::vector<std::pair<Int, long>> primes;  // ascending
  std::vector<std::pair<Int, long>> blocks;  // unresolved composites

  bool complete() const { return blocks.empty(); }
};

struct FactorBudget {
  unsigned long trial_bound = 100000;
  unsigned long rho_iterations = 2000000;
};

Factorization factor(const Int& n, const FactorBudget& budget = {});

/// Distinct primes dividing the numerator or denominator of q, ascending.
/// Throws Error(Budget) if some cofactor cannot be split within the budget.
std::vector<Int> prime_support(const Rat& q, const FactorBudget& budget = {});

/// Merges prime lists into one ascending duplicate-free list.
std::vector<Int> merge_primes(std::vector<Int> a, const std::vector<Int>& b);

/// Checks |q|_inf * prod_p p^(-val_p(q)) = 1 by exact reconstruction of |q|
/// from the detected primes (and any unsplit blocks, which act as extra
/// places with the same multiplicative behaviour).
bool product_formula_check(const Rat& q, const FactorBudget& budget = {});

}  // namespace canheight
