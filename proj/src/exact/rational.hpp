#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace canheight {

using Int = mpz_class;
using Rat = mpq_class;

/// Parses "n" or "p/q" (optional leading sign, decimal digits only). The
/// result is canonical. Throws Error(Input) on anything else, including a zero
/// denominator.
Rat parse_rational(std::string_view text);

/// "n" when the denominator is 1, otherwise "p/q".
std::string to_string(const Rat& q);
std::string to_string(const Int& z);

/// Exact power with a nonnegative machine exponent.
Int pow(const Int& base, unsigned long exp);
Rat pow(const Rat& base, unsigned long exp);

inline int sign(const Rat& q) { return sgn(q); }
inline int sign(const Int& z) { return sgn(z); }

}  // namespace canheight
