#pragma once

#include <vector>

#include "exact/poly.hpp"
#include "exact/real.hpp"

namespace canheight {

/// Horner evaluation of a polynomial with complex coefficients (ascending).
Complex horner(const std::vector<Complex>& coeffs, const Complex& z);

/// All complex roots of a square-free polynomial of degree >= 1, to roughly
/// the working precision, by Aberth-Ehrlich simultaneous iteration.
/// Throws Error(Precision) when the iteration does not settle.
std::vector<Complex> complex_roots(const PolyQ& f, mpfr_prec_t bits);

}  // namespace canheight
