#pragma once

#include <functional>

#include "contstab/geometry.hpp"

// Quadrature-side checks of the spectral machinery.  The solver itself works
// entirely in coefficient space; everything here exists so the verification
// suite and the tests can measure inner products and apply the restriction
// operator independently of any eigenbasis.

namespace contstab::quad {

using Fn = std::function<cdouble(cdouble)>;

/// (K f)(zeta) = integral over the data circle of p(zeta, tau) f(tau) |dtau|,
/// by the uniform trapezoid rule (spectrally accurate for these kernels).
cdouble apply_restriction_operator(const Geometry& g, const Fn& f, cdouble zeta,
                                   int nodes = 512);

/// Coefficients of f on the orthonormal H^2(A_rho) basis, recovered from
/// Laurent coefficients sampled on circles of radius 1-delta (indices
/// n >= 0) and rho+delta (n < 0), approached from inside and Richardson-
/// extrapolated in delta.  Layout: [a_0 .. a_{N/2-1}, a_{-1} .. a_{-(N/2-1)}].
std::vector<cdouble> annulus_coefficient_vector(const Fn& f, const Annulus& a, int nodes = 512,
                                                double delta = 1e-6);

/// H^2(A_rho) inner product
///   (f,g) = sum_{n>=0} f_n conj(g_n) + sum_{n<0} f_n conj(g_n) rho^{2n},
/// computed as the l^2 pairing of the coefficient vectors above.
cdouble inner_product_annulus(const Fn& f, const Fn& g, const Annulus& a, int nodes = 512,
                              double delta = 1e-6);

/// L^2(R) inner product, integral of f conj(g) over the real line, with the
/// x = tan(theta) substitution and a midpoint rule (the transformed
/// integrand is smooth and periodic for the decay our functions have).
cdouble inner_product_halfplane(const Fn& f, const Fn& g, int nodes = 4096);

} // namespace contstab::quad
