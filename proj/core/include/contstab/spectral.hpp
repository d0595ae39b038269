#pragma once

#include <functional>
#include <vector>

#include "contstab/geometry.hpp"

namespace contstab {

/// z^n by binary exponentiation (exact multiplications, no exp/log branch
/// issues); n may be negative.
cdouble cpow_int(cdouble z, long n);

/// Reproducing kernel of H^2(A_rho):  p(zeta,tau) = 1/(1 - zeta*conj(tau))
///                                               + rho^2/(zeta*conj(tau) - rho^2).
cdouble kernel_annulus(cdouble zeta, cdouble tau, const Annulus& a);

/// Reproducing kernel of H^2(H+):  p(zeta,tau) = i / (2*pi*(zeta - conj(tau))).
cdouble kernel_halfplane(cdouble zeta, cdouble tau);

/// Kernel of the geometry's working Hilbert space (the ellipse is handled
/// through its annulus model).
cdouble kernel(const Geometry& g, cdouble zeta, cdouble tau);

/// Orthonormal eigenbasis (lambda_n, e_n) of the restriction operator
/// K f = integral over Gamma of p(.,tau) f(tau) |dtau|, organized as one or
/// two one-sided "branches" so that series over the index set can be summed
/// branch by branch with a first-omitted-term stop.  Eigenfunction
/// evaluators are closures over the geometry constants.
struct SpectralBasis {
    enum class Kind { annulus, half_plane, annulus_symmetric };

    struct Branch {
        std::function<long(int)> index;              // branch position k -> index n
        std::function<double(int)> lambda;           // eigenvalue at position k
        std::function<cdouble(int, cdouble)> eval;   // e_{n(k)}(zeta)
    };

    Kind kind;
    std::vector<Branch> branches;
    double lambda_max;
};

/// Annulus basis over n in Z:
///   e_n = zeta^n (n >= 0),  (zeta/rho)^n (n < 0);
///   lambda_n = 2*pi*r * r^{2n} (n >= 0),  2*pi*r * (r/rho)^{2n} (n < 0).
SpectralBasis basis_annulus(const Annulus& a);

/// Half-plane basis over n >= 1:
///   lambda_n = r*rho^{2n}/(1+sqrt(1-r^2)),
///   e_n = (1-r^2)^{1/4}/sqrt(pi) * m(zeta)^n/(zeta+z0).
SpectralBasis basis_halfplane(const HalfPlaneGeometry& g);

/// Basis of the symmetric subspace L = { f : f(zeta) = f(rho/zeta) } for the
/// annulus with r^2 = rho, over n >= 0:
///   e_0 = 1,  e_n = (zeta^n + (rho/zeta)^n)/sqrt(2)  (n >= 1);
///   lambda_n = 2*pi*sqrt(rho)*rho^n.
/// Requires a.is_symmetric(); throws ConfigError otherwise.
SpectralBasis basis_annulus_symmetric(const Annulus& a);

/// Basis of the geometry's working space: annulus -> basis_annulus,
/// half-plane -> basis_halfplane, ellipse -> symmetric basis of its
/// annulus model.
SpectralBasis spectral_basis(const Geometry& g);

/// Orthogonal projection onto L: (P_L f)(zeta) = (f(zeta) + f(rho/zeta))/2.
/// Requires a.is_symmetric().
std::function<cdouble(cdouble)> project_symmetric(std::function<cdouble(cdouble)> f,
                                                  const Annulus& a);

/// The `count` largest eigenvalues of the geometry's restriction operator,
/// sorted descending.  This is the full operator spectrum (for the
/// half-plane it includes the constant-Mobius-power mode 1/(zeta+z0) with
/// eigenvalue r/(1+sqrt(1-r^2)), which the solver basis above starts past).
std::vector<double> analytic_spectrum(const Geometry& g, int count);

} // namespace contstab
