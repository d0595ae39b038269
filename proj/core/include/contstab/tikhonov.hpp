#pragma once

#include <functional>

#include "contstab/geometry.hpp"
#include "contstab/spectral.hpp"

namespace contstab {

/// Truncated spectral solution of (K + eps^2) u = p_z,
///   u(zeta) = sum_n conj(e_n(z)) / (lambda_n + eps^2) * e_n(zeta),
/// together with the three derived quantities
///   u(z)        = sum |e_n(z)|^2 / (lambda_n + eps^2)
///   ||u||^2     = sum |e_n(z)|^2 / (lambda_n + eps^2)^2
///   ||u||_G^2   = sum lambda_n |e_n(z)|^2 / (lambda_n + eps^2)^2.
/// For the ellipse the solve happens in the annulus model at
/// z_basis = J^{-1}(z)/R; evaluation coordinates are then annulus
/// coordinates as well.
struct TikhonovSolution {
    Geometry geometry;
    cdouble z;        // the point as given
    cdouble z_basis;  // the point in basis coordinates
    double eps;
    SpectralBasis basis;
    std::vector<std::vector<cdouble>> coeff; // per basis branch
    double value_at_z;
    double norm_h;
    double norm_gamma;

    cdouble operator()(cdouble zeta) const;
};

TikhonovSolution solve(const Geometry& g, cdouble z, double eps, double tol = 1e-12);

/// Solve on an explicit basis at a point given in basis coordinates; this is
/// how the symmetric-subspace problem (basis_annulus_symmetric) is solved
/// directly.  The point is validated against `g`.
TikhonovSolution solve_with_basis(const Geometry& g, SpectralBasis basis, cdouble z_basis,
                                  double eps, double tol = 1e-12);

/// Which branch of min{ 1/||u||, eps/||u||_G } was active (ties report the
/// first branch, for determinism).
enum class BoundBranch { global_norm, data_norm };

struct StabilityBound {
    double bound_value;        // (3/2) u(z) min{ 1/||u||, eps/||u||_G }
    BoundBranch argmin_branch;
    double gamma_closed_form;  // the geometry's closed-form exponent at z
    double prefactor;          // bound_value / eps^gamma
};

StabilityBound bound(const TikhonovSolution& sol);

struct ExponentResult {
    double value;        // gamma(z), in (0,1); 1 in the fully stable region
    bool stable_region;  // half-plane points inside the data circle
};

/// Closed-form power-law exponent of the extrapolation error at z.
ExponentResult exponent(const Geometry& g, cdouble z);

/// Worst-case maximizer in closed form, truncated on evaluation by the
/// first-omitted-term rule at the build tolerance.  Norms are computed in
/// the geometry's working Hilbert space (annulus model for the ellipse).
struct Maximizer {
    GeometryKind kind;
    double eps;
    double gamma;                              // exponent used in the prefactor
    std::function<cdouble(cdouble)> eval;      // M(zeta); throws DomainError
                                               // outside the convergence region
    double norm_h;                             // ||M||
    double norm_gamma;                         // ||M||_Gamma
    double abs_at_z;                           // |M(z)|
};

Maximizer maximizer(const Geometry& g, cdouble z, double eps, double tol = 1e-12);

/// Maximizer of the symmetric-subspace problem on the annulus with r^2 = rho:
///   M(zeta) = eps^{2-gamma} sum_{n>=1} (conj(z)^n + (rho/conj(z))^n)
///             (zeta^n + (rho/zeta)^n) / (rho^n + eps^2).
Maximizer maximizer_annulus_symmetric(const Annulus& a, cdouble z, double eps,
                                      double tol = 1e-12);

/// Ratio Phi(eta) = (K u_eta, u_eta) / ||u_eta||^2 with u_eta = (K+eta)^{-1} p_z;
/// monotone increasing from 0 to (K p_z, p_z)/||p_z||^2.
double phi_of_eta(const SpectralBasis& basis, cdouble z_basis, double eta,
                  double tol = 1e-12);

struct DualCertificate {
    double eta_star;          // unique root of Phi(eta) = eps^2
    double phi_at_eta_star;
    double ratio_eta_eps2;    // eta_star / eps^2
};

/// Solves Phi(eta) = eps^2 by bisection in log eta.
DualCertificate dual_certificate(const Geometry& g, cdouble z, double eps,
                                 double tol = 1e-12);

/// Degree K(eps) = floor(ln(1/eps)/ln R) of the Chebyshev comparison
/// polynomial g = eps * T_K (floating floor snaps to within 1e-9 of an
/// integer so exact powers eps = R^{-k} land on K = k).
long chebyshev_certificate_degree(double eps, double R);

/// g(z) = eps * T_{K(eps)}(z), evaluated by the three-term recurrence
/// (valid on and off [-1,1]).
cdouble chebyshev_certificate(cdouble z, double eps, double R);

} // namespace contstab
