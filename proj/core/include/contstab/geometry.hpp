#pragma once

#include <complex>
#include <string>
#include <variant>

#include "contstab/errors.hpp"

namespace contstab {

using cdouble = std::complex<double>;

/// Points closer than this to a data curve or domain boundary are rejected:
/// the stability prefactors blow up there and every reported exponent or
/// bound would be meaningless.
inline constexpr double kNearDegenerateTol = 1e-10;

/// Annulus A_rho = { rho < |zeta| < 1 } with data circle Gamma_r = { |zeta| = r }.
struct Annulus {
    double rho;
    double r;

    Annulus(double rho_, double r_);

    /// The symmetric configuration r^2 == rho (exactly, in the representation),
    /// i.e. the data circle is the geometric mean of the two boundary radii.
    bool is_symmetric() const { return rho == r * r; }

    /// Build the symmetric annulus with data radius r (rho = r^2 exactly).
    static Annulus symmetric(double r_) { return Annulus(r_ * r_, r_); }
};

/// Upper half-plane with data circle Gamma = C(i, r), r < 1.
/// z0 and rho are derived: z0 = i*sqrt(1-r^2) is the point the Mobius map
/// m(zeta) = (zeta - z0)/(zeta + z0) sends to 0; m maps the half-plane onto
/// the unit disk and Gamma onto the concentric circle of radius rho.
struct HalfPlaneGeometry {
    double r;
    cdouble z0;
    double rho;

    explicit HalfPlaneGeometry(double r_);
};

/// Open ellipse with foci +-1 and semi-axis sum R > 1; the image of the
/// circle |w| = R under the Joukowski map.  Carries its annulus model
/// (rho = R^-2, r = R^-1, so r^2 = rho exactly): the cut ellipse maps onto
/// that annulus with the data interval [-1,1] landing on Gamma_r.
struct BernsteinEllipse {
    double R;
    Annulus annulus_view;

    explicit BernsteinEllipse(double R_);
};

using Geometry = std::variant<Annulus, HalfPlaneGeometry, BernsteinEllipse>;

enum class GeometryKind { annulus, half_plane, ellipse };

GeometryKind kind_of(const Geometry& g);
std::string kind_name(GeometryKind k);

/// J(w) = (w + 1/w)/2.  Throws DomainError at w = 0.
cdouble joukowski(cdouble w);

/// The branch of J^{-1} with 1 < |w| < R, defined on E_R \ [-1,1].
/// Solves w^2 - 2zw + 1 = 0 and keeps the root of modulus > 1 (the two
/// roots multiply to 1, so exactly one qualifies off the cut).
cdouble inverse_joukowski(cdouble z, double R);

/// Nested-radical form z + (z-1)*sqrt((z+1)/(z-1)) of the same branch;
/// kept as an independent cross-check of the quadratic route.
cdouble inverse_joukowski_radical(cdouble z);

/// The larger-modulus Joukowski preimage with no domain policing
/// (|w| = 1 exactly on the cut).  Used for series convergence tests.
cdouble joukowski_outer_root(cdouble z);

/// m(zeta) = (zeta - z0)/(zeta + z0).  Requires Im(zeta) > 0.
cdouble mobius(cdouble zeta, const HalfPlaneGeometry& g);

/// z_a = J^{-1}(z)/R: the annulus-model image of an ellipse point,
/// with r < |z_a| < 1.
cdouble ellipse_point_to_annulus(cdouble z, const BernsteinEllipse& e);

/// Check that z is a valid extrapolation point for the geometry: strictly
/// inside the domain and off the data curve, with the near-degenerate
/// margin.  Throws DomainError / NearDegenerateError / BranchPointError.
void validate_point(const Geometry& g, cdouble z);

/// True when z lies strictly inside the half-plane data circle C(i, r)
/// (the fully stable region).
bool inside_data_circle(const HalfPlaneGeometry& g, cdouble z);

} // namespace contstab
