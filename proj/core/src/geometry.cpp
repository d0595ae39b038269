#include "contstab/geometry.hpp"

#include <cmath>
#include <sstream>

namespace contstab {

namespace {

std::string fmt_complex(cdouble z) {
    std::ostringstream os;
    os << z.real() << (z.imag() < 0 ? "-" : "+") << std::fabs(z.imag()) << "i";
    return os.str();
}

} // namespace

Annulus::Annulus(double rho_, double r_) : rho(rho_), r(r_) {
    if (!(rho > 0.0) || !(rho < r) || !(r < 1.0))
        throw ConfigError("Annulus requires 0 < rho < r < 1, got rho=" + std::to_string(rho_) +
                          ", r=" + std::to_string(r_));
}

HalfPlaneGeometry::HalfPlaneGeometry(double r_) : r(r_) {
    if (!(r > 0.0) || !(r < 1.0))
        throw ConfigError("HalfPlaneGeometry requires 0 < r < 1, got r=" + std::to_string(r_));
    double root = std::sqrt(1.0 - r * r);
    z0 = cdouble(0.0, root);
    rho = (1.0 - root) / r;
}

BernsteinEllipse::BernsteinEllipse(double R_)
    : R(R_), annulus_view((R_ > 1.0 ? (1.0 / R_) * (1.0 / R_) : 0.25), (R_ > 1.0 ? 1.0 / R_ : 0.5)) {
    if (!(R > 1.0))
        throw ConfigError("BernsteinEllipse requires R > 1, got R=" + std::to_string(R_));
}

GeometryKind kind_of(const Geometry& g) {
    if (std::holds_alternative<Annulus>(g)) return GeometryKind::annulus;
    if (std::holds_alternative<HalfPlaneGeometry>(g)) return GeometryKind::half_plane;
    return GeometryKind::ellipse;
}

std::string kind_name(GeometryKind k) {
    switch (k) {
        case GeometryKind::annulus: return "annulus";
        case GeometryKind::half_plane: return "halfplane";
        default: return "ellipse";
    }
}

cdouble joukowski(cdouble w) {
    if (w == cdouble(0.0, 0.0)) throw DomainError("joukowski: w = 0 is a pole");
    return 0.5 * (w + 1.0 / w);
}

cdouble joukowski_outer_root(cdouble z) {
    // roots of w^2 - 2zw + 1; they multiply to 1, keep the larger one
    cdouble s = std::sqrt(z * z - 1.0);
    cdouble w1 = z + s, w2 = z - s;
    return std::abs(w1) >= std::abs(w2) ? w1 : w2;
}

cdouble inverse_joukowski(cdouble z, double R) {
    cdouble w = joukowski_outer_root(z);
    double aw = std::abs(w);
    if (aw <= 1.0 + kNearDegenerateTol) {
        if (std::fabs(z.imag()) == 0.0 && std::fabs(z.real()) <= 1.0)
            throw BranchPointError("inverse_joukowski: z on the cut [-1,1]");
        throw NearDegenerateError("inverse_joukowski: z within 1e-10 of the cut [-1,1] (|w|=" +
                                  std::to_string(aw) + ")");
    }
    if (aw > R) throw DomainError("inverse_joukowski: z outside the closed ellipse (|J^-1(z)|=" +
                                  std::to_string(aw) + " > R=" + std::to_string(R) + ")");
    if (aw >= R - kNearDegenerateTol)
        throw NearDegenerateError("inverse_joukowski: z within 1e-10 of the ellipse boundary");
    return w;
}

cdouble inverse_joukowski_radical(cdouble z) {
    return z + (z - 1.0) * std::sqrt((z + 1.0) / (z - 1.0));
}

cdouble mobius(cdouble zeta, const HalfPlaneGeometry& g) {
    if (!(zeta.imag() > 0.0))
        throw DomainError("mobius: zeta must lie in the open upper half-plane, got " +
                          fmt_complex(zeta));
    cdouble den = zeta + g.z0;
    if (std::abs(den) < 1e-300) throw PoleError("mobius: zeta at the pole -z0");
    return (zeta - g.z0) / den;
}

cdouble ellipse_point_to_annulus(cdouble z, const BernsteinEllipse& e) {
    return inverse_joukowski(z, e.R) / e.R;
}

bool inside_data_circle(const HalfPlaneGeometry& g, cdouble z) {
    return std::abs(z - cdouble(0.0, 1.0)) < g.r;
}

void validate_point(const Geometry& g, cdouble z) {
    if (const auto* a = std::get_if<Annulus>(&g)) {
        double az = std::abs(z);
        if (az <= a->rho || az >= 1.0)
            throw DomainError("point |z|=" + std::to_string(az) + " outside the open annulus (" +
                              std::to_string(a->rho) + ", 1)");
        if (az <= a->rho + kNearDegenerateTol || az >= 1.0 - kNearDegenerateTol)
            throw NearDegenerateError("point within 1e-10 of the annulus boundary");
        if (std::fabs(az - a->r) <= kNearDegenerateTol)
            throw NearDegenerateError("point within 1e-10 of the data circle Gamma_r");
        return;
    }
    if (const auto* h = std::get_if<HalfPlaneGeometry>(&g)) {
        if (z.imag() <= 0.0)
            throw DomainError("point not in the open upper half-plane");
        if (z.imag() <= kNearDegenerateTol)
            throw NearDegenerateError("point within 1e-10 of the real axis");
        double dist = std::abs(z - cdouble(0.0, 1.0));
        if (std::fabs(dist - h->r) <= kNearDegenerateTol)
            throw NearDegenerateError("point within 1e-10 of the data circle C(i,r)");
        return;
    }
    const auto& e = std::get<BernsteinEllipse>(g);
    inverse_joukowski(z, e.R); // throws for the cut, the boundary, and outside
}

} // namespace contstab
