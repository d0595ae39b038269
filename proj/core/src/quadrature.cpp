#include "contstab/quadrature.hpp"

#include <cmath>
#include <vector>

#include "contstab/spectral.hpp"

namespace contstab::quad {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Circle {
    cdouble center;
    double radius;
};

Circle data_circle(const Geometry& g) {
    if (const auto* a = std::get_if<Annulus>(&g)) return {cdouble(0.0, 0.0), a->r};
    if (const auto* h = std::get_if<HalfPlaneGeometry>(&g)) return {cdouble(0.0, 1.0), h->r};
    return {cdouble(0.0, 0.0), std::get<BernsteinEllipse>(g).annulus_view.r};
}

// e_n-basis coefficients of f from uniform samples on the circle of radius s:
// hat_m ~ f_m s^m, so a_m = hat_m / s^m for m >= 0 (outer circle) and
// a_m = f_m rho^m = hat_m (s/rho)^{|m|} for m < 0 (inner circle, where the
// near-unit rescale keeps the roundoff from being amplified).
std::vector<cdouble> laurent_coefficients(const Fn& f, double s, int nodes) {
    std::vector<cdouble> samples(nodes);
    for (int j = 0; j < nodes; ++j) samples[j] = f(std::polar(s, 2.0 * kPi * j / nodes));
    std::vector<cdouble> hat(nodes);
    for (int m = 0; m < nodes; ++m) {
        cdouble acc(0.0, 0.0);
        for (int j = 0; j < nodes; ++j)
            acc += samples[j] * std::polar(1.0, -2.0 * kPi * m * j / nodes);
        hat[m] = acc / static_cast<double>(nodes);
    }
    return hat;
}

std::vector<cdouble> coefficient_vector_at(const Fn& f, const Annulus& a, int nodes,
                                           double delta) {
    const double s_out = 1.0 - delta;
    const double s_in = a.rho + delta;
    auto f_out = laurent_coefficients(f, s_out, nodes);
    auto f_in = laurent_coefficients(f, s_in, nodes);
    std::vector<cdouble> coeff(nodes, cdouble(0.0, 0.0));
    for (int m = 0; m < nodes / 2; ++m) coeff[m] = f_out[m] * std::pow(s_out, -m);
    for (int m = 1; m < nodes / 2; ++m) {
        // frequency -m lives in DFT bin nodes-m; the near-unit rescale
        // (s_in/rho)^m keeps roundoff from being amplified
        coeff[nodes / 2 + m - 1] = f_in[nodes - m] * std::pow(s_in / a.rho, m);
    }
    return coeff;
}

} // namespace

cdouble apply_restriction_operator(const Geometry& g, const Fn& f, cdouble zeta, int nodes) {
    Circle c = data_circle(g);
    const double w = 2.0 * kPi * c.radius / nodes;
    cdouble acc(0.0, 0.0);
    for (int j = 0; j < nodes; ++j) {
        cdouble tau = c.center + std::polar(c.radius, 2.0 * kPi * j / nodes);
        acc += kernel(g, zeta, tau) * f(tau) * w;
    }
    return acc;
}

std::vector<cdouble> annulus_coefficient_vector(const Fn& f, const Annulus& a, int nodes,
                                                double delta) {
    auto c1 = coefficient_vector_at(f, a, nodes, delta);
    auto c2 = coefficient_vector_at(f, a, nodes, delta / 2.0);
    for (int i = 0; i < nodes; ++i) c2[i] = 2.0 * c2[i] - c1[i]; // Richardson in delta
    return c2;
}

cdouble inner_product_annulus(const Fn& f, const Fn& g, const Annulus& a, int nodes,
                              double delta) {
    auto cf = annulus_coefficient_vector(f, a, nodes, delta);
    auto cg = annulus_coefficient_vector(g, a, nodes, delta);
    cdouble total(0.0, 0.0);
    for (int i = 0; i < nodes; ++i) total += cf[i] * std::conj(cg[i]);
    return total;
}

cdouble inner_product_halfplane(const Fn& f, const Fn& g, int nodes) {
    cdouble acc(0.0, 0.0);
    for (int j = 0; j < nodes; ++j) {
        double theta = -0.5 * kPi + kPi * (j + 0.5) / nodes;
        double x = std::tan(theta);
        double sec2 = 1.0 + x * x;
        acc += f(cdouble(x, 0.0)) * std::conj(g(cdouble(x, 0.0))) * sec2;
    }
    return acc * (kPi / nodes);
}

} // namespace contstab::quad
