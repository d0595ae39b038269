#include "contstab/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace contstab {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kPoleTol = 1e-14;
} // namespace

cdouble cpow_int(cdouble z, long n) {
    if (n == 0) return cdouble(1.0, 0.0);
    bool invert = n < 0;
    unsigned long m = invert ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    cdouble base = z, acc(1.0, 0.0);
    while (m) {
        if (m & 1UL) acc *= base;
        base *= base;
        m >>= 1UL;
    }
    return invert ? 1.0 / acc : acc;
}

cdouble kernel_annulus(cdouble zeta, cdouble tau, const Annulus& a) {
    cdouble prod = zeta * std::conj(tau);
    double rho2 = a.rho * a.rho;
    if (std::abs(prod - 1.0) < kPoleTol)
        throw PoleError("kernel_annulus: zeta*conj(tau) at the pole 1");
    if (std::abs(prod - rho2) < kPoleTol)
        throw PoleError("kernel_annulus: zeta*conj(tau) at the pole rho^2");
    return 1.0 / (1.0 - prod) + rho2 / (prod - rho2);
}

cdouble kernel_halfplane(cdouble zeta, cdouble tau) {
    cdouble diff = zeta - std::conj(tau);
    if (std::abs(diff) < kPoleTol)
        throw PoleError("kernel_halfplane: zeta = conj(tau)");
    return cdouble(0.0, 1.0) / (2.0 * kPi * diff);
}

cdouble kernel(const Geometry& g, cdouble zeta, cdouble tau) {
    if (const auto* a = std::get_if<Annulus>(&g)) return kernel_annulus(zeta, tau, *a);
    if (std::holds_alternative<HalfPlaneGeometry>(g)) return kernel_halfplane(zeta, tau);
    return kernel_annulus(zeta, tau, std::get<BernsteinEllipse>(g).annulus_view);
}

SpectralBasis basis_annulus(const Annulus& a) {
    const double rho = a.rho, r = a.r;
    SpectralBasis b;
    b.kind = SpectralBasis::Kind::annulus;
    b.lambda_max = 2.0 * kPi * r;

    SpectralBasis::Branch nonneg;
    nonneg.index = [](int k) { return static_cast<long>(k); };
    nonneg.lambda = [r](int k) { return 2.0 * kPi * r * std::pow(r * r, k); };
    nonneg.eval = [](int k, cdouble zeta) { return cpow_int(zeta, k); };

    SpectralBasis::Branch neg;
    neg.index = [](int k) { return -static_cast<long>(k) - 1; };
    neg.lambda = [r, rho](int k) {
        double q = (rho / r) * (rho / r);
        return 2.0 * kPi * r * std::pow(q, k + 1);
    };
    neg.eval = [rho](int k, cdouble zeta) { return cpow_int(rho / zeta, k + 1); };

    b.branches = {nonneg, neg};
    return b;
}

SpectralBasis basis_halfplane(const HalfPlaneGeometry& g) {
    const double r = g.r;
    const double root = std::sqrt(1.0 - r * r);
    const double lam0 = r / (1.0 + root);       // lambda_n = lam0 * rho^{2n}
    const double rho2 = g.rho * g.rho;
    const double amp = std::pow(1.0 - r * r, 0.25) / std::sqrt(kPi);
    const cdouble z0 = g.z0;

    SpectralBasis b;
    b.kind = SpectralBasis::Kind::half_plane;
    b.lambda_max = lam0 * rho2;

    SpectralBasis::Branch br;
    br.index = [](int k) { return static_cast<long>(k) + 1; };
    br.lambda = [lam0, rho2](int k) { return lam0 * std::pow(rho2, k + 1); };
    br.eval = [amp, z0](int k, cdouble zeta) {
        cdouble m = (zeta - z0) / (zeta + z0);
        return amp * cpow_int(m, k + 1) / (zeta + z0);
    };
    b.branches = {br};
    return b;
}

SpectralBasis basis_annulus_symmetric(const Annulus& a) {
    if (!a.is_symmetric())
        throw ConfigError("basis_annulus_symmetric: requires r^2 = rho (symmetric annulus)");
    const double rho = a.rho;
    const double sym_amp = 1.0 / std::sqrt(2.0);

    SpectralBasis b;
    b.kind = SpectralBasis::Kind::annulus_symmetric;
    b.lambda_max = 2.0 * kPi * std::sqrt(rho);

    SpectralBasis::Branch br;
    br.index = [](int k) { return static_cast<long>(k); };
    br.lambda = [rho](int k) { return 2.0 * kPi * std::sqrt(rho) * std::pow(rho, k); };
    br.eval = [rho, sym_amp](int k, cdouble zeta) {
        if (k == 0) return cdouble(1.0, 0.0);
        return sym_amp * (cpow_int(zeta, k) + cpow_int(rho / zeta, k));
    };
    b.branches = {br};
    return b;
}

SpectralBasis spectral_basis(const Geometry& g) {
    if (const auto* a = std::get_if<Annulus>(&g)) return basis_annulus(*a);
    if (const auto* h = std::get_if<HalfPlaneGeometry>(&g)) return basis_halfplane(*h);
    return basis_annulus_symmetric(std::get<BernsteinEllipse>(g).annulus_view);
}

std::function<cdouble(cdouble)> project_symmetric(std::function<cdouble(cdouble)> f,
                                                  const Annulus& a) {
    if (!a.is_symmetric())
        throw ConfigError("project_symmetric: requires r^2 = rho (symmetric annulus)");
    const double rho = a.rho;
    return [rho, f = std::move(f)](cdouble zeta) { return 0.5 * (f(zeta) + f(rho / zeta)); };
}

std::vector<double> analytic_spectrum(const Geometry& g, int count) {
    std::vector<double> vals;
    vals.reserve(2 * count + 2);
    if (std::holds_alternative<HalfPlaneGeometry>(g)) {
        const auto& h = std::get<HalfPlaneGeometry>(g);
        double lam0 = h.r / (1.0 + std::sqrt(1.0 - h.r * h.r));
        double q = h.rho * h.rho;
        double v = lam0;
        for (int k = 0; k < count; ++k, v *= q) vals.push_back(v); // includes k = 0
    } else {
        const Annulus& a = std::holds_alternative<Annulus>(g)
                               ? std::get<Annulus>(g)
                               : std::get<BernsteinEllipse>(g).annulus_view;
        double v = 2.0 * kPi * a.r;
        double qp = a.r * a.r;
        for (int k = 0; k <= count; ++k, v *= qp) vals.push_back(v);
        double qn = (a.rho / a.r) * (a.rho / a.r);
        v = 2.0 * kPi * a.r * qn;
        for (int k = 0; k < count; ++k, v *= qn) vals.push_back(v);
    }
    std::sort(vals.rbegin(), vals.rend());
    if (static_cast<int>(vals.size()) > count) vals.resize(count);
    return vals;
}

} // namespace contstab
