#include "contstab/nystrom.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "contstab/ddreal.hpp"
#include "contstab/eigensolver.hpp"
#include "contstab/powerlaw.hpp"
#include "contstab/spectral.hpp"

namespace contstab {

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

// dd kernel evaluations mirror kernel_annulus / kernel_halfplane exactly
Cx<DD> kernel_dd(const Geometry& g, Cx<DD> zeta, Cx<DD> tau) {
    if (std::holds_alternative<HalfPlaneGeometry>(g)) {
        Cx<DD> diff = zeta - conj(tau);
        Cx<DD> i_unit{DD(0.0), DD(1.0)};
        return i_unit / (Cx<DD>{dd_two_pi, DD(0.0)} * diff);
    }
    double rho = std::holds_alternative<Annulus>(g)
                     ? std::get<Annulus>(g).rho
                     : std::get<BernsteinEllipse>(g).annulus_view.rho;
    Cx<DD> prod = zeta * conj(tau);
    DD rho2 = DD(rho) * DD(rho);
    Cx<DD> one{DD(1.0), DD(0.0)};
    return one / (one - prod) + Cx<DD>{rho2, DD(0.0)} / (prod - Cx<DD>{rho2, DD(0.0)});
}

struct DDGrid {
    std::vector<Cx<DD>> nodes;
    DD weight;
};

DDGrid dd_grid(const Geometry& g, int m) {
    Circle c = data_circle(g);
    DDGrid grid;
    grid.nodes.resize(m);
    Cx<DD> center{DD(c.center.real()), DD(c.center.imag())};
    DD radius(c.radius);
    for (int j = 0; j < m; ++j) {
        DD theta = dd_two_pi * DD(static_cast<double>(j)) / DD(static_cast<double>(m));
        DD s, co;
        dd_sincos(theta, s, co);
        grid.nodes[j] = center + Cx<DD>{radius * co, radius * s};
    }
    grid.weight = dd_two_pi * radius / DD(static_cast<double>(m));
    return grid;
}

void lu_solve_inplace(std::vector<cdouble>& a, int n, std::vector<cdouble>& b) {
    std::vector<int> piv(n);
    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(a[k * n + k]);
        for (int i = k + 1; i < n; ++i) {
            double v = std::abs(a[i * n + k]);
            if (v > best) { best = v; p = i; }
        }
        if (best == 0.0) throw NumericalError("nystrom_solve: singular grid system");
        piv[k] = p;
        if (p != k)
            for (int j = 0; j < n; ++j) std::swap(a[k * n + j], a[p * n + j]);
        cdouble inv = 1.0 / a[k * n + k];
        for (int i = k + 1; i < n; ++i) {
            cdouble f = a[i * n + k] * inv;
            a[i * n + k] = f;
            for (int j = k + 1; j < n; ++j) a[i * n + j] -= f * a[k * n + j];
        }
    }
    // interchanges first (multipliers are stored in final row positions)
    for (int k = 0; k < n; ++k)
        if (piv[k] != k) std::swap(b[k], b[piv[k]]);
    for (int k = 0; k < n; ++k)
        for (int i = k + 1; i < n; ++i) b[i] -= a[i * n + k] * b[k];
    for (int k = n - 1; k >= 0; --k) {
        for (int j = k + 1; j < n; ++j) b[k] -= a[k * n + j] * b[j];
        b[k] /= a[k * n + k];
    }
}

} // namespace

NystromOperator nystrom_build(const Geometry& g, int node_count) {
    if (node_count < 16 || node_count % 2 != 0)
        throw ConfigError("nystrom_build: node count must be even and >= 16");
    Circle c = data_circle(g);
    NystromOperator op{g, node_count, c.center, c.radius, {}, {}, {}, {}};

    const int m = node_count;
    op.nodes.resize(m);
    op.weights.assign(m, 2.0 * kPi * c.radius / m);
    for (int j = 0; j < m; ++j)
        op.nodes[j] = c.center + std::polar(c.radius, 2.0 * kPi * j / m);

    op.matrix_a.resize(static_cast<size_t>(m) * m);
    op.matrix_s.resize(static_cast<size_t>(m) * m);
    for (int j = 0; j < m; ++j) {
        double sj = std::sqrt(op.weights[j]);
        for (int k = 0; k < m; ++k) {
            cdouble p = kernel(g, op.nodes[j], op.nodes[k]);
            op.matrix_a[j * m + k] = p * op.weights[k];
            op.matrix_s[j * m + k] = p * sj * std::sqrt(op.weights[k]);
        }
    }
    return op;
}

NumericalSpectrum nystrom_spectrum(const NystromOperator& op) {
    const int m = op.node_count;
    DDGrid grid = dd_grid(op.geometry, m);
    DD sw = sqrt(grid.weight);
    std::vector<Cx<DD>> s(static_cast<size_t>(m) * m);
    for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
            s[j * m + k] = kernel_dd(op.geometry, grid.nodes[j], grid.nodes[k]) * (sw * sw);

    std::vector<DD> evals = hermitian_eigenvalues<DD>(std::move(s), m);

    NumericalSpectrum spec;
    spec.eigenvalues.resize(m);
    for (int i = 0; i < m; ++i) spec.eigenvalues[i] = to_double(evals[m - 1 - i]);

    double mu1 = spec.eigenvalues.empty() ? 0.0 : spec.eigenvalues.front();
    spec.noise_floor = 1e3 * std::numeric_limits<double>::epsilon() * mu1;
    spec.valid_count = 0;
    while (spec.valid_count < m && spec.eigenvalues[spec.valid_count] > spec.noise_floor)
        ++spec.valid_count;

    spec.decay_slope = 0.0;
    spec.decay_r_squared = 0.0;
    if (spec.valid_count >= 2) {
        std::vector<double> idx(spec.valid_count), lmu(spec.valid_count);
        for (int i = 0; i < spec.valid_count; ++i) {
            idx[i] = i;
            lmu[i] = std::log(spec.eigenvalues[i]);
        }
        LogLogFit f = fit_loglog(idx, lmu);
        spec.decay_slope = f.slope;
        spec.decay_r_squared = f.r_squared;
    }
    return spec;
}

ParfenovFit parfenov_rate(const NystromOperator& op) {
    const Annulus* a = std::get_if<Annulus>(&op.geometry);
    if (!a || a->rho > 1e-8)
        throw ConfigError("parfenov_rate: requires a disk-limit annulus (rho <= 1e-8)");

    NumericalSpectrum spec = nystrom_spectrum(op);
    if (spec.valid_count < 5)
        throw ResolutionError("parfenov_rate: fewer than 5 eigenvalues above the noise floor");

    ParfenovFit fit;
    fit.used = spec.valid_count;
    std::vector<double> idx(spec.valid_count), lmu(spec.valid_count);
    fit.ratio_min = std::numeric_limits<double>::infinity();
    fit.ratio_max = 0.0;
    fit.prefactor_min = std::numeric_limits<double>::infinity();
    fit.prefactor_max = 0.0;
    const double r = a->r;
    for (int n = 0; n < spec.valid_count; ++n) {
        idx[n] = n;
        lmu[n] = std::log(spec.eigenvalues[n]);
        double pref = spec.eigenvalues[n] / std::pow(r, 2.0 * n + 1.0);
        fit.prefactor_min = std::min(fit.prefactor_min, pref);
        fit.prefactor_max = std::max(fit.prefactor_max, pref);
        if (n + 1 < spec.valid_count) {
            double ratio = spec.eigenvalues[n + 1] / spec.eigenvalues[n];
            fit.ratio_min = std::min(fit.ratio_min, ratio);
            fit.ratio_max = std::max(fit.ratio_max, ratio);
        }
    }
    LogLogFit lf = fit_loglog(idx, lmu);
    fit.slope = lf.slope;
    fit.r_squared = lf.r_squared;
    fit.rho_hat = std::exp(lf.slope / 2.0);
    return fit;
}

NystromSolution nystrom_solve(const NystromOperator& op, cdouble z, double eps) {
    if (!(eps >= 1e-6))
        throw NumericalError(
            "nystrom_solve: eps below the conditioning floor 1e-6 "
            "(cond ~ lambda_max/eps^2 would exceed ~1e13); use the spectral solve instead");
    validate_point(op.geometry, z);
    cdouble z_grid = z;
    if (const auto* e = std::get_if<BernsteinEllipse>(&op.geometry))
        z_grid = ellipse_point_to_annulus(z, *e);

    const int m = op.node_count;
    std::vector<cdouble> sys = op.matrix_a;
    for (int j = 0; j < m; ++j) sys[j * m + j] += eps * eps;
    std::vector<cdouble> rhs(m);
    for (int j = 0; j < m; ++j) rhs[j] = kernel(op.geometry, op.nodes[j], z_grid);

    std::vector<cdouble> u = rhs;
    std::vector<cdouble> lu = sys;
    lu_solve_inplace(lu, m, u);

    NystromSolution sol;
    sol.values = u;
    double res2 = 0.0;
    for (int j = 0; j < m; ++j) {
        cdouble acc(0.0, 0.0);
        for (int k = 0; k < m; ++k) acc += sys[j * m + k] * u[k];
        res2 += std::norm(acc - rhs[j]);
    }
    sol.residual = std::sqrt(res2);
    sol.grid_norm_gamma_sq = 0.0;
    for (int j = 0; j < m; ++j) sol.grid_norm_gamma_sq += op.weights[j] * std::norm(u[j]);

    const Geometry geom = op.geometry;
    const std::vector<cdouble> nodes = op.nodes;
    const std::vector<double> weights = op.weights;
    const double eps2 = eps * eps;
    sol.extend = [geom, nodes, weights, u, z_grid, eps2](cdouble zeta) {
        cdouble ku(0.0, 0.0);
        for (size_t k = 0; k < nodes.size(); ++k)
            ku += weights[k] * kernel(geom, zeta, nodes[k]) * u[k];
        return (kernel(geom, zeta, z_grid) - ku) / eps2;
    };
    return sol;
}

} // namespace contstab
