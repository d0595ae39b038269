#include "contstab/verify.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <sstream>

#include "contstab/nystrom.hpp"
#include "contstab/powerlaw.hpp"
#include "contstab/quadrature.hpp"
#include "contstab/spectral.hpp"
#include "contstab/tikhonov.hpp"

namespace contstab {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Reporter {
    std::vector<CheckResult> results;

    void record(const std::string& name, bool pass, const std::string& detail) {
        results.push_back({name, pass, detail});
    }

    template <typename Fn>
    void check(const std::string& name, Fn body) {
        try {
            body();
        } catch (const std::exception& e) {
            record(name, false, std::string("exception: ") + e.what());
        }
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// enumerate basis elements with |index| <= max_abs as (lambda, eval) pairs
struct BasisElement {
    long n;
    double lambda;
    std::function<cdouble(cdouble)> eval;
};

std::vector<BasisElement> enumerate_basis(const SpectralBasis& basis, long max_abs) {
    std::vector<BasisElement> out;
    for (const auto& br : basis.branches) {
        for (int k = 0;; ++k) {
            long n = br.index(k);
            if (std::labs(n) > max_abs) break;
            out.push_back({n, br.lambda(k), [&br, k](cdouble zeta) { return br.eval(k, zeta); }});
        }
    }
    return out;
}

void check_gram(Reporter& rep, const std::string& name, const Geometry& g,
                const SpectralBasis& basis) {
    rep.check(name, [&] {
        auto elems = enumerate_basis(basis, 8);
        double worst = 0.0;
        if (basis.kind == SpectralBasis::Kind::half_plane) {
            for (size_t i = 0; i < elems.size(); ++i)
                for (size_t j = i; j < elems.size(); ++j) {
                    cdouble ip = quad::inner_product_halfplane(elems[i].eval, elems[j].eval);
                    worst = std::max(worst, std::abs(ip - (i == j ? 1.0 : 0.0)));
                }
        } else {
            const Annulus& a = std::holds_alternative<Annulus>(g)
                                   ? std::get<Annulus>(g)
                                   : std::get<BernsteinEllipse>(g).annulus_view;
            std::vector<std::vector<cdouble>> coeffs;
            for (const auto& el : elems)
                coeffs.push_back(quad::annulus_coefficient_vector(el.eval, a));
            for (size_t i = 0; i < coeffs.size(); ++i)
                for (size_t j = i; j < coeffs.size(); ++j) {
                    cdouble ip(0.0, 0.0);
                    for (size_t m = 0; m < coeffs[i].size(); ++m)
                        ip += coeffs[i][m] * std::conj(coeffs[j][m]);
                    worst = std::max(worst, std::abs(ip - (i == j ? 1.0 : 0.0)));
                }
        }
        rep.record(name, worst < 1e-8, "max Gram deviation " + fmt(worst));
    });
}

void check_eigen_relation(Reporter& rep, const std::string& name, const Geometry& g,
                          const SpectralBasis& basis, const std::vector<cdouble>& test_points) {
    rep.check(name, [&] {
        auto elems = enumerate_basis(basis, 8);
        double worst = 0.0;
        for (const auto& el : elems) {
            for (cdouble zeta : test_points) {
                cdouble lhs = quad::apply_restriction_operator(g, el.eval, zeta);
                cdouble rhs = el.lambda * el.eval(zeta);
                worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
            }
        }
        rep.record(name, worst < 1e-8, "max relative eigen-relation error " + fmt(worst));
    });
}

double max_over_min(const std::vector<double>& v) {
    double lo = v.front(), hi = v.front();
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi / lo;
}

} // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opt) {
    Reporter rep;
    const Annulus annulus(0.25, 0.5);
    const Geometry annulus_g{annulus};
    const HalfPlaneGeometry halfplane(0.6);
    const Geometry halfplane_g{halfplane};
    const BernsteinEllipse ellipse(2.0);
    const Geometry ellipse_g{ellipse};
    const cdouble z_ann(0.75, 0.0);

    rep.check("geometry.joukowski_roundtrip", [&] {
        std::mt19937 rng(2001);
        std::uniform_real_distribution<double> rad(1.05, 1.95), ang(0.0, 2.0 * kPi);
        double worst = 0.0, worst_formula = 0.0;
        for (int i = 0; i < 64; ++i) {
            cdouble w = std::polar(rad(rng), ang(rng));
            cdouble z = joukowski(w);
            cdouble back = inverse_joukowski(z, 2.0);
            worst = std::max(worst, std::abs(back - w) / std::abs(w));
            worst_formula = std::max(worst_formula,
                                     std::abs(inverse_joukowski_radical(z) - w) / std::abs(w));
        }
        rep.record("geometry.joukowski_roundtrip", worst < 1e-12 && worst_formula < 1e-10,
                   "round-trip rel err " + fmt(worst) + ", radical-form rel err " +
                       fmt(worst_formula));
    });

    rep.check("geometry.mobius_circle", [&] {
        double worst = 0.0;
        for (int j = 0; j < 64; ++j) {
            cdouble zeta = cdouble(0.0, 1.0) + std::polar(halfplane.r, 2.0 * kPi * j / 64.0);
            worst = std::max(worst, std::fabs(std::abs(mobius(zeta, halfplane)) - halfplane.rho));
        }
        rep.record("geometry.mobius_circle", worst < 1e-12,
                   "max | |m| - rho | = " + fmt(worst) + " over 64 samples");
    });

    check_gram(rep, "spectral.gram_annulus", annulus_g, basis_annulus(annulus));
    check_gram(rep, "spectral.gram_halfplane", halfplane_g, basis_halfplane(halfplane));
    check_gram(rep, "spectral.gram_annulus_symmetric", annulus_g, basis_annulus_symmetric(annulus));

    {
        std::vector<cdouble> pts_ann;
        for (int i = 0; i < 8; ++i) pts_ann.push_back(std::polar(0.3 + 0.08 * i, 0.7 * i));
        check_eigen_relation(rep, "spectral.eigen_relation_annulus", annulus_g,
                             basis_annulus(annulus), pts_ann);
        check_eigen_relation(rep, "spectral.eigen_relation_annulus_symmetric", annulus_g,
                             basis_annulus_symmetric(annulus), pts_ann);
        // outside the data circle: inside it lambda_n e_n(zeta) collapses and
        // the relative comparison is dominated by quadrature roundoff
        std::vector<cdouble> pts_hp = {{-2.0, 0.3}, {-1.3, 0.5}, {-0.9, 1.8}, {0.2, 2.2},
                                       {0.9, 1.4},  {1.5, 0.7},  {2.2, 1.1},  {0.1, 0.25}};
        check_eigen_relation(rep, "spectral.eigen_relation_halfplane", halfplane_g,
                             basis_halfplane(halfplane), pts_hp);
    }

    rep.check("spectral.commutation", [&] {
        std::mt19937 rng(4242);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        double worst = 0.0;
        for (int t = 0; t < 8; ++t) {
            std::vector<cdouble> c(13);
            for (auto& x : c) x = cdouble(coef(rng), coef(rng));
            auto f = [c](cdouble zeta) {
                cdouble acc(0.0, 0.0);
                for (int n = -6; n <= 6; ++n) acc += c[n + 6] * cpow_int(zeta, n);
                return acc;
            };
            auto proj_f = project_symmetric(f, annulus);
            auto k_f = [&](cdouble zeta) {
                return quad::apply_restriction_operator(annulus_g, f, zeta);
            };
            for (int j = 0; j < 32; ++j) {
                cdouble zeta = std::polar(0.7, 2.0 * kPi * j / 32.0 + 0.1);
                cdouble lhs = 0.5 * (k_f(zeta) + k_f(annulus.rho / zeta)); // P_L K f
                cdouble rhs = quad::apply_restriction_operator(annulus_g, proj_f, zeta);
                worst = std::max(worst, std::abs(lhs - rhs));
            }
        }
        rep.record("spectral.commutation", worst < 1e-8,
                   "max |P_L K f - K P_L f| = " + fmt(worst) + " over 8 test functions");
    });

    rep.check("spectral.kernel_series", [&] {
        auto elems = enumerate_basis(basis_annulus(annulus), 200);
        double worst = 0.0;
        for (double rz : {0.4, 0.65, 0.9}) {
            for (double rt : {0.4, 0.65, 0.9}) {
                cdouble zeta = std::polar(rz, 0.9), tau = std::polar(rt, 2.3);
                cdouble series(0.0, 0.0);
                for (const auto& el : elems) series += std::conj(el.eval(tau)) * el.eval(zeta);
                worst = std::max(worst, std::abs(series - kernel_annulus(zeta, tau, annulus)));
            }
        }
        rep.record("spectral.kernel_series", worst < 1e-8,
                   "max |sum_{|n|<=200} - p| = " + fmt(worst));
    });

    rep.check("tikhonov.norm_identity", [&] {
        std::mt19937 rng(777);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            double eps = std::pow(10.0, -6.0 + 4.0 * uni(rng));
            TikhonovSolution sol = [&]() {
                switch (i % 3) {
                    case 0: {
                        double rho = 0.05 + 0.3 * uni(rng);
                        double r = rho + 0.1 + (0.85 - rho - 0.1) * uni(rng);
                        double rz = rho + 0.02 + (0.96 - rho - 0.04) * uni(rng);
                        if (std::fabs(rz - r) < 0.02) rz = std::min(0.96, r + 0.05);
                        return solve(Geometry{Annulus(rho, r)}, std::polar(rz, 6.28 * uni(rng)),
                                     eps);
                    }
                    case 1: {
                        double r = 0.2 + 0.7 * uni(rng);
                        cdouble z(2.0 * uni(rng) - 1.0, 0.1 + 2.5 * uni(rng));
                        if (std::fabs(std::abs(z - cdouble(0, 1)) - r) < 0.02) z += cdouble(0, 0.05);
                        return solve(Geometry{HalfPlaneGeometry(r)}, z, eps);
                    }
                    default: {
                        double R = 1.3 + 1.7 * uni(rng);
                        cdouble w = std::polar(1.05 + (R * 0.93 - 1.05) * uni(rng),
                                               6.28 * uni(rng));
                        return solve(Geometry{BernsteinEllipse(R)}, joukowski(w), eps);
                    }
                }
            }();
            double lhs = sol.value_at_z;
            double rhs = sol.norm_gamma * sol.norm_gamma + eps * eps * sol.norm_h * sol.norm_h;
            worst = std::max(worst, std::fabs(lhs - rhs) / lhs);
        }
        rep.record("tikhonov.norm_identity", worst < 1e-10,
                   "max rel deviation of u(z) = ||u||_G^2 + eps^2 ||u||^2: " + fmt(worst));
    });

    rep.check("tikhonov.exponent_crosscheck", [&] {
        std::mt19937 rng(991);
        std::uniform_real_distribution<double> rad(1.02, 1.95), ang(0.0, 2.0 * kPi);
        double worst = 0.0;
        for (int i = 0; i < 16; ++i) {
            cdouble z = joukowski(std::polar(rad(rng), ang(rng)));
            double alpha = exponent(ellipse_g, z).value;
            cdouble za = ellipse_point_to_annulus(z, ellipse);
            double gamma_sym = std::log(std::abs(za)) / std::log(ellipse.annulus_view.r);
            worst = std::max(worst, std::fabs(alpha - gamma_sym));
        }
        rep.record("tikhonov.exponent_crosscheck", worst < 1e-12,
                   "max |alpha(z) - gamma(z_a)| = " + fmt(worst) + " over 16 points");
    });

    rep.check("tikhonov.phi_monotone", [&] {
        SpectralBasis basis = basis_annulus(annulus);
        double prev = -1.0;
        bool monotone = true;
        for (int i = 0; i < 20; ++i) {
            double eta = std::pow(10.0, -10.0 + 10.0 * i / 19.0);
            double phi = phi_of_eta(basis, z_ann, eta);
            if (phi <= prev) monotone = false;
            prev = phi;
        }
        rep.record("tikhonov.phi_monotone", monotone,
                   "Phi increasing across 20-point log grid in [1e-10, 1]");
    });

    rep.check("tikhonov.maximizer_feasibility", [&] {
        std::vector<double> ratio_gamma, ratio_h, sup_boundary;
        for (int i = 0; i < 11; ++i) {
            double eps = std::pow(10.0, -8.0 + 5.0 * i / 10.0);
            Maximizer m = maximizer(annulus_g, z_ann, eps);
            ratio_gamma.push_back(m.norm_gamma / eps);
            ratio_h.push_back(m.norm_h);
            double sup = 0.0;
            for (int j = 0; j < 64; ++j) {
                sup = std::max(sup, std::abs(m.eval(std::polar(1.0, 2.0 * kPi * j / 64.0))));
                sup = std::max(sup,
                               std::abs(m.eval(std::polar(annulus.rho, 2.0 * kPi * j / 64.0))));
            }
            sup_boundary.push_back(sup);
        }
        double env_g = max_over_min(ratio_gamma), env_h = max_over_min(ratio_h);
        rep.record("tikhonov.maximizer_feasibility", env_g < 10.0 && env_h < 10.0,
                   "||M||_G/eps envelope " + fmt(env_g) + ", ||M|| envelope " + fmt(env_h) +
                       ", observed sup |M| on the closure boundary in [" +
                       fmt(*std::min_element(sup_boundary.begin(), sup_boundary.end())) + ", " +
                       fmt(*std::max_element(sup_boundary.begin(), sup_boundary.end())) + "]");
    });

    rep.check("tikhonov.projection_solution", [&] {
        double eps = 1e-4;
        TikhonovSolution full = solve(annulus_g, z_ann, eps);
        TikhonovSolution sym =
            solve_with_basis(annulus_g, basis_annulus_symmetric(annulus), z_ann, eps);
        double worst = 0.0;
        for (int j = 0; j < 16; ++j) {
            cdouble zeta = std::polar(0.6, 2.0 * kPi * j / 16.0 + 0.05);
            cdouble projected = 0.5 * (full(zeta) + full(annulus.rho / zeta));
            cdouble direct = sym(zeta);
            worst = std::max(worst, std::abs(projected - direct) / std::abs(direct));
        }
        rep.record("tikhonov.projection_solution", worst < 1e-10,
                   "max rel |P_L u - u_L| = " + fmt(worst) + " at 16 points");
    });

    rep.check("tikhonov.annulus_sweep_slope", [&] {
        double target = std::isnan(opt.forced_slope_target)
                            ? exponent(annulus_g, z_ann).value
                            : opt.forced_slope_target;
        SweepResult bound_sweep = sweep(
            [&](double eps) { return bound(solve(annulus_g, z_ann, eps)).bound_value; }, 1e-8,
            1e-3, 11, opt.threads);
        SweepResult max_sweep = sweep(
            [&](double eps) { return maximizer(annulus_g, z_ann, eps).abs_at_z; }, 1e-8, 1e-3,
            11, opt.threads);
        double dev = std::max(std::fabs(bound_sweep.fitted_slope - target),
                              std::fabs(max_sweep.fitted_slope - target));
        rep.record("tikhonov.annulus_sweep_slope", dev < 0.02,
                   "bound slope " + fmt(bound_sweep.fitted_slope) + ", |M(z)| slope " +
                       fmt(max_sweep.fitted_slope) + ", target " + fmt(target));
    });

    rep.check("tikhonov.dual_certificate", [&] {
        std::vector<double> ratios;
        double worst_root = 0.0;
        for (int i = 0; i < 9; ++i) {
            double eps = std::pow(10.0, -7.0 + 4.0 * i / 8.0);
            DualCertificate cert = dual_certificate(annulus_g, z_ann, eps);
            ratios.push_back(cert.ratio_eta_eps2);
            worst_root = std::max(worst_root,
                                  std::fabs(cert.phi_at_eta_star - eps * eps) / (eps * eps));
        }
        double env = max_over_min(ratios);
        rep.record("tikhonov.dual_certificate", env < 10.0 && worst_root < 1e-8,
                   "eta*/eps^2 envelope " + fmt(env) + ", max root residual " + fmt(worst_root));
    });

    rep.check("nystrom.hermitian", [&] {
        NystromOperator op = nystrom_build(annulus_g, opt.nodes);
        double worst = 0.0;
        const int m = op.node_count;
        for (int j = 0; j < m; ++j)
            for (int k = 0; k < m; ++k)
                worst = std::max(worst, std::abs(op.matrix_s[j * m + k] -
                                                 std::conj(op.matrix_s[k * m + j])));
        rep.record("nystrom.hermitian", worst < 1e-13, "max |S - S^H| = " + fmt(worst));
    });

    rep.check("nystrom.spectrum_annulus", [&] {
        NystromOperator op = nystrom_build(annulus_g, opt.nodes);
        NumericalSpectrum spec = nystrom_spectrum(op);
        auto analytic = analytic_spectrum(annulus_g, 15);
        double worst = 0.0;
        for (int i = 0; i < 15; ++i)
            worst = std::max(worst,
                             std::fabs(spec.eigenvalues[i] - analytic[i]) / analytic[i]);
        double top_err = std::fabs(spec.eigenvalues[0] - kPi) / kPi;
        bool positive = spec.eigenvalues[spec.valid_count - 1] > 0.0;
        rep.record("nystrom.spectrum_annulus",
                   worst < 1e-8 && top_err < 1e-10 && positive,
                   "top-15 rel err " + fmt(worst) + ", mu_1 vs pi rel err " + fmt(top_err));
    });

    rep.check("nystrom.spectrum_halfplane", [&] {
        NystromOperator op = nystrom_build(halfplane_g, opt.nodes);
        NumericalSpectrum spec = nystrom_spectrum(op);
        auto analytic = analytic_spectrum(halfplane_g, 15);
        double worst = 0.0;
        for (int i = 0; i < 15; ++i)
            worst = std::max(worst,
                             std::fabs(spec.eigenvalues[i] - analytic[i]) / analytic[i]);
        rep.record("nystrom.spectrum_halfplane", worst < 1e-8, "top-15 rel err " + fmt(worst));
    });

    rep.check("nystrom.parfenov", [&] {
        NystromOperator op = nystrom_build(Geometry{Annulus(1e-8, 0.5)}, opt.nodes);
        ParfenovFit fit = parfenov_rate(op);
        bool ratio_ok = std::fabs(fit.ratio_min - 0.25) < 1e-6 &&
                        std::fabs(fit.ratio_max - 0.25) < 1e-6;
        bool pref_ok = std::fabs(fit.prefactor_min - 2.0 * kPi) < 1e-6 &&
                       std::fabs(fit.prefactor_max - 2.0 * kPi) < 1e-6;
        bool fit_ok = fit.r_squared > 0.999999 && std::fabs(fit.rho_hat - 0.5) < 1e-6;
        rep.record("nystrom.parfenov", ratio_ok && pref_ok && fit_ok,
                   "rho_hat " + fmt(fit.rho_hat) + ", ratios [" + fmt(fit.ratio_min) + ", " +
                       fmt(fit.ratio_max) + "], prefactor [" + fmt(fit.prefactor_min) + ", " +
                       fmt(fit.prefactor_max) + "] over " + std::to_string(fit.used) +
                       " eigenvalues");
    });

    rep.check("nystrom.solve_agreement", [&] {
        double eps = 1e-3;
        NystromOperator op = nystrom_build(annulus_g, opt.nodes);
        NystromSolution numeric = nystrom_solve(op, z_ann, eps);
        TikhonovSolution spectral = solve(annulus_g, z_ann, eps);
        double worst = 0.0;
        for (int j = 0; j < 16; ++j) {
            cdouble zeta = std::polar(j < 8 ? 0.62 : 0.41, 2.0 * kPi * (j % 8) / 8.0 + 0.13);
            cdouble a = numeric.extend(zeta), b = spectral(zeta);
            worst = std::max(worst, std::abs(a - b) / std::abs(b));
        }
        double sg = spectral.norm_gamma * spectral.norm_gamma;
        double norm_dev = std::fabs(numeric.grid_norm_gamma_sq - sg) / sg;
        rep.record("nystrom.solve_agreement",
                   worst < 1e-6 && numeric.residual < 1e-10 && norm_dev < 1e-6,
                   "max pointwise rel err " + fmt(worst) + ", residual " + fmt(numeric.residual) +
                       ", grid-norm rel dev " + fmt(norm_dev));
    });

    rep.check("powerlaw.fit_exact", [&] {
        SweepResult res = sweep([](double eps) { return std::sqrt(eps); }, 1e-8, 1e-3, 11);
        bool ok = std::fabs(res.fitted_slope - 0.5) < 1e-12 && res.r_squared > 1.0 - 1e-12;
        rep.record("powerlaw.fit_exact", ok,
                   "slope " + fmt(res.fitted_slope) + " on an exact eps^0.5 law");
    });

    rep.check("powerlaw.switchover_sums", [&] {
        double a = opt.sum_scan_alpha, b = opt.sum_scan_beta;
        SwitchoverSumReport harness = switchover_sum_scan(a, b, 1e-10, 1e-2, 25);
        double t1 = b / a - 1.0, t2 = b / a - 2.0;
        bool ok = std::fabs(harness.slope_linear - t1) < 0.02 &&
                  std::fabs(harness.slope_squared - t2) < 0.02;
        bool j_monotone = true;
        for (size_t i = 1; i < harness.switchover_index.size(); ++i)
            if (harness.switchover_index[i] < harness.switchover_index[i - 1]) j_monotone = false;
        rep.record("powerlaw.switchover_sums", ok && j_monotone,
                   "slopes " + fmt(harness.slope_linear) + " / " + fmt(harness.slope_squared) +
                       " vs " + fmt(t1) + " / " + fmt(t2));
    });

    return rep.results;
}

} // namespace contstab
