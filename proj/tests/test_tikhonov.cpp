#include <doctest.h>

#include <cmath>
#include <future>
#include <random>

#include "contstab/powerlaw.hpp"
#include "contstab/tikhonov.hpp"
#include "support/oracles.hpp"

using namespace contstab;

namespace {
constexpr double kPi = 3.14159265358979323846;
const Geometry kAnnulus{Annulus(0.25, 0.5)};
const cdouble kZ(0.75, 0.0);
const double kGammaZ = std::log(0.75) / std::log(0.5); // 0.41503749927884...

double band_ratio(const std::vector<double>& v) {
    double lo = v.front(), hi = v.front();
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi / lo;
}
} // namespace

TEST_CASE("solve matches the independent direct-summation oracle") {
    for (double eps : {1e-2, 1e-4, 1e-6}) {
        for (cdouble z : {kZ, cdouble(0.0, 0.35), std::polar(0.6, 2.0)}) {
            TikhonovSolution sol = solve(kAnnulus, z, eps);
            oracles::SeriesSums ref = oracles::annulus_sums(0.25, 0.5, z, eps, 4000);
            CHECK(sol.value_at_z == doctest::Approx(ref.u_z).epsilon(1e-11));
            CHECK(sol.norm_h * sol.norm_h == doctest::Approx(ref.norm_h_sq).epsilon(1e-11));
            CHECK(sol.norm_gamma * sol.norm_gamma ==
                  doctest::Approx(ref.norm_g_sq).epsilon(1e-11));
        }
    }
}

TEST_CASE("norm identity u(z) = ||u||_G^2 + eps^2 ||u||^2") {
    TikhonovSolution sol = solve(kAnnulus, kZ, 1e-4);
    double rhs = sol.norm_gamma * sol.norm_gamma + 1e-8 * sol.norm_h * sol.norm_h;
    CHECK(std::fabs(sol.value_at_z - rhs) / sol.value_at_z < 1e-10);
}

TEST_CASE("stored coefficients reproduce the solution value at z") {
    TikhonovSolution sol = solve(kAnnulus, kZ, 1e-4);
    cdouble acc(0.0, 0.0);
    for (size_t b = 0; b < sol.coeff.size(); ++b) {
        const auto& br = sol.basis.branches[b];
        for (size_t k = 0; k < sol.coeff[b].size(); ++k)
            acc += sol.coeff[b][k] * br.eval(static_cast<int>(k), sol.z_basis);
    }
    CHECK(acc.imag() == doctest::Approx(0.0));
    CHECK(acc.real() == doctest::Approx(sol.value_at_z).epsilon(1e-11));
}

TEST_CASE("u(z) follows eps^{2(gamma-1)} with two-sided constants") {
    std::vector<double> ratios;
    for (int i = 0; i <= 5; ++i) {
        double eps = std::pow(10.0, -3.0 - i);
        oracles::SeriesSums ref = oracles::annulus_sums(0.25, 0.5, kZ, eps, 4000);
        TikhonovSolution sol = solve(kAnnulus, kZ, eps);
        CHECK(sol.value_at_z == doctest::Approx(ref.u_z).epsilon(1e-10));
        ratios.push_back(sol.value_at_z * std::pow(eps, 2.0 - 2.0 * kGammaZ));
    }
    CHECK(band_ratio(ratios) < 10.0);
}

TEST_CASE("large-eps limit: eps^2 u(z) approaches the kernel diagonal") {
    cdouble pzz = kernel(kAnnulus, kZ, kZ);
    for (double eps : {10.0, 100.0}) {
        TikhonovSolution sol = solve(kAnnulus, kZ, eps);
        double ratio = eps * eps * sol.value_at_z / pzz.real();
        CHECK(std::fabs(ratio - 1.0) < 2.0 * kPi / (eps * eps)); // lambda_max/eps^2 envelope
    }
}

TEST_CASE("solution evaluator matches the oracle series pointwise") {
    double eps = 1e-3;
    TikhonovSolution sol = solve(kAnnulus, kZ, eps);
    for (cdouble zeta : {cdouble(0.3, 0.2), cdouble(-0.5, 0.4), cdouble(0.0, 0.82)}) {
        // direct sum of conj(e_n(z)) e_n(zeta) / (lambda_n + eps^2)
        cdouble ref(0.0, 0.0);
        for (int n = 0; n <= 600; ++n) {
            double lam = 2.0 * kPi * 0.5 * std::pow(0.25, n);
            ref += std::pow(std::conj(kZ), n) * std::pow(zeta, n) / (lam + eps * eps);
        }
        for (int m = 1; m <= 600; ++m) {
            double lam = kPi * std::pow(0.25, m); // 2 pi r (rho/r)^{2m}
            ref += std::pow(std::conj(0.25 / kZ), m) * std::pow(0.25 / zeta, m) /
                   (lam + eps * eps);
        }
        CHECK(std::abs(sol(zeta) - ref) / std::abs(ref) < 1e-10);
    }
}

TEST_CASE("solve works at the supported eps floor") {
    TikhonovSolution sol = solve(kAnnulus, kZ, 1e-12);
    CHECK(sol.value_at_z > 0.0);
    double rhs = sol.norm_gamma * sol.norm_gamma + 1e-24 * sol.norm_h * sol.norm_h;
    CHECK(std::fabs(sol.value_at_z - rhs) / sol.value_at_z < 1e-10);
    // the eps^{2(gamma-1)} law still holds against the oracle down here
    oracles::SeriesSums ref = oracles::annulus_sums(0.25, 0.5, kZ, 1e-12, 4000);
    CHECK(sol.value_at_z == doctest::Approx(ref.u_z).epsilon(1e-9));
}

TEST_CASE("solve rejects out-of-range inputs") {
    CHECK_THROWS_AS(solve(kAnnulus, kZ, 1e-13), ConfigError);            // below the eps floor
    CHECK_THROWS_AS(solve(kAnnulus, {0.5, 0.0}, 1e-3), NearDegenerateError);
    CHECK_THROWS_AS(solve(kAnnulus, {0.9999995, 0.0}, 1e-4), ResolutionError); // cap exceeded
    // the Mobius center is the one point where the solver basis vanishes
    CHECK_THROWS_AS(solve(Geometry{HalfPlaneGeometry(0.6)}, {0.0, 0.8}, 1e-3),
                    NearDegenerateError);
}

TEST_CASE("bound structure and the attaining function") {
    TikhonovSolution sol = solve(kAnnulus, kZ, 1e-4);
    StabilityBound b = bound(sol);
    double minval = std::min(1.0 / sol.norm_h, sol.eps / sol.norm_gamma);
    CHECK(b.bound_value == doctest::Approx(1.5 * sol.value_at_z * minval).epsilon(1e-15));
    CHECK((b.argmin_branch == BoundBranch::global_norm) ==
          (1.0 / sol.norm_h <= sol.eps / sol.norm_gamma));
    CHECK(b.gamma_closed_form == doctest::Approx(kGammaZ).epsilon(1e-14));
    // M_{eps,z}(z) = u(z) * min{...}: the bound exceeds it by exactly 3/2
    double m_at_z = sol.value_at_z * minval;
    CHECK(b.bound_value == doctest::Approx(1.5 * m_at_z));
    CHECK(b.bound_value >= m_at_z);
}

TEST_CASE("bound reports the first branch on an exact tie") {
    TikhonovSolution sol = solve(kAnnulus, kZ, 1e-4);
    sol.norm_h = 2.0;
    sol.norm_gamma = 2.0 * sol.eps; // forces 1/||u|| == eps/||u||_Gamma exactly
    StabilityBound b = bound(sol);
    CHECK(b.argmin_branch == BoundBranch::global_norm);
}

TEST_CASE("bound sweep recovers the annulus exponent") {
    SweepResult res = sweep(
        [&](double eps) { return bound(solve(kAnnulus, kZ, eps)).bound_value; }, 1e-8, 1e-3, 11);
    CHECK(std::fabs(res.fitted_slope - kGammaZ) < 0.02);
}

TEST_CASE("u(z) sweeps follow 2(gamma-1) for every geometry") {
    struct Case {
        Geometry g;
        cdouble z;
    };
    const std::vector<Case> cases = {{kAnnulus, kZ},
                                     {Geometry{HalfPlaneGeometry(0.6)}, cdouble(0.0, 3.0)},
                                     {Geometry{BernsteinEllipse(2.0)}, cdouble(0.0, 0.5)}};
    for (const auto& c : cases) {
        double gamma = exponent(c.g, c.z).value;
        SweepResult uz = sweep(
            [&](double eps) { return solve(c.g, c.z, eps).value_at_z; }, 1e-8, 1e-3, 11);
        CHECK(std::fabs(uz.fitted_slope - 2.0 * (gamma - 1.0)) < 0.03);
        SweepResult ng = sweep(
            [&](double eps) { return solve(c.g, c.z, eps).norm_gamma; }, 1e-8, 1e-3, 11);
        CHECK(std::fabs(ng.fitted_slope - (gamma - 1.0)) < 0.02);
    }
}

TEST_CASE("closed-form exponents at pinned points") {
    // |z| = sqrt(r): gamma = ln sqrt(r)/ln r = 1/2
    CHECK(exponent(kAnnulus, std::polar(std::sqrt(0.5), 1.0)).value ==
          doctest::Approx(0.5).epsilon(1e-14));
    // inner branch midpoint in log scale: |z| = sqrt(rho r)
    CHECK(exponent(kAnnulus, std::polar(std::sqrt(0.125), 2.0)).value ==
          doctest::Approx(0.5).epsilon(1e-14));

    // half-plane r = 3/5, z = 3i: m(3i) = 2.2/3.8 = 11/19
    ExponentResult hp = exponent(Geometry{HalfPlaneGeometry(0.6)}, {0.0, 3.0});
    CHECK(hp.value == doctest::Approx(std::log(11.0 / 19.0) / std::log(1.0 / 3.0)).epsilon(1e-14));
    CHECK(hp.value == doctest::Approx(0.497487).epsilon(1e-5));
    CHECK_FALSE(hp.stable_region);

    ExponentResult inside = exponent(Geometry{HalfPlaneGeometry(0.6)}, {0.0, 1.0});
    CHECK(inside.value == 1.0);
    CHECK(inside.stable_region);

    // ellipse R = 2, z = i/2: alpha = 1 - ln((1+sqrt5)/2)/ln 2
    ExponentResult el = exponent(Geometry{BernsteinEllipse(2.0)}, {0.0, 0.5});
    CHECK(el.value ==
          doctest::Approx(1.0 - std::log((1.0 + std::sqrt(5.0)) / 2.0) / std::log(2.0))
              .epsilon(1e-14));
    CHECK(el.value == doctest::Approx(0.305758).epsilon(1e-5));
}

TEST_CASE("exponent branches meet continuously at the data circle") {
    // both annulus branch formulas approach 1 at Gamma_r, and the half-plane
    // exponent approaches 1 at Gamma from outside (matching the stable value)
    double outer = exponent(kAnnulus, {0.500001, 0.0}).value;
    double inner = exponent(kAnnulus, {0.499999, 0.0}).value;
    CHECK(std::fabs(outer - 1.0) < 1e-4);
    CHECK(std::fabs(inner - 1.0) < 1e-4);
    CHECK(outer < 1.0);
    CHECK(inner < 1.0);

    Geometry h{HalfPlaneGeometry(0.6)};
    double just_outside = exponent(h, {0.0, 1.0 + 0.6 + 1e-6}).value;
    CHECK(std::fabs(just_outside - 1.0) < 1e-4);
    CHECK(just_outside < 1.0);
}

TEST_CASE("ellipse exponent equals the symmetric-annulus exponent exactly") {
    BernsteinEllipse e(2.0);
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> rad(1.02, 1.95), ang(0.0, 2.0 * kPi);
    for (int i = 0; i < 16; ++i) {
        cdouble z = joukowski(std::polar(rad(rng), ang(rng)));
        double alpha = exponent(Geometry{e}, z).value;
        double gamma_sym =
            std::log(std::abs(ellipse_point_to_annulus(z, e))) / std::log(e.annulus_view.r);
        CHECK(std::fabs(alpha - gamma_sym) < 1e-12);
    }
}

TEST_CASE("annulus maximizer attains the power law and stays feasible") {
    std::vector<double> value_ratios, gamma_ratios, sup_ratios;
    for (int i = 0; i <= 10; ++i) {
        double eps = std::pow(10.0, -8.0 + 0.5 * i);
        Maximizer m = maximizer(kAnnulus, kZ, eps);
        // against the independent oracle
        double ref = oracles::annulus_maximizer_abs_at_z(0.25, 0.5, kZ, eps, kGammaZ, 4000);
        CHECK(m.abs_at_z == doctest::Approx(ref).epsilon(1e-10));
        value_ratios.push_back(m.abs_at_z * std::pow(eps, -kGammaZ));
        gamma_ratios.push_back(m.norm_gamma / eps);
        double sup = 0.0;
        for (int j = 0; j < 256; ++j)
            sup = std::max(sup, std::abs(m.eval(std::polar(0.5, 2.0 * kPi * j / 256.0))));
        sup_ratios.push_back(sup / eps);
    }
    CHECK(band_ratio(value_ratios) < 10.0); // |M(z)| ~ eps^gamma two-sided
    CHECK(band_ratio(gamma_ratios) < 10.0); // ||M||_Gamma <~ eps
    CHECK(band_ratio(sup_ratios) < 10.0);   // sup on Gamma_r <~ eps
}

TEST_CASE("maximizer convergence region is enforced") {
    Maximizer m = maximizer(kAnnulus, kZ, 1e-4);
    CHECK_NOTHROW(m.eval({1.0, 0.0}));                  // outer closure circle converges
    CHECK_NOTHROW(m.eval({0.25, 0.0}));                 // inner closure circle converges
    CHECK_THROWS_AS(m.eval({1.4, 0.0}), DomainError);   // beyond 1/|z|
    CHECK_THROWS_AS(m.eval({0.05, 0.0}), DomainError);  // below rho^2/|z|
}

TEST_CASE("half-plane maximizer scales like eps^gamma at z") {
    Geometry g{HalfPlaneGeometry(0.6)};
    cdouble z(0.0, 3.0);
    double gamma = exponent(g, z).value;
    std::vector<double> ratios;
    for (int i = 0; i <= 5; ++i) {
        double eps = std::pow(10.0, -8.0 + i);
        Maximizer m = maximizer(g, z, eps);
        ratios.push_back(m.abs_at_z * std::pow(eps, -gamma));
        CHECK(m.gamma == doctest::Approx(gamma));
    }
    CHECK(band_ratio(ratios) < 10.0);
    Maximizer m = maximizer(g, z, 1e-4);
    CHECK_THROWS_AS(m.eval({0.3, -0.1}), DomainError);
}

TEST_CASE("ellipse maximizer is small on the data interval") {
    Geometry g{BernsteinEllipse(2.0)};
    cdouble z(0.0, 0.5);
    std::vector<double> sup_ratios;
    for (double eps : {1e-3, 1e-5, 1e-7}) {
        Maximizer m = maximizer(g, z, eps);
        double sup = 0.0;
        for (int j = 0; j < 256; ++j) {
            double x = -1.0 + 2.0 * (j + 0.5) / 256.0;
            sup = std::max(sup, std::abs(m.eval({x, 0.0})));
        }
        sup_ratios.push_back(sup / eps);
    }
    CHECK(band_ratio(sup_ratios) < 10.0);
}

TEST_CASE("symmetric-subspace solution is the projection of the full solution") {
    const Annulus a(0.25, 0.5);
    double eps = 1e-4;
    TikhonovSolution full = solve(kAnnulus, kZ, eps);
    TikhonovSolution sym = solve_with_basis(kAnnulus, basis_annulus_symmetric(a), kZ, eps);
    for (int j = 0; j < 16; ++j) {
        cdouble zeta = std::polar(0.62, 2.0 * kPi * j / 16.0 + 0.1);
        cdouble projected = 0.5 * (full(zeta) + full(a.rho / zeta));
        CHECK(std::abs(projected - sym(zeta)) / std::abs(sym(zeta)) < 1e-10);
    }
    // the symmetric maximizer uses the same closed form
    Maximizer m = maximizer_annulus_symmetric(a, kZ, eps);
    CHECK(m.gamma == doctest::Approx(kGammaZ));
    CHECK(m.abs_at_z > 0.0);
}

TEST_CASE("dual certificate: root quality and eps^2 scaling") {
    SpectralBasis basis = basis_annulus(std::get<Annulus>(kAnnulus));

    // Phi is monotone on a log grid and Phi(lambda_1) sits inside (0, Phi(inf))
    double phi_inf = phi_of_eta(basis, kZ, 1e60);
    double phi_l1 = phi_of_eta(basis, kZ, kPi / 4.0);
    CHECK(phi_l1 > 0.0);
    CHECK(phi_l1 < phi_inf);
    double prev = 0.0;
    for (int i = 0; i < 20; ++i) {
        double eta = std::pow(10.0, -12.0 + 13.0 * i / 19.0);
        double phi = phi_of_eta(basis, kZ, eta);
        CHECK(phi > prev);
        prev = phi;
    }

    std::vector<double> ratios;
    for (int i = 0; i <= 4; ++i) {
        double eps = std::pow(10.0, -3.0 - i);
        DualCertificate cert = dual_certificate(kAnnulus, kZ, eps);
        CHECK(std::fabs(cert.phi_at_eta_star - eps * eps) / (eps * eps) < 1e-8);
        CHECK(cert.eta_star > 0.0);
        // the independent oracle confirms the root location
        double oracle_phi = oracles::annulus_phi(0.25, 0.5, kZ, cert.eta_star, 4000);
        CHECK(std::fabs(oracle_phi - eps * eps) / (eps * eps) < 1e-7);
        ratios.push_back(cert.ratio_eta_eps2);
    }
    CHECK(band_ratio(ratios) < 10.0);

    // eps^2 above Phi(infinity) has no root
    CHECK_THROWS_AS(dual_certificate(kAnnulus, kZ, 10.0), NumericalError);
}

TEST_CASE("chebyshev certificate") {
    CHECK(chebyshev_certificate_degree(0.125, 2.0) == 3); // eps = R^-3 exactly
    CHECK(chebyshev_certificate_degree(0.2, 2.0) == 2);

    // |T_K| <= 1 on [-1,1], so |g| <= eps there
    for (double eps : {1e-2, 1e-5}) {
        for (int j = 0; j < 64; ++j) {
            double x = -1.0 + 2.0 * (j + 0.5) / 64.0;
            CHECK(std::abs(chebyshev_certificate({x, 0.0}, eps, 2.0)) <= eps * (1.0 + 1e-12));
        }
    }

    // log|g(z)| vs log eps recovers alpha(z) (remark-level agreement)
    cdouble z(0.0, 0.5);
    double alpha = exponent(Geometry{BernsteinEllipse(2.0)}, z).value;
    SweepResult res = sweep(
        [&](double eps) { return std::abs(chebyshev_certificate(z, eps, 2.0)); }, 1e-8, 1e-3,
        11);
    CHECK(std::fabs(res.fitted_slope - alpha) < 0.03);
}

TEST_CASE("coefficient-space norms equal direct curve quadrature") {
    // ||f||_Gamma^2 = sum lambda_n |a_n|^2 must reproduce the trapezoid of
    // |f|^2 over the data circle; this ties eigenvalues, eigenfunction
    // normalization and the norm bookkeeping together in one check.
    const int n_quad = 1024;
    auto curve_norm_sq = [&](const std::function<cdouble(cdouble)>& f, cdouble center,
                             double radius) {
        double acc = 0.0;
        for (int j = 0; j < n_quad; ++j) {
            cdouble tau = center + std::polar(radius, 2.0 * kPi * j / n_quad);
            acc += std::norm(f(tau)) * (2.0 * kPi * radius / n_quad);
        }
        return acc;
    };

    TikhonovSolution u = solve(kAnnulus, kZ, 1e-3);
    double q = curve_norm_sq([&](cdouble s) { return u(s); }, {0.0, 0.0}, 0.5);
    CHECK(u.norm_gamma * u.norm_gamma == doctest::Approx(q).epsilon(1e-12));

    Geometry h{HalfPlaneGeometry(0.6)};
    TikhonovSolution uh = solve(h, {0.0, 3.0}, 1e-3);
    q = curve_norm_sq([&](cdouble s) { return uh(s); }, {0.0, 1.0}, 0.6);
    CHECK(uh.norm_gamma * uh.norm_gamma == doctest::Approx(q).epsilon(1e-12));

    Maximizer m = maximizer(kAnnulus, kZ, 1e-4);
    q = curve_norm_sq(m.eval, {0.0, 0.0}, 0.5);
    CHECK(m.norm_gamma * m.norm_gamma == doctest::Approx(q).epsilon(1e-10));

    Maximizer mh = maximizer(h, {0.0, 3.0}, 1e-4);
    q = curve_norm_sq(mh.eval, {0.0, 1.0}, 0.6);
    CHECK(mh.norm_gamma * mh.norm_gamma == doctest::Approx(q).epsilon(1e-10));
}

TEST_CASE("concurrent solves share no mutable state") {
    std::vector<double> expected;
    for (int i = 0; i < 8; ++i)
        expected.push_back(solve(kAnnulus, kZ, std::pow(10.0, -2.0 - 0.5 * i)).value_at_z);
    std::vector<std::future<double>> futs;
    for (int i = 0; i < 8; ++i)
        futs.push_back(std::async(std::launch::async, [i] {
            return solve(kAnnulus, kZ, std::pow(10.0, -2.0 - 0.5 * i)).value_at_z;
        }));
    for (int i = 0; i < 8; ++i) CHECK(futs[i].get() == expected[i]);
}

TEST_CASE("norm identity holds for random configurations across geometries") {
    std::mt19937 rng(9001);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    for (int i = 0; i < 10; ++i) {
        double eps = std::pow(10.0, -6.0 + 4.0 * uni(rng));
        TikhonovSolution sol = [&] {
            switch (i % 3) {
                case 0: {
                    double rho = 0.05 + 0.3 * uni(rng);
                    double r = rho + 0.1 + (0.85 - rho - 0.1) * uni(rng);
                    double rz = r + 0.03 + (0.96 - r - 0.03) * uni(rng);
                    return solve(Geometry{Annulus(rho, r)}, std::polar(rz, 6.0 * uni(rng)), eps);
                }
                case 1: {
                    double r = 0.2 + 0.7 * uni(rng);
                    return solve(Geometry{HalfPlaneGeometry(r)},
                                 {2.0 * uni(rng) - 1.0, 1.0 + r + 0.2 + uni(rng)}, eps);
                }
                default: {
                    double R = 1.3 + 1.7 * uni(rng);
                    cdouble w = std::polar(1.05 + (0.9 * R - 1.05) * uni(rng), 6.0 * uni(rng));
                    return solve(Geometry{BernsteinEllipse(R)}, joukowski(w), eps);
                }
            }
        }();
        double rhs = sol.norm_gamma * sol.norm_gamma + eps * eps * sol.norm_h * sol.norm_h;
        CHECK(std::fabs(sol.value_at_z - rhs) / sol.value_at_z < 1e-10);
    }
}
