// Acceptance suite: runs every shipped criterion at its stated tolerance and
// prints one PASS/FAIL line per criterion.  Exit code = number of failures.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "contstab/nystrom.hpp"
#include "contstab/powerlaw.hpp"
#include "contstab/quadrature.hpp"
#include "contstab/spectral.hpp"
#include "contstab/tikhonov.hpp"

using namespace contstab;

namespace {

constexpr double kPi = 3.14159265358979323846;
int g_failures = 0;

void report(int id, const std::string& label, bool pass, const std::string& detail) {
    std::printf("%s criterion %2d (%s): %s\n", pass ? "PASS" : "FAIL", id, label.c_str(),
                detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

template <typename Fn>
void criterion(int id, const std::string& label, Fn body) {
    try {
        body();
    } catch (const std::exception& e) {
        report(id, label, false, std::string("exception: ") + e.what());
    }
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

double band_ratio(const std::vector<double>& v) {
    double lo = v.front(), hi = v.front();
    for (double x : v) {
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    return hi / lo;
}

struct Shell {
    int exit_code;
    std::string output;
};

Shell run_shell(const std::string& cmd) {
    FILE* pipe = popen(cmd.c_str(), "r");
    if (!pipe) return {-1, ""};
    std::string out;
    char buf[4096];
    size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, n);
    int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

const Geometry kAnnulus{Annulus(0.25, 0.5)};

} // namespace

int main() {
    criterion(1, "annulus exponent", [] {
        const double gamma_outer = std::log(0.75) / std::log(0.5);     // 0.41504
        const double gamma_inner = std::log(0.35 / 0.25) / std::log(2.0); // 0.48543
        double worst = 0.0;
        for (auto [zr, target] : {std::pair{0.75, gamma_outer}, std::pair{0.35, gamma_inner}}) {
            cdouble z(zr, 0.0);
            SweepResult sb = sweep(
                [&](double eps) { return bound(solve(kAnnulus, z, eps)).bound_value; }, 1e-8,
                1e-3, 11);
            SweepResult sm = sweep(
                [&](double eps) { return maximizer(kAnnulus, z, eps).abs_at_z; }, 1e-8, 1e-3, 11);
            worst = std::max({worst, std::fabs(sb.fitted_slope - target),
                              std::fabs(sm.fitted_slope - target)});
        }
        report(1, "annulus exponent", worst < 0.02,
               "max slope deviation " + fmt(worst) + " (tolerance 0.02, outer and inner branch)");
    });

    criterion(2, "norm identity", [] {
        std::mt19937 rng(2024);
        std::uniform_real_distribution<double> uni(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            double eps = std::pow(10.0, -6.0 + 4.0 * uni(rng));
            TikhonovSolution sol = [&] {
                switch (i % 3) {
                    case 0: {
                        double rho = 0.05 + 0.3 * uni(rng);
                        double r = rho + 0.1 + (0.85 - rho - 0.1) * uni(rng);
                        double rz = r + 0.03 + (0.96 - r - 0.03) * uni(rng);
                        return solve(Geometry{Annulus(rho, r)}, std::polar(rz, 6.0 * uni(rng)),
                                     eps);
                    }
                    case 1: {
                        double r = 0.2 + 0.7 * uni(rng);
                        return solve(Geometry{HalfPlaneGeometry(r)},
                                     {2.0 * uni(rng) - 1.0, 1.0 + r + 0.2 + uni(rng)}, eps);
                    }
                    default: {
                        double R = 1.3 + 1.7 * uni(rng);
                        cdouble w =
                            std::polar(1.05 + (0.9 * R - 1.05) * uni(rng), 6.0 * uni(rng));
                        return solve(Geometry{BernsteinEllipse(R)}, joukowski(w), eps);
                    }
                }
            }();
            double rhs = sol.norm_gamma * sol.norm_gamma + eps * eps * sol.norm_h * sol.norm_h;
            worst = std::max(worst, std::fabs(sol.value_at_z - rhs) / sol.value_at_z);
        }
        report(2, "norm identity", worst < 1e-10,
               "max relative deviation " + fmt(worst) + " over 10 random configurations");
    });

    criterion(3, "half-plane exponent", [] {
        const Geometry g{HalfPlaneGeometry(0.6)};
        const cdouble z(0.0, 3.0);
        const double target = std::log(11.0 / 19.0) / std::log(1.0 / 3.0); // 0.497487
        SweepResult sb = sweep(
            [&](double eps) { return bound(solve(g, z, eps)).bound_value; }, 1e-8, 1e-3, 11);
        SweepResult sm =
            sweep([&](double eps) { return maximizer(g, z, eps).abs_at_z; }, 1e-8, 1e-3, 11);
        double dev = std::max(std::fabs(sb.fitted_slope - target),
                              std::fabs(sm.fitted_slope - target));
        report(3, "half-plane exponent", dev < 0.02,
               "bound slope " + fmt(sb.fitted_slope) + ", |M(z)| slope " + fmt(sm.fitted_slope) +
                   ", target " + fmt(target));
    });

    criterion(4, "ellipse exponent", [] {
        const BernsteinEllipse e(2.0);
        const Geometry g{e};
        const cdouble z(0.0, 0.5);
        const double alpha = 1.0 - std::log((1.0 + std::sqrt(5.0)) / 2.0) / std::log(2.0);
        SweepResult sm =
            sweep([&](double eps) { return maximizer(g, z, eps).abs_at_z; }, 1e-8, 1e-3, 11);
        bool slope_ok = std::fabs(sm.fitted_slope - alpha) < 0.03;

        std::mt19937 rng(404);
        std::uniform_real_distribution<double> rad(1.02, 1.95), ang(0.0, 2.0 * kPi);
        double worst_xcheck = 0.0;
        for (int i = 0; i < 16; ++i) {
            cdouble zz = joukowski(std::polar(rad(rng), ang(rng)));
            double a = exponent(g, zz).value;
            double gsym = std::log(std::abs(ellipse_point_to_annulus(zz, e))) /
                          std::log(e.annulus_view.r);
            worst_xcheck = std::max(worst_xcheck, std::fabs(a - gsym));
        }
        report(4, "ellipse exponent", slope_ok && worst_xcheck < 1e-12,
               "|M(z)| slope " + fmt(sm.fitted_slope) + " vs alpha " + fmt(alpha) +
                   ", closed-form crosscheck dev " + fmt(worst_xcheck));
    });

    criterion(5, "maximizer feasibility", [] {
        std::vector<double> r_gamma, r_h;
        for (int i = 0; i <= 10; ++i) {
            double eps = std::pow(10.0, -8.0 + 0.5 * i);
            Maximizer m = maximizer(kAnnulus, {0.75, 0.0}, eps);
            r_gamma.push_back(m.norm_gamma / eps);
            r_h.push_back(m.norm_h);
        }
        double eg = band_ratio(r_gamma), eh = band_ratio(r_h);
        report(5, "maximizer feasibility", eg < 10.0 && eh < 10.0,
               "||M||_Gamma/eps envelope " + fmt(eg) + ", ||M||_H2 envelope " + fmt(eh) +
                   " (both < 10)");
    });

    criterion(6, "spectrum agreement", [] {
        NumericalSpectrum sa = nystrom_spectrum(nystrom_build(kAnnulus, 256));
        auto la = analytic_spectrum(kAnnulus, 15);
        double worst_a = 0.0;
        for (int i = 0; i < 15; ++i)
            worst_a = std::max(worst_a, std::fabs(sa.eigenvalues[i] - la[i]) / la[i]);
        double top_err = std::fabs(sa.eigenvalues[0] - kPi) / kPi;

        Geometry hg{HalfPlaneGeometry(0.6)};
        NumericalSpectrum sh = nystrom_spectrum(nystrom_build(hg, 256));
        auto lh = analytic_spectrum(hg, 15);
        double worst_h = 0.0;
        for (int i = 0; i < 15; ++i)
            worst_h = std::max(worst_h, std::fabs(sh.eigenvalues[i] - lh[i]) / lh[i]);

        report(6, "spectrum agreement", worst_a < 1e-8 && worst_h < 1e-8 && top_err < 1e-10,
               "top-15 rel err: annulus " + fmt(worst_a) + ", half-plane " + fmt(worst_h) +
                   "; mu_1 vs pi " + fmt(top_err));
    });

    criterion(7, "parfenov rate", [] {
        ParfenovFit fit = parfenov_rate(nystrom_build(Geometry{Annulus(1e-8, 0.5)}, 256));
        bool ok = std::fabs(fit.ratio_min - 0.25) < 1e-6 && std::fabs(fit.ratio_max - 0.25) < 1e-6 &&
                  std::fabs(fit.prefactor_min - 2.0 * kPi) < 1e-6 &&
                  std::fabs(fit.prefactor_max - 2.0 * kPi) < 1e-6;
        report(7, "parfenov rate", ok,
               "ratios [" + fmt(fit.ratio_min) + ", " + fmt(fit.ratio_max) + "], prefactors [" +
                   fmt(fit.prefactor_min) + ", " + fmt(fit.prefactor_max) + "] over " +
                   std::to_string(fit.used) + " eigenvalues");
    });

    criterion(8, "numerical vs spectral solve", [] {
        NystromSolution numeric = nystrom_solve(nystrom_build(kAnnulus, 256), {0.75, 0.0}, 1e-3);
        TikhonovSolution spectral = solve(kAnnulus, {0.75, 0.0}, 1e-3);
        double worst = 0.0;
        for (int j = 0; j < 16; ++j) {
            cdouble zeta = std::polar(j < 8 ? 0.6 : 0.4, 2.0 * kPi * (j % 8) / 8.0 + 0.2);
            worst = std::max(worst,
                             std::abs(numeric.extend(zeta) - spectral(zeta)) /
                                 std::abs(spectral(zeta)));
        }
        report(8, "numerical vs spectral solve", worst < 1e-6,
               "max pointwise rel err " + fmt(worst) + " at 16 interior points");
    });

    criterion(9, "dual certificate", [] {
        std::vector<double> ratios;
        double worst_root = 0.0;
        for (int i = 0; i <= 8; ++i) {
            double eps = std::pow(10.0, -7.0 + 0.5 * i);
            DualCertificate cert = dual_certificate(kAnnulus, {0.75, 0.0}, eps);
            ratios.push_back(cert.ratio_eta_eps2);
            worst_root =
                std::max(worst_root, std::fabs(cert.phi_at_eta_star - eps * eps) / (eps * eps));
        }
        double env = band_ratio(ratios);
        report(9, "dual certificate", env < 10.0 && worst_root < 1e-8,
               "eta*/eps^2 envelope " + fmt(env) + " across eps in [1e-7,1e-3], root residual " +
                   fmt(worst_root));
    });

    criterion(10, "switchover-sum harness", [] {
        SwitchoverSumReport rep = switchover_sum_scan(2.0, 1.0, 1e-10, 1e-2, 25);
        bool ok = std::fabs(rep.slope_linear - (-0.5)) < 0.02 &&
                  std::fabs(rep.slope_squared - (-1.5)) < 0.02;
        report(10, "switchover-sum harness", ok,
               "slopes " + fmt(rep.slope_linear) + " and " + fmt(rep.slope_squared) +
                   " vs -0.5 and -1.5");
    });

    criterion(11, "symmetric-subspace commutation", [] {
        const Annulus a(0.25, 0.5);
        const Geometry g{a};
        // commutator on the quadrature grid
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> coef(-1.0, 1.0);
        double comm = 0.0;
        for (int t = 0; t < 4; ++t) {
            std::vector<cdouble> c(13);
            for (auto& x : c) x = cdouble(coef(rng), coef(rng));
            auto f = [&c](cdouble zeta) {
                cdouble acc(0.0, 0.0);
                for (int n = -6; n <= 6; ++n) acc += c[n + 6] * cpow_int(zeta, n);
                return acc;
            };
            auto proj_f = project_symmetric(f, a);
            for (int j = 0; j < 32; ++j) {
                cdouble zeta = std::polar(0.7, 2.0 * kPi * j / 32.0 + 0.05);
                cdouble kf = quad::apply_restriction_operator(g, f, zeta);
                cdouble kf_ref = quad::apply_restriction_operator(g, f, a.rho / zeta);
                cdouble rhs = quad::apply_restriction_operator(g, proj_f, zeta);
                comm = std::max(comm, std::abs(0.5 * (kf + kf_ref) - rhs));
            }
        }
        // projection of the full solution vs the symmetric-basis solution
        double eps = 1e-4;
        TikhonovSolution full = solve(g, {0.75, 0.0}, eps);
        TikhonovSolution sym = solve_with_basis(g, basis_annulus_symmetric(a), {0.75, 0.0}, eps);
        double worst = 0.0;
        for (int j = 0; j < 16; ++j) {
            cdouble zeta = std::polar(0.62, 2.0 * kPi * j / 16.0 + 0.1);
            cdouble projected = 0.5 * (full(zeta) + full(a.rho / zeta));
            worst = std::max(worst, std::abs(projected - sym(zeta)) / std::abs(sym(zeta)));
        }
        report(11, "symmetric-subspace commutation", comm < 1e-8 && worst < 1e-10,
               "commutator " + fmt(comm) + ", projection-vs-direct rel dev " + fmt(worst));
    });

    criterion(12, "chebyshev comparison polynomial", [] {
        const cdouble z(0.0, 0.5);
        const double alpha = exponent(Geometry{BernsteinEllipse(2.0)}, z).value;
        SweepResult res = sweep(
            [&](double eps) { return std::abs(chebyshev_certificate(z, eps, 2.0)); }, 1e-8, 1e-3,
            11);
        report(12, "chebyshev comparison polynomial",
               std::fabs(res.fitted_slope - alpha) < 0.03,
               "slope " + fmt(res.fitted_slope) + " vs alpha " + fmt(alpha) + " (tolerance 0.03)");
    });

    criterion(13, "cli determinism and verify", [] {
        const std::string cli = CONTSTAB_CLI_PATH;
        Shell a = run_shell(cli + " sweep --out /tmp/contstab_acc_a.csv 2>/dev/null");
        Shell b = run_shell(cli + " sweep --out /tmp/contstab_acc_b.csv 2>/dev/null");
        std::string fa = slurp("/tmp/contstab_acc_a.csv"), fb = slurp("/tmp/contstab_acc_b.csv");
        bool identical = !fa.empty() && fa == fb && a.exit_code == 0 && b.exit_code == 0;
        Shell v = run_shell(cli + " verify >/dev/null 2>&1; echo $?");
        bool verify_ok = v.output == "0\n";
        report(13, "cli determinism and verify", identical && verify_ok,
               std::string("sweep outputs byte-identical: ") + (identical ? "yes" : "no") +
                   ", verify exit 0: " + (verify_ok ? "yes" : "no"));
    });

    std::printf("%d of 13 criteria passed\n", 13 - g_failures);
    return g_failures;
}
