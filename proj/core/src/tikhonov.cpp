#include "contstab/tikhonov.hpp"

#include <cmath>

namespace contstab {

namespace {

constexpr long kTermCap = 1000000; // per-branch truncation cap

struct SeriesAccum {
    double u = 0.0; // sum |e_n(z)|^2 / (lambda_n + s)
    double h = 0.0; // sum |e_n(z)|^2 / (lambda_n + s)^2
    double g = 0.0; // sum lambda_n |e_n(z)|^2 / (lambda_n + s)^2
};

// One branch of the solution series.  Terms are ratios of geometric
// sequences, hence unimodal in k: they may grow up to the switchover index
// where lambda ~ s and decay geometrically after it.  The first-omitted-term
// stop is therefore applied only once the terms have started to decrease.
void accumulate_branch(const SpectralBasis::Branch& br, cdouble z, double shift, double tol,
                       SeriesAccum& acc, std::vector<cdouble>* coeff) {
    double prev_tu = -1.0;
    for (long k = 0;; ++k) {
        if (k >= kTermCap)
            throw ResolutionError(
                "spectral series exceeded the 1e6-term cap "
                "(tolerance too small or point too close to the boundary)");
        double lam = br.lambda(static_cast<int>(k));
        cdouble ez = br.eval(static_cast<int>(k), z);
        double ae2 = std::norm(ez);
        double den = lam + shift;
        double tu = ae2 / den;
        double th = ae2 / (den * den);
        double tg = lam * ae2 / (den * den);
        acc.u += tu;
        acc.h += th;
        acc.g += tg;
        if (coeff) coeff->push_back(std::conj(ez) / den);
        if (k >= 1 && tu <= prev_tu && tu <= tol * acc.u && th <= tol * acc.h &&
            tg <= tol * acc.g)
            break;
        prev_tu = tu;
    }
}

SeriesAccum sum_series(const SpectralBasis& basis, cdouble z_basis, double shift, double tol,
                       std::vector<std::vector<cdouble>>* coeff) {
    SeriesAccum acc;
    if (coeff) coeff->assign(basis.branches.size(), {});
    for (size_t b = 0; b < basis.branches.size(); ++b)
        accumulate_branch(basis.branches[b], z_basis, shift, tol, acc,
                          coeff ? &(*coeff)[b] : nullptr);
    return acc;
}

// |sum| of a complex unimodal series with stop against the absolute sum
// (immune to cancellation in the running total).
template <typename TermFn>
cdouble sum_complex_unimodal(TermFn term, double tol, const char* what) {
    cdouble sum(0.0, 0.0);
    double abs_sum = 0.0, prev = -1.0;
    for (long k = 0;; ++k) {
        if (k >= kTermCap) throw ResolutionError(std::string(what) + ": series cap exceeded");
        cdouble t = term(k);
        double at = std::abs(t);
        sum += t;
        abs_sum += at;
        if (k >= 1 && at <= prev && at <= tol * abs_sum) break;
        prev = at;
    }
    return sum;
}

template <typename TermFn>
double sum_real_unimodal(TermFn term, double tol, const char* what) {
    double sum = 0.0, prev = -1.0;
    for (long k = 0;; ++k) {
        if (k >= kTermCap) throw ResolutionError(std::string(what) + ": series cap exceeded");
        double t = term(k);
        sum += t;
        if (k >= 1 && t <= prev && t <= tol * sum) break;
        prev = t;
    }
    return sum;
}

double annulus_gamma(const Annulus& a, double abs_z) {
    if (abs_z > a.r) return std::log(abs_z) / std::log(a.r);
    return std::log(abs_z / a.rho) / std::log(a.r / a.rho);
}

} // namespace

cdouble TikhonovSolution::operator()(cdouble zeta) const {
    // Summed adaptively rather than from the stored window, so evaluation
    // points needing a longer tail than z did are still resolved to tol.
    cdouble total(0.0, 0.0);
    const double eps2 = eps * eps;
    for (const auto& br : basis.branches) {
        cdouble zloc = z_basis;
        total += sum_complex_unimodal(
            [&](long k) {
                double lam = br.lambda(static_cast<int>(k));
                return std::conj(br.eval(static_cast<int>(k), zloc)) *
                       br.eval(static_cast<int>(k), zeta) / (lam + eps2);
            },
            1e-14, "TikhonovSolution::eval");
    }
    return total;
}

TikhonovSolution solve_with_basis(const Geometry& g, SpectralBasis basis, cdouble z_basis,
                                  double eps, double tol) {
    if (!(eps >= 1e-12))
        throw ConfigError("solve: eps below the double-precision floor 1e-12");
    if (!(tol > 0.0)) throw ConfigError("solve: tol must be positive");

    TikhonovSolution sol{g, z_basis, z_basis, eps, std::move(basis), {}, 0.0, 0.0, 0.0};
    SeriesAccum acc = sum_series(sol.basis, sol.z_basis, eps * eps, tol, &sol.coeff);
    if (!(acc.u > 0.0))
        throw NearDegenerateError("solve: p_z vanishes on the solver basis at this point");
    sol.value_at_z = acc.u;
    sol.norm_h = std::sqrt(acc.h);
    sol.norm_gamma = std::sqrt(acc.g);
    return sol;
}

TikhonovSolution solve(const Geometry& g, cdouble z, double eps, double tol) {
    validate_point(g, z);
    cdouble z_basis = z;
    if (const auto* e = std::get_if<BernsteinEllipse>(&g))
        z_basis = ellipse_point_to_annulus(z, *e);
    TikhonovSolution sol = solve_with_basis(g, spectral_basis(g), z_basis, eps, tol);
    sol.z = z;
    return sol;
}

StabilityBound bound(const TikhonovSolution& sol) {
    double inv_h = 1.0 / sol.norm_h;
    double eps_over_g = sol.eps / sol.norm_gamma;
    BoundBranch branch =
        inv_h <= eps_over_g ? BoundBranch::global_norm : BoundBranch::data_norm;
    double minval = std::min(inv_h, eps_over_g);
    double value = 1.5 * sol.value_at_z * minval;
    double gamma = exponent(sol.geometry, sol.z).value;
    return {value, branch, gamma, value / std::pow(sol.eps, gamma)};
}

ExponentResult exponent(const Geometry& g, cdouble z) {
    validate_point(g, z);
    if (const auto* a = std::get_if<Annulus>(&g)) return {annulus_gamma(*a, std::abs(z)), false};
    if (const auto* h = std::get_if<HalfPlaneGeometry>(&g)) {
        if (inside_data_circle(*h, z)) return {1.0, true}; // Cauchy-stable region
        return {std::log(std::abs(mobius(z, *h))) / std::log(h->rho), false};
    }
    const auto& e = std::get<BernsteinEllipse>(g);
    cdouble w = inverse_joukowski(z, e.R);
    return {1.0 - std::log(std::abs(w)) / std::log(e.R), false};
}

namespace {

Maximizer maximizer_annulus(const Annulus& a, cdouble z, double eps, double tol) {
    validate_point(Geometry{a}, z);
    const double rho = a.rho, r = a.r;
    const double gamma = annulus_gamma(a, std::abs(z));
    const double pref = std::pow(eps, 2.0 - gamma);
    const double eps2 = eps * eps;
    const cdouble zbar = std::conj(z);
    const double az = std::abs(z);

    Maximizer m;
    m.kind = GeometryKind::annulus;
    m.eps = eps;
    m.gamma = gamma;

    // M(zeta) = pref * sum_{n in Z} (conj(z) zeta)^n / (r^{2n} + eps^2 (1 + rho^{2n})).
    // Converges in rho^2 < |conj(z) zeta| < 1; negative indices are summed in
    // the rescaled form (rho^2/w)^m / ((rho/r)^{2m} + eps^2 (1 + rho^{2m}))
    // so no intermediate quantity overflows.
    m.eval = [rho, r, eps2, pref, zbar, tol](cdouble zeta) {
        cdouble w = zbar * zeta;
        double aw = std::abs(w);
        if (aw >= 1.0 - 1e-12 || aw <= rho * rho * (1.0 + 1e-12))
            throw DomainError("annulus maximizer: zeta outside the convergence annulus "
                              "rho^2 < |conj(z) zeta| < 1");
        double r2 = r * r, q = (rho / r) * (rho / r), rho2 = rho * rho;
        cdouble pos = sum_complex_unimodal(
            [&](long k) {
                return cpow_int(w, k) / (std::pow(r2, k) + eps2 * (1.0 + std::pow(rho2, k)));
            },
            tol, "annulus maximizer");
        cdouble neg = sum_complex_unimodal(
            [&](long k) {
                long mth = k + 1;
                return cpow_int(rho2 / w, mth) /
                       (std::pow(q, mth) + eps2 * (1.0 + std::pow(rho2, mth)));
            },
            tol, "annulus maximizer");
        return pref * (pos + neg);
    };

    // H^2 coefficients: a_n = c_n for n >= 0, a_{-m} = c_{-m} rho^{-m};
    // ||M||_Gamma^2 = sum lambda_n |a_n|^2.
    double r2 = r * r, rho2 = rho * rho, q = (rho / r) * (rho / r);
    double lam0 = 2.0 * M_PI * r;
    double h_sq = sum_real_unimodal(
        [&](long k) {
            double c = pref * std::pow(az, k) / (std::pow(r2, k) + eps2 * (1.0 + std::pow(rho2, k)));
            return c * c;
        },
        tol, "annulus maximizer norm");
    double g_sq = sum_real_unimodal(
        [&](long k) {
            double c = pref * std::pow(az, k) / (std::pow(r2, k) + eps2 * (1.0 + std::pow(rho2, k)));
            return lam0 * std::pow(r2, k) * c * c;
        },
        tol, "annulus maximizer norm");
    h_sq += sum_real_unimodal(
        [&](long k) {
            long mth = k + 1;
            double am = pref * std::pow(rho / az, mth) /
                        (std::pow(q, mth) + eps2 * (1.0 + std::pow(rho2, mth)));
            return am * am;
        },
        tol, "annulus maximizer norm");
    g_sq += sum_real_unimodal(
        [&](long k) {
            long mth = k + 1;
            double am = pref * std::pow(rho / az, mth) /
                        (std::pow(q, mth) + eps2 * (1.0 + std::pow(rho2, mth)));
            return lam0 * std::pow(q, mth) * am * am;
        },
        tol, "annulus maximizer norm");

    m.norm_h = std::sqrt(h_sq);
    m.norm_gamma = std::sqrt(g_sq);
    m.abs_at_z = std::abs(m.eval(z));
    return m;
}

Maximizer maximizer_halfplane(const HalfPlaneGeometry& g, cdouble z, double eps, double tol) {
    validate_point(Geometry{g}, z);
    const double gamma = exponent(Geometry{g}, z).value;
    const double pref = std::pow(eps, 2.0 - gamma);
    const double eps2 = eps * eps;
    const double rho2 = g.rho * g.rho;
    const cdouble z0 = g.z0;
    const cdouble mz_bar = std::conj((z - z0) / (z + z0));

    Maximizer m;
    m.kind = GeometryKind::half_plane;
    m.eps = eps;
    m.gamma = gamma;

    // M(zeta) = pref/(zeta+z0) * sum_{n>=1} (conj(m(z)) m(zeta))^n / (eps^2 + rho^{2n});
    // |m| < 1 on the open half-plane, so the series converges there.
    m.eval = [pref, eps2, rho2, z0, mz_bar, tol](cdouble zeta) {
        if (!(zeta.imag() > 0.0))
            throw DomainError("half-plane maximizer: zeta must be in the open upper half-plane");
        cdouble qz = mz_bar * (zeta - z0) / (zeta + z0);
        cdouble s = sum_complex_unimodal(
            [&](long k) { return cpow_int(qz, k + 1) / (eps2 + std::pow(rho2, k + 1)); },
            tol, "half-plane maximizer");
        return pref * s / (zeta + z0);
    };

    // coefficients on the orthonormal basis: a_n = pref conj(m(z))^n /
    // ((eps^2+rho^{2n}) amp), lambda_n = lam0 rho^{2n}
    const double amp = std::pow(1.0 - g.r * g.r, 0.25) / std::sqrt(M_PI);
    const double lam0 = g.r / (1.0 + std::sqrt(1.0 - g.r * g.r));
    const double amz = std::abs(mz_bar);
    double h_sq = sum_real_unimodal(
        [&](long k) {
            double an = pref * std::pow(amz, k + 1) / ((eps2 + std::pow(rho2, k + 1)) * amp);
            return an * an;
        },
        tol, "half-plane maximizer norm");
    double g_sq = sum_real_unimodal(
        [&](long k) {
            double an = pref * std::pow(amz, k + 1) / ((eps2 + std::pow(rho2, k + 1)) * amp);
            return lam0 * std::pow(rho2, k + 1) * an * an;
        },
        tol, "half-plane maximizer norm");

    m.norm_h = std::sqrt(h_sq);
    m.norm_gamma = std::sqrt(g_sq);
    m.abs_at_z = std::abs(m.eval(z));
    return m;
}

Maximizer maximizer_ellipse(const BernsteinEllipse& e, cdouble z, double eps, double tol) {
    const cdouble wz = inverse_joukowski(z, e.R); // validates z
    const double R = e.R;
    const double alpha = 1.0 - std::log(std::abs(wz)) / std::log(R);
    const double pref = std::pow(eps, 2.0 - alpha);
    const double eps2 = eps * eps;
    const double awz = std::abs(wz);

    Maximizer m;
    m.kind = GeometryKind::ellipse;
    m.eps = eps;
    m.gamma = alpha;

    // M(omega) = pref * sum_{n>=1} conj(T_n(z)) T_n(omega) / (1 + eps^2 R^{2n}),
    // with both Chebyshev sequences carried in rescaled form
    // Ts_n = T_n / |J^{-1}|^n so nothing overflows before the tail decays.
    m.eval = [pref, eps2, R, z, wz, awz, tol](cdouble omega) {
        double aww;
        bool on_cut = omega.imag() == 0.0 && std::fabs(omega.real()) <= 1.0;
        if (on_cut) {
            aww = 1.0;
        } else {
            aww = std::abs(joukowski_outer_root(omega));
            if (awz * aww >= R * R * (1.0 - 1e-12))
                throw DomainError("ellipse maximizer: |J^-1(z)||J^-1(omega)| >= R^2, "
                                  "series diverges");
        }
        const cdouble zs = z / awz, ws = omega / aww;
        const double inv_wz2 = 1.0 / (awz * awz), inv_ww2 = 1.0 / (aww * aww);
        // scaled recurrences: Ts_{n+1} = 2*(arg/|w|)*Ts_n - Ts_{n-1}/|w|^2
        cdouble tz_prev(1.0, 0.0), tz = zs;       // Ts_0, Ts_1 for z
        cdouble tw_prev(1.0, 0.0), tw = ws;       // Ts_0, Ts_1 for omega
        const double growth = awz * aww / (R * R);
        double scale = growth;                    // (|wz||ww|/R^2)^n at n=1
        double den = 1.0 / (R * R);               // R^{-2n} at n=1
        cdouble sum(0.0, 0.0);
        double abs_sum = 0.0, prev = -1.0;
        for (long n = 1;; ++n) {
            if (n >= kTermCap)
                throw ResolutionError("ellipse maximizer: series cap exceeded");
            cdouble t = std::conj(tz) * tw * (scale / (den + eps2));
            sum += t;
            double at = std::abs(t);
            abs_sum += at;
            if (n >= 2 && at <= prev && at <= tol * abs_sum) break;
            prev = at;
            cdouble tz_next = 2.0 * zs * tz - inv_wz2 * tz_prev;
            tz_prev = tz; tz = tz_next;
            cdouble tw_next = 2.0 * ws * tw - inv_ww2 * tw_prev;
            tw_prev = tw; tw = tw_next;
            scale *= growth;
            den /= R * R;
        }
        return pref * sum;
    };

    // Norms in the annulus model: a_n = pref conj(T_n(z)) R^n / (sqrt(2)(1+eps^2 R^{2n})),
    // lambda_n = 2 pi sqrt(rho) rho^n with rho = R^{-2}.
    {
        const double rho = e.annulus_view.rho;
        const double lam_base = 2.0 * M_PI * std::sqrt(rho);
        cdouble zs = z / awz;
        double inv_wz2 = 1.0 / (awz * awz);
        cdouble tz_prev(1.0, 0.0), tz = zs;
        double h_sq = 0.0, g_sq = 0.0;
        double ratio = awz / R;  // (|wz|/R)^n
        double scale = ratio;
        double den = 1.0 / (R * R);
        double prev = -1.0;
        for (long n = 1;; ++n) {
            if (n >= kTermCap)
                throw ResolutionError("ellipse maximizer norms: series cap exceeded");
            double an = pref * std::abs(tz) * scale / (std::sqrt(2.0) * (den + eps2));
            double th = an * an;
            h_sq += th;
            g_sq += lam_base * std::pow(rho, static_cast<double>(n)) * th;
            if (n >= 2 && th <= prev && th <= tol * h_sq) break;
            prev = th;
            cdouble tz_next = 2.0 * zs * tz - inv_wz2 * tz_prev;
            tz_prev = tz; tz = tz_next;
            scale *= ratio;
            den /= R * R;
        }
        m.norm_h = std::sqrt(h_sq);
        m.norm_gamma = std::sqrt(g_sq);
    }
    m.abs_at_z = std::abs(m.eval(z));
    return m;
}

} // namespace

Maximizer maximizer(const Geometry& g, cdouble z, double eps, double tol) {
    if (!(eps >= 1e-12)) throw ConfigError("maximizer: eps below the floor 1e-12");
    if (const auto* a = std::get_if<Annulus>(&g)) return maximizer_annulus(*a, z, eps, tol);
    if (const auto* h = std::get_if<HalfPlaneGeometry>(&g))
        return maximizer_halfplane(*h, z, eps, tol);
    return maximizer_ellipse(std::get<BernsteinEllipse>(g), z, eps, tol);
}

Maximizer maximizer_annulus_symmetric(const Annulus& a, cdouble z, double eps, double tol) {
    if (!a.is_symmetric())
        throw ConfigError("maximizer_annulus_symmetric: requires r^2 = rho");
    validate_point(Geometry{a}, z);
    const double az = std::abs(z);
    if (!(az > a.r))
        throw DomainError("maximizer_annulus_symmetric: requires r < |z| < 1");
    const double rho = a.rho;
    const double gamma = std::log(az) / std::log(a.r);
    const double pref = std::pow(eps, 2.0 - gamma);
    const double eps2 = eps * eps;
    const cdouble zbar = std::conj(z);

    Maximizer m;
    m.kind = GeometryKind::annulus;
    m.eps = eps;
    m.gamma = gamma;

    // M(zeta) = pref sum_{n>=1} (conj(z)^n + (rho/conj(z))^n)(zeta^n + (rho/zeta)^n)
    //           / (rho^n + eps^2);  converges in rho|z| < |zeta| < 1/|z|.
    m.eval = [rho, eps2, pref, zbar, az, tol](cdouble zeta) {
        double azeta = std::abs(zeta);
        if (azeta >= (1.0 / az) * (1.0 - 1e-12) || azeta <= rho * az * (1.0 + 1e-12))
            throw DomainError("symmetric maximizer: zeta outside the convergence annulus "
                              "rho|z| < |zeta| < 1/|z|");
        cdouble s = sum_complex_unimodal(
            [&](long k) {
                long n = k + 1;
                cdouble num = (cpow_int(zbar, n) + cpow_int(rho / zbar, n)) *
                              (cpow_int(zeta, n) + cpow_int(rho / zeta, n));
                return num / (std::pow(rho, static_cast<double>(n)) + eps2);
            },
            tol, "symmetric maximizer");
        return pref * s;
    };

    // a_n = 2 pref conj(e_n(z)) / (rho^n + eps^2) on the orthonormal symmetric
    // basis; lambda_n = 2 pi sqrt(rho) rho^n.
    const double lam_base = 2.0 * M_PI * std::sqrt(rho);
    double h_sq = sum_real_unimodal(
        [&](long k) {
            long n = k + 1;
            double en = std::abs(cpow_int(zbar, n) + cpow_int(rho / zbar, n)) / std::sqrt(2.0);
            double an = 2.0 * pref * en / (std::pow(rho, static_cast<double>(n)) + eps2);
            return an * an;
        },
        tol, "symmetric maximizer norm");
    double g_sq = sum_real_unimodal(
        [&](long k) {
            long n = k + 1;
            double en = std::abs(cpow_int(zbar, n) + cpow_int(rho / zbar, n)) / std::sqrt(2.0);
            double an = 2.0 * pref * en / (std::pow(rho, static_cast<double>(n)) + eps2);
            return lam_base * std::pow(rho, static_cast<double>(n)) * an * an;
        },
        tol, "symmetric maximizer norm");
    m.norm_h = std::sqrt(h_sq);
    m.norm_gamma = std::sqrt(g_sq);
    m.abs_at_z = std::abs(m.eval(z));
    return m;
}

double phi_of_eta(const SpectralBasis& basis, cdouble z_basis, double eta, double tol) {
    if (!(eta > 0.0)) throw ConfigError("phi_of_eta: eta must be positive");
    SeriesAccum acc = sum_series(basis, z_basis, eta, tol, nullptr);
    if (!(acc.h > 0.0))
        throw NearDegenerateError("phi_of_eta: p_z vanishes on the solver basis");
    return acc.g / acc.h;
}

DualCertificate dual_certificate(const Geometry& g, cdouble z, double eps, double tol) {
    if (!(eps >= 1e-12)) throw ConfigError("dual_certificate: eps below the floor 1e-12");
    validate_point(g, z);
    SpectralBasis basis = spectral_basis(g);
    cdouble z_basis = z;
    if (const auto* e = std::get_if<BernsteinEllipse>(&g))
        z_basis = ellipse_point_to_annulus(z, *e);

    const double target = eps * eps;
    // Phi(infinity) = (K p_z, p_z)/||p_z||^2; a saturatingly large eta probes it.
    if (phi_of_eta(basis, z_basis, 1e60, tol) <= target)
        throw NumericalError("dual_certificate: eps^2 is not below Phi(infinity); no root");

    double lo = target, hi = target;
    int guard = 0;
    while (phi_of_eta(basis, z_basis, hi, tol) <= target) {
        hi *= 16.0;
        if (++guard > 300) throw NumericalError("dual_certificate: failed to bracket from above");
    }
    guard = 0;
    while (phi_of_eta(basis, z_basis, lo, tol) >= target) {
        lo /= 16.0;
        if (lo < 1e-290 || ++guard > 300)
            throw NumericalError("dual_certificate: failed to bracket from below");
    }

    double mid = std::sqrt(lo * hi), phi_mid = 0.0;
    for (int it = 0; it < 400; ++it) {
        mid = std::sqrt(lo * hi);
        phi_mid = phi_of_eta(basis, z_basis, mid, tol);
        if (std::fabs(phi_mid - target) <= 1e-10 * target) break;
        (phi_mid < target ? lo : hi) = mid;
        if (hi / lo < 1.0 + 1e-15) break;
    }
    return {mid, phi_mid, mid / target};
}

long chebyshev_certificate_degree(double eps, double R) {
    if (!(R > 1.0)) throw ConfigError("chebyshev_certificate: R must exceed 1");
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("chebyshev_certificate: eps must be in (0,1)");
    double x = std::log(1.0 / eps) / std::log(R);
    double snapped = std::round(x);
    long k = (std::fabs(x - snapped) < 1e-9) ? static_cast<long>(snapped)
                                             : static_cast<long>(std::floor(x));
    if (k > 2000000) throw ResolutionError("chebyshev_certificate: degree cap exceeded");
    return k;
}

cdouble chebyshev_certificate(cdouble z, double eps, double R) {
    long k = chebyshev_certificate_degree(eps, R);
    if (k == 0) return cdouble(eps, 0.0);
    cdouble t_prev(1.0, 0.0), t = z;
    for (long n = 1; n < k; ++n) {
        cdouble t_next = 2.0 * z * t - t_prev;
        t_prev = t;
        t = t_next;
    }
    return eps * t;
}

} // namespace contstab
