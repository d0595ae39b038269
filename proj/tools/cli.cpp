#include "cli.hpp"

#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "contstab/nystrom.hpp"
#include "contstab/powerlaw.hpp"
#include "contstab/spectral.hpp"
#include "contstab/tikhonov.hpp"
#include "contstab/verify.hpp"

namespace contstab::cli {

namespace {

using nlohmann::json;

// 17 significant digits: round-trip exact and byte-stable across runs
std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CommonConfig {
    std::string annulus_spec;
    double halfplane_r = -1.0;
    double ellipse_r = -1.0;
    std::string z_spec = "0.75,0";
    double eps = 1e-4;
    std::string eps_range_spec;
    int nodes = 256;
    double tol = 1e-12;
    std::string format = "csv";
    std::string out_path;
};

std::pair<double, double> parse_pair(const std::string& s, const char* what) {
    std::istringstream is(s);
    double a, b;
    char comma = 0;
    if (!(is >> a >> comma >> b) || comma != ',')
        throw ConfigError(std::string(what) + ": expected two comma-separated numbers, got '" +
                          s + "'");
    return {a, b};
}

struct EpsRange {
    double lo, hi;
    int points;
};

EpsRange parse_eps_range(const std::string& s) {
    std::istringstream is(s);
    double lo, hi;
    int n;
    char c1 = 0, c2 = 0;
    if (!(is >> lo >> c1 >> hi >> c2 >> n) || c1 != ',' || c2 != ',')
        throw ConfigError("--eps-range: expected LO,HI,N, got '" + s + "'");
    return {lo, hi, n};
}

Geometry make_geometry(const CommonConfig& cfg) {
    int given = (!cfg.annulus_spec.empty()) + (cfg.halfplane_r > 0) + (cfg.ellipse_r > 0);
    if (given > 1) throw ConfigError("specify at most one of --annulus/--halfplane/--ellipse");
    if (cfg.halfplane_r > 0) return HalfPlaneGeometry(cfg.halfplane_r);
    if (cfg.ellipse_r > 0) return BernsteinEllipse(cfg.ellipse_r);
    if (!cfg.annulus_spec.empty()) {
        auto [rho, r] = parse_pair(cfg.annulus_spec, "--annulus");
        return Annulus(rho, r);
    }
    return Annulus(0.25, 0.5); // pinned default
}

cdouble make_z(const CommonConfig& cfg) {
    auto [re, im] = parse_pair(cfg.z_spec, "--z");
    return {re, im};
}

json geometry_json(const Geometry& g) {
    json j;
    j["kind"] = kind_name(kind_of(g));
    if (const auto* a = std::get_if<Annulus>(&g)) {
        j["rho"] = a->rho;
        j["r"] = a->r;
    } else if (const auto* h = std::get_if<HalfPlaneGeometry>(&g)) {
        j["r"] = h->r;
        j["rho"] = h->rho;
        j["z0"] = {h->z0.real(), h->z0.imag()};
    } else {
        const auto& e = std::get<BernsteinEllipse>(g);
        j["R"] = e.R;
        j["annulus_view"] = {{"rho", e.annulus_view.rho}, {"r", e.annulus_view.r}};
    }
    return j;
}

std::string geometry_echo(const Geometry& g) {
    std::ostringstream os;
    os << "# geometry," << kind_name(kind_of(g));
    if (const auto* a = std::get_if<Annulus>(&g))
        os << "," << fmt17(a->rho) << "," << fmt17(a->r);
    else if (const auto* h = std::get_if<HalfPlaneGeometry>(&g))
        os << "," << fmt17(h->r);
    else
        os << "," << fmt17(std::get<BernsteinEllipse>(g).R);
    return os.str();
}

void emit(const CommonConfig& cfg, const std::string& text) {
    if (cfg.out_path.empty()) {
        std::cout << text;
        std::cout.flush();
    } else {
        std::ofstream f(cfg.out_path, std::ios::binary);
        if (!f) throw ConfigError("cannot open output file '" + cfg.out_path + "'");
        f << text;
    }
}

int thread_cap() {
    unsigned hw = std::thread::hardware_concurrency();
    int cap = hw == 0 ? 1 : static_cast<int>(hw);
    if (const char* env = std::getenv("CONTSTAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end && *end == '\0' && v >= 1) cap = std::min<long>(cap, v);
    }
    return cap;
}

int cmd_exponent(const CommonConfig& cfg) {
    Geometry g = make_geometry(cfg);
    cdouble z = make_z(cfg);
    ExponentResult res = exponent(g, z);
    std::ostringstream os;
    if (cfg.format == "json") {
        json j;
        j["geometry"] = geometry_json(g);
        j["z"] = {z.real(), z.imag()};
        j["gamma"] = res.value;
        j["stable_region"] = res.stable_region;
        os << j.dump(2) << "\n";
    } else {
        os << geometry_echo(g) << "\n";
        os << "# z," << fmt17(z.real()) << "," << fmt17(z.imag()) << "\n";
        os << "gamma,stable_region\n";
        os << fmt17(res.value) << "," << (res.stable_region ? "true" : "false") << "\n";
    }
    emit(cfg, os.str());
    return 0;
}

struct SweepRow {
    double eps = 0.0;
    double bound_value = 0.0, m_at_z = 0.0, u_at_z = 0.0;
    double norm_h = 0.0, norm_gamma = 0.0, eta_ratio = 0.0;
    bool failed = false;
    std::string error;
};

int cmd_sweep(const CommonConfig& cfg) {
    Geometry g = make_geometry(cfg);
    cdouble z = make_z(cfg);
    EpsRange range{1e-8, 1e-3, 11};
    if (!cfg.eps_range_spec.empty()) range = parse_eps_range(cfg.eps_range_spec);
    std::vector<double> grid = geometric_grid(range.lo, range.hi, range.points);

    std::vector<SweepRow> rows(grid.size());
    auto compute_row = [&](size_t i) {
        SweepRow& row = rows[i];
        row.eps = grid[i];
        try {
            TikhonovSolution sol = solve(g, z, row.eps, cfg.tol);
            StabilityBound b = bound(sol);
            DualCertificate cert = dual_certificate(g, z, row.eps, cfg.tol);
            row.bound_value = b.bound_value;
            row.m_at_z = b.bound_value / 1.5; // u(z) * min{...}, the maximizer value at z
            row.u_at_z = sol.value_at_z;
            row.norm_h = sol.norm_h;
            row.norm_gamma = sol.norm_gamma;
            row.eta_ratio = cert.ratio_eta_eps2;
        } catch (const std::exception& e) {
            row.failed = true;
            row.error = e.what();
        }
    };

    int workers = std::min<int>(thread_cap(), static_cast<int>(grid.size()));
    if (workers <= 1) {
        for (size_t i = 0; i < grid.size(); ++i) compute_row(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::future<void>> futs;
        for (int w = 0; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, [&] {
                for (size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1))
                    compute_row(i);
            }));
        for (auto& f : futs) f.get();
    }

    static const char* kColumns[] = {"bound", "M_at_z", "u_at_z", "norm_H", "norm_Gamma"};
    auto column_value = [](const SweepRow& r, int c) {
        switch (c) {
            case 0: return r.bound_value;
            case 1: return r.m_at_z;
            case 2: return r.u_at_z;
            case 3: return r.norm_h;
            default: return r.norm_gamma;
        }
    };

    bool any_failed = false;
    std::ostringstream os;
    json jrows = json::array();
    if (cfg.format != "json") os << "eps,bound,M_at_z,u_at_z,norm_H,norm_Gamma,eta_star_ratio\n";
    for (const auto& row : rows) {
        if (row.failed) {
            any_failed = true;
            if (cfg.format != "json")
                os << fmt17(row.eps) << ",,,,,,error: " << row.error << "\n";
            else
                jrows.push_back({{"eps", row.eps}, {"error", row.error}});
            break; // flush rows up to and including the failure
        }
        if (cfg.format != "json") {
            os << fmt17(row.eps) << "," << fmt17(row.bound_value) << "," << fmt17(row.m_at_z)
               << "," << fmt17(row.u_at_z) << "," << fmt17(row.norm_h) << ","
               << fmt17(row.norm_gamma) << "," << fmt17(row.eta_ratio) << "\n";
        } else {
            jrows.push_back({{"eps", row.eps},
                             {"bound", row.bound_value},
                             {"M_at_z", row.m_at_z},
                             {"u_at_z", row.u_at_z},
                             {"norm_H", row.norm_h},
                             {"norm_Gamma", row.norm_gamma},
                             {"eta_star_ratio", row.eta_ratio}});
        }
    }

    json jfits;
    if (!any_failed) {
        std::vector<double> lx;
        for (const auto& row : rows) lx.push_back(std::log(row.eps));
        for (int c = 0; c < 5; ++c) {
            std::vector<double> ly;
            for (const auto& row : rows) ly.push_back(std::log(column_value(row, c)));
            LogLogFit f = fit_loglog(lx, ly);
            if (cfg.format != "json")
                os << "# fit," << kColumns[c] << "," << fmt17(f.slope) << ","
                   << fmt17(f.intercept) << "," << fmt17(f.r_squared) << "\n";
            else
                jfits[kColumns[c]] = {{"slope", f.slope},
                                      {"intercept", f.intercept},
                                      {"r_squared", f.r_squared}};
        }
    }

    if (cfg.format == "json") {
        json j;
        j["geometry"] = geometry_json(g);
        j["z"] = {z.real(), z.imag()};
        j["rows"] = jrows;
        if (!any_failed) j["fits"] = jfits;
        os << j.dump(2) << "\n";
    }
    emit(cfg, os.str());
    return any_failed ? 3 : 0;
}

int cmd_spectrum(const CommonConfig& cfg) {
    Geometry g = make_geometry(cfg);
    NystromOperator op = nystrom_build(g, cfg.nodes);
    NumericalSpectrum spec = nystrom_spectrum(op);
    std::vector<double> analytic = analytic_spectrum(g, spec.valid_count);

    std::ostringstream os;
    json jrows = json::array();
    if (cfg.format != "json") os << "index,mu_numeric,lambda_analytic,rel_err\n";
    for (int i = 0; i < spec.valid_count; ++i) {
        double mu = spec.eigenvalues[i];
        double lam = i < static_cast<int>(analytic.size()) ? analytic[i] : 0.0;
        double rel = lam > 0.0 ? std::fabs(mu - lam) / lam : 0.0;
        if (cfg.format != "json")
            os << i << "," << fmt17(mu) << "," << fmt17(lam) << "," << fmt17(rel) << "\n";
        else
            jrows.push_back(
                {{"index", i}, {"mu_numeric", mu}, {"lambda_analytic", lam}, {"rel_err", rel}});
    }

    json jmeta;
    jmeta["noise_floor"] = spec.noise_floor;
    jmeta["valid_count"] = spec.valid_count;
    jmeta["decay_slope"] = spec.decay_slope;
    if (cfg.format != "json") {
        os << "# noise_floor," << fmt17(spec.noise_floor) << "\n";
        os << "# valid_count," << spec.valid_count << "\n";
        os << "# decay_slope," << fmt17(spec.decay_slope) << "\n";
    }
    if (const auto* a = std::get_if<Annulus>(&g)) {
        if (a->rho <= 1e-8) {
            ParfenovFit fit = parfenov_rate(op);
            if (cfg.format != "json") {
                os << "# parfenov_rho_hat," << fmt17(fit.rho_hat) << "\n";
                os << "# parfenov_r_squared," << fmt17(fit.r_squared) << "\n";
            } else {
                jmeta["parfenov_rho_hat"] = fit.rho_hat;
                jmeta["parfenov_r_squared"] = fit.r_squared;
            }
        } else {
            // proper annulus: the spectrum interleaves two geometric branches
            double outer = a->r * a->r, inner = (a->rho / a->r) * (a->rho / a->r);
            if (cfg.format != "json") {
                os << "# branch_ratios," << fmt17(outer) << "," << fmt17(inner) << "\n";
            } else {
                jmeta["branch_ratios"] = {outer, inner};
            }
        }
    }
    if (cfg.format == "json") {
        json j;
        j["geometry"] = geometry_json(g);
        j["rows"] = jrows;
        j["meta"] = jmeta;
        os << j.dump(2) << "\n";
    }
    emit(cfg, os.str());
    return 0;
}

int cmd_maximizer(const CommonConfig& cfg) {
    Geometry g = make_geometry(cfg);
    cdouble z = make_z(cfg);
    Maximizer m = maximizer(g, z, cfg.eps, cfg.tol);

    // tabulation grid: the data curve (64 points)
    std::vector<cdouble> grid;
    const int n_grid = 64;
    if (const auto* a = std::get_if<Annulus>(&g)) {
        for (int j = 0; j < n_grid; ++j)
            grid.push_back(std::polar(a->r, 2.0 * M_PI * j / n_grid));
    } else if (const auto* h = std::get_if<HalfPlaneGeometry>(&g)) {
        for (int j = 0; j < n_grid; ++j)
            grid.push_back(cdouble(0.0, 1.0) + std::polar(h->r, 2.0 * M_PI * j / n_grid));
    } else {
        for (int j = 0; j < n_grid; ++j)
            grid.push_back(cdouble(-1.0 + 2.0 * (j + 0.5) / n_grid, 0.0));
    }

    std::ostringstream os;
    json jrows = json::array();
    if (cfg.format != "json") os << "index,zeta_re,zeta_im,m_re,m_im,abs_m\n";
    for (int j = 0; j < n_grid; ++j) {
        cdouble v = m.eval(grid[j]);
        if (cfg.format != "json")
            os << j << "," << fmt17(grid[j].real()) << "," << fmt17(grid[j].imag()) << ","
               << fmt17(v.real()) << "," << fmt17(v.imag()) << "," << fmt17(std::abs(v)) << "\n";
        else
            jrows.push_back({{"index", j},
                             {"zeta", {grid[j].real(), grid[j].imag()}},
                             {"value", {v.real(), v.imag()}},
                             {"abs", std::abs(v)}});
    }
    if (cfg.format != "json") {
        os << "# gamma," << fmt17(m.gamma) << "\n";
        os << "# abs_at_z," << fmt17(m.abs_at_z) << "\n";
        os << "# norm_H," << fmt17(m.norm_h) << "\n";
        os << "# norm_Gamma," << fmt17(m.norm_gamma) << "\n";
    } else {
        json j;
        j["geometry"] = geometry_json(g);
        j["z"] = {z.real(), z.imag()};
        j["eps"] = cfg.eps;
        j["rows"] = jrows;
        j["gamma"] = m.gamma;
        j["abs_at_z"] = m.abs_at_z;
        j["norm_H"] = m.norm_h;
        j["norm_Gamma"] = m.norm_gamma;
        os << j.dump(2) << "\n";
    }
    emit(cfg, os.str());
    return 0;
}

int cmd_verify(const CommonConfig& cfg, const std::string& sum_scan_spec,
               double forced_slope_target, bool json_report) {
    VerifyOptions opt;
    opt.nodes = cfg.nodes;
    opt.threads = thread_cap();
    opt.forced_slope_target = forced_slope_target;
    if (!sum_scan_spec.empty()) {
        auto [a, b] = parse_pair(sum_scan_spec, "--lemma-a1");
        opt.sum_scan_alpha = a;
        opt.sum_scan_beta = b;
    }
    std::vector<CheckResult> results = run_verification(opt);
    bool all_pass = true;
    std::ostringstream os;
    if (json_report || cfg.format == "json") {
        json checks = json::array();
        for (const auto& r : results) {
            all_pass = all_pass && r.pass;
            checks.push_back({{"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
        }
        json j;
        j["checks"] = checks;
        j["all_pass"] = all_pass;
        os << j.dump(2) << "\n";
    } else {
        for (const auto& r : results) {
            all_pass = all_pass && r.pass;
            os << (r.pass ? "PASS " : "FAIL ") << r.name << ": " << r.detail << "\n";
        }
        os << (all_pass ? "verification passed" : "verification FAILED") << " ("
           << results.size() << " checks)\n";
    }
    emit(cfg, os.str());
    return all_pass ? 0 : 1;
}

void add_common(CLI::App* sub, CommonConfig& cfg) {
    sub->add_option("--annulus", cfg.annulus_spec, "annulus geometry RHO,R");
    sub->add_option("--halfplane", cfg.halfplane_r, "half-plane data-circle radius R");
    sub->add_option("--ellipse", cfg.ellipse_r, "Bernstein ellipse parameter R");
    sub->add_option("--z", cfg.z_spec, "evaluation point RE,IM");
    sub->add_option("--eps", cfg.eps, "noise level");
    sub->add_option("--eps-range", cfg.eps_range_spec, "geometric sweep grid LO,HI,N");
    sub->add_option("--nodes", cfg.nodes, "quadrature node count M (even, >= 16)");
    sub->add_option("--tol", cfg.tol, "series truncation tolerance");
    sub->add_option("--format", cfg.format, "output format: csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--out", cfg.out_path, "write output to this file instead of stdout");
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"contstab: power-law stability of analytic continuation "
                 "(exponents, worst-case maximizers, Tikhonov solves, Nystrom spectra)"};
    app.require_subcommand(1);

    CommonConfig cfg_exponent, cfg_sweep, cfg_spectrum, cfg_maximizer, cfg_verify;
    std::string sum_scan_spec;
    double forced_slope_target = std::numeric_limits<double>::quiet_NaN();
    bool verify_json = false;

    CLI::App* s_exp = app.add_subcommand("exponent", "closed-form stability exponent at z");
    add_common(s_exp, cfg_exponent);
    CLI::App* s_sweep = app.add_subcommand("sweep", "eps sweep of bound/maximizer/norms with "
                                                    "log-log fits");
    add_common(s_sweep, cfg_sweep);
    CLI::App* s_spec = app.add_subcommand("spectrum", "Nystrom spectrum vs closed form");
    add_common(s_spec, cfg_spectrum);
    CLI::App* s_max = app.add_subcommand("maximizer", "tabulate the worst-case maximizer on "
                                                      "the data curve");
    add_common(s_max, cfg_maximizer);
    CLI::App* s_ver = app.add_subcommand("verify", "run the full invariant suite");
    add_common(s_ver, cfg_verify);
    s_ver->add_option("--lemma-a1", sum_scan_spec,
                      "run the switchover-sum harness with decay rates ALPHA,BETA");
    s_ver->add_option("--force-slope-target", forced_slope_target,
                      "override the annulus sweep slope target (negative control)");
    s_ver->add_flag("--json", verify_json, "emit a structured JSON report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (s_exp->parsed()) return cmd_exponent(cfg_exponent);
        if (s_sweep->parsed()) return cmd_sweep(cfg_sweep);
        if (s_spec->parsed()) return cmd_spectrum(cfg_spectrum);
        if (s_max->parsed()) return cmd_maximizer(cfg_maximizer);
        if (s_ver->parsed())
            return cmd_verify(cfg_verify, sum_scan_spec, forced_slope_target, verify_json);
    } catch (const ConfigError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const ResolutionError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}

} // namespace contstab::cli
