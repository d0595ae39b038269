#include "contstab/powerlaw.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <sstream>
#include <string>

namespace contstab {

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
    const size_t n = x.size();
    if (n != y.size() || n < 2) throw ConfigError("fit_loglog: need at least two points");
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < n; ++i) { sx += x[i]; sy += y[i]; }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0.0) throw ConfigError("fit_loglog: degenerate abscissa");
    LogLogFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (size_t i = 0; i < n; ++i) {
        double resid = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += resid * resid;
        f.residual_max = std::max(f.residual_max, std::fabs(resid));
    }
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    return f;
}

std::vector<double> geometric_grid(double lo, double hi, int points) {
    if (points < 2 || !(lo > 0.0) || !(lo < hi))
        throw ConfigError("geometric_grid: need 0 < lo < hi and at least 2 points");
    std::vector<double> grid(points);
    double lhi = std::log(hi), llo = std::log(lo);
    for (int i = 0; i < points; ++i)
        grid[i] = std::exp(lhi + (llo - lhi) * static_cast<double>(i) / (points - 1));
    grid.front() = hi;
    grid.back() = lo;
    return grid;
}

namespace {

template <typename E>
[[noreturn]] void rethrow_annotated(const E& e, double eps) {
    std::ostringstream os;
    os << "sweep evaluator failed at eps=" << eps << ": " << e.what();
    throw E(os.str());
}

} // namespace

SweepResult sweep(const std::function<double(double)>& quantity, double eps_lo, double eps_hi,
                  int points, int threads) {
    if (!(eps_lo > 0.0 && eps_lo < eps_hi && eps_hi < 1.0))
        throw ConfigError("sweep: need 0 < eps_lo < eps_hi < 1");
    if (points < 5) throw ConfigError("sweep: need at least 5 grid points");

    SweepResult res;
    res.eps_grid = geometric_grid(eps_lo, eps_hi, points);
    res.values.assign(points, 0.0);

    auto eval_at = [&](int i) {
        double eps = res.eps_grid[i];
        try {
            res.values[i] = quantity(eps);
        } catch (const NearDegenerateError& e) { rethrow_annotated(e, eps); }
          catch (const BranchPointError& e)    { rethrow_annotated(e, eps); }
          catch (const PoleError& e)           { rethrow_annotated(e, eps); }
          catch (const DomainError& e)         { rethrow_annotated(e, eps); }
          catch (const ConfigError& e)         { rethrow_annotated(e, eps); }
          catch (const ResolutionError& e)     { rethrow_annotated(e, eps); }
          catch (const NumericalError& e)      { rethrow_annotated(e, eps); }
        if (!(res.values[i] > 0.0))
            throw NumericalError("sweep: non-positive value at eps=" +
                                 std::to_string(res.eps_grid[i]));
    };

    if (threads <= 1) {
        for (int i = 0; i < points; ++i) eval_at(i);
    } else {
        // each grid point writes its own slot, so scheduling cannot change
        // the assembled result
        std::vector<std::future<void>> futs;
        futs.reserve(points);
        std::atomic<int> next{0};
        int workers = std::min(threads, points);
        for (int w = 0; w < workers; ++w)
            futs.push_back(std::async(std::launch::async, [&] {
                for (int i = next.fetch_add(1); i < points; i = next.fetch_add(1)) eval_at(i);
            }));
        for (auto& f : futs) f.get(); // rethrows the first failure
    }

    std::vector<double> lx(points), ly(points);
    for (int i = 0; i < points; ++i) {
        lx[i] = std::log(res.eps_grid[i]);
        ly[i] = std::log(res.values[i]);
    }
    LogLogFit fit = fit_loglog(lx, ly);
    if (fit.r_squared < 0.999) {
        // drop the largest eps decade once; asymptotics live at small eps
        std::vector<double> lx2, ly2;
        for (int i = 0; i < points; ++i) {
            if (res.eps_grid[i] <= eps_hi / 10.0) { lx2.push_back(lx[i]); ly2.push_back(ly[i]); }
        }
        if (lx2.size() >= 2) {
            fit = fit_loglog(lx2, ly2);
            res.dropped_top_decade = true;
        }
    }
    res.fitted_slope = fit.slope;
    res.intercept = fit.intercept;
    res.r_squared = fit.r_squared;
    res.residual_max = fit.residual_max;
    return res;
}

SwitchoverSumReport switchover_sum_scan(double alpha, double beta, double eta_lo, double eta_hi,
                                        int points) {
    if (!(beta > 0.0 && beta < alpha))
        throw ConfigError("switchover_sum_scan: need 0 < beta < alpha");
    if (!(eta_lo > 0.0 && eta_lo < eta_hi && eta_hi < 1.0))
        throw ConfigError("switchover_sum_scan: need 0 < eta_lo < eta_hi < 1");
    if (points < 5) throw ConfigError("switchover_sum_scan: need at least 5 points");

    SwitchoverSumReport rep;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.eta_grid = geometric_grid(eta_lo, eta_hi, points);
    rep.sum_linear.resize(points);
    rep.sum_squared.resize(points);
    rep.switchover_index.resize(points);

    constexpr double rel_tol = 1e-16;
    constexpr long cap = 100000000;
    for (int i = 0; i < points; ++i) {
        const double eta = rep.eta_grid[i];
        double s1 = 0.0, s2 = 0.0, prev = -1.0;
        for (long n = 1;; ++n) {
            if (n >= cap) throw ResolutionError("switchover_sum_scan: term cap exceeded");
            double a = std::exp(-alpha * n);
            double b = std::exp(-beta * n);
            double t1 = b / (a + eta);
            double t2 = b / ((a + eta) * (a + eta));
            s1 += t1;
            s2 += t2;
            if (n >= 2 && t1 <= prev && t1 <= rel_tol * s1 && t2 <= rel_tol * s2) break;
            prev = t1;
        }
        rep.sum_linear[i] = s1;
        rep.sum_squared[i] = s2;
        rep.switchover_index[i] = switchover_index(alpha, eta);
    }

    std::vector<double> lx(points), l1(points), l2(points);
    for (int i = 0; i < points; ++i) {
        lx[i] = std::log(rep.eta_grid[i]);
        l1[i] = std::log(rep.sum_linear[i]);
        l2[i] = std::log(rep.sum_squared[i]);
    }
    rep.slope_linear = fit_loglog(lx, l1).slope;
    rep.slope_squared = fit_loglog(lx, l2).slope;
    return rep;
}

long switchover_index(double alpha, double eta) {
    if (!(alpha > 0.0) || !(eta > 0.0))
        throw ConfigError("switchover_index: need alpha > 0 and eta > 0");
    long j = 0;
    for (long n = 1; std::exp(-alpha * n) >= eta; ++n) {
        j = n;
        if (n > 100000000) throw ResolutionError("switchover_index: scan cap exceeded");
    }
    return j;
}

} // namespace contstab
