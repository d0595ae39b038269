#pragma once

#include <algorithm>
#include <vector>

#include "contstab/ddreal.hpp"
#include "contstab/errors.hpp"

// Dense Hermitian eigenvalues, templated on the real scalar so the same code
// runs in double and in double-double.  Two stages:
//   1. unitary Householder reduction to a real symmetric tridiagonal,
//   2. implicit-shift QL on the tridiagonal (eigenvalues only).
// Eigenvectors are never needed in this project, which keeps stage 2 at
// O(n^2) and the whole solve at a single O(n^3) pass.

namespace contstab {

namespace eig_detail {

template <typename R>
R pyth(R a, R b) {
    using std::fabs;
    using std::sqrt;
    R aa = fabs(a), ab = fabs(b);
    R m = aa > ab ? aa : ab;
    if (m == R(0.0)) return R(0.0);
    R x = aa / m, y = ab / m;
    return m * sqrt(x * x + y * y);
}

template <typename R>
R sign_like(R magnitude, R sign_of) {
    using std::fabs;
    return sign_of < R(0.0) ? -fabs(magnitude) : fabs(magnitude);
}

// Reduce Hermitian A (row-major, full storage) to real tridiagonal (d, e)
// by elementary reflectors H = I - tau v v^H; the last reflector also
// absorbs the phase of the final subdiagonal so e is real throughout.
template <typename R>
void tridiagonalize(std::vector<Cx<R>>& a, int n, std::vector<R>& d, std::vector<R>& e) {
    using std::sqrt;
    d.assign(n, R(0.0));
    e.assign(n > 0 ? n : 0, R(0.0));
    std::vector<Cx<R>> v(n), w(n);

    for (int i = 0; i + 1 < n; ++i) {
        Cx<R> alpha = a[(i + 1) * n + i];
        R xnorm_sq = R(0.0);
        for (int j = i + 2; j < n; ++j) xnorm_sq = xnorm_sq + norm_sq(a[j * n + i]);

        if (xnorm_sq == R(0.0) && alpha.im == R(0.0)) {
            e[i] = alpha.re; // already tridiagonal here
            continue;
        }

        R beta = sqrt(norm_sq(alpha) + xnorm_sq);
        if (alpha.re > R(0.0)) beta = -beta;
        Cx<R> tau{(beta - alpha.re) / beta, -alpha.im / beta};
        Cx<R> denom = alpha - Cx<R>(beta);
        v[i + 1] = Cx<R>(R(1.0));
        for (int j = i + 2; j < n; ++j) v[j] = a[j * n + i] / denom;
        e[i] = beta;

        // w = tau * A_trailing * v
        for (int j = i + 1; j < n; ++j) {
            Cx<R> s{};
            const Cx<R>* row = &a[j * n];
            for (int k = i + 1; k < n; ++k) s = s + row[k] * v[k];
            w[j] = tau * s;
        }
        // w -= (tau/2) (w^H v) v
        Cx<R> dotc{};
        for (int j = i + 1; j < n; ++j) dotc = dotc + conj(w[j]) * v[j];
        Cx<R> corr = Cx<R>(R(-0.5)) * tau * dotc;
        for (int j = i + 1; j < n; ++j) w[j] = w[j] + corr * v[j];
        // A -= v w^H + w v^H on the trailing block
        for (int j = i + 1; j < n; ++j) {
            Cx<R>* row = &a[j * n];
            Cx<R> vj = v[j], wj = w[j];
            for (int k = i + 1; k < n; ++k)
                row[k] = row[k] - vj * conj(w[k]) - wj * conj(v[k]);
        }
    }
    for (int i = 0; i < n; ++i) d[i] = a[i * n + i].re;
}

// Implicit-shift QL, eigenvalues only (classic tql1 control flow).  Besides
// the relative deflation test, subdiagonals below eps*||T|| are treated as
// zero outright: the kernel matrices here are graded over 100+ decades and
// rotations in the denormal tail would otherwise stall the iteration.  The
// absolute floor perturbs eigenvalues by no more than the eps*||T|| the
// algorithm claims anyway.
template <typename R>
void ql_eigenvalues(std::vector<R>& d, std::vector<R>& e) {
    using std::fabs;
    const int n = static_cast<int>(d.size());
    if (n == 0) return;
    e.resize(n, R(0.0));
    e[n - 1] = R(0.0);
    const R eps = R(real_traits<R>::eps());

    R anorm(0.0);
    for (int i = 0; i < n; ++i) {
        R row = fabs(d[i]);
        if (i + 1 < n) row = row + fabs(e[i]);
        if (i > 0) row = row + fabs(e[i - 1]);
        if (row > anorm) anorm = row;
    }
    const R floor_abs = eps * anorm;

    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m + 1 < n; ++m) {
                R scale = fabs(d[m]) + fabs(d[m + 1]);
                if (fabs(e[m]) <= eps * scale || fabs(e[m]) <= floor_abs) break;
            }
            if (m != l) {
                if (iter++ == 80)
                    throw NumericalError("hermitian_eigenvalues: QL iteration did not converge");
                R g = (d[l + 1] - d[l]) / (R(2.0) * e[l]);
                R r = pyth(g, R(1.0));
                g = d[m] - d[l] + e[l] / (g + sign_like(r, g));
                R s(1.0), c(1.0), p(0.0);
                bool underflow = false;
                for (int i = m - 1; i >= l; --i) {
                    R f = s * e[i];
                    R b = c * e[i];
                    r = pyth(f, g);
                    e[i + 1] = r;
                    if (r == R(0.0)) {
                        d[i + 1] = d[i + 1] - p;
                        e[m] = R(0.0);
                        underflow = (i >= l);
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + R(2.0) * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (underflow) continue;
                d[l] = d[l] - p;
                e[l] = g;
                e[m] = R(0.0);
            }
        } while (m != l);
    }
}

} // namespace eig_detail

/// Eigenvalues of a Hermitian matrix (row-major full storage), ascending.
template <typename R>
std::vector<R> hermitian_eigenvalues(std::vector<Cx<R>> a, int n) {
    if (n < 0 || static_cast<size_t>(n) * n != a.size())
        throw NumericalError("hermitian_eigenvalues: matrix size mismatch");
    std::vector<R> d, e;
    eig_detail::tridiagonalize(a, n, d, e);
    eig_detail::ql_eigenvalues(d, e);
    std::sort(d.begin(), d.end());
    return d;
}

} // namespace contstab
