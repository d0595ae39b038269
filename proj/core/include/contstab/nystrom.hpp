#pragma once

#include <functional>
#include <vector>

#include "contstab/geometry.hpp"

namespace contstab {

/// Trapezoid-rule discretization of the restriction operator on the data
/// circle: nodes tau_j uniform in arc length, weights w_j = |Gamma|/M,
/// A_jk = p(tau_j, tau_k) w_k, and the symmetrized S = D^{1/2} A D^{-1/2}
/// (D = diag(w)), which is Hermitian.  The ellipse is discretized through
/// its annulus model (its own data curve [-1,1] is not a circle).
struct NystromOperator {
    Geometry geometry;
    int node_count;
    cdouble center;                 // of the data circle
    double radius;
    std::vector<cdouble> nodes;
    std::vector<double> weights;
    std::vector<cdouble> matrix_a;  // row-major M x M
    std::vector<cdouble> matrix_s;
};

/// Requires node_count even and >= 16.
NystromOperator nystrom_build(const Geometry& g, int node_count);

/// Numerical spectrum of the discretized operator, sorted descending.
/// The eigensolve runs in double-double arithmetic (nodes, kernel and
/// reduction alike): eigenvalues spanning 15+ decades keep full relative
/// accuracy, which plain double cannot deliver.  The noise floor below
/// which eigenvalues are excluded from rate fits stays pinned to the
/// artifact's nominal double precision: 1e3 * eps_double * mu_1.
struct NumericalSpectrum {
    std::vector<double> eigenvalues;
    double noise_floor = 0.0;
    int valid_count = 0;          // eigenvalues above the floor
    double decay_slope = 0.0;     // LS slope of log mu_n vs n over the valid range
    double decay_r_squared = 0.0;
};

NumericalSpectrum nystrom_spectrum(const NystromOperator& op);

/// Eigenvalue-decay fit in the disk limit (annulus with rho <= 1e-8):
/// mu_n ~ 2*pi*r^{2n+1}, so the log-slope is 2*ln(r) and rho_hat =
/// exp(slope/2) recovers the conformal radius r of the data circle.
struct ParfenovFit {
    double rho_hat = 0.0;
    double slope = 0.0;           // of log mu_n vs n
    double r_squared = 0.0;
    int used = 0;                 // eigenvalues in the fit
    double ratio_min = 0.0, ratio_max = 0.0;          // per-step mu_{n+1}/mu_n
    double prefactor_min = 0.0, prefactor_max = 0.0;  // mu_n / r^{2n+1}
};

/// Requires the operator's annulus to satisfy rho <= 1e-8; throws
/// ResolutionError when fewer than 5 eigenvalues clear the noise floor.
ParfenovFit parfenov_rate(const NystromOperator& op);

/// Grid solve of (A + eps^2 I) u = p_z|_Gamma and the off-grid extension
/// u(zeta) = (p_z(zeta) - (K u)(zeta)) / eps^2 with K applied by quadrature.
struct NystromSolution {
    std::vector<cdouble> values;        // u at the nodes
    double residual = 0.0;              // ||(A+eps^2 I)u - p_z||_2
    double grid_norm_gamma_sq = 0.0;    // sum_j w_j |u_j|^2
    std::function<cdouble(cdouble)> extend;
};

/// Refuses eps < 1e-6: the grid system's condition number is about
/// lambda_max/eps^2 and the direct solve would lose the answer.
NystromSolution nystrom_solve(const NystromOperator& op, cdouble z, double eps);

} // namespace contstab
