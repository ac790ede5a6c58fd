#pragma once

#include <optional>
#include <vector>

#include "nonlocal/operators.hpp"

namespace nonlocal {

/// Principal eigenpair of -(M + a).  mu is the eigenvalue of the positive form
/// conv + diag(a + shift), related by lambda1 = -mu + 1 + shift.  phi is strictly
/// positive, normalized so quadrature(phi^2) equals 2R on periodic grids and 1 on
/// interval grids.  residual is the sup norm of (M + a)phi + lambda1 phi, which
/// coincides with the eigen-residual of the positive form.
struct EigenResult {
  double lambda1 = 0.0;
  GridFunction phi;
  double mu = 0.0;
  double residual = 0.0;
  int iterations = 0;
  std::optional<double> gap;  // |mu_2| / mu_1, filled by the dense oracle
  double shift = 0.0;
};

/// Deterministic power iteration on the nonnegative cone matrix, started from
/// the all-ones vector.  Stops when the sup-norm eigen-residual of the finally
/// normalized eigenfunction drops below tol.
EigenResult principal_eig_periodic(const PeriodicOperator& op, double tol, int max_iter);
EigenResult principal_eig_periodic(const Kernel& kernel, const Coefficient& a,
                                   const PeriodicGrid& grid, double tol = 1e-12,
                                   int max_iter = 200000);

EigenResult principal_eig_dirichlet(const DirichletOperator& op, double tol, int max_iter);
EigenResult principal_eig_dirichlet(const Kernel& kernel, const Coefficient& a,
                                    const IntervalGrid& grid, double tol = 1e-12,
                                    int max_iter = 500000);

/// Full eigendecomposition of the cone matrix (N <= 2048): independent check of
/// the iterative solvers.  Picks the eigenvalue of maximal real part, verifies it
/// is real with an entrywise-positive eigenvector, and reports the modulus gap
/// |mu_2|/mu_1 < 1 as simplicity evidence.
EigenResult principal_eig_dense_oracle(const PeriodicOperator& op);
EigenResult principal_eig_dense_oracle(const DirichletOperator& op);

struct DensePrincipal {
  double mu = 0.0;
  Eigen::VectorXd phi;
  double gap = 0.0;
};

/// Dense principal eigenpair of an arbitrary square matrix expected to have a
/// real simple dominant eigenvalue with a positive eigenvector.
DensePrincipal dense_principal(const Eigen::MatrixXd& B);

struct RayleighResult {
  double value = 0.0;
  /// The quotient characterizes lambda1 variationally only for symmetric kernels;
  /// for asymmetric kernels it is reported but carries no minimax meaning.
  bool variational = false;
};

RayleighResult rayleigh_quotient(const Kernel& kernel, const Coefficient& a,
                                 const GridFunction& phi);

struct ConvergenceRow {
  double r = 0.0;
  double lambda = 0.0;
  double gap = 0.0;  // lambda - lambda1_ref
};

struct ConvergenceStudy {
  std::vector<ConvergenceRow> rows;
  double lambda1_ref = 0.0;
  double y_requested = 0.0;
  double y_used = 0.0;
  int points_per_unit = 0;
  double final_gap = 0.0;
};

/// Dirichlet eigenvalues on intervals (y - r, y + r) for increasing radii,
/// against the periodic eigenvalue at the same spacing h = 1/points_per_unit.
/// y is snapped to the h-lattice so all interval grids and the periodic
/// reference share one lattice; with that alignment the discrete domain
/// monotonicity lambda_r >= lambda1 holds to rounding.  Symmetric kernels only;
/// solved with the dense symmetric engine for accuracy at large radii.
ConvergenceStudy dirichlet_convergence_study(const Kernel& kernel, const Coefficient& a, double y,
                                             const std::vector<double>& radii, int points_per_unit);

/// Constructive positivity certificate for the operator u -> J*u + b(x)u: builds
/// p, a compactly supported test function v and constants (gamma, delta) with
///   L^p v + b^p v >= (sigma^p + delta) v  pointwise on the grid,
/// where sigma = max b.  The discrete check accepts margin >= 0; the continuum
/// construction guarantees 1/4, which is reported alongside for comparison.
struct CertificateResult {
  int p = 0;
  double sigma = 0.0;
  double x0 = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;
  double delta = 0.0;  // always exactly gamma / 4
  GridFunction v;
  double margin = 0.0;
  double c_min = 0.0;       // lower bound of the periodized power on the grid
  double lipschitz_bp = 0.0;
  double continuum_bound = 0.25;
};

CertificateResult kpp_certificate(const Kernel& kernel, const Coefficient& b,
                                  const PeriodicGrid& grid);

}  // namespace nonlocal
