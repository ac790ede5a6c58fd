#pragma once

#include <Eigen/Dense>
#include <functional>

#include "nonlocal/field.hpp"
#include "nonlocal/kernel.hpp"

namespace nonlocal {

/// Discretization of u -> J*u - u + a(x)u on a periodic grid.
///
/// conv holds the quadrature-weighted periodized kernel (h * Ktilde) with rows
/// renormalized to exact unit mass, so conv * ones == ones and constants are
/// exact eigenfunctions when a is constant.  k_shift = max(0, 1 - min a) makes
/// b = a + k_shift >= 1, which keeps the cone form conv + diag(b) nonnegative
/// and well conditioned for power iteration.
struct PeriodicOperator {
  PeriodicGrid grid;
  Eigen::MatrixXd conv;
  Eigen::VectorXd a;
  double k_shift = 0.0;
  int k_max = 0;

  Eigen::VectorXd b() const { return a.array() + k_shift; }
  Eigen::MatrixXd matrix() const;       // conv - I + diag(a)
  Eigen::MatrixXd cone_matrix() const;  // conv + diag(a + k_shift)
  Eigen::VectorXd apply_m(const Eigen::VectorXd& u) const { return conv * u - u; }
  GridFunction apply(const GridFunction& u) const;
};

PeriodicOperator assemble_periodic(const Kernel& kernel, const Coefficient& a,
                                   const PeriodicGrid& grid, double tail_tol = 1e-12);
PeriodicOperator assemble_periodic(const Kernel& kernel, const Eigen::VectorXd& a_vals,
                                   const PeriodicGrid& grid, double tail_tol = 1e-12);

/// Dirichlet truncation on an interval: the function is extended by zero, so the
/// convolution part keeps only in-domain cell masses and its row sums stay <= 1
/// (mass escapes through the boundary).  No renormalization.
struct DirichletOperator {
  IntervalGrid grid;
  Eigen::MatrixXd conv;  // conv(i, j) = integral over cell_j of J(x_i - y) dy
  Eigen::VectorXd a;
  double c_shift = 0.0;  // a + c_shift >= 1

  Eigen::MatrixXd matrix() const;       // conv - I + diag(a)
  Eigen::MatrixXd cone_matrix() const;  // conv + diag(a + c_shift)
  Eigen::VectorXd apply_m(const Eigen::VectorXd& u) const { return conv * u - u; }
  GridFunction apply(const GridFunction& u) const;
};

DirichletOperator assemble_dirichlet(const Kernel& kernel, const Coefficient& a,
                                     const IntervalGrid& grid);
DirichletOperator assemble_dirichlet(const Kernel& kernel, const Eigen::VectorXd& a_vals,
                                     const IntervalGrid& grid);

/// Sup-norm defect of the steady equation: max_i |M[u]_i + f(x_i, u_i)|.
double steady_defect_sup(const PeriodicOperator& op,
                         const std::function<double(double, double)>& f, const GridFunction& u);

}  // namespace nonlocal
