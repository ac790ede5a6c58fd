#include "nonlocal/operators.hpp"

#include <cmath>

namespace nonlocal {

Eigen::MatrixXd PeriodicOperator::matrix() const {
  Eigen::MatrixXd m = conv;
  m.diagonal() -= Eigen::VectorXd::Ones(grid.N);
  m.diagonal() += a;
  return m;
}

Eigen::MatrixXd PeriodicOperator::cone_matrix() const {
  Eigen::MatrixXd m = conv;
  m.diagonal() += b();
  return m;
}

GridFunction PeriodicOperator::apply(const GridFunction& u) const {
  if (!grids_equal(u.grid, Grid(grid))) fail(Errc::grid_mismatch, "operator/grid mismatch");
  Eigen::VectorXd out = conv * u.values - u.values + a.cwiseProduct(u.values);
  return GridFunction(u.grid, std::move(out));
}

PeriodicOperator assemble_periodic(const Kernel& kernel, const Coefficient& a,
                                   const PeriodicGrid& grid, double tail_tol) {
  const double two_r = 2.0 * grid.R;
  if (std::abs(a.period - two_r) > 1e-12 * std::max(1.0, two_r))
    fail(Errc::period_mismatch, "coefficient period does not match the grid");
  return assemble_periodic(kernel, a.sample(Grid(grid)), grid, tail_tol);
}

PeriodicOperator assemble_periodic(const Kernel& kernel, const Eigen::VectorXd& a_vals,
                                   const PeriodicGrid& grid, double tail_tol) {
  if (a_vals.size() != grid.N) fail(Errc::grid_mismatch, "coefficient samples do not match grid");
  const KernelPower j1 = convolve_power(kernel, 1, 256);
  const PeriodizedKernelMatrix kt = periodize(j1, grid, tail_tol);

  PeriodicOperator op{grid, kt.h * kt.entries, a_vals,
                      std::max(0.0, 1.0 - a_vals.minCoeff()), kt.k_max};
  return op;
}

Eigen::MatrixXd DirichletOperator::matrix() const {
  Eigen::MatrixXd m = conv;
  m.diagonal() -= Eigen::VectorXd::Ones(grid.N);
  m.diagonal() += a;
  return m;
}

Eigen::MatrixXd DirichletOperator::cone_matrix() const {
  Eigen::MatrixXd m = conv;
  m.diagonal() += (a.array() + c_shift).matrix();
  return m;
}

GridFunction DirichletOperator::apply(const GridFunction& u) const {
  if (!grids_equal(u.grid, Grid(grid))) fail(Errc::grid_mismatch, "operator/grid mismatch");
  Eigen::VectorXd out = conv * u.values - u.values + a.cwiseProduct(u.values);
  return GridFunction(u.grid, std::move(out));
}

DirichletOperator assemble_dirichlet(const Kernel& kernel, const Coefficient& a,
                                     const IntervalGrid& grid) {
  return assemble_dirichlet(kernel, a.sample(Grid(grid)), grid);
}

DirichletOperator assemble_dirichlet(const Kernel& kernel, const Eigen::VectorXd& a_vals,
                                     const IntervalGrid& grid) {
  if (a_vals.size() != grid.N) fail(Errc::grid_mismatch, "coefficient samples do not match grid");
  const int n = grid.N;
  const double h = grid.h();

  // Toeplitz generator from exact cell masses: conv(i, j) depends on (i - j) only.
  Eigen::VectorXd gen(2 * n - 1);
  for (int m = -(n - 1); m <= n - 1; ++m) {
    const double d = m * h;
    gen[m + n - 1] = kernel.cell_mass(d - 0.5 * h, d + 0.5 * h);
  }

  DirichletOperator op{grid, Eigen::MatrixXd(n, n), a_vals, std::max(0.0, 1.0 - a_vals.minCoeff())};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) op.conv(i, j) = gen[i - j + n - 1];
  return op;
}

double steady_defect_sup(const PeriodicOperator& op,
                         const std::function<double(double, double)>& f, const GridFunction& u) {
  if (!grids_equal(u.grid, Grid(op.grid))) fail(Errc::grid_mismatch, "operator/grid mismatch");
  if (u.values.minCoeff() < 0.0) fail(Errc::bad_input, "steady defect expects u >= 0");
  const Eigen::VectorXd mu = op.apply_m(u.values);
  double sup = 0.0;
  for (int i = 0; i < u.size(); ++i)
    sup = std::max(sup, std::abs(mu[i] + f(op.grid.point(i), u.values[i])));
  return sup;
}

}  // namespace nonlocal
