#include "nonlocal/steady.hpp"

#include <algorithm>
#include <cmath>

namespace nonlocal {

namespace {

// Finite u-lattice {0.1, 0.2, ...} capped at m_sup, used for the hypothesis checks.
std::vector<double> hypothesis_lattice(double m_sup) {
  std::vector<double> u;
  for (int k = 1; 0.1 * k <= m_sup + 1e-12; ++k) u.push_back(0.1 * k);
  return u;
}

}  // namespace

Nonlinearity Nonlinearity::kpp(const Coefficient& a, const PeriodicGrid& grid) {
  Nonlinearity f;
  f.form_ = Form::kpp;
  f.coeff_ = a;
  const Eigen::VectorXd av = a.sample(Grid(grid));
  f.m_sup_ = std::max(0.0, av.maxCoeff());
  // The logistic form satisfies the hypotheses identically; run the same
  // finite checks as the sampled form anyway.
  const auto lattice = hypothesis_lattice(f.m_sup_);
  for (int i = 0; i < grid.N; ++i) {
    const double x = grid.point(i);
    if (std::abs(f.f(x, 0.0)) > 1e-12)
      fail(Errc::hyp_f1_violation, "f(x,0) != 0 at x = " + std::to_string(x));
    for (std::size_t k = 1; k < lattice.size(); ++k) {
      if (!(f.f(x, lattice[k]) / lattice[k] < f.f(x, lattice[k - 1]) / lattice[k - 1]))
        fail(Errc::hyp_f1_violation, "f(x,u)/u not strictly decreasing at x = " + std::to_string(x));
    }
    if (f.m_sup_ > 0.0 && f.f(x, f.m_sup_) > 1e-12)
      fail(Errc::hyp_f1_violation, "f(x, m_sup) > 0 at x = " + std::to_string(x));
  }
  return f;
}

Nonlinearity Nonlinearity::custom(const CustomNonlinearityTable& table, const PeriodicGrid& grid) {
  if (table.nx < 2 || table.nu < 2) fail(Errc::bad_input, "custom table needs nx, nu >= 2");
  if (table.f_vals.rows() != table.nx || table.f_vals.cols() != table.nu ||
      table.fu_vals.rows() != table.nx || table.fu_vals.cols() != table.nu)
    fail(Errc::bad_input, "custom table dimensions do not match nx x nu");
  if (!(table.u_max > 0.0) || !(table.m_sup > 0.0) || table.m_sup > table.u_max + 1e-12)
    fail(Errc::bad_input, "custom table needs 0 < m_sup <= u_max");

  Nonlinearity f;
  f.form_ = Form::custom;
  f.table_ = table;
  f.m_sup_ = table.m_sup;

  const auto lattice = hypothesis_lattice(f.m_sup_);
  for (int i = 0; i < grid.N; ++i) {
    const double x = grid.point(i);
    if (std::abs(f.f(x, 0.0)) > 1e-12)
      fail(Errc::hyp_f1_violation, "f(x,0) != 0 at x = " + std::to_string(x));
    for (std::size_t k = 1; k < lattice.size(); ++k) {
      const double q1 = f.f(x, lattice[k - 1]) / lattice[k - 1];
      const double q2 = f.f(x, lattice[k]) / lattice[k];
      if (!(q2 < q1))
        fail(Errc::hyp_f1_violation, "f(x,u)/u not strictly decreasing at x = " +
                                         std::to_string(x) + ", u = " + std::to_string(lattice[k]));
    }
    if (f.f(x, f.m_sup_) > 1e-12)
      fail(Errc::hyp_f1_violation, "f(x, m_sup) > 0 at x = " + std::to_string(x));
  }
  return f;
}

namespace {

struct TableLookup {
  int i0, i1, j0, j1;
  double wx, wu;
};

TableLookup locate(const CustomNonlinearityTable& t, double x, double u) {
  const double dx = t.period / t.nx;
  double xr = std::remainder(x, t.period);  // [-period/2, period/2)
  if (xr >= 0.5 * t.period) xr -= t.period;
  double ti = (xr + 0.5 * t.period) / dx;
  int i0 = static_cast<int>(std::floor(ti));
  double wx = ti - i0;
  i0 = ((i0 % t.nx) + t.nx) % t.nx;
  const int i1 = (i0 + 1) % t.nx;

  const double du = t.u_max / (t.nu - 1);
  double tu = std::clamp(u, 0.0, t.u_max) / du;
  int j0 = std::min(static_cast<int>(std::floor(tu)), t.nu - 2);
  const double wu = tu - j0;
  return {i0, i1, j0, j0 + 1, wx, wu};
}

double bilerp(const Eigen::MatrixXd& vals, const TableLookup& l) {
  return (1.0 - l.wx) * ((1.0 - l.wu) * vals(l.i0, l.j0) + l.wu * vals(l.i0, l.j1)) +
         l.wx * ((1.0 - l.wu) * vals(l.i1, l.j0) + l.wu * vals(l.i1, l.j1));
}

}  // namespace

double Nonlinearity::f(double x, double u) const {
  if (form_ == Form::kpp) return u * ((*coeff_)(x)-u);
  return bilerp(table_->f_vals, locate(*table_, x, u));
}

double Nonlinearity::fu(double x, double u) const {
  if (form_ == Form::kpp) return (*coeff_)(x)-2.0 * u;
  return bilerp(table_->fu_vals, locate(*table_, x, u));
}

Eigen::VectorXd Nonlinearity::derivative_at_zero(const Grid& g) const {
  Eigen::VectorXd v(grid_size(g));
  for (int i = 0; i < v.size(); ++i) v[i] = fu(grid_point(g, i), 0.0);
  return v;
}

double Nonlinearity::min_fu(const PeriodicGrid& grid, double u_hi) const {
  if (form_ == Form::kpp) {
    const Eigen::VectorXd av = coeff_->sample(Grid(grid));
    return av.minCoeff() - 2.0 * u_hi;  // f_u = a - 2u is decreasing in u
  }
  const auto& t = *table_;
  const double du = t.u_max / (t.nu - 1);
  const int j_hi = std::min(t.nu - 1, static_cast<int>(std::ceil(u_hi / du)));
  double m = 0.0;
  for (int i = 0; i < t.nx; ++i)
    for (int j = 0; j <= j_hi; ++j) m = std::min(m, t.fu_vals(i, j));
  return m;
}

std::string to_string(Classification c) {
  switch (c) {
    case Classification::nontrivial_exists: return "nontrivial-exists";
    case Classification::only_trivial: return "only-trivial";
    case Classification::marginal: return "marginal";
  }
  return "?";
}

namespace {

double iteration_tau(const Nonlinearity& f, const PeriodicGrid& grid, double u_hi) {
  const double c_f = std::max(0.0, -f.min_fu(grid, u_hi));
  return 1.0 / (1.0 + c_f);
}

Eigen::VectorXd steady_rhs(const PeriodicOperator& m0, const Nonlinearity& f,
                           const Eigen::VectorXd& u) {
  Eigen::VectorXd rhs = m0.apply_m(u);
  for (int i = 0; i < u.size(); ++i) rhs[i] += f.f(m0.grid.point(i), u[i]);
  return rhs;
}

constexpr double kDefectSlack = 1e-12;

}  // namespace

IterateResult monotone_iterate(const PeriodicOperator& m0, const Nonlinearity& f,
                               const GridFunction& u0, IterationDirection direction, double tol,
                               int max_iter, double decay_floor) {
  if (!grids_equal(u0.grid, Grid(m0.grid))) fail(Errc::grid_mismatch, "init/grid mismatch");
  if (u0.values.minCoeff() < -kDefectSlack) fail(Errc::bad_input, "init must be nonnegative");

  const double u_hi = std::max(f.m_sup(), u0.values.maxCoeff());
  const double tau = iteration_tau(f, m0.grid, u_hi);

  Eigen::VectorXd u = u0.values;
  const Eigen::VectorXd defect0 = steady_rhs(m0, f, u);
  if (direction == IterationDirection::up && defect0.minCoeff() < -kDefectSlack)
    fail(Errc::inadmissible_init, "up iteration needs a discrete subsolution");
  if (direction == IterationDirection::down && defect0.maxCoeff() > kDefectSlack)
    fail(Errc::inadmissible_init, "down iteration needs a discrete supersolution");

  IterateResult out{GridFunction(u0.grid, u), 0, 0.0, {}, false};
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd w = u + tau * steady_rhs(m0, f, u);
    const Eigen::VectorXd diff = w - u;
    if (direction == IterationDirection::up && diff.minCoeff() < -kDefectSlack)
      fail(Errc::monotonicity_broken, "up iterate decreased");
    if (direction == IterationDirection::down && diff.maxCoeff() > kDefectSlack)
      fail(Errc::monotonicity_broken, "down iterate increased");
    const double step = diff.lpNorm<Eigen::Infinity>();
    u = w;
    out.step_trace.push_back(step);
    out.iterations = it;
    out.final_step = step;
    if (decay_floor >= 0.0 && u.maxCoeff() <= decay_floor) {
      out.hit_decay_floor = true;
      break;
    }
    if (tol > 0.0 && step < tol) break;
    if (it == max_iter) fail(Errc::max_iter_exceeded, "monotone iteration did not settle");
  }
  out.u = GridFunction(u0.grid, std::move(u));
  return out;
}

double subsolution_scale(const PeriodicOperator& m0, const Nonlinearity& f,
                         const GridFunction& phi1) {
  if (!(phi1.values.minCoeff() > 0.0)) fail(Errc::bad_input, "phi1 must be positive");
  for (int k = 0; k <= 40; ++k) {
    const double eps = std::ldexp(1.0, -k);
    const Eigen::VectorXd w = eps * phi1.values;
    if (w.maxCoeff() > f.m_sup() + kDefectSlack) continue;
    const Eigen::VectorXd defect = steady_rhs(m0, f, w);
    if (defect.minCoeff() >= -kDefectSlack) return eps;
  }
  fail(Errc::no_subsolution_found, "dyadic menu exhausted; lambda1 may be too close to 0");
}

Classification classify_existence(const Kernel& kernel, const Nonlinearity& f,
                                  const PeriodicGrid& grid, double margin_tol,
                                  EigenResult* eig_out, double eig_tol, int eig_max_iter) {
  const PeriodicOperator op = assemble_periodic(kernel, f.derivative_at_zero(Grid(grid)), grid);
  EigenResult eig = principal_eig_periodic(op, eig_tol, eig_max_iter);
  const double lambda = eig.lambda1;
  if (eig_out) *eig_out = std::move(eig);
  if (lambda < -margin_tol) return Classification::nontrivial_exists;
  if (lambda > margin_tol) return Classification::only_trivial;
  return Classification::marginal;
}

SteadyReport solve_steady(const Kernel& kernel, const Nonlinearity& f, const PeriodicGrid& grid,
                          const SteadyOptions& opts) {
  const PeriodicOperator op_a =
      assemble_periodic(kernel, f.derivative_at_zero(Grid(grid)), grid, opts.tail_tol);
  const EigenResult eig = principal_eig_periodic(op_a, opts.eig_tol, opts.eig_max_iter);

  // The zero-coefficient operator shares the convolution matrix.
  PeriodicOperator m0{grid, op_a.conv, Eigen::VectorXd::Zero(grid.N), 1.0, op_a.k_max};

  SteadyReport rep;
  rep.lambda1 = eig.lambda1;
  if (eig.lambda1 < -opts.margin_tol)
    rep.classification = Classification::nontrivial_exists;
  else if (eig.lambda1 > opts.margin_tol)
    rep.classification = Classification::only_trivial;
  else
    rep.classification = Classification::marginal;

  if (rep.classification == Classification::nontrivial_exists) {
    const double eps = subsolution_scale(m0, f, eig.phi);
    rep.subsolution_eps = eps;
    const double tau = iteration_tau(f, grid, f.m_sup());
    const double step_tol = opts.tol * tau;
    const GridFunction u_lo(Grid(grid), (eps * eig.phi.values).eval());
    IterateResult up =
        monotone_iterate(m0, f, u_lo, IterationDirection::up, step_tol, opts.max_iter);
    IterateResult down =
        monotone_iterate(m0, f, GridFunction::constant(Grid(grid), f.m_sup()),
                         IterationDirection::down, step_tol, opts.max_iter);
    rep.limits_gap = (up.u.values - down.u.values).lpNorm<Eigen::Infinity>();
    rep.iterations = up.iterations + down.iterations;
    rep.lower_bound = up.u.values.minCoeff();
    rep.residual = steady_defect_sup(
        m0, [&f](double x, double u) { return f.f(x, u); }, up.u);
    rep.up_trace = std::move(up.step_trace);
    rep.down_trace = std::move(down.step_trace);
    rep.p = std::move(up.u);
  } else if (rep.classification == Classification::only_trivial) {
    const GridFunction start = GridFunction::constant(Grid(grid), f.m_sup() + 1.0);
    IterateResult down = monotone_iterate(m0, f, start, IterationDirection::down, 0.0,
                                          opts.max_iter, opts.decay_tol);
    rep.decay_sup = down.u.values.maxCoeff();
    rep.iterations = down.iterations;
    rep.down_trace = std::move(down.step_trace);
  }
  return rep;
}

CompactSubsolutionResult compact_subsolution(const Kernel& kernel, const Nonlinearity& f,
                                             const PeriodicGrid& grid, double y,
                                             int points_per_unit, const SteadyOptions& opts) {
  if (points_per_unit < 2) fail(Errc::bad_input, "points_per_unit must be >= 2");
  const PeriodicOperator op_a =
      assemble_periodic(kernel, f.derivative_at_zero(Grid(grid)), grid, opts.tail_tol);
  const EigenResult eig = principal_eig_periodic(op_a, opts.eig_tol, opts.eig_max_iter);
  if (!(eig.lambda1 < 0.0))
    fail(Errc::lambda_sign, "compact subsolution requires lambda1 < 0");

  const double R = grid.R;
  const double h = 1.0 / points_per_unit;
  const double y_used = h * std::round((y - 0.5 * h) / h) + 0.5 * h;

  double r = 2.0 * R;
  std::optional<EigenResult> dir;
  std::optional<IntervalGrid> dgrid;
  while (true) {
    if (r > 128.0 * R + 1e-12)
      fail(Errc::no_radius_found, "no radius with lambda_{r,y} < lambda1/2 below 128R");
    long n_r = std::lround(2.0 * r * points_per_unit);
    n_r += n_r % 2;
    if (n_r > 2048) fail(Errc::no_radius_found, "interval grid would exceed the dense cap");
    const IntervalGrid g(y_used, 0.5 * n_r * h, static_cast<int>(n_r));
    const DirichletOperator dop = assemble_dirichlet(kernel, f.derivative_at_zero(Grid(g)), g);
    EigenResult er = principal_eig_dense_oracle(dop);
    if (er.lambda1 < 0.5 * eig.lambda1) {
      dir = std::move(er);
      dgrid = g;
      break;
    }
    r *= 2.0;
  }

  const IntervalGrid& g = *dgrid;
  const Eigen::VectorXd& phi = dir->phi.values;
  const int n = g.N;
  const double reach = std::max(std::abs(kernel.support_lo()), std::abs(kernel.support_hi()));
  const int pad = static_cast<int>(std::ceil(reach / g.h())) + 1;

  // Cell masses of the kernel against the interval lattice, reused per gamma.
  Eigen::MatrixXd cellmass(n + 2 * pad, n);
  for (int q = 0; q < n + 2 * pad; ++q) {
    const double x = g.point(q - pad);
    for (int j = 0; j < n; ++j) {
      const double d = x - g.point(j);
      cellmass(q, j) = kernel.cell_mass(d - 0.5 * g.h(), d + 0.5 * g.h());
    }
  }
  const Eigen::VectorXd conv_phi = cellmass * phi;

  for (int k = 0; k <= 40; ++k) {
    const double gamma = std::ldexp(1.0, -k);
    double defect_min = std::numeric_limits<double>::infinity();
    for (int q = 0; q < n + 2 * pad; ++q) {
      const int i = q - pad;
      const double x = g.point(i);
      const double phi_here = (i >= 0 && i < n) ? phi[i] : 0.0;
      const double d = gamma * (conv_phi[q] - phi_here) + f.f(x, gamma * phi_here);
      defect_min = std::min(defect_min, d);
    }
    if (defect_min >= -kDefectSlack)
      return CompactSubsolutionResult{gamma, dir->phi, g.radius, dir->lambda1, y_used, defect_min};
  }
  fail(Errc::no_subsolution_found, "dyadic menu exhausted for the compact subsolution");
}

UniquenessReport uniqueness_probe(const Kernel& kernel, const Nonlinearity& f,
                                  const PeriodicGrid& grid,
                                  const std::vector<GridFunction>& inits,
                                  const SteadyOptions& opts) {
  if (!kernel.symmetric()) fail(Errc::symmetry_required, "uniqueness probe needs a symmetric kernel");
  SteadyReport base = solve_steady(kernel, f, grid, opts);
  if (base.classification != Classification::nontrivial_exists || !base.p)
    fail(Errc::lambda_sign, "uniqueness probe requires lambda1 < 0");
  const GridFunction& p_ref = *base.p;

  const PeriodicOperator op_a =
      assemble_periodic(kernel, f.derivative_at_zero(Grid(grid)), grid, opts.tail_tol);
  PeriodicOperator m0{grid, op_a.conv, Eigen::VectorXd::Zero(grid.N), 1.0, op_a.k_max};

  UniquenessReport rep;
  rep.lambda1 = base.lambda1;
  std::vector<Eigen::VectorXd> limits;
  for (const GridFunction& u0 : inits) {
    if (!grids_equal(u0.grid, Grid(grid))) fail(Errc::grid_mismatch, "init/grid mismatch");
    const Eigen::VectorXd defect =
        steady_rhs(m0, f, u0.values);
    IterationDirection dir;
    if (defect.minCoeff() >= -kDefectSlack)
      dir = IterationDirection::up;
    else if (defect.maxCoeff() <= kDefectSlack)
      dir = IterationDirection::down;
    else
      fail(Errc::inadmissible_init, "init is neither a sub- nor a supersolution");

    const double tau = iteration_tau(f, grid, std::max(f.m_sup(), u0.values.maxCoeff()));
    IterateResult res =
        monotone_iterate(m0, f, u0, dir, opts.tol * tau, opts.max_iter);
    UniquenessEntry e;
    e.direction = dir;
    e.sup_dist_to_p = (res.u.values - p_ref.values).lpNorm<Eigen::Infinity>();
    e.gamma_star_vs_p = gamma_star(res.u, p_ref);
    rep.entries.push_back(e);
    limits.push_back(res.u.values);
  }
  for (std::size_t i = 0; i < limits.size(); ++i)
    for (std::size_t j = i + 1; j < limits.size(); ++j)
      rep.max_pairwise_dist =
          std::max(rep.max_pairwise_dist, (limits[i] - limits[j]).lpNorm<Eigen::Infinity>());

  rep.pass = true;
  for (const auto& e : rep.entries) {
    if (e.sup_dist_to_p > opts.uniq_tol) rep.pass = false;
    if (std::abs(e.gamma_star_vs_p - 1.0) > opts.uniq_tol) rep.pass = false;
  }
  if (rep.max_pairwise_dist > opts.uniq_tol) rep.pass = false;
  return rep;
}

}  // namespace nonlocal
