#include "nonlocal/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

namespace nonlocal {

namespace {

struct PowerOut {
  double mu = 0.0;
  Eigen::VectorXd phi;  // scaled to the target quadrature normalization
  int iterations = 0;
  double residual = 0.0;
};

// Power iteration from the all-ones start vector.  The iterate is kept
// sup-normalized; the stopping test scales the residual to the final
// normalization quadrature(phi^2) = target, so the reported residual bound
// holds for the eigenfunction actually returned.
PowerOut power_core(const Eigen::MatrixXd& B, double h, double target, double tol, int max_iter,
                    int positivity_after) {
  const int n = static_cast<int>(B.rows());
  Eigen::VectorXd u = Eigen::VectorXd::Ones(n);
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd w = B * u;
    const double mu = u.dot(w) / u.squaredNorm();
    const double resid = (w - mu * u).lpNorm<Eigen::Infinity>();
    const double scale = std::sqrt(target / (h * u.squaredNorm()));
    if (resid * scale <= tol) {
      if (u.minCoeff() <= 0.0)
        fail(Errc::reducible_pattern, "iterate lost strict positivity");
      return {mu, scale * u, it, resid * scale};
    }
    const double sup = w.cwiseAbs().maxCoeff();
    if (!(sup > 0.0)) fail(Errc::reducible_pattern, "iterate collapsed to zero");
    u = w / sup;
    if (it >= positivity_after && u.minCoeff() <= 0.0)
      fail(Errc::reducible_pattern, "iterate not strictly positive after burn-in");
  }
  fail(Errc::no_convergence, "power iteration did not reach tolerance in max_iter steps");
}

void check_tol(double tol) {
  if (tol < 1e-13) fail(Errc::bad_tolerance, "solver tolerance must be >= 1e-13");
}

double second_largest_modulus(const Eigen::VectorXcd& eigs, int skip) {
  double second = 0.0;
  for (int i = 0; i < eigs.size(); ++i) {
    if (i == skip) continue;
    second = std::max(second, std::abs(eigs[i]));
  }
  return second;
}

}  // namespace

DensePrincipal dense_principal(const Eigen::MatrixXd& B) {
  const int n = static_cast<int>(B.rows());
  const double scale = std::max(1.0, B.cwiseAbs().maxCoeff());
  const bool symmetric = (B - B.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;

  DensePrincipal out;
  if (symmetric) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(B);
    if (es.info() != Eigen::Success) fail(Errc::no_convergence, "dense symmetric eigensolve failed");
    out.mu = es.eigenvalues()(n - 1);
    out.phi = es.eigenvectors().col(n - 1);
    const double second = std::max(std::abs(es.eigenvalues()(0)),
                                   n >= 2 ? std::abs(es.eigenvalues()(n - 2)) : 0.0);
    out.gap = std::abs(out.mu) > 0.0 ? second / std::abs(out.mu) : 0.0;
  } else {
    Eigen::EigenSolver<Eigen::MatrixXd> es(B);
    if (es.info() != Eigen::Success) fail(Errc::no_convergence, "dense eigensolve failed");
    const Eigen::VectorXcd eigs = es.eigenvalues();
    int idx = 0;
    for (int i = 1; i < n; ++i)
      if (eigs[i].real() > eigs[idx].real()) idx = i;
    if (std::abs(eigs[idx].imag()) > 1e-10 * std::max(1.0, std::abs(eigs[idx].real())))
      fail(Errc::complex_principal, "dominant eigenvalue is not real");
    out.mu = eigs[idx].real();
    const Eigen::VectorXcd vc = es.eigenvectors().col(idx);
    if (vc.imag().cwiseAbs().maxCoeff() > 1e-8 * vc.cwiseAbs().maxCoeff())
      fail(Errc::complex_principal, "dominant eigenvector is not real");
    out.phi = vc.real();
    out.gap = std::abs(out.mu) > 0.0 ? second_largest_modulus(eigs, idx) / std::abs(out.mu) : 0.0;
  }
  if (out.phi.sum() < 0.0) out.phi = -out.phi;
  if (out.phi.minCoeff() <= 0.0)
    fail(Errc::non_positive_eigenvector, "dominant eigenvector is not entrywise positive");
  return out;
}

EigenResult principal_eig_periodic(const PeriodicOperator& op, double tol, int max_iter) {
  check_tol(tol);
  const Eigen::MatrixXd B = op.cone_matrix();
  PowerOut pw = power_core(B, op.grid.h(), 2.0 * op.grid.R, tol, max_iter, 64);
  EigenResult res{-pw.mu + 1.0 + op.k_shift, GridFunction(Grid(op.grid), std::move(pw.phi)),
                  pw.mu,  pw.residual,       pw.iterations,
                  std::nullopt,              op.k_shift};
  return res;
}

EigenResult principal_eig_periodic(const Kernel& kernel, const Coefficient& a,
                                   const PeriodicGrid& grid, double tol, int max_iter) {
  return principal_eig_periodic(assemble_periodic(kernel, a, grid), tol, max_iter);
}

EigenResult principal_eig_dirichlet(const DirichletOperator& op, double tol, int max_iter) {
  check_tol(tol);
  const Eigen::MatrixXd B = op.cone_matrix();
  PowerOut pw = power_core(B, op.grid.h(), 1.0, tol, max_iter, 64);
  EigenResult res{1.0 + op.c_shift - pw.mu, GridFunction(Grid(op.grid), std::move(pw.phi)),
                  pw.mu,  pw.residual,      pw.iterations,
                  std::nullopt,             op.c_shift};
  return res;
}

EigenResult principal_eig_dirichlet(const Kernel& kernel, const Coefficient& a,
                                    const IntervalGrid& grid, double tol, int max_iter) {
  return principal_eig_dirichlet(assemble_dirichlet(kernel, a, grid), tol, max_iter);
}

namespace {

EigenResult dense_to_result(const Eigen::MatrixXd& B, DensePrincipal dp, const Grid& grid,
                            double target, double lambda, double shift) {
  const double h = grid_h(grid);
  const double scale = std::sqrt(target / (h * dp.phi.squaredNorm()));
  Eigen::VectorXd phi = scale * dp.phi;
  const double resid = (B * phi - dp.mu * phi).lpNorm<Eigen::Infinity>();
  return EigenResult{lambda, GridFunction(grid, std::move(phi)), dp.mu, resid, 0, dp.gap, shift};
}

}  // namespace

EigenResult principal_eig_dense_oracle(const PeriodicOperator& op) {
  if (op.grid.N > 2048) fail(Errc::bad_input, "dense oracle is limited to N <= 2048");
  const Eigen::MatrixXd B = op.cone_matrix();
  DensePrincipal dp = dense_principal(B);
  const double lambda = -dp.mu + 1.0 + op.k_shift;
  return dense_to_result(B, std::move(dp), Grid(op.grid), 2.0 * op.grid.R, lambda, op.k_shift);
}

EigenResult principal_eig_dense_oracle(const DirichletOperator& op) {
  if (op.grid.N > 2048) fail(Errc::bad_input, "dense oracle is limited to N <= 2048");
  const Eigen::MatrixXd B = op.cone_matrix();
  DensePrincipal dp = dense_principal(B);
  const double lambda = 1.0 + op.c_shift - dp.mu;
  return dense_to_result(B, std::move(dp), Grid(op.grid), 1.0, lambda, op.c_shift);
}

RayleighResult rayleigh_quotient(const Kernel& kernel, const Coefficient& a,
                                 const GridFunction& phi) {
  const double denom = quadrature(GridFunction(phi.grid, phi.values.cwiseProduct(phi.values)));
  if (!(denom > 0.0)) fail(Errc::zero_function, "rayleigh quotient of the zero function");
  Eigen::VectorXd applied;
  if (is_periodic(phi.grid)) {
    const auto& g = std::get<PeriodicGrid>(phi.grid);
    applied = assemble_periodic(kernel, a, g).apply(phi).values;
  } else {
    const auto& g = std::get<IntervalGrid>(phi.grid);
    applied = assemble_dirichlet(kernel, a, g).apply(phi).values;
  }
  const double num = grid_h(phi.grid) * applied.dot(phi.values);
  return RayleighResult{-num / denom, kernel.symmetric()};
}

ConvergenceStudy dirichlet_convergence_study(const Kernel& kernel, const Coefficient& a, double y,
                                             const std::vector<double>& radii,
                                             int points_per_unit) {
  if (!kernel.symmetric())
    fail(Errc::symmetry_required, "the convergence study requires a symmetric kernel");
  if (radii.empty()) fail(Errc::bad_input, "need at least one radius");
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) fail(Errc::bad_input, "radii must be strictly increasing");
  if (points_per_unit < 2) fail(Errc::bad_input, "points_per_unit must be >= 2");

  const double R = 0.5 * a.period;
  const double h = 1.0 / points_per_unit;
  const long n_ref = std::lround(2.0 * R * points_per_unit);
  if (std::abs(n_ref * h - 2.0 * R) > 1e-9 || n_ref < 8 || n_ref % 2 != 0)
    fail(Errc::bad_grid, "points_per_unit is incommensurate with the period");

  // Midpoints of every interval grid land on the same h-lattice as the periodic
  // reference nodes; the discrete domination lambda_r >= lambda1 is then exact.
  const double y_used = h * std::round((y - 0.5 * h) / h) + 0.5 * h;

  const PeriodicGrid ref_grid(R, static_cast<int>(n_ref));
  const EigenResult ref = principal_eig_dense_oracle(assemble_periodic(kernel, a, ref_grid));

  ConvergenceStudy study;
  study.lambda1_ref = ref.lambda1;
  study.y_requested = y;
  study.y_used = y_used;
  study.points_per_unit = points_per_unit;
  for (double r : radii) {
    long n_r = std::lround(2.0 * r * points_per_unit);
    n_r += n_r % 2;
    if (n_r < 8) n_r = 8;
    const double r_used = 0.5 * n_r * h;
    const IntervalGrid grid(y_used, r_used, static_cast<int>(n_r));
    const EigenResult er = principal_eig_dense_oracle(assemble_dirichlet(kernel, a, grid));
    study.rows.push_back({r_used, er.lambda1, er.lambda1 - ref.lambda1});
  }
  study.final_gap = study.rows.back().gap;
  return study;
}

namespace {

// C^2 bump: 1 on [0, eps], 0 beyond 2 eps, quintic smoothstep in between.
double smooth_bump(double dist, double eps) {
  if (dist <= eps) return 1.0;
  if (dist >= 2.0 * eps) return 0.0;
  const double t = (2.0 * eps - dist) / eps;
  return t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
}

double torus_distance(double x, double y, double period) {
  return std::abs(std::remainder(x - y, period));
}

}  // namespace

CertificateResult kpp_certificate(const Kernel& kernel, const Coefficient& b,
                                  const PeriodicGrid& grid) {
  const double R = grid.R;
  if (std::abs(b.period - 2.0 * R) > 1e-12 * std::max(1.0, 2.0 * R))
    fail(Errc::period_mismatch, "coefficient period does not match the grid");
  const Eigen::VectorXd bv = b.sample(Grid(grid));
  if (!(bv.minCoeff() > 0.0)) fail(Errc::bad_input, "certificate needs min b > 0 on the grid");

  const CoverageResult cov = min_power_for_coverage_detailed(kernel, R);
  const int p = cov.p;
  const KernelPower jp = convolve_power(kernel, p, 1024);
  const PeriodizedKernelMatrix kt = periodize(jp, grid, 1e-12);
  const double c_min = kt.entries.minCoeff();
  if (!(c_min > 0.0))
    fail(Errc::certificate_failed, "periodized power is not positive on the grid");

  int i0 = 0;
  bv.maxCoeff(&i0);  // Eigen returns the first maximizer: smallest-index tie break
  const double sigma = bv[i0];
  const double x0 = grid.point(i0);

  double eps = 0.0;
  for (double cand : {R / 4.0, R / 8.0, R / 16.0}) {
    if (4.0 * cand < 2.0 * R) {  // recentred window (x0 - 2eps, x0 + 2eps) fits the torus
      eps = cand;
      break;
    }
  }
  if (eps == 0.0) fail(Errc::certificate_failed, "no admissible window half-width");

  const double k_lip = p * std::pow(sigma, p - 1) * b.lipschitz();
  double gamma = 0.0;
  if (k_lip * eps < 1e-300) {
    gamma = 4.0 * c_min * eps / 3.0;  // limit of the defining equation as k -> 0
  } else {
    if (3.0 * k_lip / (4.0 * c_min) > 700.0)
      fail(Errc::certificate_failed, "required gamma underflows double precision");
    // (2c/k) log(1 + k eps / gamma) = 3/2, bisected on log(gamma).
    double t_lo = std::log(1e-300);
    double t_hi = std::log(4.0 * c_min * eps / 3.0) + 1.0;
    for (int it = 0; it < 200; ++it) {
      const double t = 0.5 * (t_lo + t_hi);
      const double g = (2.0 * c_min / k_lip) * std::log1p(k_lip * eps * std::exp(-t)) - 1.5;
      (g > 0.0 ? t_lo : t_hi) = t;
    }
    gamma = std::exp(0.5 * (t_lo + t_hi));
  }
  const double delta = gamma / 4.0;

  const double sigma_p = std::pow(sigma, p);
  const int n = grid.N;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd bp(n);
  for (int i = 0; i < n; ++i) {
    bp[i] = std::pow(bv[i], p);
    const double d = torus_distance(grid.point(i), x0, 2.0 * R);
    if (d < 2.0 * eps) v[i] = smooth_bump(d, eps) / (sigma_p - bp[i] + gamma);
  }

  const Eigen::VectorXd lp_v = kt.apply(v);
  double margin = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i)
    margin = std::min(margin, lp_v[i] + bp[i] * v[i] - (sigma_p + delta) * v[i]);
  if (margin < 0.0)
    fail(Errc::certificate_failed,
         "margin " + std::to_string(margin) + " < 0; retry with doubled N");

  return CertificateResult{p,     sigma,  x0,    eps,   gamma, delta,
                           GridFunction(Grid(grid), std::move(v)), margin, c_min, k_lip, 0.25};
}

}  // namespace nonlocal
