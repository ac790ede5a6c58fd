#include "nonlocal/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "nonlocal/io.hpp"

namespace nonlocal {

const char* to_string(MaxPrincipleBranch b) {
  switch (b) {
    case MaxPrincipleBranch::strictly_negative: return "strictly-negative";
    case MaxPrincipleBranch::identically_zero: return "identically-zero";
    case MaxPrincipleBranch::inconclusive: return "inconclusive";
  }
  return "?";
}

MaxPrincipleReport strong_max_check(const Kernel& kernel, const GridFunction& c,
                                    const GridFunction& u, double eps, double tol) {
  if (!grids_equal(c.grid, u.grid)) fail(Errc::grid_mismatch, "c and u live on different grids");
  if (u.values.maxCoeff() > tol) fail(Errc::bad_input, "strong_max_check expects u <= tol");

  Eigen::VectorXd m_u;
  if (is_periodic(u.grid)) {
    const auto& g = std::get<PeriodicGrid>(u.grid);
    m_u = assemble_periodic(kernel, Eigen::VectorXd::Zero(g.N), g).apply_m(u.values);
  } else {
    const auto& g = std::get<IntervalGrid>(u.grid);
    m_u = assemble_dirichlet(kernel, Eigen::VectorXd::Zero(g.N), g).apply_m(u.values);
  }
  const Eigen::VectorXd hyp = m_u + c.values.cwiseProduct(u.values);

  MaxPrincipleReport rep;
  int i_min = 0;
  rep.hypothesis_min = hyp.minCoeff(&i_min);
  rep.hypothesis_ok = rep.hypothesis_min >= -tol;
  rep.sup_abs_u = u.values.cwiseAbs().maxCoeff();

  const GridFunction u_eps = mollify(u, eps);
  int i_max = 0;
  rep.mollified_max = u_eps.values.maxCoeff(&i_max);

  if (!rep.hypothesis_ok) {
    rep.branch = MaxPrincipleBranch::inconclusive;
    rep.witness_x = grid_point(u.grid, i_min);
  } else if (rep.sup_abs_u <= tol) {
    rep.branch = MaxPrincipleBranch::identically_zero;
    rep.witness_x = 0.0;
  } else if (rep.mollified_max < -tol) {
    rep.branch = MaxPrincipleBranch::strictly_negative;
    rep.witness_x = grid_point(u.grid, i_max);
  } else {
    rep.branch = MaxPrincipleBranch::inconclusive;
    rep.witness_x = grid_point(u.grid, i_max);
  }
  return rep;
}

bool InvariantReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const InvariantCheck& c) { return c.status != CheckStatus::fail; });
}

namespace {

struct SuiteBuilder {
  InvariantReport report;

  void add(const std::string& name, bool pass, double measured, double threshold,
           std::string note = {}) {
    report.checks.push_back(
        {name, pass ? CheckStatus::pass : CheckStatus::fail, measured, threshold, std::move(note)});
  }
  void add_leq(const std::string& name, double measured, double threshold, std::string note = {}) {
    add(name, measured <= threshold, measured, threshold, std::move(note));
  }
  void skip(const std::string& name, std::string note) {
    report.checks.push_back({name, CheckStatus::skip, 0.0, 0.0, std::move(note)});
  }
};

Eigen::VectorXd random_vector(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = dist(rng);
  return v;
}

}  // namespace

InvariantReport invariant_suite(const Scenario& sc) {
  SuiteBuilder b;
  const Kernel kernel = scenario_kernel(sc);
  const PeriodicGrid grid = scenario_grid(sc);
  const bool sym = kernel.symmetric();
  std::mt19937_64 rng(sc.seed + 0x9e3779b97f4a7c15ull);

  // --- kernel hypotheses ---------------------------------------------------
  const ValidationReport val = validate_kernel(kernel);
  b.add("kernel.mass", std::abs(val.mass - 1.0) <= 1e-12, std::abs(val.mass - 1.0), 1e-12);
  b.add("kernel.positive_both_sides", val.j2_ok, val.j2_ok ? 0.0 : 1.0, 0.0);

  const KernelPower j2 = convolve_power(kernel, 2, 512);
  const KernelPower j3 = convolve_power(kernel, 3, 512);
  b.add_leq("kernel.power_mass", std::max(std::abs(j2.mass() - 1.0), std::abs(j3.mass() - 1.0)),
            1e-10);
  {
    const double d1 = std::abs(j3.support_lo - (j2.support_lo + kernel.support_lo()));
    const double d2 = std::abs(j3.support_hi - (j2.support_hi + kernel.support_hi()));
    b.add_leq("kernel.support_additivity", std::max(d1, d2), j3.h);
  }
  if (sym) {
    double asym = 0.0;
    for (std::size_t i = 0; i < j2.values.size(); ++i)
      asym = std::max(asym, std::abs(j2.values[i] - j2.values[j2.values.size() - 1 - i]));
    b.add_leq("kernel.symmetry_propagation", asym, 1e-10);
  } else {
    b.skip("kernel.symmetry_propagation", "asymmetric kernel");
  }
  {
    const CoverageResult cov = min_power_for_coverage_detailed(kernel, grid.R);
    b.add("kernel.coverage_positive", cov.margin > 0.0, cov.margin, 0.0,
          "p = " + std::to_string(cov.p));
  }

  const KernelPower j1 = convolve_power(kernel, 1, 256);
  const PeriodizedKernelMatrix kt = periodize(j1, grid, sc.solver.tail_tol);
  {
    const Eigen::VectorXd row_mass = kt.h * kt.entries.rowwise().sum();
    b.add_leq("periodize.row_mass", (row_mass.array() - 1.0).abs().maxCoeff(), 1e-10);
    b.add("periodize.nonneg", kt.entries.minCoeff() >= 0.0, kt.entries.minCoeff(), 0.0);
    if (sym)
      b.add_leq("periodize.symmetric",
                (kt.entries - kt.entries.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    else
      b.skip("periodize.symmetric", "asymmetric kernel");
  }

  // --- field ----------------------------------------------------------------
  {
    const GridFunction one = GridFunction::constant(Grid(grid), 1.0);
    b.add_leq("field.quadrature_const", std::abs(quadrature(one) - 2.0 * grid.R), 1e-12);
    const GridFunction cst = GridFunction::constant(Grid(grid), 0.7);
    const GridFunction mc = mollify(cst, 4.0 * grid.h());
    b.add_leq("field.mollify_const", (mc.values.array() - 0.7).abs().maxCoeff(), 1e-12);

    const Eigen::VectorXd uvals = random_vector(rng, grid.N, 0.0, 2.0);
    const Eigen::VectorXd vvals = random_vector(rng, grid.N, 0.3, 1.7);
    const GridFunction uf(Grid(grid), uvals), vf(Grid(grid), vvals);
    const double g = gamma_star(uf, vf);
    const double slack_min = (g * vvals - uvals).minCoeff();
    b.add_leq("field.gamma_star_tight", std::abs(slack_min), 1e-12);
  }

  // --- operator --------------------------------------------------------------
  const PeriodicOperator op = assemble_periodic(kernel, sc.a, grid, sc.solver.tail_tol);
  const PeriodicOperator m0{grid, op.conv, Eigen::VectorXd::Zero(grid.N), 1.0, op.k_max};
  {
    b.add_leq("operator.mass_action",
              m0.apply_m(Eigen::VectorXd::Ones(grid.N)).cwiseAbs().maxCoeff(), 1e-12);
    if (sym) {
      double worst = -1e300;
      for (int t = 0; t < 8; ++t) {
        const Eigen::VectorXd phi = random_vector(rng, grid.N, -1.0, 1.0);
        worst = std::max(worst, grid.h() * phi.dot(m0.apply_m(phi)));
      }
      b.add_leq("operator.form_nonpositive", worst, 1e-10);
    } else {
      b.skip("operator.form_nonpositive", "asymmetric kernel");
    }
    const Eigen::VectorXd upos = random_vector(rng, grid.N, 0.0, 1.0);
    const Eigen::VectorXd lbu = op.conv * upos + op.b().cwiseProduct(upos);
    b.add("operator.cone_positivity", lbu.minCoeff() >= 0.0, lbu.minCoeff(), 0.0);

    const IntervalGrid igrid(0.25 * grid.h(), grid.R, grid.N);  // same spacing as the torus grid
    const DirichletOperator dop = assemble_dirichlet(kernel, sc.a, igrid);
    const Eigen::VectorXd row_sums = dop.conv.rowwise().sum();
    b.add_leq("operator.dirichlet_row_mass", row_sums.maxCoeff(), 1.0 + 1e-12);
    double dom = -1e300;
    for (int i = 0; i < igrid.N; ++i)
      for (int j = 0; j < igrid.N; ++j) {
        const int m = (((i - j) % grid.N) + grid.N) % grid.N;
        dom = std::max(dom, dop.conv(i, j) - grid.h() * kt.entries(0, (grid.N - m) % grid.N));
      }
    b.add_leq("operator.dirichlet_domination", dom, 1e-12);
  }

  // --- spectral ----------------------------------------------------------------
  const EigenResult pw = principal_eig_periodic(op, sc.solver.eig_tol, sc.solver.eig_max_iter);
  const EigenResult dn = principal_eig_dense_oracle(op);
  {
    b.add_leq("spectral.oracle_lambda", std::abs(pw.lambda1 - dn.lambda1), 1e-8);
    const double align = std::abs(pw.phi.values.dot(dn.phi.values)) /
                         (pw.phi.values.norm() * dn.phi.values.norm());
    b.add_leq("spectral.oracle_alignment", 1.0 - align, 1e-8);
    b.add_leq("spectral.simplicity_gap", dn.gap.value_or(1.0), 1.0 - 1e-12);
    b.add("spectral.phi_positive", pw.phi.values.minCoeff() > 0.0, pw.phi.values.minCoeff(), 0.0);

    std::uniform_real_distribution<double> cdist(-5.0, 5.0);
    double worst_shift = 0.0;
    for (int t = 0; t < 3; ++t) {
      const double c = cdist(rng);
      const EigenResult sh = principal_eig_periodic(
          assemble_periodic(kernel, sc.a.plus(c), grid, sc.solver.tail_tol), sc.solver.eig_tol,
          sc.solver.eig_max_iter);
      worst_shift = std::max(worst_shift, std::abs(sh.lambda1 - (pw.lambda1 - c)));
    }
    b.add_leq("spectral.shift_covariance", worst_shift, 1e-8);

    if (sym) {
      const Eigen::VectorXd av = sc.a.sample(Grid(grid));
      const double mean_a = av.sum() / grid.N;
      const double viol =
          std::max(pw.lambda1 - (-mean_a), (-av.maxCoeff()) - pw.lambda1);
      b.add_leq("spectral.sandwich", viol, 1e-8);

      const RayleighResult rq = rayleigh_quotient(kernel, sc.a, pw.phi);
      double min_rand = 1e300;
      for (int t = 0; t < 20; ++t) {
        const GridFunction phi(Grid(grid), random_vector(rng, grid.N, 0.1, 2.0));
        min_rand = std::min(min_rand, rayleigh_quotient(kernel, sc.a, phi).value);
      }
      const double viol_rq =
          std::max(std::abs(rq.value - pw.lambda1), std::max(0.0, pw.lambda1 - min_rand));
      b.add_leq("spectral.rayleigh", viol_rq, 1e-8);

      const auto study =
          dirichlet_convergence_study(kernel, sc.a, sc.dirichlet.y, {2.0 * grid.R, 4.0 * grid.R},
                                      sc.dirichlet.points_per_unit);
      double viol_dom = 0.0;
      for (const auto& row : study.rows)
        viol_dom = std::max(viol_dom, study.lambda1_ref - row.lambda);
      viol_dom = std::max(viol_dom, study.rows.back().lambda - study.rows.front().lambda);
      b.add_leq("spectral.dirichlet_domination", viol_dom, 1e-10);
    } else {
      b.skip("spectral.sandwich", "asymmetric kernel");
      b.skip("spectral.rayleigh", "asymmetric kernel");
      b.skip("spectral.dirichlet_domination", "asymmetric kernel");
    }

    try {
      const CertificateResult cert = kpp_certificate(kernel, sc.a.plus(op.k_shift), grid);
      const double sig_p = std::pow(cert.sigma, cert.p);
      const double lower = std::pow(sig_p + cert.delta, 1.0 / cert.p);
      const double viol_cert = std::max({-cert.margin, std::abs(cert.delta - cert.gamma / 4.0),
                                         lower - pw.mu});
      b.add_leq("spectral.certificate", viol_cert, 1e-9,
                "p = " + std::to_string(cert.p));
    } catch (const Failure& e) {
      if (e.code() != Errc::certificate_failed) throw;
      b.skip("spectral.certificate", e.what());
    }
  }

  // --- steady -------------------------------------------------------------------
  const Nonlinearity f = scenario_nonlinearity(sc, grid);
  const SteadyReport steady = solve_steady(kernel, f, grid, sc.solver);
  {
    if (steady.classification == Classification::nontrivial_exists) {
      b.add_leq("steady.residual", steady.residual, sc.solver.tol);
      b.add("steady.positive_solution", steady.lower_bound > 0.0, steady.lower_bound, 0.0);
      if (sym)
        b.add_leq("steady.limits_agree", steady.limits_gap, sc.solver.uniq_tol);
      else
        b.skip("steady.limits_agree", "asymmetric kernel");
      if (sym) {
        const CompactSubsolutionResult cs = compact_subsolution(
            kernel, f, grid, sc.dirichlet.y, sc.dirichlet.points_per_unit, sc.solver);
        double viol = -1e300;
        const auto& ig = std::get<IntervalGrid>(cs.phi.grid);
        for (int i = 0; i < ig.N; ++i)
          viol = std::max(viol, cs.gamma0 * cs.phi.values[i] -
                                     periodic_interp(*steady.p, ig.point(i)));
        b.add_leq("steady.lower_bound_alignment", viol, 1e-10,
                  "gamma0 = " + fmt17(cs.gamma0));
      } else {
        b.skip("steady.lower_bound_alignment", "asymmetric kernel");
      }
    } else if (steady.classification == Classification::only_trivial) {
      b.add_leq("steady.decay", steady.decay_sup, sc.solver.decay_tol);
      b.skip("steady.residual", "only-trivial scenario");
      b.skip("steady.positive_solution", "only-trivial scenario");
    } else {
      b.skip("steady.residual", "marginal scenario");
    }

    // Classification must flip exactly once across a coefficient shift sweep.
    if (sc.f.form == Nonlinearity::Form::kpp) {
      int flips = 0;
      Classification prev = Classification::marginal;
      bool have_prev = false;
      for (int k = 0; k <= 6; ++k) {
        const double delta = steady.lambda1 - 0.35 + 0.1 * k;
        EigenResult eig;
        const Classification cls = classify_existence(
            kernel, Nonlinearity::kpp(sc.a.plus(delta), grid), grid, sc.solver.margin_tol, &eig,
            sc.solver.eig_tol, sc.solver.eig_max_iter);
        if (cls == Classification::marginal) continue;
        if (have_prev && cls != prev) ++flips;
        prev = cls;
        have_prev = true;
      }
      b.add("steady.threshold_single_flip", flips == 1, flips, 1.0);
    } else {
      b.skip("steady.threshold_single_flip", "custom nonlinearity");
    }
  }

  // --- diagnostics ----------------------------------------------------------------
  {
    const GridFunction zero = GridFunction::constant(Grid(grid), 0.0);
    const GridFunction neg1 = GridFunction::constant(Grid(grid), -1.0);
    const double eps = std::max(0.25 * grid.R, grid.h());
    const auto r1 = strong_max_check(kernel, zero, zero, eps, 1e-10);
    const auto r2 = strong_max_check(kernel, zero, neg1, eps, 1e-10);
    const GridFunction dip = GridFunction::sampled(Grid(grid), [&](double x) {
      return -(1.0 + std::cos(std::numbers::pi * x / grid.R));
    });
    const auto r3 = strong_max_check(kernel, zero, dip, eps, 1e-10);
    int mism = 0;
    if (r1.branch != MaxPrincipleBranch::identically_zero) ++mism;
    if (r2.branch != MaxPrincipleBranch::strictly_negative) ++mism;
    if (r3.hypothesis_ok && r3.branch != MaxPrincipleBranch::inconclusive) ++mism;
    b.add("diagnostics.max_principle_branches", mism == 0, mism, 0.0);

    const bool exclusive = !(r2.branch == MaxPrincipleBranch::strictly_negative &&
                             r2.branch == MaxPrincipleBranch::identically_zero);
    const auto r2b = strong_max_check(kernel, zero, neg1, eps, 1e-10);
    b.add("diagnostics.branch_deterministic", exclusive && r2b.branch == r2.branch,
          r2b.branch == r2.branch ? 0.0 : 1.0, 0.0);
  }

  return b.report;
}

}  // namespace nonlocal
