// Acceptance suite: runs every shipping criterion at its pinned tolerance and
// prints one PASS/FAIL line per criterion.  Exit code 0 iff all pass.

#include <array>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "nonlocal/diagnostics.hpp"
#include "nonlocal/io.hpp"

using namespace nonlocal;

namespace {

constexpr double kPi = std::numbers::pi;

struct AcceptanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool cond, const std::string& what) {
  if (!cond) throw AcceptanceError(what);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", v);
  return buf;
}

Coefficient coeff(double mean, std::vector<double> cosc = {}, std::vector<double> sinc = {}) {
  return Coefficient{mean, std::move(cosc), std::move(sinc), 2.0};
}

std::vector<Kernel> bundled_kernels() {
  return {Kernel::uniform(1.0), Kernel::tent(1.0, 0.3), Kernel::truncated_gaussian(0.5, 6.0)};
}

// ---- criterion bodies -------------------------------------------------------

std::string c1_constant_exactness() {
  const PeriodicGrid grid(1.0, 256);
  double worst_lambda = 0.0, worst_phi = 0.0;
  for (double a0 : {-1.0, 0.0, 0.7}) {
    for (const Kernel& j : bundled_kernels()) {
      const EigenResult r = principal_eig_periodic(j, coeff(a0), grid, 1e-12, 100000);
      worst_lambda = std::max(worst_lambda, std::abs(r.lambda1 - (-a0)));
      worst_phi = std::max(worst_phi, (r.phi.values.array() - 1.0).abs().maxCoeff());
    }
  }
  require(worst_lambda <= 1e-10, "lambda error " + fmt(worst_lambda));
  require(worst_phi <= 1e-10, "phi deviation " + fmt(worst_phi));
  return "max |lambda1 + a0| = " + fmt(worst_lambda) + ", max |phi - 1| = " + fmt(worst_phi);
}

std::string c2_oracle_equivalence() {
  const PeriodicGrid grid(1.0, 256);
  std::mt19937_64 rng(20240817ull);
  std::uniform_real_distribution<double> mean_dist(-1.0, 1.0);
  std::uniform_real_distribution<double> amp_dist(-0.5, 0.5);
  std::uniform_int_distribution<int> mode_dist(1, 5);
  double worst_lambda = 0.0, worst_align = 0.0, worst_gap = 0.0;
  for (int t = 0; t < 10; ++t) {
    const Kernel j = bundled_kernels()[t % 3];
    Coefficient a = coeff(mean_dist(rng));
    const int modes = mode_dist(rng);
    for (int k = 0; k < modes; ++k) {
      a.cos_coeffs.push_back(amp_dist(rng) / (k + 1));
      a.sin_coeffs.push_back(amp_dist(rng) / (k + 1));
    }
    const PeriodicOperator op = assemble_periodic(j, a, grid);
    const EigenResult pw = principal_eig_periodic(op, 1e-11, 500000);
    const EigenResult dn = principal_eig_dense_oracle(op);
    worst_lambda = std::max(worst_lambda, std::abs(pw.lambda1 - dn.lambda1));
    const double align = std::abs(pw.phi.values.dot(dn.phi.values)) /
                         (pw.phi.values.norm() * dn.phi.values.norm());
    worst_align = std::max(worst_align, 1.0 - align);
    worst_gap = std::max(worst_gap, *dn.gap);
  }
  require(worst_lambda <= 1e-8, "lambda disagreement " + fmt(worst_lambda));
  require(worst_align <= 1e-8, "alignment defect " + fmt(worst_align));
  require(worst_gap < 1.0, "gap " + fmt(worst_gap));
  return "max |dlambda| = " + fmt(worst_lambda) + ", max alignment defect = " + fmt(worst_align) +
         ", max gap = " + fmt(worst_gap);
}

std::string c3_shift_covariance() {
  const PeriodicGrid grid(1.0, 256);
  const Coefficient a = coeff(0.2, {0.8, -0.1}, {0.3});
  const EigenResult base =
      principal_eig_periodic(Kernel::uniform(1.0), a, grid, 1e-12, 500000);
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> dist(-5.0, 5.0);
  double worst = 0.0;
  for (int t = 0; t < 5; ++t) {
    const double c = dist(rng);
    const EigenResult sh =
        principal_eig_periodic(Kernel::uniform(1.0), a.plus(c), grid, 1e-12, 500000);
    worst = std::max(worst, std::abs(sh.lambda1 - (base.lambda1 - c)));
  }
  require(worst <= 1e-8, "covariance defect " + fmt(worst));
  return "max |lambda1(a+c) - (lambda1(a) - c)| = " + fmt(worst);
}

std::string c4_symmetric_sandwich() {
  const PeriodicGrid grid(1.0, 256);
  const std::vector<std::pair<Kernel, Coefficient>> cases = {
      {Kernel::uniform(1.0), coeff(0.5, {1.0})},
      {Kernel::truncated_gaussian(0.5, 6.0), coeff(-0.2, {0.1})},
      {Kernel::uniform(1.0), coeff(0.2, {0.8, -0.1}, {0.3})},
      {Kernel::truncated_gaussian(0.5, 6.0), coeff(1.0, {0.0, 0.5})},
  };
  double worst = -1e300;
  for (const auto& [j, a] : cases) {
    const EigenResult r = principal_eig_periodic(j, a, grid, 1e-12, 500000);
    const Eigen::VectorXd av = a.sample(Grid(grid));
    worst = std::max(worst, (-av.maxCoeff()) - r.lambda1);
    worst = std::max(worst, r.lambda1 - (-av.mean()));
  }
  require(worst <= 1e-8, "sandwich violation " + fmt(worst));
  return "max violation of -max a <= lambda1 <= -mean a: " + fmt(worst);
}

std::string c5_rayleigh_consistency() {
  const PeriodicGrid grid(1.0, 256);
  const Kernel j = Kernel::uniform(1.0);
  const Coefficient a = coeff(0.5, {1.0});
  const EigenResult eig = principal_eig_periodic(j, a, grid, 1e-12, 500000);
  const double at_phi = rayleigh_quotient(j, a, eig.phi).value;
  require(std::abs(at_phi - eig.lambda1) <= 1e-8,
          "quotient at phi1 off by " + fmt(std::abs(at_phi - eig.lambda1)));
  std::mt19937_64 rng(515151);
  std::uniform_real_distribution<double> dist(0.1, 2.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd v(grid.N);
    for (int i = 0; i < grid.N; ++i) v[i] = dist(rng);
    const double q = rayleigh_quotient(j, a, GridFunction(Grid(grid), v)).value;
    worst = std::max(worst, eig.lambda1 - q);
  }
  require(worst <= 1e-8, "random quotient below lambda1 by " + fmt(worst));
  return "|RQ(phi1) - lambda1| = " + fmt(std::abs(at_phi - eig.lambda1)) +
         ", worst random defect = " + fmt(worst);
}

std::string c6_dirichlet_convergence() {
  const Kernel j = Kernel::uniform(1.0);
  const Coefficient a = coeff(0.0, {1.0});
  const std::vector<double> radii = {4.0, 8.0, 16.0, 32.0, 64.0};
  const ConvergenceStudy s0 = dirichlet_convergence_study(j, a, 0.3, radii, 8);
  const ConvergenceStudy s1 = dirichlet_convergence_study(j, a, 0.3 + 2.0, radii, 8);

  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (i) {
      require(s0.rows[i].lambda <= s0.rows[i - 1].lambda + 1e-10, "lambda_r not nonincreasing");
      require(s0.rows[i].gap < s0.rows[i - 1].gap, "gaps not strictly decreasing");
    }
    require(s0.rows[i].lambda >= s0.lambda1_ref - 1e-10, "lambda_r below lambda1");
    require(std::abs(s0.rows[i].lambda - s1.rows[i].lambda) <= 1e-10,
            "translated column differs by " +
                fmt(std::abs(s0.rows[i].lambda - s1.rows[i].lambda)));
  }
  require(s0.final_gap <= 0.05, "final gap " + fmt(s0.final_gap));
  return "final gap = " + fmt(s0.final_gap) + ", columns match to " +
         fmt(std::abs(s0.rows.back().lambda - s1.rows.back().lambda));
}

std::string c7_certificate() {
  const PeriodicGrid grid(1.0, 512);
  const Kernel j = Kernel::uniform(1.0);
  const Coefficient b = coeff(2.0, {1.0});
  const CertificateResult cert = kpp_certificate(j, b, grid);
  require(cert.margin >= 0.0, "margin " + fmt(cert.margin));
  require(cert.delta == cert.gamma / 4.0, "delta != gamma/4");

  const PeriodicOperator op = assemble_periodic(j, b.plus(-1.0), grid);
  const EigenResult eig = principal_eig_periodic(op, 1e-12, 500000);
  const double lower = std::pow(std::pow(cert.sigma, cert.p) + cert.delta, 1.0 / cert.p);
  require(eig.mu >= lower, "mu " + fmt(eig.mu) + " below " + fmt(lower));
  return "p = " + std::to_string(cert.p) + ", margin = " + fmt(cert.margin) +
         ", mu = " + fmt(eig.mu) + " >= " + fmt(lower);
}

std::string c8_existence_threshold() {
  const PeriodicGrid grid(1.0, 256);
  const Kernel j = Kernel::uniform(1.0);
  const double margin_tol = 1e-6;

  const double delta_star =
      principal_eig_periodic(j, coeff(0.0, {1.0}), grid, 1e-12, 500000).lambda1;
  require(delta_star >= -1.0 && delta_star <= 0.0, "delta* outside [-1, 0]");

  int flips = 0;
  double flip_at = 0.0;
  bool have_prev = false;
  Classification prev = Classification::marginal;
  for (int k = 0; k <= 30; ++k) {
    const double delta = -1.5 + 0.1 * k;
    const Classification cls = classify_existence(
        j, Nonlinearity::kpp(coeff(delta, {1.0}), grid), grid, margin_tol);
    if (cls == Classification::marginal) continue;
    if (have_prev && cls != prev) {
      ++flips;
      flip_at = delta;
    }
    prev = cls;
    have_prev = true;
  }
  require(flips == 1, "expected one flip, saw " + std::to_string(flips));
  require(std::abs(flip_at - delta_star) <= 0.1 + 1e-9,
          "flip at " + fmt(flip_at) + " vs delta* " + fmt(delta_star));
  return "flip at delta = " + fmt(flip_at) + ", delta* = " + fmt(delta_star);
}

std::string c9_steady_states() {
  SteadyOptions opts;
  opts.tol = 1e-9;

  const PeriodicGrid grid(1.0, 256);
  const SteadyReport constant =
      solve_steady(Kernel::uniform(1.0), Nonlinearity::kpp(coeff(1.0), grid), grid, opts);
  require(constant.classification == Classification::nontrivial_exists, "constant case class");
  require(constant.p.has_value(), "constant case has no p");
  const double dev = (constant.p->values.array() - 1.0).abs().maxCoeff();
  require(dev <= 1e-8, "p differs from 1 by " + fmt(dev));
  require(constant.residual <= 1e-8, "residual " + fmt(constant.residual));

  const SteadyReport tent = solve_steady(Kernel::tent(1.0, 0.3),
                                         Nonlinearity::kpp(coeff(0.5, {1.0}), grid), grid, opts);
  require(tent.classification == Classification::nontrivial_exists, "tent case class");
  require(tent.p.has_value() && tent.lower_bound > 0.0, "tent p not positive");
  require(tent.residual <= 1e-8, "tent residual " + fmt(tent.residual));
  return "constant |p-1| = " + fmt(dev) + "; asymmetric min p = " + fmt(tent.lower_bound) +
         ", residual = " + fmt(tent.residual);
}

std::string c10_uniqueness() {
  const PeriodicGrid grid(1.0, 256);
  const Kernel j = Kernel::uniform(1.0);
  const Nonlinearity f = Nonlinearity::kpp(coeff(0.5, {1.0}), grid);
  SteadyOptions opts;
  opts.tol = 1e-9;

  const PeriodicOperator op_a = assemble_periodic(j, f.derivative_at_zero(Grid(grid)), grid);
  const EigenResult eig = principal_eig_periodic(op_a, 1e-12, 500000);
  PeriodicOperator m0{grid, op_a.conv, Eigen::VectorXd::Zero(grid.N), 1.0, op_a.k_max};
  const double eps = subsolution_scale(m0, f, eig.phi);

  std::vector<GridFunction> inits;
  inits.emplace_back(Grid(grid), (eps * eig.phi.values).eval());
  inits.push_back(GridFunction::constant(Grid(grid), f.m_sup()));
  inits.push_back(GridFunction::constant(Grid(grid), 3.0 * f.m_sup()));
  const UniquenessReport rep = uniqueness_probe(j, f, grid, inits, opts);
  require(rep.max_pairwise_dist <= 1e-6, "limits differ by " + fmt(rep.max_pairwise_dist));
  for (const auto& e : rep.entries)
    require(std::abs(e.gamma_star_vs_p - 1.0) <= 1e-6,
            "gamma* off by " + fmt(std::abs(e.gamma_star_vs_p - 1.0)));
  require(rep.pass, "probe reported failure");
  return "max pairwise distance = " + fmt(rep.max_pairwise_dist);
}

std::string c11_nonexistence() {
  const PeriodicGrid grid(1.0, 256);
  const SteadyReport rep = solve_steady(Kernel::uniform(1.0),
                                        Nonlinearity::kpp(coeff(-0.2, {0.1}), grid), grid);
  require(rep.classification == Classification::only_trivial, "classification");
  require(rep.decay_sup <= 1e-8, "decay sup " + fmt(rep.decay_sup));
  return "lambda1 = " + fmt(rep.lambda1) + ", final sup = " + fmt(rep.decay_sup);
}

std::string c12_positive_lower_bound() {
  const PeriodicGrid grid(1.0, 256);
  const Kernel j = Kernel::uniform(1.0);
  const Nonlinearity f = Nonlinearity::kpp(coeff(1.0), grid);
  const SteadyReport rep = solve_steady(j, f, grid);
  require(rep.p.has_value(), "no steady state");
  const double c = rep.lower_bound;
  require(c > 0.0, "min p not positive");

  double worst = -1e300;
  for (double y : {0.0, 0.5, 1.0, 1.7, 2.9}) {
    const CompactSubsolutionResult cs = compact_subsolution(j, f, grid, y, 8);
    const auto& ig = std::get<IntervalGrid>(cs.phi.grid);
    for (int i = 0; i < ig.N; ++i)
      worst = std::max(worst, cs.gamma0 * cs.phi.values[i] -
                                  periodic_interp(*rep.p, ig.point(i)));
    require(c >= cs.gamma0 * cs.phi.values.maxCoeff() - 1e-10, "min p below gamma0 max phi");
  }
  require(worst <= 1e-10, "gamma0 phi exceeds p by " + fmt(worst));
  return "min p = " + fmt(c) + ", max (gamma0 phi - p) = " + fmt(worst);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NONLOCAL_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string c13_strong_max_principle() {
  const PeriodicGrid grid(1.0, 256);
  const Kernel j = Kernel::uniform(1.0);
  const GridFunction zero = GridFunction::constant(Grid(grid), 0.0);

  const auto r1 = strong_max_check(j, zero, zero, 0.25, 1e-10);
  require(r1.branch == MaxPrincipleBranch::identically_zero, "zero branch");
  const auto r2 = strong_max_check(j, zero, GridFunction::constant(Grid(grid), -1.0), 0.25, 1e-10);
  require(r2.branch == MaxPrincipleBranch::strictly_negative, "constant branch");
  const GridFunction dip = GridFunction::sampled(
      Grid(grid), [](double x) { return -(1.0 + std::cos(kPi * x)); });
  const auto r3 = strong_max_check(j, zero, dip, 0.25, 1e-10);
  require(!r3.hypothesis_ok || r3.branch == MaxPrincipleBranch::inconclusive, "dip branch");

  const int fault_exit =
      run_cli(std::string("verify ") + NONLOCAL_SCENARIO_DIR + "/faults/broken_mass.json");
  require(fault_exit == 2, "fault verify exit " + std::to_string(fault_exit));
  return "branches as specified; injected-fault verify exit code 2";
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<std::string()> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "constant-coefficient exactness", c1_constant_exactness},
      {2, "oracle equivalence on randomized scenarios", c2_oracle_equivalence},
      {3, "shift covariance", c3_shift_covariance},
      {4, "symmetric sandwich bounds", c4_symmetric_sandwich},
      {5, "Rayleigh-quotient consistency", c5_rayleigh_consistency},
      {6, "Dirichlet-to-periodic convergence", c6_dirichlet_convergence},
      {7, "positivity certificate", c7_certificate},
      {8, "existence threshold sweep", c8_existence_threshold},
      {9, "steady states (symmetric and asymmetric)", c9_steady_states},
      {10, "uniqueness of the positive state", c10_uniqueness},
      {11, "nonexistence and decay", c11_nonexistence},
      {12, "positive lower bound via compact subsolutions", c12_positive_lower_bound},
      {13, "strong maximum principle and fault injection", c13_strong_max_principle},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    try {
      const std::string detail = c.body();
      std::printf("[PASS] criterion %2d: %s (%s)\n", c.id, c.name, detail.c_str());
    } catch (const std::exception& e) {
      ++failed;
      std::printf("[FAIL] criterion %2d: %s (%s)\n", c.id, c.name, e.what());
    }
    std::fflush(stdout);
  }
  if (failed) std::printf("%d criterion(s) failed\n", failed);
  return failed ? 1 : 0;
}
