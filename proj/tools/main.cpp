// nonlocal-spectra: scenario-driven driver for the dispersal-operator library.
//
// Subcommands map one-to-one onto the library surface: validate, eig-periodic,
// eig-dirichlet, rayleigh, certificate, converge, solve, sweep, unique,
// maxprinciple, verify.  Every command reads one scenario JSON, writes a JSON
// summary to stdout (stable key order) and optional CSV artifacts to --out.
//
// Exit codes: 0 success, 1 solver failure, 2 invariant FAIL, 3 bad input.

#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <json.hpp>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "nonlocal/diagnostics.hpp"
#include "nonlocal/io.hpp"

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using namespace nonlocal;

namespace {

struct CommonOpts {
  std::string scenario_path;
  std::string out_dir;
  int grid_n = 0;
  double tol = 0.0;
  int threads = 0;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("scenario", o.scenario_path, "scenario JSON file")->required();
  cmd->add_option("--out", o.out_dir, "directory for CSV artifacts");
  cmd->add_option("--grid", o.grid_n, "override the scenario grid size N");
  cmd->add_option("--tol", o.tol, "override the solver tolerances");
  cmd->add_option("--threads", o.threads, "worker threads for sweeps");
  cmd->add_option("--format", o.format, "stdout format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

Scenario load(const CommonOpts& o) {
  Scenario sc = load_scenario_file(o.scenario_path);
  if (o.grid_n > 0) {
    if (o.grid_n < 8 || o.grid_n % 2 != 0) fail(Errc::bad_input, "--grid must be even and >= 8");
    sc.N = o.grid_n;
  }
  if (o.tol > 0.0) {
    sc.solver.tol = o.tol;
    sc.solver.eig_tol = o.tol;
  }
  return sc;
}

int resolve_threads(int flag) {
  if (const char* env = std::getenv("NONLOCAL_SPECTRA_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return flag > 0 ? flag : 1;
}

fs::path ensure_out(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void emit(const ojson& j) { std::cout << j.dump(2) << "\n"; }

ojson eig_json(const EigenResult& r) {
  ojson j;
  j["lambda1"] = r.lambda1;
  j["mu"] = r.mu;
  j["residual"] = r.residual;
  j["iterations"] = r.iterations;
  if (r.gap)
    j["gap"] = *r.gap;
  else
    j["gap"] = nullptr;
  j["shift"] = r.shift;
  return j;
}

int cmd_validate(const CommonOpts& o, int power, int resolution) {
  const Scenario sc = load(o);
  const Kernel kernel = scenario_kernel(sc);
  const PeriodicGrid grid = scenario_grid(sc);
  const ValidationReport rep = validate_kernel(kernel);

  if (!o.out_dir.empty()) {
    const fs::path dir = ensure_out(o.out_dir);
    std::vector<std::vector<double>> rows;
    const double lo = kernel.support_lo(), hi = kernel.support_hi();
    for (int i = 0; i < resolution; ++i) {
      const double x = lo + (i + 0.5) * (hi - lo) / resolution;
      rows.push_back({x, kernel(x)});
    }
    write_csv_file((dir / "kernel_density.csv").string(), {"x", "J"}, rows);
    if (power >= 1) {
      const KernelPower jp = convolve_power(kernel, power, resolution);
      std::vector<std::vector<double>> prows;
      for (std::size_t i = 0; i < jp.values.size(); ++i)
        prows.push_back({jp.x0 + i * jp.h, jp.values[i]});
      write_csv_file((dir / "kernel_power.csv").string(), {"x", "Jp"}, prows);
    }
  }

  ojson j;
  j["command"] = "validate";
  j["scenario"] = sc.name;
  ojson jk;
  jk["family"] = family_name(kernel.family());
  jk["j1_ok"] = rep.j1_ok;
  jk["j2_ok"] = rep.j2_ok;
  jk["symmetric"] = rep.symmetric;
  jk["mass"] = rep.mass;
  jk["witness_a"] = rep.witness_a;
  jk["witness_b"] = rep.witness_b;
  j["kernel"] = jk;

  bool hyp_ok = true;
  std::string hyp_err;
  try {
    const Nonlinearity f = scenario_nonlinearity(sc, grid);
    j["nonlinearity"] = {{"form", sc.f.form == Nonlinearity::Form::kpp ? "kpp" : "custom"},
                         {"m_sup", f.m_sup()},
                         {"hyp_f1_ok", true}};
  } catch (const Failure& e) {
    hyp_ok = false;
    hyp_err = e.what();
    j["nonlinearity"] = {{"hyp_f1_ok", false}, {"error", hyp_err}};
  }
  emit(j);
  return (rep.j1_ok && rep.j2_ok && hyp_ok) ? 0 : 2;
}

void dump_matrix_csv(const fs::path& path, const Eigen::MatrixXd& m) {
  std::vector<std::vector<double>> rows;
  rows.reserve(static_cast<std::size_t>(m.rows()) * m.cols());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      rows.push_back({static_cast<double>(i), static_cast<double>(j), m(i, j)});
  write_csv_file(path.string(), {"i", "j", "value"}, rows);
}

int cmd_eig_periodic(const CommonOpts& o, bool dump_matrix) {
  const Scenario sc = load(o);
  const Kernel kernel = scenario_kernel(sc);
  const PeriodicGrid grid = scenario_grid(sc);
  const PeriodicOperator op = assemble_periodic(kernel, sc.a, grid, sc.solver.tail_tol);
  if (dump_matrix && !o.out_dir.empty())
    dump_matrix_csv(ensure_out(o.out_dir) / "operator_matrix.csv", op.matrix());
  const EigenResult r = principal_eig_periodic(op, sc.solver.eig_tol, sc.solver.eig_max_iter);

  ojson j;
  j["command"] = "eig-periodic";
  j["scenario"] = sc.name;
  j["result"] = eig_json(r);
  if (grid.N <= 1024) {
    const EigenResult d = principal_eig_dense_oracle(op);
    const double align =
        std::abs(r.phi.values.dot(d.phi.values)) / (r.phi.values.norm() * d.phi.values.norm());
    j["oracle"] = {{"lambda1", d.lambda1}, {"gap", *d.gap}, {"alignment", align}};
  }
  if (!o.out_dir.empty())
    write_grid_function_csv((ensure_out(o.out_dir) / "phi.csv").string(), r.phi);
  emit(j);
  return 0;
}

int cmd_eig_dirichlet(const CommonOpts& o, double y_flag, double r_flag, bool dump_matrix) {
  const Scenario sc = load(o);
  const Kernel kernel = scenario_kernel(sc);
  const double y = std::isnan(y_flag) ? sc.dirichlet.y : y_flag;
  const double r = std::isnan(r_flag) ? sc.dirichlet.radii.front() : r_flag;
  long n = std::lround(2.0 * r * sc.dirichlet.points_per_unit);
  n += n % 2;
  const IntervalGrid grid(y, r, static_cast<int>(std::max(8l, n)));
  const DirichletOperator op = assemble_dirichlet(kernel, sc.a, grid);
  if (dump_matrix && !o.out_dir.empty())
    dump_matrix_csv(ensure_out(o.out_dir) / "operator_matrix.csv", op.matrix());
  const EigenResult res = principal_eig_dirichlet(op, sc.solver.eig_tol, sc.solver.eig_max_iter);

  ojson j;
  j["command"] = "eig-dirichlet";
  j["scenario"] = sc.name;
  j["y"] = y;
  j["r"] = r;
  j["result"] = eig_json(res);
  // a discrete grid cannot test continuity at the boundary; record the layer size
  j["boundary_phi"] = {std::abs(res.phi.values[0]), std::abs(res.phi.values[grid.N - 1])};
  if (grid.N <= 1024) {
    const EigenResult d = principal_eig_dense_oracle(op);
    j["oracle"] = {{"lambda1", d.lambda1}, {"gap", *d.gap}};
  }
  if (!o.out_dir.empty())
    write_grid_function_csv((ensure_out(o.out_dir) / "phi_dirichlet.csv").string(), res.phi);
  emit(j);
  return 0;
}

int cmd_rayleigh(const CommonOpts& o, const std::string& phi_file, int random_count) {
  const Scenario sc = load(o);
  const Kernel kernel = scenario_kernel(sc);
  const PeriodicGrid grid = scenario_grid(sc);
  const EigenResult eig = principal_eig_periodic(kernel, sc.a, grid, sc.solver.eig_tol,
                                                 sc.solver.eig_max_iter);
  const RayleighResult at_phi1 = rayleigh_quotient(kernel, sc.a, eig.phi);

  ojson j;
  j["command"] = "rayleigh";
  j["scenario"] = sc.name;
  j["lambda1"] = eig.lambda1;
  j["quotient_phi1"] = at_phi1.value;
  j["variational"] = at_phi1.variational;

  if (!phi_file.empty()) {
    const GridFunction phi = read_grid_function_csv(phi_file, Grid(grid));
    j["quotient_file"] = rayleigh_quotient(kernel, sc.a, phi).value;
  }
  if (random_count > 0) {
    std::mt19937_64 rng(sc.seed + 17);
    std::uniform_real_distribution<double> dist(0.1, 2.0);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < random_count; ++t) {
      Eigen::VectorXd v(grid.N);
      for (int i = 0; i < grid.N; ++i) v[i] = dist(rng);
      worst = std::min(worst,
                       rayleigh_quotient(kernel, sc.a, GridFunction(Grid(grid), v)).value);
    }
    j["min_random_quotient"] = worst;
    j["random_count"] = random_count;
  }
  emit(j);
  return 0;
}

int cmd_certificate(const CommonOpts& o) {
  const Scenario sc = load(o);
  const Kernel kernel = scenario_kernel(sc);
  const PeriodicGrid grid = scenario_grid(sc);
  const PeriodicOperator op = assemble_periodic(kernel, sc.a, grid, sc.solver.tail_tol);
  // Certify the positive form: b = a + k_shift has min b >= 1 on the grid.
  const Coefficient b = sc.a.plus(op.k_shift);
  const CertificateResult cert = kpp_certificate(kernel, b, grid);
  const EigenResult eig = principal_eig_periodic(op, sc.solver.eig_tol, sc.solver.eig_max_iter);

  ojson j;
  j["command"] = "certificate";
  j["scenario"] = sc.name;
  j["p"] = cert.p;
  j["sigma"] = cert.sigma;
  j["x0"] = cert.x0;
  j["epsilon"] = cert.epsilon;
  j["gamma"] = cert.gamma;
  j["delta"] = cert.delta;
  j["margin"] = cert.margin;
  j["c_min"] = cert.c_min;
  j["lipschitz_bp"] = cert.lipschitz_bp;
  j["continuum_bound"] = cert.continuum_bound;
  j["mu"] = eig.mu;
  j["mu_lower_bound"] = std::pow(std::pow(cert.sigma, cert.p) + cert.delta, 1.0 / cert.p);
  if (!o.out_dir.empty())
    write_grid_function_csv((ensure_out(o.out_dir) / "certificate_v.csv").string(), cert.v);
  emit(j);
  return 0;
}

int cmd_converge(const CommonOpts& o) {
  const Scenario sc = load(o);
  const Kernel kernel = scenario_kernel(sc);
  const ConvergenceStudy study = dirichlet_convergence_study(
      kernel, sc.a, sc.dirichlet.y, sc.dirichlet.radii, sc.dirichlet.points_per_unit);

  std::vector<std::vector<double>> rows;
  for (const auto& row : study.rows) rows.push_back({row.r, row.lambda, row.gap});
  if (!o.out_dir.empty())
    write_csv_file((ensure_out(o.out_dir) / "converge.csv").string(), {"r", "lambda", "gap"}, rows);

  if (o.format == "csv") {
    write_csv(std::cout, {"r", "lambda", "gap"}, rows);
    return 0;
  }
  ojson j;
  j["command"] = "converge";
  j["scenario"] = sc.name;
  j["lambda1_ref"] = study.lambda1_ref;
  j["y_requested"] = study.y_requested;
  j["y_used"] = study.y_used;
  j["points_per_unit"] = study.points_per_unit;
  j["final_gap"] = study.final_gap;
  ojson table = ojson::array();
  for (const auto& row : study.rows)
    table.push_back({{"r", row.r}, {"lambda", row.lambda}, {"gap", row.gap}});
  j["rows"] = table;
  emit(j);
  return 0;
}

ojson steady_json(const SteadyReport& rep) {
  ojson j;
  j["lambda1"] = rep.lambda1;
  j["classification"] = to_string(rep.classification);
  j["iterations"] = rep.iterations;
  if (rep.p) {
    j["residual"] = rep.residual;
    j["min_p"] = rep.lower_bound;
    j["limits_gap"] = rep.limits_gap;
    j["subsolution_eps"] = rep.subsolution_eps;
  }
  if (rep.classification == Classification::only_trivial) j["decay_sup"] = rep.decay_sup;
  return j;
}

int cmd_solve(const CommonOpts& o) {
  const Scenario sc = load(o);
  const Kernel kernel = scenario_kernel(sc);
  const PeriodicGrid grid = scenario_grid(sc);
  const Nonlinearity f = scenario_nonlinearity(sc, grid);
  const SteadyReport rep = solve_steady(kernel, f, grid, sc.solver);

  ojson j;
  j["command"] = "solve";
  j["scenario"] = sc.name;
  j["result"] = steady_json(rep);
  if (!o.out_dir.empty()) {
    const fs::path dir = ensure_out(o.out_dir);
    if (rep.p) write_grid_function_csv((dir / "p.csv").string(), *rep.p);
    std::vector<std::vector<double>> trace;
    for (std::size_t i = 0; i < rep.up_trace.size() || i < rep.down_trace.size(); ++i)
      trace.push_back({static_cast<double>(i + 1),
                       i < rep.up_trace.size() ? rep.up_trace[i] : 0.0,
                       i < rep.down_trace.size() ? rep.down_trace[i] : 0.0});
    write_csv_file((dir / "trace.csv").string(), {"iteration", "up_step", "down_step"}, trace);
  }
  emit(j);
  return 0;
}

int cmd_sweep(const CommonOpts& o, double from, double to, double step) {
  const Scenario sc = load(o);
  if (!(step > 0.0) || to < from) fail(Errc::bad_input, "sweep needs step > 0 and to >= from");
  const int count = static_cast<int>(std::floor((to - from) / step + 1e-9)) + 1;
  if (count > 10001) fail(Errc::bad_input, "sweep has too many points");
  const Kernel kernel = scenario_kernel(sc);
  const PeriodicGrid grid = scenario_grid(sc);

  struct Point {
    double delta = 0.0, lambda1 = 0.0, min_p = 0.0;
    Classification cls = Classification::marginal;
  };
  std::vector<Point> points(count);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
      try {
        const double delta = from + i * step;
        const Nonlinearity f = Nonlinearity::kpp(sc.a.plus(delta), grid);
        const SteadyReport rep = solve_steady(kernel, f, grid, sc.solver);
        points[i] = {delta, rep.lambda1, rep.p ? rep.lower_bound : 0.0, rep.classification};
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  const int n_threads = std::min(resolve_threads(o.threads), count);
  std::vector<std::thread> pool;
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);

  std::vector<std::vector<double>> rows;
  int flips = 0;
  double flip_delta = std::numeric_limits<double>::quiet_NaN();
  bool have_prev = false;
  Classification prev = Classification::marginal;
  for (const Point& pt : points) {
    rows.push_back({pt.delta, pt.lambda1,
                    pt.cls == Classification::nontrivial_exists ? 1.0
                    : pt.cls == Classification::only_trivial    ? 0.0
                                                                : 0.5,
                    pt.min_p});
    if (pt.cls == Classification::marginal) continue;
    if (have_prev && pt.cls != prev) {
      ++flips;
      flip_delta = pt.delta;
    }
    prev = pt.cls;
    have_prev = true;
  }
  if (!o.out_dir.empty())
    write_csv_file((ensure_out(o.out_dir) / "sweep.csv").string(),
                   {"delta", "lambda1", "classification", "min_p"}, rows);
  if (o.format == "csv") {
    write_csv(std::cout, {"delta", "lambda1", "classification", "min_p"}, rows);
    return 0;
  }
  ojson j;
  j["command"] = "sweep";
  j["scenario"] = sc.name;
  j["points"] = count;
  j["flips"] = flips;
  if (flips > 0) j["flip_delta"] = flip_delta;
  ojson table = ojson::array();
  for (const Point& pt : points)
    table.push_back({{"delta", pt.delta},
                     {"lambda1", pt.lambda1},
                     {"classification", to_string(pt.cls)},
                     {"min_p", pt.min_p}});
  j["rows"] = table;
  emit(j);
  return 0;
}

int cmd_unique(const CommonOpts& o) {
  const Scenario sc = load(o);
  const Kernel kernel = scenario_kernel(sc);
  const PeriodicGrid grid = scenario_grid(sc);
  const Nonlinearity f = scenario_nonlinearity(sc, grid);

  // Default inits: the scaled eigenfunction subsolution plus two constant
  // supersolutions at m_sup and 3 m_sup.
  const PeriodicOperator op_a = assemble_periodic(kernel, f.derivative_at_zero(Grid(grid)), grid);
  const EigenResult eig = principal_eig_periodic(op_a, sc.solver.eig_tol, sc.solver.eig_max_iter);
  PeriodicOperator m0{grid, op_a.conv, Eigen::VectorXd::Zero(grid.N), 1.0, op_a.k_max};
  const double eps = subsolution_scale(m0, f, eig.phi);
  std::vector<GridFunction> inits;
  inits.emplace_back(Grid(grid), (eps * eig.phi.values).eval());
  inits.push_back(GridFunction::constant(Grid(grid), f.m_sup()));
  inits.push_back(GridFunction::constant(Grid(grid), 3.0 * f.m_sup()));

  const UniquenessReport rep = uniqueness_probe(kernel, f, grid, inits, sc.solver);
  ojson j;
  j["command"] = "unique";
  j["scenario"] = sc.name;
  j["lambda1"] = rep.lambda1;
  j["pass"] = rep.pass;
  j["max_pairwise_dist"] = rep.max_pairwise_dist;
  ojson entries = ojson::array();
  for (const auto& e : rep.entries)
    entries.push_back({{"direction", e.direction == IterationDirection::up ? "up" : "down"},
                       {"sup_dist_to_p", e.sup_dist_to_p},
                       {"gamma_star", e.gamma_star_vs_p}});
  j["entries"] = entries;
  emit(j);
  return rep.pass ? 0 : 2;
}

ojson maxprinciple_json(const MaxPrincipleReport& r) {
  return ojson{{"hypothesis_ok", r.hypothesis_ok},
               {"branch", to_string(r.branch)},
               {"witness_x", r.witness_x},
               {"hypothesis_min", r.hypothesis_min},
               {"mollified_max", r.mollified_max},
               {"sup_abs_u", r.sup_abs_u}};
}

int cmd_maxprinciple(const CommonOpts& o, const std::string& u_file, const std::string& c_file,
                     double eps, double tol) {
  const Scenario sc = load(o);
  const Kernel kernel = scenario_kernel(sc);
  const PeriodicGrid grid = scenario_grid(sc);
  const double eps_used = eps > 0.0 ? eps : std::max(0.25 * grid.R, grid.h());

  ojson j;
  j["command"] = "maxprinciple";
  j["scenario"] = sc.name;
  if (!u_file.empty()) {
    const GridFunction u = read_grid_function_csv(u_file, Grid(grid));
    const GridFunction c = c_file.empty()
                               ? GridFunction::constant(Grid(grid), 0.0)
                               : read_grid_function_csv(c_file, Grid(grid));
    j["report"] = maxprinciple_json(strong_max_check(kernel, c, u, eps_used, tol));
  } else {
    const GridFunction zero = GridFunction::constant(Grid(grid), 0.0);
    const GridFunction neg1 = GridFunction::constant(Grid(grid), -1.0);
    const GridFunction dip = GridFunction::sampled(Grid(grid), [&](double x) {
      return -(1.0 + std::cos(std::numbers::pi * x / grid.R));
    });
    j["zero"] = maxprinciple_json(strong_max_check(kernel, zero, zero, eps_used, tol));
    j["negative_constant"] = maxprinciple_json(strong_max_check(kernel, zero, neg1, eps_used, tol));
    j["cosine_dip"] = maxprinciple_json(strong_max_check(kernel, zero, dip, eps_used, tol));
  }
  emit(j);
  return 0;
}

int cmd_verify(const CommonOpts& o) {
  const Scenario sc = load(o);
  const InvariantReport rep = invariant_suite(sc);
  for (const auto& c : rep.checks) {
    const char* tag = c.status == CheckStatus::pass   ? "PASS"
                      : c.status == CheckStatus::fail ? "FAIL"
                                                      : "SKIP";
    std::cout << "[" << tag << "] " << c.name;
    if (c.status != CheckStatus::skip)
      std::cout << " (measured " << fmt17(c.measured) << ", threshold " << fmt17(c.threshold)
                << ")";
    else if (!c.note.empty())
      std::cout << " (" << c.note << ")";
    std::cout << "\n";
  }
  ojson j;
  j["command"] = "verify";
  j["scenario"] = sc.name;
  j["all_pass"] = rep.all_pass();
  ojson checks = ojson::array();
  for (const auto& c : rep.checks) {
    ojson cj;
    cj["name"] = c.name;
    cj["status"] = c.status == CheckStatus::pass   ? "pass"
                   : c.status == CheckStatus::fail ? "fail"
                                                   : "skip";
    if (c.status != CheckStatus::skip) {
      cj["measured"] = c.measured;
      cj["threshold"] = c.threshold;
    }
    if (!c.note.empty()) cj["note"] = c.note;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  emit(j);
  return rep.all_pass() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nonlocal dispersal spectra and steady states"};
  app.require_subcommand(1);

  CommonOpts o;
  double y_flag = std::numeric_limits<double>::quiet_NaN();
  double r_flag = std::numeric_limits<double>::quiet_NaN();
  std::string phi_file, u_file, c_file;
  int random_count = 16;
  int power = 0, resolution = 512;
  bool dump_matrix = false;
  double from = -1.5, to = 1.5, step = 0.1;
  double mp_eps = 0.0, mp_tol = 1e-8;
  std::string param = "delta";

  auto* validate = app.add_subcommand("validate", "check kernel and nonlinearity hypotheses");
  add_common(validate, o);
  validate->add_option("--power", power, "also export this convolution power as CSV");
  validate->add_option("--resolution", resolution, "sample count for kernel exports");
  auto* eigp = app.add_subcommand("eig-periodic", "principal periodic eigenpair");
  add_common(eigp, o);
  eigp->add_flag("--dump-matrix", dump_matrix, "export the assembled operator as CSV");
  auto* eigd = app.add_subcommand("eig-dirichlet", "principal Dirichlet eigenpair");
  add_common(eigd, o);
  eigd->add_option("--y", y_flag, "interval center");
  eigd->add_option("--r", r_flag, "interval radius");
  eigd->add_flag("--dump-matrix", dump_matrix, "export the assembled operator as CSV");
  auto* ray = app.add_subcommand("rayleigh", "Rayleigh quotients");
  add_common(ray, o);
  ray->add_option("--phi", phi_file, "two-column CSV with a test function");
  ray->add_option("--random", random_count, "number of random test functions");
  auto* cert = app.add_subcommand("certificate", "positivity certificate for the shifted form");
  add_common(cert, o);
  auto* conv = app.add_subcommand("converge", "Dirichlet-to-periodic eigenvalue convergence");
  add_common(conv, o);
  auto* solve = app.add_subcommand("solve", "steady-state existence and solution");
  add_common(solve, o);
  auto* sweep = app.add_subcommand("sweep", "coefficient-shift sweep");
  add_common(sweep, o);
  sweep->add_option("--param", param, "swept parameter (only 'delta' is supported)")
      ->check(CLI::IsMember({"delta"}));
  sweep->add_option("--from", from, "sweep start");
  sweep->add_option("--to", to, "sweep end");
  sweep->add_option("--step", step, "sweep step");
  auto* uniq = app.add_subcommand("unique", "uniqueness probe from multiple inits");
  add_common(uniq, o);
  auto* maxp = app.add_subcommand("maxprinciple", "strong maximum principle checker");
  add_common(maxp, o);
  maxp->add_option("--u", u_file, "two-column CSV with u (defaults to built-in cases)");
  maxp->add_option("--c", c_file, "two-column CSV with c (defaults to 0)");
  maxp->add_option("--eps", mp_eps, "mollification radius");
  maxp->add_option("--mp-tol", mp_tol, "dichotomy tolerance");
  auto* verify = app.add_subcommand("verify", "run the cross-module invariant suite");
  add_common(verify, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(o, power, resolution);
    if (eigp->parsed()) return cmd_eig_periodic(o, dump_matrix);
    if (eigd->parsed()) return cmd_eig_dirichlet(o, y_flag, r_flag, dump_matrix);
    if (ray->parsed()) return cmd_rayleigh(o, phi_file, random_count);
    if (cert->parsed()) return cmd_certificate(o);
    if (conv->parsed()) return cmd_converge(o);
    if (solve->parsed()) return cmd_solve(o);
    if (sweep->parsed()) return cmd_sweep(o, from, to, step);
    if (uniq->parsed()) return cmd_unique(o);
    if (maxp->parsed()) return cmd_maxprinciple(o, u_file, c_file, mp_eps, mp_tol);
    if (verify->parsed()) return cmd_verify(o);
  } catch (const Failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.code()) ? 3 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 3;
}
