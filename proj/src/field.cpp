#include "nonlocal/field.hpp"

#include <cmath>
#include <numbers>

namespace nonlocal {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::bad_input: return "BadInput";
    case Errc::bad_scenario: return "BadScenario";
    case Errc::bad_grid: return "BadGrid";
    case Errc::bad_tolerance: return "BadTolerance";
    case Errc::non_positive_parameter: return "NonPositiveParameter";
    case Errc::support_excludes_origin: return "SupportExcludesOrigin";
    case Errc::resolution_too_coarse: return "ResolutionTooCoarse";
    case Errc::iteration_cap: return "IterationCap";
    case Errc::tail_tol_too_small: return "TailTolTooSmall";
    case Errc::epsilon_below_resolution: return "EpsilonBelowResolution";
    case Errc::nonpositive_comparator: return "NonpositiveComparator";
    case Errc::period_mismatch: return "PeriodMismatch";
    case Errc::grid_mismatch: return "GridMismatch";
    case Errc::no_convergence: return "NoConvergence";
    case Errc::reducible_pattern: return "ReduciblePattern";
    case Errc::complex_principal: return "ComplexPrincipal";
    case Errc::non_positive_eigenvector: return "NonPositiveEigenvector";
    case Errc::zero_function: return "ZeroFunction";
    case Errc::certificate_failed: return "CertificateFailed";
    case Errc::symmetry_required: return "SymmetryRequired";
    case Errc::hyp_f1_violation: return "HypF1Violation";
    case Errc::no_subsolution_found: return "NoSubsolutionFound";
    case Errc::monotonicity_broken: return "MonotonicityBroken";
    case Errc::max_iter_exceeded: return "MaxIterExceeded";
    case Errc::no_radius_found: return "NoRadiusFound";
    case Errc::inadmissible_init: return "InadmissibleInit";
    case Errc::lambda_sign: return "LambdaSign";
  }
  return "UnknownError";
}

bool is_input_error(Errc c) {
  switch (c) {
    case Errc::bad_input:
    case Errc::bad_scenario:
    case Errc::bad_grid:
    case Errc::bad_tolerance:
    case Errc::non_positive_parameter:
    case Errc::support_excludes_origin:
    case Errc::epsilon_below_resolution:
    case Errc::nonpositive_comparator:
    case Errc::period_mismatch:
    case Errc::grid_mismatch:
    case Errc::zero_function:
    case Errc::symmetry_required:
    case Errc::hyp_f1_violation:
    case Errc::inadmissible_init:
    case Errc::lambda_sign:
      return true;
    default:
      return false;
  }
}

PeriodicGrid::PeriodicGrid(double half_period, int points) : R(half_period), N(points) {
  if (!(R > 0.0)) fail(Errc::bad_grid, "periodic grid needs R > 0");
  if (N < 8 || N % 2 != 0) fail(Errc::bad_grid, "periodic grid needs N >= 8 and even");
}

IntervalGrid::IntervalGrid(double center_, double radius_, int points)
    : center(center_), radius(radius_), N(points) {
  if (!(radius > 0.0)) fail(Errc::bad_grid, "interval grid needs r > 0");
  if (N < 4) fail(Errc::bad_grid, "interval grid needs N >= 4");
}

int grid_size(const Grid& g) {
  return std::visit([](const auto& gr) { return gr.N; }, g);
}

double grid_h(const Grid& g) {
  return std::visit([](const auto& gr) { return gr.h(); }, g);
}

double grid_point(const Grid& g, int i) {
  return std::visit([i](const auto& gr) { return gr.point(i); }, g);
}

bool is_periodic(const Grid& g) { return std::holds_alternative<PeriodicGrid>(g); }

bool grids_equal(const Grid& a, const Grid& b) { return a == b; }

GridFunction::GridFunction(Grid g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid_size(grid)) fail(Errc::grid_mismatch, "value count does not match grid");
  if (!values.allFinite()) fail(Errc::bad_input, "grid function has non-finite values");
}

GridFunction GridFunction::constant(const Grid& g, double c) {
  return GridFunction(g, Eigen::VectorXd::Constant(grid_size(g), c));
}

GridFunction GridFunction::sampled(const Grid& g, const std::function<double(double)>& f) {
  Eigen::VectorXd v(grid_size(g));
  for (int i = 0; i < v.size(); ++i) v[i] = f(grid_point(g, i));
  return GridFunction(g, std::move(v));
}

double quadrature(const GridFunction& u) { return grid_h(u.grid) * u.values.sum(); }

namespace {

// Window average against the cell-constant extension of u.  Cell m has bounds
// [origin + m*h, origin + (m+1)*h]; shared boundaries are computed by the same
// expression so the partial widths telescope exactly.
double window_average(const Eigen::VectorXd& vals, double origin, double h, double lo, double hi,
                      bool wrap) {
  const int n = static_cast<int>(vals.size());
  const long m_lo = static_cast<long>(std::floor((lo - origin) / h));
  const long m_hi = static_cast<long>(std::ceil((hi - origin) / h));
  double acc = 0.0;
  for (long m = m_lo; m <= m_hi; ++m) {
    const double c_lo = origin + static_cast<double>(m) * h;
    const double c_hi = origin + static_cast<double>(m + 1) * h;
    const double w = std::min(hi, c_hi) - std::max(lo, c_lo);
    if (w <= 0.0) continue;
    long j = m;
    if (wrap) {
      j = ((m % n) + n) % n;
    } else if (j < 0 || j >= n) {
      continue;  // extension by zero
    }
    acc += w * vals[static_cast<int>(j)];
  }
  return acc / (hi - lo);
}

}  // namespace

GridFunction mollify(const GridFunction& u, double eps) {
  const double h = grid_h(u.grid);
  if (eps < h * (1.0 - 1e-12)) fail(Errc::epsilon_below_resolution, "mollify needs eps >= h");
  const int n = u.size();
  Eigen::VectorXd out(n);
  if (is_periodic(u.grid)) {
    const auto& g = std::get<PeriodicGrid>(u.grid);
    const double origin = -g.R - 0.5 * h;  // cell of node j is [x_j - h/2, x_j + h/2]
    for (int i = 0; i < n; ++i) {
      const double x = g.point(i);
      out[i] = window_average(u.values, origin, h, x - eps, x + eps, true);
    }
  } else {
    const auto& g = std::get<IntervalGrid>(u.grid);
    const double origin = g.center - g.radius;  // cell of midpoint j is [origin + j*h, origin + (j+1)*h]
    for (int i = 0; i < n; ++i) {
      const double x = g.point(i);
      out[i] = window_average(u.values, origin, h, x - eps, x + eps, false);
    }
  }
  return GridFunction(u.grid, std::move(out));
}

double gamma_star(const GridFunction& u, const GridFunction& v) {
  if (!grids_equal(u.grid, v.grid)) fail(Errc::grid_mismatch, "gamma_star grids differ");
  if (v.values.minCoeff() <= 0.0) fail(Errc::nonpositive_comparator, "comparator must be positive");
  const double u_min = u.values.minCoeff();
  if (u_min < -1e-9 * std::max(1.0, u.values.cwiseAbs().maxCoeff()))
    fail(Errc::bad_input, "gamma_star expects u >= 0");
  double g = 0.0;
  for (int i = 0; i < u.size(); ++i) g = std::max(g, u.values[i] / v.values[i]);
  return g;
}

double Coefficient::operator()(double x) const {
  const double w = 2.0 * std::numbers::pi / period;
  double acc = mean;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k)
    acc += cos_coeffs[k] * std::cos(static_cast<double>(k + 1) * w * x);
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k)
    acc += sin_coeffs[k] * std::sin(static_cast<double>(k + 1) * w * x);
  return acc;
}

double Coefficient::lipschitz() const {
  const double w = 2.0 * std::numbers::pi / period;
  double acc = 0.0;
  for (std::size_t k = 0; k < cos_coeffs.size(); ++k)
    acc += static_cast<double>(k + 1) * w * std::abs(cos_coeffs[k]);
  for (std::size_t k = 0; k < sin_coeffs.size(); ++k)
    acc += static_cast<double>(k + 1) * w * std::abs(sin_coeffs[k]);
  return acc;
}

Coefficient Coefficient::plus(double c) const {
  Coefficient out = *this;
  out.mean += c;
  return out;
}

Eigen::VectorXd Coefficient::sample(const Grid& g) const {
  Eigen::VectorXd v(grid_size(g));
  for (int i = 0; i < v.size(); ++i) v[i] = (*this)(grid_point(g, i));
  return v;
}

}  // namespace nonlocal
