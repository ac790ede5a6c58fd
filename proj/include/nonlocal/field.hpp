#pragma once

#include <Eigen/Dense>
#include <functional>
#include <variant>
#include <vector>

#include "nonlocal/errors.hpp"

namespace nonlocal {

/// Uniform node grid on the torus [-R, R): x_i = -R + i*h with h = 2R/N.
struct PeriodicGrid {
  double R = 1.0;
  int N = 256;

  PeriodicGrid() = default;
  PeriodicGrid(double half_period, int points);

  double h() const { return 2.0 * R / N; }
  double point(int i) const { return -R + i * h(); }
  bool operator==(const PeriodicGrid&) const = default;
};

/// Uniform midpoint grid on (y - r, y + r): x_i = y - r + (i + 1/2)*h with h = 2r/N.
/// Midpoints keep every node strictly interior, so no sample sits on the boundary.
struct IntervalGrid {
  double center = 0.0;
  double radius = 1.0;
  int N = 64;

  IntervalGrid() = default;
  IntervalGrid(double center_, double radius_, int points);

  double h() const { return 2.0 * radius / N; }
  double point(int i) const { return center - radius + (i + 0.5) * h(); }
  bool operator==(const IntervalGrid&) const = default;
};

using Grid = std::variant<PeriodicGrid, IntervalGrid>;

int grid_size(const Grid& g);
double grid_h(const Grid& g);
double grid_point(const Grid& g, int i);
bool is_periodic(const Grid& g);
bool grids_equal(const Grid& a, const Grid& b);

/// Real-valued samples over a grid. Values must be finite.
struct GridFunction {
  Grid grid;
  Eigen::VectorXd values;

  GridFunction() = default;  // empty placeholder; assign before use
  GridFunction(Grid g, Eigen::VectorXd v);

  static GridFunction constant(const Grid& g, double c);
  static GridFunction sampled(const Grid& g, const std::function<double(double)>& f);

  int size() const { return static_cast<int>(values.size()); }
};

/// Uniform-weight rule h * sum(values). Exact for constants; spectrally accurate
/// for smooth periodic integrands on PeriodicGrid.
double quadrature(const GridFunction& u);

/// Sliding-window average (1/2eps) * integral over [x-eps, x+eps] of the
/// cell-constant extension of u.  Periodic grids wrap; interval grids extend by 0.
/// Requires eps >= h.
GridFunction mollify(const GridFunction& u, double eps);

/// Least gamma >= 0 with u <= gamma * v pointwise, i.e. max_i u_i / v_i clamped at 0.
/// Requires v > 0 everywhere and u >= 0.
double gamma_star(const GridFunction& u, const GridFunction& v);

/// Finite Fourier series with period 2R:
///   a(x) = mean + sum_k c_k cos(k pi x / R) + s_k sin(k pi x / R).
/// Truncated series are automatically periodic and Lipschitz with a closed-form
/// Lipschitz constant sum_k (pi k / R)(|c_k| + |s_k|).
struct Coefficient {
  double mean = 0.0;
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
  double period = 2.0;

  double operator()(double x) const;
  double lipschitz() const;
  Coefficient plus(double c) const;
  Eigen::VectorXd sample(const Grid& g) const;
};

}  // namespace nonlocal
