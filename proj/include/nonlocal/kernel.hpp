#pragma once

#include <Eigen/Dense>
#include <array>
#include <vector>

#include "nonlocal/field.hpp"

namespace nonlocal {

enum class KernelFamily { uniform, tent, truncated_gaussian };

const char* family_name(KernelFamily f);

/// Compactly supported dispersal density.  All families integrate to one by
/// construction (closed-form normalization), are nonnegative, and have an open
/// neighbourhood of the origin inside their support.
///
/// Families:
///   uniform(l):              1/(2l) on [-l, l]
///   tent(l, s):              (1/l)(1 - |x - s|/l) on [s-l, s+l], needs |s| < l
///   truncated_gaussian(sigma, c): Gaussian cut at c*sigma, renormalized
class Kernel {
public:
  static Kernel uniform(double halfwidth);
  static Kernel tent(double halfwidth, double shift);
  static Kernel truncated_gaussian(double sigma, double cutoff);

  double operator()(double x) const;
  /// Antiderivative: integral of the density over (-inf, x].
  double cdf(double x) const;
  /// Exact mass of the density over [lo, hi].
  double cell_mass(double lo, double hi) const { return cdf(hi) - cdf(lo); }

  double support_lo() const { return support_lo_; }
  double support_hi() const { return support_hi_; }
  bool symmetric() const { return symmetric_; }
  KernelFamily family() const { return family_; }
  double param1() const { return p1_; }
  double param2() const { return p2_; }

  /// Fault-injection knob used by the verification suite: scales the density
  /// without renormalizing, deliberately breaking unit mass when != 1.
  double mass_scale() const { return mass_scale_; }
  Kernel with_mass_scale(double s) const;

private:
  Kernel(KernelFamily f, double p1, double p2);

  KernelFamily family_;
  double p1_ = 0.0, p2_ = 0.0;
  double support_lo_ = 0.0, support_hi_ = 0.0;
  double norm_ = 1.0;  // truncated Gaussian renormalization
  bool symmetric_ = true;
  double mass_scale_ = 1.0;
};

struct ValidationReport {
  bool j1_ok = false;     // nonnegative with unit mass
  bool j2_ok = false;     // positive somewhere on each side of the origin
  bool symmetric = false;
  double witness_a = 0.0;  // a < 0 with J(a) > 0
  double witness_b = 0.0;  // b > 0 with J(b) > 0
  double mass = 0.0;
  double max_asymmetry = 0.0;
};

/// Report-only hypothesis check; samples the density at `samples` points
/// (at least 64) and measures the mass with composite Gauss-Legendre panels.
ValidationReport validate_kernel(const Kernel& kernel, double tol = 1e-12, int samples = 512);

/// Dense samples of the p-fold self-convolution on a uniform grid spanning its
/// support.  Built by aligned discrete convolution with fixed spacing, so the
/// sample count grows with the support while the discrete mass stays exactly 1.
struct KernelPower {
  Kernel base;
  int p = 1;
  double x0 = 0.0;  // first sample position
  double h = 0.0;
  std::vector<double> values;
  double support_lo = 0.0, support_hi = 0.0;  // p * support(J)

  /// Piecewise-linear interpolant, vanishing at the exact support endpoints.
  /// For p == 1 this is the analytic density itself.
  double eval(double x) const;
  /// Exact integral of the interpolant over [lo, hi] (analytic for p == 1).
  double integrate(double lo, double hi) const;
  /// Mass outside [-radius, radius].
  double mass_outside(double radius) const;
  double mass() const;
};

KernelPower convolve_power(const Kernel& kernel, int p, int resolution);

struct CoverageResult {
  int p = 0;
  double margin = 0.0;  // smallest probed density value at the returned power
};

/// Smallest p with J_p strictly positive at the probe points of (-2R-1, 2R+1).
/// Positivity is checked at 1024 interior midpoints; the margin records how
/// close to zero the probed values get.
CoverageResult min_power_for_coverage_detailed(const Kernel& kernel, double R);
int min_power_for_coverage(const Kernel& kernel, double R);

/// k-fold Minkowski sum of the support interval.
std::array<double, 2> support_cover(const Kernel& kernel, int k);

/// Dense matrix of the 2R-periodized kernel on a periodic grid:
///   entries(i, j) ~ sum_k J_p(x_i + 2kR - x_j),
/// assembled from exact cell masses and renormalized so every row satisfies
/// h * sum_j entries(i, j) = 1.  Entries depend only on (i - j) mod N.
struct PeriodizedKernelMatrix {
  Eigen::MatrixXd entries;
  double h = 0.0;
  int k_max = 0;
  int p = 1;
  double R = 0.0;

  /// h * entries * v, the quadrature action of the periodized kernel.
  Eigen::VectorXd apply(const Eigen::VectorXd& v) const;
};

PeriodizedKernelMatrix periodize(const KernelPower& jp, const PeriodicGrid& grid, double tail_tol);

}  // namespace nonlocal
