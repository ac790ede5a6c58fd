#include "nonlocal/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nonlocal {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;

// 8-point Gauss-Legendre nodes/weights on [-1, 1].
constexpr std::array<double, 8> kGlNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGlWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

double gauss_legendre_mass(const Kernel& kernel, double lo, double hi, int panels) {
  const double w = (hi - lo) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * w;
    const double mid = a + 0.5 * w;
    double panel = 0.0;
    for (std::size_t q = 0; q < kGlNodes.size(); ++q)
      panel += kGlWeights[q] * kernel(mid + 0.5 * w * kGlNodes[q]);
    acc += 0.5 * w * panel;
  }
  return acc;
}

}  // namespace

const char* family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::uniform: return "uniform";
    case KernelFamily::tent: return "tent";
    case KernelFamily::truncated_gaussian: return "truncated-gaussian";
  }
  return "?";
}

Kernel::Kernel(KernelFamily f, double p1, double p2) : family_(f), p1_(p1), p2_(p2) {
  switch (family_) {
    case KernelFamily::uniform:
      if (!(p1_ > 0.0)) fail(Errc::non_positive_parameter, "uniform halfwidth must be positive");
      support_lo_ = -p1_;
      support_hi_ = p1_;
      symmetric_ = true;
      break;
    case KernelFamily::tent:
      if (!(p1_ > 0.0)) fail(Errc::non_positive_parameter, "tent halfwidth must be positive");
      if (!(std::abs(p2_) < p1_))
        fail(Errc::support_excludes_origin, "tent shift must satisfy |s| < halfwidth");
      support_lo_ = p2_ - p1_;
      support_hi_ = p2_ + p1_;
      symmetric_ = (p2_ == 0.0);
      break;
    case KernelFamily::truncated_gaussian:
      if (!(p1_ > 0.0) || !(p2_ > 0.0))
        fail(Errc::non_positive_parameter, "gaussian sigma and cutoff must be positive");
      support_lo_ = -p2_ * p1_;
      support_hi_ = p2_ * p1_;
      norm_ = std::erf(p2_ / kSqrt2);  // mass of the untruncated density inside the cut
      symmetric_ = true;
      break;
  }
}

Kernel Kernel::uniform(double halfwidth) { return Kernel(KernelFamily::uniform, halfwidth, 0.0); }

Kernel Kernel::tent(double halfwidth, double shift) {
  return Kernel(KernelFamily::tent, halfwidth, shift);
}

Kernel Kernel::truncated_gaussian(double sigma, double cutoff) {
  return Kernel(KernelFamily::truncated_gaussian, sigma, cutoff);
}

Kernel Kernel::with_mass_scale(double s) const {
  if (!(s > 0.0)) fail(Errc::non_positive_parameter, "mass scale must be positive");
  Kernel out = *this;
  out.mass_scale_ = s;
  return out;
}

double Kernel::operator()(double x) const {
  if (x < support_lo_ || x > support_hi_) return 0.0;
  double v = 0.0;
  switch (family_) {
    case KernelFamily::uniform:
      v = 0.5 / p1_;
      break;
    case KernelFamily::tent:
      v = (1.0 - std::abs(x - p2_) / p1_) / p1_;
      break;
    case KernelFamily::truncated_gaussian: {
      const double z = x / p1_;
      v = std::exp(-0.5 * z * z) / (p1_ * std::sqrt(2.0 * std::numbers::pi) * norm_);
      break;
    }
  }
  return mass_scale_ * v;
}

double Kernel::cdf(double x) const {
  if (x <= support_lo_) return 0.0;
  if (x >= support_hi_) return mass_scale_;
  double v = 0.0;
  switch (family_) {
    case KernelFamily::uniform:
      v = (x + p1_) / (2.0 * p1_);
      break;
    case KernelFamily::tent: {
      const double t = x - p2_;
      if (t <= 0.0) {
        const double s = t + p1_;
        v = 0.5 * s * s / (p1_ * p1_);
      } else {
        const double s = p1_ - t;
        v = 1.0 - 0.5 * s * s / (p1_ * p1_);
      }
      break;
    }
    case KernelFamily::truncated_gaussian:
      v = 0.5 * (std::erf(x / (p1_ * kSqrt2)) + norm_) / norm_;
      break;
  }
  return mass_scale_ * v;
}

ValidationReport validate_kernel(const Kernel& kernel, double tol, int samples) {
  if (samples < 64) fail(Errc::bad_input, "validate_kernel needs at least 64 samples");
  ValidationReport rep;
  const double lo = kernel.support_lo();
  const double hi = kernel.support_hi();
  const double h = (hi - lo) / samples;

  bool nonneg = true;
  rep.witness_a = 0.0;
  rep.witness_b = 0.0;
  double best_a = 0.0, best_b = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double x = lo + (i + 0.5) * h;
    const double v = kernel(x);
    if (v < 0.0) nonneg = false;
    if (x < 0.0 && v > best_a) {
      best_a = v;
      rep.witness_a = x;
    }
    if (x > 0.0 && v > best_b) {
      best_b = v;
      rep.witness_b = x;
    }
    rep.max_asymmetry = std::max(rep.max_asymmetry, std::abs(v - kernel(-x)));
  }
  // Prefer the half-support midpoints as witnesses when the density is positive there.
  if (kernel(lo / 2.0) > 0.0 && lo / 2.0 < 0.0) rep.witness_a = lo / 2.0;
  if (kernel(hi / 2.0) > 0.0 && hi / 2.0 > 0.0) rep.witness_b = hi / 2.0;

  rep.mass = gauss_legendre_mass(kernel, lo, hi, std::max(64, samples / 4));
  rep.j1_ok = nonneg && std::abs(rep.mass - 1.0) <= tol;
  rep.j2_ok = best_a > 0.0 && best_b > 0.0;
  rep.symmetric = rep.max_asymmetry <= 1e-12;
  return rep;
}

double KernelPower::eval(double x) const {
  if (p == 1) return base(x);
  if (x <= support_lo || x >= support_hi) return 0.0;
  const int n = static_cast<int>(values.size());
  const double t = (x - x0) / h;
  if (t <= 0.0) {
    // linear ramp from 0 at the exact support endpoint to the first sample
    const double w = x0 - support_lo;
    return values.front() * (x - support_lo) / w;
  }
  if (t >= n - 1) {
    const double xe = x0 + (n - 1) * h;
    const double w = support_hi - xe;
    return values.back() * (support_hi - x) / w;
  }
  const int i = static_cast<int>(t);
  const double frac = t - i;
  return values[i] * (1.0 - frac) + values[i + 1] * frac;
}

double KernelPower::integrate(double lo, double hi) const {
  if (hi <= lo) return 0.0;
  if (p == 1) return base.cell_mass(lo, hi);
  lo = std::max(lo, support_lo);
  hi = std::min(hi, support_hi);
  if (hi <= lo) return 0.0;
  // Breakpoints of the interpolant: support_lo, sample nodes, support_hi.
  const int n = static_cast<int>(values.size());
  auto node = [&](int k) -> double {
    if (k < 0) return support_lo;
    if (k >= n) return support_hi;
    return x0 + k * h;
  };
  auto value_at = [&](double x) { return eval(x); };
  const int k_lo = static_cast<int>(std::floor((lo - x0) / h));
  const int k_hi = static_cast<int>(std::floor((hi - x0) / h));
  double acc = 0.0;
  for (int k = std::max(k_lo, -1); k <= std::min(k_hi, n - 1); ++k) {
    const double a = std::max(lo, node(k));
    const double b = std::min(hi, node(k + 1));
    if (b <= a) continue;
    acc += 0.5 * (value_at(a) + value_at(b)) * (b - a);
  }
  return acc;
}

double KernelPower::mass_outside(double radius) const {
  if (p == 1) return base.cell_mass(support_lo, -radius) + base.cell_mass(radius, support_hi);
  double acc = 0.0;
  if (support_lo < -radius) acc += integrate(support_lo, -radius);
  if (support_hi > radius) acc += integrate(radius, support_hi);
  return acc;
}

double KernelPower::mass() const {
  if (p == 1) return base.cell_mass(support_lo, support_hi);
  return integrate(support_lo, support_hi);
}

KernelPower convolve_power(const Kernel& kernel, int p, int resolution) {
  if (p < 1) fail(Errc::bad_input, "convolution power needs p >= 1");
  if (resolution < 128) fail(Errc::resolution_too_coarse, "convolution resolution must be >= 128");

  const double lo = kernel.support_lo();
  const double hi = kernel.support_hi();
  const double h = (hi - lo) / resolution;

  // Midpoint samples of the base density, renormalized to exact unit discrete
  // mass; discrete convolution then keeps the mass at 1 for every power.
  std::vector<double> seed(resolution);
  for (int i = 0; i < resolution; ++i) seed[i] = kernel(lo + (i + 0.5) * h);
  double m = 0.0;
  for (double v : seed) m += v;
  m *= h;
  if (!(m > 0.0)) fail(Errc::bad_input, "kernel samples have zero mass");
  for (double& v : seed) v /= m;

  KernelPower out{kernel, 1, lo + 0.5 * h, h, seed, lo, hi};

  for (int q = 2; q <= p; ++q) {
    const std::vector<double>& g = out.values;
    const int nf = resolution;
    const int ng = static_cast<int>(g.size());
    std::vector<double> conv(nf + ng - 1, 0.0);
    for (int i = 0; i < nf; ++i) {
      const double fi = seed[i] * h;
      if (fi == 0.0) continue;
      for (int j = 0; j < ng; ++j) conv[i + j] += fi * g[j];
    }
    out.values = std::move(conv);
    out.x0 = (lo + 0.5 * h) + out.x0;
    out.p = q;
    out.support_lo += lo;
    out.support_hi += hi;
    // Normalize the interpolant mass, not the raw discrete sum: the two differ
    // by the edge-ramp quadrature and the invariant is on the integral.
    const double pl_mass = out.integrate(out.support_lo, out.support_hi);
    for (double& v : out.values) v /= pl_mass;
  }
  return out;
}

CoverageResult min_power_for_coverage_detailed(const Kernel& kernel, double R) {
  const auto rep = validate_kernel(kernel, 1e-9, 256);
  if (!rep.j2_ok) fail(Errc::bad_input, "coverage needs positive mass on both sides of the origin");

  constexpr int kProbes = 1024;
  constexpr int kResolution = 512;
  constexpr int kCap = 10000;
  const double span = 2.0 * R + 1.0;
  const double ph = 2.0 * span / kProbes;

  // The support grows linearly: powers below this bound cannot cover the probes.
  const double lo = kernel.support_lo();
  const double hi = kernel.support_hi();
  const double first = -span + 0.5 * ph;
  const double last = span - 0.5 * ph;
  int p_floor = 1;
  p_floor = std::max(p_floor, static_cast<int>(std::ceil(last / hi)));
  p_floor = std::max(p_floor, static_cast<int>(std::ceil(first / lo)));
  if (p_floor > kCap) fail(Errc::iteration_cap, "coverage power exceeds the cap");

  KernelPower jp = convolve_power(kernel, 1, kResolution);
  for (int p = 1; p <= kCap; ++p) {
    if (p > 1) jp = convolve_power(kernel, p, kResolution);
    if (p >= p_floor) {
      double margin = std::numeric_limits<double>::infinity();
      for (int q = 0; q < kProbes; ++q) {
        const double x = -span + (q + 0.5) * ph;
        margin = std::min(margin, jp.eval(x));
        if (margin <= 0.0) break;
      }
      if (margin > 0.0) return {p, margin};
    }
  }
  fail(Errc::iteration_cap, "coverage power exceeds the cap");
}

int min_power_for_coverage(const Kernel& kernel, double R) {
  return min_power_for_coverage_detailed(kernel, R).p;
}

std::array<double, 2> support_cover(const Kernel& kernel, int k) {
  if (k < 1) fail(Errc::bad_input, "support_cover needs k >= 1");
  return {k * kernel.support_lo(), k * kernel.support_hi()};
}

Eigen::VectorXd PeriodizedKernelMatrix::apply(const Eigen::VectorXd& v) const {
  return h * (entries * v);
}

PeriodizedKernelMatrix periodize(const KernelPower& jp, const PeriodicGrid& grid, double tail_tol) {
  if (!(tail_tol > 0.0)) fail(Errc::bad_input, "tail tolerance must be positive");
  const double R = grid.R;
  const int N = grid.N;
  const double h = grid.h();

  int k_max = 0;
  while (jp.mass_outside(2.0 * k_max * R) >= tail_tol) {
    ++k_max;
    if (k_max > 1000000) fail(Errc::tail_tol_too_small, "periodization would need k_max > 1e6");
  }

  // Entries depend only on (i - j) mod N: tabulate one circulant generator from
  // exact cell masses, then renormalize so each row has unit quadrature mass.
  Eigen::VectorXd gen(N);
  for (int m = 0; m < N; ++m) {
    double d = m * h;
    if (d > R) d -= 2.0 * R;  // reduce to the symmetric torus representative
    double acc = 0.0;
    for (int k = -k_max; k <= k_max; ++k) {
      const double c = d + 2.0 * k * R;
      if (c + 0.5 * h <= jp.support_lo || c - 0.5 * h >= jp.support_hi) continue;
      acc += jp.integrate(c - 0.5 * h, c + 0.5 * h);
    }
    gen[m] = acc / h;
  }
  const double row_mass = h * gen.sum();
  if (!(row_mass > 0.0)) fail(Errc::bad_input, "periodized kernel has empty rows");
  gen /= row_mass;

  PeriodizedKernelMatrix out;
  out.entries.resize(N, N);
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) out.entries(i, j) = gen[((i - j) % N + N) % N];
  out.h = h;
  out.k_max = k_max;
  out.p = jp.p;
  out.R = R;
  return out;
}

}  // namespace nonlocal
