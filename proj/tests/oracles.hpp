#pragma once

// Test-side oracles, independent of the library's quadrature and assembly paths.

#include <cmath>
#include <functional>

#include "nonlocal/kernel.hpp"

namespace oracle {

// Composite Simpson rule; n is rounded up to the next even panel count.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 2000) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Quadrature of the convolution integral (J * g)(x) straight from the densities.
inline double convolve_at(const nonlocal::Kernel& j, const std::function<double(double)>& g,
                          double x, int n = 4000) {
  return simpson([&](double z) { return j(z) * g(x - z); }, j.support_lo(), j.support_hi(), n);
}

// Smallest p whose p-fold support covers all probe midpoints of (-span, span),
// using only interval arithmetic on the family's positivity interval.
inline int coverage_power_by_supports(const nonlocal::Kernel& j, double R, int probes = 1024) {
  const double span = 2.0 * R + 1.0;
  const double ph = 2.0 * span / probes;
  const double first = -span + 0.5 * ph;
  const double last = span - 0.5 * ph;
  int p = 1;
  while (!(p * j.support_lo() < first && p * j.support_hi() > last)) ++p;
  return p;
}

}  // namespace oracle
