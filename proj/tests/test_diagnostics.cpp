#include <doctest.h>

#include <cmath>
#include <numbers>

#include "nonlocal/diagnostics.hpp"

using namespace nonlocal;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("strong maximum principle: the three canonical inputs") {
  const PeriodicGrid grid(1.0, 128);
  const Kernel j = Kernel::uniform(1.0);
  const GridFunction zero = GridFunction::constant(Grid(grid), 0.0);

  const auto r1 = strong_max_check(j, zero, zero, 0.25, 1e-10);
  CHECK(r1.hypothesis_ok);
  CHECK(r1.branch == MaxPrincipleBranch::identically_zero);

  const auto r2 = strong_max_check(j, zero, GridFunction::constant(Grid(grid), -1.0), 0.25, 1e-10);
  CHECK(r2.hypothesis_ok);
  CHECK(r2.branch == MaxPrincipleBranch::strictly_negative);

  // u vanishes at odd integers while M[u] = cos(pi x) dips negative there
  const GridFunction dip = GridFunction::sampled(
      Grid(grid), [](double x) { return -(1.0 + std::cos(kPi * x)); });
  const auto r3 = strong_max_check(j, zero, dip, 0.25, 1e-10);
  CHECK((!r3.hypothesis_ok || r3.branch == MaxPrincipleBranch::inconclusive));
  CHECK(!r3.hypothesis_ok);
  CHECK(r3.hypothesis_min == doctest::Approx(-1.0).epsilon(1e-8));
}

TEST_CASE("strong maximum principle rejects sign-violating inputs") {
  const PeriodicGrid grid(1.0, 64);
  const Kernel j = Kernel::uniform(1.0);
  const GridFunction zero = GridFunction::constant(Grid(grid), 0.0);
  CHECK_THROWS_AS(
      strong_max_check(j, zero, GridFunction::constant(Grid(grid), 0.5), 0.25, 1e-10), Failure);
}

TEST_CASE("branches are exclusive and deterministic") {
  const PeriodicGrid grid(1.0, 64);
  const Kernel j = Kernel::uniform(1.0);
  const GridFunction zero = GridFunction::constant(Grid(grid), 0.0);
  const GridFunction u = GridFunction::sampled(
      Grid(grid), [](double x) { return -0.5 - 0.25 * std::cos(kPi * x); });
  const GridFunction c = GridFunction::constant(Grid(grid), 1.0);
  const auto a = strong_max_check(j, c, u, 0.25, 1e-10);
  const auto b = strong_max_check(j, c, u, 0.25, 1e-10);
  CHECK(a.branch == b.branch);
  CHECK(a.hypothesis_ok == b.hypothesis_ok);
  CHECK(a.witness_x == b.witness_x);
  const bool both = (a.branch == MaxPrincipleBranch::strictly_negative) &&
                    (a.branch == MaxPrincipleBranch::identically_zero);
  CHECK(!both);
}

TEST_CASE("support propagation: a sub-tolerance function is zero everywhere it should be") {
  // u = -delta on a far window with delta <= tol: the inequality holds within
  // tol and u vanishes (within tol) on every translate of the support cover.
  const PeriodicGrid grid(4.0, 256);
  const Kernel j = Kernel::uniform(1.0);
  const double tol = 1e-6;
  const double delta = 0.5 * tol;
  const GridFunction zero = GridFunction::constant(Grid(grid), 0.0);
  const GridFunction u = GridFunction::sampled(
      Grid(grid), [&](double x) { return (x >= 2.0 && x <= 3.0) ? -delta : 0.0; });
  const auto rep = strong_max_check(j, zero, u, 0.25, tol);
  CHECK(rep.hypothesis_ok);
  CHECK(rep.branch == MaxPrincipleBranch::identically_zero);
  const auto cover = support_cover(j, 2);
  for (int i = 0; i < grid.N; ++i) {
    const double x = grid.point(i);
    if (x >= -1.0 + cover[0] && x <= -1.0 + cover[1]) CHECK(std::abs(u.values[i]) <= tol);
  }
}

TEST_CASE("invariant suite passes on a constant scenario and skips where symmetry is needed") {
  Scenario sc;
  sc.name = "unit-constant";
  sc.kernel.family = KernelFamily::uniform;
  sc.kernel.halfwidth = 1.0;
  sc.R = 1.0;
  sc.N = 64;
  sc.a = Coefficient{1.0, {}, {}, 2.0};
  sc.seed = 9;
  const InvariantReport rep = invariant_suite(sc);
  CHECK(rep.all_pass());
  for (const auto& c : rep.checks) CHECK(c.status != CheckStatus::skip);

  Scenario asym = sc;
  asym.name = "unit-asym";
  asym.kernel.family = KernelFamily::tent;
  asym.kernel.shift = 0.3;
  asym.a = Coefficient{0.5, {1.0}, {}, 2.0};
  const InvariantReport arep = invariant_suite(asym);
  CHECK(arep.all_pass());
  int skipped = 0;
  for (const auto& c : arep.checks) skipped += c.status == CheckStatus::skip;
  CHECK(skipped >= 5);
}

TEST_CASE("invariant suite flags a kernel with broken mass") {
  Scenario sc;
  sc.name = "unit-broken";
  sc.kernel.family = KernelFamily::uniform;
  sc.kernel.halfwidth = 1.0;
  sc.kernel.mass_scale = 0.9;
  sc.R = 1.0;
  sc.N = 64;
  sc.a = Coefficient{1.0, {}, {}, 2.0};
  const InvariantReport rep = invariant_suite(sc);
  CHECK(!rep.all_pass());
  bool found = false;
  for (const auto& c : rep.checks)
    if (c.name == "kernel.mass") {
      found = true;
      CHECK(c.status == CheckStatus::fail);
      CHECK(c.measured == doctest::Approx(0.1).epsilon(1e-10));
    }
  CHECK(found);
}
