#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nonlocal/steady.hpp"

namespace nonlocal {

struct KernelSpec {
  KernelFamily family = KernelFamily::uniform;
  double halfwidth = 1.0;  // uniform, tent
  double shift = 0.0;      // tent
  double sigma = 0.5;      // truncated-gaussian
  double cutoff = 6.0;     // truncated-gaussian, in units of sigma
  double mass_scale = 1.0; // fault injection; != 1 breaks unit mass on purpose
};

Kernel make_kernel(const KernelSpec& spec);

struct NonlinearitySpec {
  Nonlinearity::Form form = Nonlinearity::Form::kpp;
  std::optional<CustomNonlinearityTable> table;  // custom form only
};

struct DirichletSpec {
  double y = 0.0;
  std::vector<double> radii = {4.0, 8.0, 16.0, 32.0};
  int points_per_unit = 8;
};

/// One experiment description: kernel, torus, coefficient, nonlinearity and
/// solver options.  Parsed from JSON; absent options get the documented defaults.
struct Scenario {
  std::string name;
  KernelSpec kernel;
  double R = 1.0;
  int N = 256;
  Coefficient a;
  NonlinearitySpec f;
  SteadyOptions solver;
  DirichletSpec dirichlet;
  std::uint64_t seed = 0;
};

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario_file(const std::string& path);

PeriodicGrid scenario_grid(const Scenario& sc);
Kernel scenario_kernel(const Scenario& sc);
Nonlinearity scenario_nonlinearity(const Scenario& sc, const PeriodicGrid& grid);

}  // namespace nonlocal
