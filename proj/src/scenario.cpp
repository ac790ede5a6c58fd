#include "nonlocal/scenario.hpp"

#include <fstream>
#include <json.hpp>
#include <sstream>

namespace nonlocal {

namespace {

using json = nlohmann::json;

[[noreturn]] void bad(const std::string& pointer, const std::string& what) {
  fail(Errc::bad_scenario, pointer + ": " + what);
}

double get_number(const json& j, const std::string& pointer, const char* key, double fallback,
                  bool required = false) {
  if (!j.contains(key)) {
    if (required) bad(pointer + "/" + key, "missing required field");
    return fallback;
  }
  if (!j[key].is_number()) bad(pointer + "/" + key, "expected a number");
  return j[key].get<double>();
}

std::vector<double> get_array(const json& j, const std::string& pointer, const char* key) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) bad(pointer + "/" + key, "expected an array of numbers");
  for (const auto& v : j[key]) {
    if (!v.is_number()) bad(pointer + "/" + key, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

KernelSpec parse_kernel(const json& j) {
  if (!j.is_object()) bad("/kernel", "expected an object");
  KernelSpec spec;
  if (!j.contains("family") || !j["family"].is_string())
    bad("/kernel/family", "missing or non-string kernel family");
  const std::string fam = j["family"].get<std::string>();
  if (fam == "uniform") {
    spec.family = KernelFamily::uniform;
    spec.halfwidth = get_number(j, "/kernel", "halfwidth", 1.0, true);
  } else if (fam == "tent") {
    spec.family = KernelFamily::tent;
    spec.halfwidth = get_number(j, "/kernel", "halfwidth", 1.0, true);
    spec.shift = get_number(j, "/kernel", "shift", 0.0);
  } else if (fam == "truncated-gaussian") {
    spec.family = KernelFamily::truncated_gaussian;
    spec.sigma = get_number(j, "/kernel", "sigma", 0.5, true);
    spec.cutoff = get_number(j, "/kernel", "cutoff", 6.0);
  } else {
    bad("/kernel/family", "unknown family '" + fam + "'");
  }
  spec.mass_scale = get_number(j, "/kernel", "mass_scale", 1.0);
  return spec;
}

CustomNonlinearityTable parse_table(const json& j, double period) {
  CustomNonlinearityTable t;
  t.period = period;
  t.u_max = get_number(j, "/nonlinearity/table", "u_max", 1.0, true);
  t.m_sup = get_number(j, "/nonlinearity/table", "m_sup", t.u_max);
  if (!j.contains("f") || !j["f"].is_array()) bad("/nonlinearity/table/f", "expected a matrix");
  if (!j.contains("fu") || !j["fu"].is_array()) bad("/nonlinearity/table/fu", "expected a matrix");
  const auto& fj = j["f"];
  const auto& fuj = j["fu"];
  t.nx = static_cast<int>(fj.size());
  if (t.nx < 2 || !fj[0].is_array()) bad("/nonlinearity/table/f", "expected at least 2 rows");
  t.nu = static_cast<int>(fj[0].size());
  if (static_cast<int>(fuj.size()) != t.nx) bad("/nonlinearity/table/fu", "row count mismatch");
  t.f_vals.resize(t.nx, t.nu);
  t.fu_vals.resize(t.nx, t.nu);
  for (int i = 0; i < t.nx; ++i) {
    if (static_cast<int>(fj[i].size()) != t.nu || static_cast<int>(fuj[i].size()) != t.nu)
      bad("/nonlinearity/table", "ragged matrix");
    for (int k = 0; k < t.nu; ++k) {
      t.f_vals(i, k) = fj[i][k].get<double>();
      t.fu_vals(i, k) = fuj[i][k].get<double>();
    }
  }
  return t;
}

}  // namespace

Kernel make_kernel(const KernelSpec& spec) {
  Kernel k = [&] {
    switch (spec.family) {
      case KernelFamily::uniform: return Kernel::uniform(spec.halfwidth);
      case KernelFamily::tent: return Kernel::tent(spec.halfwidth, spec.shift);
      case KernelFamily::truncated_gaussian:
        return Kernel::truncated_gaussian(spec.sigma, spec.cutoff);
    }
    fail(Errc::bad_scenario, "unknown kernel family");
  }();
  if (spec.mass_scale != 1.0) k = k.with_mass_scale(spec.mass_scale);
  return k;
}

Scenario parse_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const std::exception& e) {
    fail(Errc::bad_scenario, std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(Errc::bad_scenario, "/: expected a JSON object");

  Scenario sc;
  sc.name = j.value("name", std::string{});
  if (!j.contains("kernel")) bad("/kernel", "missing kernel spec");
  sc.kernel = parse_kernel(j["kernel"]);

  sc.R = get_number(j, "", "R", 1.0);
  if (!(sc.R > 0.0)) bad("/R", "half-period must be positive");
  const double n_raw = get_number(j, "", "N", 256.0);
  sc.N = static_cast<int>(n_raw);
  if (sc.N != n_raw || sc.N < 8 || sc.N % 2 != 0) bad("/N", "N must be an even integer >= 8");

  sc.a.period = 2.0 * sc.R;
  if (j.contains("coefficient")) {
    const auto& cj = j["coefficient"];
    if (!cj.is_object()) bad("/coefficient", "expected an object");
    sc.a.mean = get_number(cj, "/coefficient", "mean", 0.0);
    sc.a.cos_coeffs = get_array(cj, "/coefficient", "cos");
    sc.a.sin_coeffs = get_array(cj, "/coefficient", "sin");
  }

  if (j.contains("nonlinearity")) {
    const auto& fj = j["nonlinearity"];
    if (!fj.is_object()) bad("/nonlinearity", "expected an object");
    const std::string form = fj.value("form", std::string("kpp"));
    if (form == "kpp") {
      sc.f.form = Nonlinearity::Form::kpp;
    } else if (form == "custom") {
      sc.f.form = Nonlinearity::Form::custom;
      if (!fj.contains("table")) bad("/nonlinearity/table", "custom form needs a table");
      sc.f.table = parse_table(fj["table"], 2.0 * sc.R);
    } else {
      bad("/nonlinearity/form", "unknown form '" + form + "'");
    }
  }

  if (j.contains("solver")) {
    const auto& s = j["solver"];
    if (!s.is_object()) bad("/solver", "expected an object");
    sc.solver.tol = get_number(s, "/solver", "tol", sc.solver.tol);
    sc.solver.max_iter = static_cast<int>(get_number(s, "/solver", "max_iter", sc.solver.max_iter));
    sc.solver.margin_tol = get_number(s, "/solver", "margin_tol", sc.solver.margin_tol);
    sc.solver.decay_tol = get_number(s, "/solver", "decay_tol", sc.solver.decay_tol);
    sc.solver.uniq_tol = get_number(s, "/solver", "uniq_tol", sc.solver.uniq_tol);
    sc.solver.tail_tol = get_number(s, "/solver", "tail_tol", sc.solver.tail_tol);
    sc.solver.eig_tol = get_number(s, "/solver", "eig_tol", sc.solver.eig_tol);
    if (!(sc.solver.tol > 0.0)) bad("/solver/tol", "tolerance must be positive");
  }

  if (j.contains("dirichlet")) {
    const auto& d = j["dirichlet"];
    if (!d.is_object()) bad("/dirichlet", "expected an object");
    sc.dirichlet.y = get_number(d, "/dirichlet", "y", 0.0);
    auto radii = get_array(d, "/dirichlet", "radii");
    if (!radii.empty()) sc.dirichlet.radii = std::move(radii);
    sc.dirichlet.points_per_unit =
        static_cast<int>(get_number(d, "/dirichlet", "points_per_unit", 8.0));
  }

  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned())
      bad("/seed", "expected an integer");
    sc.seed = j["seed"].get<std::uint64_t>();
  }
  return sc;
}

Scenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::bad_scenario, "cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str());
}

PeriodicGrid scenario_grid(const Scenario& sc) { return PeriodicGrid(sc.R, sc.N); }

Kernel scenario_kernel(const Scenario& sc) { return make_kernel(sc.kernel); }

Nonlinearity scenario_nonlinearity(const Scenario& sc, const PeriodicGrid& grid) {
  if (sc.f.form == Nonlinearity::Form::kpp) return Nonlinearity::kpp(sc.a, grid);
  return Nonlinearity::custom(*sc.f.table, grid);
}

}  // namespace nonlocal
