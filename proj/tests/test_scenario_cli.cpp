#include <doctest.h>

#include <array>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <string>
#include <sys/wait.h>

#include "nonlocal/scenario.hpp"

using namespace nonlocal;
using json = nlohmann::json;

namespace {

struct CmdResult {
  int exit_code = -1;
  std::string out;
};

CmdResult run_cli(const std::string& args, const std::string& env = {}) {
  const std::string cmd = env + " " + std::string(NONLOCAL_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CmdResult res;
  std::array<char, 4096> buf{};
  size_t got = 0;
  while ((got = fread(buf.data(), 1, buf.size(), pipe)) > 0) res.out.append(buf.data(), got);
  const int rc = pclose(pipe);
  res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  return res;
}

std::string scenario_path(const std::string& name) {
  return std::string(NONLOCAL_SCENARIO_DIR) + "/" + name;
}

std::string write_temp(const std::string& name, const std::string& body) {
  const std::string path = "/tmp/" + name;
  std::ofstream out(path);
  out << body;
  return path;
}

}  // namespace

TEST_CASE("scenario parsing applies the documented defaults") {
  const Scenario sc = parse_scenario(R"({"kernel": {"family": "uniform", "halfwidth": 1.0}})");
  CHECK(sc.R == 1.0);
  CHECK(sc.N == 256);
  CHECK(sc.solver.tol == 1e-10);
  CHECK(sc.solver.max_iter == 100000);
  CHECK(sc.solver.margin_tol == 1e-6);
  CHECK(sc.solver.decay_tol == 1e-8);
  CHECK(sc.solver.uniq_tol == 1e-6);
  CHECK(sc.f.form == Nonlinearity::Form::kpp);
  CHECK(sc.dirichlet.points_per_unit == 8);
}

TEST_CASE("scenario parsing rejects malformed input with a field pointer") {
  auto expect_bad = [](const std::string& text, const std::string& needle) {
    bool threw = false;
    try {
      parse_scenario(text);
    } catch (const Failure& e) {
      threw = true;
      CHECK(e.code() == Errc::bad_scenario);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
    CHECK(threw);
  };
  expect_bad("{}", "/kernel");
  expect_bad(R"({"kernel": {"family": "pentagon"}})", "/kernel/family");
  expect_bad(R"({"kernel": {"family": "uniform", "halfwidth": 1.0}, "N": 7})", "/N");
  expect_bad(R"({"kernel": {"family": "uniform", "halfwidth": 1.0}, "R": -2})", "/R");
  expect_bad("not json at all", "invalid JSON");
}

TEST_CASE("custom nonlinearity tables parse from JSON and solve") {
  json table;
  table["u_max"] = 2.0;
  table["m_sup"] = 1.0;
  json f_rows = json::array(), fu_rows = json::array();
  const int nx = 4, nu = 41;
  for (int i = 0; i < nx; ++i) {
    json f_row = json::array(), fu_row = json::array();
    for (int k = 0; k < nu; ++k) {
      const double u = 2.0 * k / (nu - 1);
      f_row.push_back(u * (1.0 - u));
      fu_row.push_back(1.0 - 2.0 * u);
    }
    f_rows.push_back(f_row);
    fu_rows.push_back(fu_row);
  }
  table["f"] = f_rows;
  table["fu"] = fu_rows;
  json sc_json;
  sc_json["kernel"] = {{"family", "uniform"}, {"halfwidth", 1.0}};
  sc_json["N"] = 32;
  sc_json["nonlinearity"] = {{"form", "custom"}, {"table", table}};
  const Scenario sc = parse_scenario(sc_json.dump());
  CHECK(sc.f.form == Nonlinearity::Form::custom);

  const PeriodicGrid grid = scenario_grid(sc);
  const Nonlinearity f = scenario_nonlinearity(sc, grid);
  CHECK(f.m_sup() == doctest::Approx(1.0));
  const SteadyReport rep = solve_steady(scenario_kernel(sc), f, grid, sc.solver);
  CHECK(rep.classification == Classification::nontrivial_exists);
  REQUIRE(rep.p.has_value());
  CHECK((rep.p->values.array() - 1.0).abs().maxCoeff() <= 1e-3);
}

TEST_CASE("kernel specs build the right families") {
  KernelSpec spec;
  spec.family = KernelFamily::tent;
  spec.halfwidth = 1.0;
  spec.shift = 0.3;
  const Kernel k = make_kernel(spec);
  CHECK(k.family() == KernelFamily::tent);
  CHECK(!k.symmetric());

  spec.mass_scale = 0.9;
  CHECK(make_kernel(spec).mass_scale() == 0.9);
}

TEST_CASE("cli: constant scenario reports the exact eigenvalue") {
  const auto res = run_cli("eig-periodic " + scenario_path("constant_logistic.json"));
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["result"]["lambda1"].get<double>() == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(j["result"]["residual"].get<double>() <= 1e-10);
}

TEST_CASE("cli: repeated runs are byte-identical") {
  const std::string cmd = "solve " + scenario_path("cosine_symmetric.json");
  const auto a = run_cli(cmd);
  const auto b = run_cli(cmd);
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);

  const std::string sweep =
      "sweep " + scenario_path("cosine_symmetric.json") + " --from -0.4 --to 0.0 --step 0.2";
  const auto s1 = run_cli(sweep, "NONLOCAL_SPECTRA_THREADS=1");
  const auto s2 = run_cli(sweep, "NONLOCAL_SPECTRA_THREADS=4");
  CHECK(s1.exit_code == 0);
  CHECK(s1.out == s2.out);

  // the eigenvalue column falls with unit slope in the shift
  const json js = json::parse(s1.out);
  const auto& rows = js["rows"];
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double dl = rows[i]["lambda1"].get<double>() - rows[i - 1]["lambda1"].get<double>();
    CHECK(dl == doctest::Approx(-0.2).epsilon(1e-8));
  }
}

TEST_CASE("cli: malformed scenarios exit with code 3") {
  const std::string bad = write_temp("bad_scenario.json", R"({"kernel": {"family": "nope"}})");
  CHECK(run_cli("eig-periodic " + bad).exit_code == 3);
  CHECK(run_cli("solve /tmp/definitely_missing_scenario.json").exit_code == 3);
}

TEST_CASE("cli: validate accepts bundled scenarios and flags the broken kernel") {
  CHECK(run_cli("validate " + scenario_path("constant_logistic.json")).exit_code == 0);
  CHECK(run_cli("validate " + scenario_path("faults/broken_mass.json")).exit_code == 2);
}

TEST_CASE("cli: maxprinciple default cases report their branches") {
  const auto res = run_cli("maxprinciple " + scenario_path("constant_logistic.json"));
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.out);
  CHECK(j["zero"]["branch"] == "identically-zero");
  CHECK(j["negative_constant"]["branch"] == "strictly-negative");
  CHECK(j["cosine_dip"]["hypothesis_ok"] == false);
}

TEST_CASE("cli: sweep emits an ordered CSV artifact with headers") {
  const std::string out_dir = "/tmp/nonlocal_sweep_artifacts";
  const auto res = run_cli("sweep " + scenario_path("constant_logistic.json") +
                           " --from -0.2 --to 0.2 --step 0.2 --out " + out_dir);
  CHECK(res.exit_code == 0);
  std::ifstream csv(out_dir + "/sweep.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "delta,lambda1,classification,min_p");
  std::string first;
  std::getline(csv, first);
  CHECK(first.substr(0, 4) == "-0.2");
}

TEST_CASE("cli: every bundled scenario passes validate and verify") {
  for (const std::string name : {"constant_logistic.json", "cosine_symmetric.json",
                                 "cosine_asymmetric_tent.json", "gaussian_nonexistence.json"}) {
    CAPTURE(name);
    CHECK(run_cli("validate " + scenario_path(name)).exit_code == 0);
    CHECK(run_cli("verify " + scenario_path(name)).exit_code == 0);
  }
}

TEST_CASE("cli: eig-dirichlet and unique round out the command set") {
  const auto eigd =
      run_cli("eig-dirichlet " + scenario_path("cosine_symmetric.json") + " --r 2 --y 0.3");
  CHECK(eigd.exit_code == 0);
  const json jd = json::parse(eigd.out);
  CHECK(jd["result"]["lambda1"].get<double>() > -0.914214);  // above the periodic value

  const auto uniq = run_cli("unique " + scenario_path("constant_logistic.json"));
  CHECK(uniq.exit_code == 0);
  const json ju = json::parse(uniq.out);
  CHECK(ju["pass"] == true);
  CHECK(ju["entries"].size() == 3);
}

TEST_CASE("cli: rayleigh accepts an external test function") {
  const std::string out_dir = "/tmp/nonlocal_rayleigh_phi";
  const auto eig = run_cli("eig-periodic " + scenario_path("cosine_symmetric.json") + " --out " +
                           out_dir);
  REQUIRE(eig.exit_code == 0);
  const auto ray = run_cli("rayleigh " + scenario_path("cosine_symmetric.json") + " --phi " +
                           out_dir + "/phi.csv --random 8");
  CHECK(ray.exit_code == 0);
  const json j = json::parse(ray.out);
  // feeding the eigenfunction back in saturates the quotient
  CHECK(j["quotient_file"].get<double>() ==
        doctest::Approx(j["lambda1"].get<double>()).epsilon(1e-8));
  CHECK(j["min_random_quotient"].get<double>() >= j["lambda1"].get<double>() - 1e-8);
  CHECK(j["variational"] == true);
}

TEST_CASE("cli: flag-gated matrix export") {
  const std::string out_dir = "/tmp/nonlocal_matrix_dump";
  const auto res = run_cli("eig-periodic " + scenario_path("constant_logistic.json") +
                           " --grid 16 --dump-matrix --out " + out_dir);
  CHECK(res.exit_code == 0);
  std::ifstream csv(out_dir + "/operator_matrix.csv");
  REQUIRE(csv.good());
  std::string header;
  std::getline(csv, header);
  CHECK(header == "i,j,value");
  int lines = 0;
  std::string line;
  while (std::getline(csv, line)) ++lines;
  CHECK(lines == 16 * 16);
}

TEST_CASE("cli: converge reports a monotone table") {
  const auto res = run_cli("converge " + scenario_path("cosine_symmetric.json"));
  CHECK(res.exit_code == 0);
  const json j = json::parse(res.out);
  const auto rows = j["rows"];
  REQUIRE(rows.size() >= 2);
  for (std::size_t i = 1; i < rows.size(); ++i)
    CHECK(rows[i]["lambda"].get<double>() <= rows[i - 1]["lambda"].get<double>() + 1e-10);
  for (const auto& row : rows)
    CHECK(row["lambda"].get<double>() >= j["lambda1_ref"].get<double>() - 1e-10);

  const auto csv =
      run_cli("converge " + scenario_path("cosine_symmetric.json") + " --format csv");
  CHECK(csv.exit_code == 0);
  CHECK(csv.out.substr(0, 13) == "r,lambda,gap\n");
}
