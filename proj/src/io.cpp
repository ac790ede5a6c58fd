#include "nonlocal/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace nonlocal {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << fmt17(row[i]);
    }
    out << '\n';
  }
}

void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) fail(Errc::bad_input, "cannot open '" + path + "' for writing");
  write_csv(out, header, rows);
}

void write_grid_function_csv(const std::string& path, const GridFunction& u) {
  std::vector<std::vector<double>> rows;
  rows.reserve(u.size());
  for (int i = 0; i < u.size(); ++i) rows.push_back({grid_point(u.grid, i), u.values[i]});
  write_csv_file(path, {"x", "value"}, rows);
}

GridFunction read_grid_function_csv(const std::string& path, const Grid& grid) {
  std::ifstream in(path);
  if (!in) fail(Errc::bad_input, "cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) fail(Errc::bad_input, "empty CSV '" + path + "'");
  Eigen::VectorXd vals(grid_size(grid));
  int i = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string xs, vs;
    if (!std::getline(ss, xs, ',') || !std::getline(ss, vs, ','))
      fail(Errc::bad_input, "malformed CSV row in '" + path + "'");
    if (i >= vals.size()) fail(Errc::bad_input, "too many rows in '" + path + "'");
    const double x = std::stod(xs);
    if (std::abs(x - grid_point(grid, i)) > 1e-9)
      fail(Errc::bad_input, "x column does not match the scenario grid");
    vals[i++] = std::stod(vs);
  }
  if (i != vals.size()) fail(Errc::bad_input, "row count does not match the scenario grid");
  return GridFunction(grid, std::move(vals));
}

double periodic_interp(const GridFunction& u, double x) {
  if (!is_periodic(u.grid)) fail(Errc::grid_mismatch, "periodic_interp needs a periodic grid");
  const auto& g = std::get<PeriodicGrid>(u.grid);
  const double h = g.h();
  double t = (x + g.R) / h;
  t -= std::floor(t / g.N) * g.N;  // wrap into [0, N)
  int i0 = static_cast<int>(std::floor(t));
  const double w = t - i0;
  i0 %= g.N;
  const int i1 = (i0 + 1) % g.N;
  return (1.0 - w) * u.values[i0] + w * u.values[i1];
}

}  // namespace nonlocal
