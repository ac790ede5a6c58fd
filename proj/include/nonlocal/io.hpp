#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "nonlocal/field.hpp"

namespace nonlocal {

/// Shortest 17-significant-digit decimal form; round-trips doubles exactly.
std::string fmt17(double v);

void write_csv(std::ostream& out, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);
void write_csv_file(const std::string& path, const std::vector<std::string>& header,
                    const std::vector<std::vector<double>>& rows);

/// Two-column (x, value) export of a grid function.
void write_grid_function_csv(const std::string& path, const GridFunction& u);

/// Reads a two-column (x, value) CSV against a known grid; the x column must
/// match the grid points within 1e-9.
GridFunction read_grid_function_csv(const std::string& path, const Grid& grid);

/// Linear interpolation of a periodic grid function at an arbitrary point.
double periodic_interp(const GridFunction& u, double x);

}  // namespace nonlocal
