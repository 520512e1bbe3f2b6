#pragma once

#include <string>
#include <vector>

namespace sc_obstacle {

// Numeric CSV as columns. A first row that does not parse as numbers is taken
// as the header. Throws InvalidInput on ragged rows or fewer than min_cols.
std::vector<std::vector<double>> read_csv_columns(const std::string& path, std::size_t min_cols);

// Writes columns under a header, values at 17 significant digits.
void write_csv_columns(const std::string& path, const std::vector<std::string>& header,
                       const std::vector<std::vector<double>>& columns);

}  // namespace sc_obstacle
