#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vpmap/model.hpp"

namespace vpmap {

// Full-precision rendering (17 significant digits) so CSV output parses
// back to the identical double.
std::string format_double(double x);

// Data CSV with header "time,area,y,exposure", 1-based indices, any row
// order. n2_expected (> 0) pins the area count to the graph; otherwise the
// largest area index defines it.
Dataset read_data_csv(std::istream& in, Family family, int n2_expected = 0);
Dataset read_data_csv_file(const std::string& path, Family family,
                           int n2_expected = 0);

void write_data_csv(std::ostream& out, const Dataset& data);

} // namespace vpmap
