#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "grbm/experiments.hpp"

namespace grbm {

/// Locale-independent decimal rendering with 17 significant digits, enough
/// for exact double round-trips.
std::string format_double(double x);

/// Writes one header line and one data line per row, LF-terminated, fields
/// separated by `delim`. The column set depends on the sweep mode.
void write_sweep_table(std::ostream& os, SweepMode mode, const std::vector<SweepRow>& rows,
                       char delim = ',');

} // namespace grbm
