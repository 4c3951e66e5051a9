#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mvsdde/measure.hpp"
#include "mvsdde/path.hpp"

namespace mvsdde {

/// Round-trippable decimal form (17 significant digits).
std::string format_double(double value);

/// Columns: particle, t, x_1..x_d; one row per path and grid point, history
/// included.
void write_paths_csv(std::ostream& out, const std::vector<ParticlePath>& paths);

/// Columns: particle, then the atom components oldest lag first, named
/// xm<i>_<j> for lag i > 0 and x0_<j> for the current position.
void write_measure_csv(std::ostream& out, const EmpiricalMeasure& measure);

/// Inverse of write_measure_csv; the shape is inferred from the header.
EmpiricalMeasure read_measure_csv(std::istream& in);
EmpiricalMeasure read_measure_csv_file(const std::string& path);

}  // namespace mvsdde
