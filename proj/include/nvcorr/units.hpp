#pragma once

#include <string>

namespace nvcorr {

// Dimensions accepted in configuration values. Frequencies and
// gyromagnetic ratios are given in Hz-based units in config files and
// converted to angular (rad/s) quantities at the parsing boundary.
enum class Dimension {
  time,            // -> s
  frequency,       // -> Hz
  magnetic_field,  // -> T
  length,          // -> m
  angle,           // -> rad; accepts "pi/4", "3pi/2", "90 deg", bare rad
  number_density,  // -> m^-3
  gyromagnetic,    // -> Hz/T
  dimensionless,
};

// "31.2 mT", "60 us", "pi/2", "42.58 MHz/T" -> SI value. Throws
// config_error naming the offending text on malformed input or a unit that
// does not match the expected dimension.
double parse_quantity(const std::string& text, Dimension expected);

struct SweepSpec {
  double start = 0.0;
  double stop = 0.0;
  int count = 0;

  double at(int i) const;  // evenly spaced; at(0) = start, at(count-1) = stop
};

// "60 us : 63 us : 51" -> 51 evenly spaced points.
SweepSpec parse_sweep(const std::string& text, Dimension expected);

// Round-trip-exact decimal formatting for doubles.
std::string format_double(double v);

}  // namespace nvcorr
