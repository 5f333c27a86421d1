#include "nvcorr/units.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include "nvcorr/constants.hpp"
#include "nvcorr/errors.hpp"

namespace nvcorr {

namespace {

std::string trim(const std::string& s) {
  size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// leading double; returns chars consumed, 0 on failure
size_t read_number(const std::string& s, double* out) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin) return 0;
  *out = v;
  return static_cast<size_t>(end - begin);
}


const std::map<std::string, double>& unit_table(Dimension d) {
  static const std::map<std::string, double> time{
      {"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"µs", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}};
  static const std::map<std::string, double> freq{
      {"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
  static const std::map<std::string, double> field{
      {"T", 1.0}, {"mT", 1e-3}, {"uT", 1e-6}, {"µT", 1e-6},
      {"nT", 1e-9}, {"pT", 1e-12}, {"G", 1e-4}};
  static const std::map<std::string, double> length{
      {"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}, {"µm", 1e-6}, {"nm", 1e-9}, {"pm", 1e-12}};
  static const std::map<std::string, double> density{
      {"m^-3", 1.0}, {"/m^3", 1.0}, {"1/m^3", 1.0}};
  static const std::map<std::string, double> gyro{
      {"Hz/T", 1.0}, {"kHz/T", 1e3}, {"MHz/T", 1e6}, {"GHz/T", 1e9}};
  static const std::map<std::string, double> empty{};
  switch (d) {
    case Dimension::time: return time;
    case Dimension::frequency: return freq;
    case Dimension::magnetic_field: return field;
    case Dimension::length: return length;
    case Dimension::number_density: return density;
    case Dimension::gyromagnetic: return gyro;
    default: return empty;
  }
}

double parse_angle(const std::string& text) {
  const std::string s = trim(text);
  const size_t pi_pos = s.find("pi");
  if (pi_pos != std::string::npos) {
    double coef = 1.0;
    const std::string head = trim(s.substr(0, pi_pos));
    if (!head.empty()) {
      if (head == "-") {
        coef = -1.0;
      } else {
        double v = 0.0;
        if (read_number(head, &v) != head.size()) {
          throw config_error("", "malformed angle '" + text + "'");
        }
        coef = v;
      }
    }
    std::string tail = trim(s.substr(pi_pos + 2));
    double denom = 1.0;
    if (!tail.empty()) {
      if (tail.front() != '/') {
        throw config_error("", "malformed angle '" + text + "'");
      }
      tail = trim(tail.substr(1));
      double v = 0.0;
      if (read_number(tail, &v) != tail.size() || v == 0.0) {
        throw config_error("", "malformed angle '" + text + "'");
      }
      denom = v;
    }
    return coef * kPi / denom;
  }
  double v = 0.0;
  const size_t used = read_number(s, &v);
  if (used == 0) throw config_error("", "malformed angle '" + text + "'");
  const std::string unit = trim(s.substr(used));
  if (unit.empty() || unit == "rad") return v;
  if (unit == "deg") return v * kPi / 180.0;
  throw config_error("", "unknown angle unit '" + unit + "' in '" + text + "'");
}

}  // namespace

double parse_quantity(const std::string& text, Dimension expected) {
  if (expected == Dimension::angle) return parse_angle(text);

  const std::string s = trim(text);
  double v = 0.0;
  const size_t used = read_number(s, &v);
  if (used == 0) throw config_error("", "malformed quantity '" + text + "'");
  const std::string unit = trim(s.substr(used));
  if (unit.empty()) {
    if (expected == Dimension::dimensionless ||
        expected == Dimension::number_density) {
      return v;
    }
    throw config_error("", "missing unit in '" + text + "'");
  }
  if (expected == Dimension::dimensionless) {
    throw config_error("", "unexpected unit in dimensionless quantity '" + text + "'");
  }
  const auto& table = unit_table(expected);
  const auto it = table.find(unit);
  if (it == table.end()) {
    throw config_error("", "unit '" + unit + "' does not match the expected dimension in '" +
                               text + "'");
  }
  return v * it->second;
}

double SweepSpec::at(int i) const {
  if (count == 1) return start;
  return start + (stop - start) * (static_cast<double>(i) / (count - 1));
}

SweepSpec parse_sweep(const std::string& text, Dimension expected) {
  const size_t c1 = text.find(':');
  const size_t c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
  if (c1 == std::string::npos || c2 == std::string::npos) {
    throw config_error("", "sweep must be 'start : stop : count', got '" + text + "'");
  }
  SweepSpec spec;
  spec.start = parse_quantity(text.substr(0, c1), expected);
  spec.stop = parse_quantity(text.substr(c1 + 1, c2 - c1 - 1), expected);
  const std::string cnt = trim(text.substr(c2 + 1));
  double n = 0.0;
  if (read_number(cnt, &n) != cnt.size() || n != std::floor(n) || n < 1.0) {
    throw config_error("", "sweep count must be a positive integer, got '" + cnt + "'");
  }
  spec.count = static_cast<int>(n);
  if (spec.count > 1 && !(spec.start < spec.stop)) {
    throw config_error("", "sweep start must be below stop in '" + text + "'");
  }
  return spec;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace nvcorr
