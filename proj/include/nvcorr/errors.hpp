#pragma once

#include <stdexcept>
#include <string>

namespace nvcorr {

// Requested a closed form outside its validity regime (e.g. off-resonant
// drive through the rotating-frame propagators). The caller should switch
// to the numerical oracle instead.
class unsupported_mode_error : public std::domain_error {
public:
  explicit unsupported_mode_error(const std::string& what)
      : std::domain_error(what) {}
};

// A closed-form denominator is too close to zero to evaluate reliably;
// callers are expected to fall back to quadrature.
class singular_denominator_error : public std::domain_error {
public:
  explicit singular_denominator_error(const std::string& what)
      : std::domain_error(what) {}
};

// Configuration parsing/validation failure. Carries the offending field
// path so the CLI can emit a pointed diagnostic.
class config_error : public std::runtime_error {
public:
  config_error(std::string field_path, const std::string& what)
      : std::runtime_error(field_path.empty() ? what : field_path + ": " + what),
        field(std::move(field_path)) {}
  std::string field;
};

// File read/write failure with path context.
class io_error : public std::runtime_error {
public:
  io_error(const std::string& path, const std::string& what)
      : std::runtime_error(what + " (" + path + ")"), path(path) {}
  std::string path;
};

}  // namespace nvcorr
