#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace nvcorr {

// One reconciliation check. For catalogued model-vs-published differences
// (sign flips, structural mismatches, factor inconsistencies), `pass` means
// the measured difference matches its catalogued expectation; silent
// agreement where a difference is expected is a failure.
struct CheckResult {
  std::string id;
  bool pass = false;
  std::string expectation;
  nlohmann::ordered_json metrics;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool all_pass() const;
  nlohmann::ordered_json to_json() const;
};

// Full reconciliation suite: closed forms vs quadrature, the ensemble
// average identity, the published special-case displays, the RWA budget,
// the readout identity, geometry symmetry, and timing bookkeeping.
ValidationReport run_validation(std::uint64_t seed = 20260810, bool quick = false);

}  // namespace nvcorr
