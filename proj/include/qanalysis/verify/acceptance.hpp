#pragma once

// Acceptance checks 1..12, shared by the acceptance binary and `verify-all`.
// Every check is deterministic for a given seed. Timings are kept out of the
// JSON so that repeated runs produce identical bytes.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace qa::verify {

inline constexpr int kLibraryCriteria = 12;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  nlohmann::json metrics = nlohmann::json::object();
  double seconds = 0.0;  // wall time, not serialized
};

// Throws std::out_of_range for an id outside 1..12.
CriterionResult run_criterion(int id, std::uint64_t seed);
// An empty list runs all of 1..12.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed, const std::vector<int>& ids = {});

// Wall-time budget for one criterion in seconds.
double time_budget(int id);

nlohmann::json to_json(const CriterionResult& r);

}  // namespace qa::verify
