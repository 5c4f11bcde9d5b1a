#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace gmratio {

enum class CheckStatus { pass, fail, skip };

struct CheckResult {
  int id;
  std::string name;
  CheckStatus status;
  std::string detail;
  double seconds;
};

struct AcceptanceOptions {
  std::uint64_t seed = 0x5EED;
  // Caps every Monte Carlo sample count; empty runs the full-size checklist.
  std::optional<std::uint64_t> max_samples;
  // Check ids to run; empty runs all twelve.
  std::vector<int> only;
};

/// The end-to-end acceptance checklist shared by `gmratio verify` and the
/// acceptance test binary.
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& options);

std::string format_check(const CheckResult& r);

}  // namespace gmratio
