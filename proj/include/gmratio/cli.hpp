#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "gmratio/weights.hpp"

namespace gmratio {

enum class Command { moment, bound, simulate, verify, table };
enum class OutputFormat { csv, json };

inline constexpr std::uint64_t kDefaultSeed = 0x5EED;

struct ExperimentConfig {
  Command command = Command::moment;
  std::optional<std::int64_t> n;
  std::string weight_spec = "equal";
  std::optional<double> s;
  double k = 1.0;
  double epsilon = 0.1;
  std::optional<std::uint64_t> samples;
  std::uint64_t seed = kDefaultSeed;
  OutputFormat format = OutputFormat::json;
  std::optional<std::string> out;

  bool operator==(const ExperimentConfig&) const = default;
};

/// Parsed --weights value.
struct WeightSpec {
  enum class Kind { family, custom_file, euclidean };
  Kind kind;
  FamilyTag family;
  std::string path;
};

WeightSpec parse_weight_spec(std::string_view text);

/// Command-line usage error; carries every violated constraint.
class UsageError : public std::runtime_error {
 public:
  explicit UsageError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

std::string_view command_name(Command c);

/// Arguments exclude the program name. Throws UsageError.
ExperimentConfig parse_args(std::span<const std::string> args);

/// Argument list that parse_args maps back to `config`.
std::vector<std::string> to_args(const ExperimentConfig& config);

nlohmann::json to_json(const ExperimentConfig& config);

std::uint64_t effective_samples(const ExperimentConfig& config);

// Reports are complete documents in the configured format.
std::string cmd_moment(const ExperimentConfig& config);
std::string cmd_bound(const ExperimentConfig& config);
std::string cmd_simulate(const ExperimentConfig& config);
std::string cmd_table(const ExperimentConfig& config);

/// Runs the acceptance checklist; returns the report and whether no check failed.
std::pair<std::string, bool> cmd_verify(const ExperimentConfig& config);

/// Full front end: 0 on success, 1 on runtime failure, 2 on usage error.
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace gmratio
