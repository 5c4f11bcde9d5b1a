#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace gmratio {

enum class Growth { sqrt, log };

namespace family {

struct Equal {
  bool operator==(const Equal&) const = default;
};

// M for j ≤ n/(M+1), 1/M afterwards, plus one correction entry.
struct TwoLevel {
  double m;
  bool operator==(const TwoLevel&) const = default;
};

// Two-level construction with M replaced by a growth function f(n).
struct Diverging {
  Growth growth;
  bool operator==(const Diverging&) const = default;
};

struct Custom {
  bool operator==(const Custom&) const = default;
};

}  // namespace family

using FamilyTag = std::variant<family::Equal, family::TwoLevel, family::Diverging, family::Custom>;

/// "equal", "two-level:<M>", "diverging:sqrt", "diverging:log" or "custom".
std::string family_name(const FamilyTag& tag);

/// Inverse of family_name. Throws DomainError on unknown text.
FamilyTag parse_family(std::string_view text);

/// A run of `count` equal weights. Moment sums only depend on the multiset
/// of weights, so runs let large structured families stay cheap.
struct WeightRun {
  double value;
  std::int64_t count;
};

/// Renormalized weights a_1 ≥ … ≥ a_n > 0 with Σ a_i = n.
///
/// The constructor stores the values as given; the generators below produce
/// sequences that already satisfy every invariant, and validate() reports
/// what a custom sequence violates.
class WeightSequence {
 public:
  WeightSequence(std::vector<double> values, FamilyTag family = family::Custom{});

  std::size_t n() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  const FamilyTag& family() const noexcept { return family_; }

  double max() const;

  // Runs of equal values, largest first.
  std::vector<WeightRun> runs() const;

 private:
  std::vector<double> values_;
  FamilyTag family_;
};

struct WeightStats {
  double a_max;
  double log_weight_gm;     // Σ (a_i/n) ln a_i
  double predicted_center;  // e^{-γ} · exp(-log_weight_gm)
};

struct Violation {
  enum class Kind { dimension, positivity, sum, ordering };
  Kind kind;
  std::size_t index;  // 1-based; 0 when the violation is not tied to an entry
  std::string message;
};

WeightSequence equal_weights(std::int64_t n);
WeightSequence two_level_weights(std::int64_t n, double m);
WeightSequence diverging_weights(std::int64_t n, Growth growth);

/// Generate the member of a non-custom family at dimension n.
WeightSequence make_weights(const FamilyTag& tag, std::int64_t n);

/// Run-length form of make_weights, without materializing n values.
std::vector<WeightRun> family_runs(const FamilyTag& tag, std::int64_t n);

/// f(n) for the diverging family: ⌊√n⌋ or max(2, ⌊ln n⌋).
double growth_value(Growth growth, std::int64_t n);

std::vector<Violation> validate(const WeightSequence& w);

/// Throws DomainError carrying every violation when `w` is invalid.
void require_valid(const WeightSequence& w);

WeightStats weight_stats(const WeightSequence& w);
WeightStats weight_stats(std::span<const WeightRun> runs);

std::int64_t total_count(std::span<const WeightRun> runs);

nlohmann::json to_json(const WeightSequence& w);

/// Parses {"n": int, "a": [...], "family": string}. Parsed sequences are
/// always tagged Custom; the family field is informational. Does not validate.
WeightSequence weights_from_json(const nlohmann::json& j);

}  // namespace gmratio
