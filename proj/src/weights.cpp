#include "gmratio/weights.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "gmratio/error.hpp"
#include "gmratio/special_fns.hpp"
#include "gmratio/summation.hpp"

namespace gmratio {

namespace {

constexpr double kSumTolerance = 1e-9;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

struct TwoLevelLayout {
  double m;
  std::int64_t large_count;
  std::optional<double> correction;
  std::int64_t small_count;
};

// Entries equal to M for j ≤ n/(M+1), 1/M for j ≥ 1 + n/(M+1), and a
// correction at the least integer strictly above n/(M+1) unless that
// quotient is an integer.
TwoLevelLayout two_level_layout(std::int64_t n, double m) {
  const double nd = static_cast<double>(n);
  const double quotient = nd / (m + 1.0);
  const double nearest = std::round(quotient);
  TwoLevelLayout layout{m, 0, std::nullopt, 0};
  if (std::fabs(quotient - nearest) <= 1e-12 * std::max(1.0, quotient)) {
    layout.large_count = static_cast<std::int64_t>(nearest);
    layout.small_count = n - layout.large_count;
    return layout;
  }
  layout.large_count = static_cast<std::int64_t>(std::floor(quotient));
  layout.small_count = n - layout.large_count - 1;
  const double j = static_cast<double>(layout.large_count);
  const double t = nd - j * m - static_cast<double>(layout.small_count) / m;
  const double slack = kSumTolerance * std::max(1.0, m);
  if (t < 1.0 / m - slack || t > m + slack) {
    std::ostringstream os;
    os << "two-level construction failed for n=" << n << ", M=" << m << ": correction element " << t
       << " lies outside [1/M, M]";
    throw ConstructionError(os.str());
  }
  layout.correction = t;
  return layout;
}

std::vector<WeightRun> layout_runs(const TwoLevelLayout& layout) {
  std::vector<WeightRun> runs;
  if (layout.large_count > 0) runs.push_back({layout.m, layout.large_count});
  if (layout.correction) runs.push_back({*layout.correction, 1});
  if (layout.small_count > 0) runs.push_back({1.0 / layout.m, layout.small_count});
  std::sort(runs.begin(), runs.end(), [](const WeightRun& a, const WeightRun& b) { return a.value > b.value; });
  std::vector<WeightRun> merged;
  for (const auto& run : runs) {
    if (!merged.empty() && merged.back().value == run.value) {
      merged.back().count += run.count;
    } else {
      merged.push_back(run);
    }
  }
  return merged;
}

std::vector<double> expand(std::span<const WeightRun> runs) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(total_count(runs)));
  for (const auto& run : runs) values.insert(values.end(), static_cast<std::size_t>(run.count), run.value);
  return values;
}

void require_dimension(std::int64_t n) {
  if (n < 2) {
    std::ostringstream os;
    os << "dimension must be at least 2, got " << n;
    throw DomainError(os.str());
  }
}

void require_two_level_parameter(double m) {
  if (!(m >= 1.0) || !std::isfinite(m)) {
    std::ostringstream os;
    os << "two-level parameter M must be finite and >= 1, got " << m;
    throw DomainError(os.str());
  }
}

double checked_growth(Growth growth, std::int64_t n) {
  require_dimension(n);
  const double f = growth_value(growth, n);
  if (f < 1.0 || f >= static_cast<double>(n)) {
    std::ostringstream os;
    os << "growth function " << (growth == Growth::sqrt ? "sqrt" : "log") << " gives f(" << n << ")=" << f
       << ", need 1 <= f(n) < n";
    throw DomainError(os.str());
  }
  return f;
}

std::string format_parameter(double m) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof buffer, m);
  return std::string(buffer, result.ptr);
}

}  // namespace

std::string family_name(const FamilyTag& tag) {
  return std::visit(Overloaded{
                        [](const family::Equal&) { return std::string("equal"); },
                        [](const family::TwoLevel& t) { return "two-level:" + format_parameter(t.m); },
                        [](const family::Diverging& d) {
                          return std::string(d.growth == Growth::sqrt ? "diverging:sqrt" : "diverging:log");
                        },
                        [](const family::Custom&) { return std::string("custom"); },
                    },
                    tag);
}

FamilyTag parse_family(std::string_view text) {
  if (text == "equal") return family::Equal{};
  if (text == "custom") return family::Custom{};
  if (text == "diverging:sqrt") return family::Diverging{Growth::sqrt};
  if (text == "diverging:log") return family::Diverging{Growth::log};
  constexpr std::string_view prefix = "two-level:";
  if (text.starts_with(prefix)) {
    const auto rest = text.substr(prefix.size());
    double m = 0.0;
    const auto result = std::from_chars(rest.data(), rest.data() + rest.size(), m);
    if (result.ec == std::errc() && result.ptr == rest.data() + rest.size()) {
      require_two_level_parameter(m);
      return family::TwoLevel{m};
    }
  }
  throw DomainError("unknown weight family '" + std::string(text) + "'");
}

WeightSequence::WeightSequence(std::vector<double> values, FamilyTag family)
    : values_(std::move(values)), family_(family) {}

double WeightSequence::max() const {
  if (values_.empty()) throw DomainError("empty weight sequence has no maximum");
  return *std::max_element(values_.begin(), values_.end());
}

std::vector<WeightRun> WeightSequence::runs() const {
  std::vector<double> sorted(values_);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  std::vector<WeightRun> result;
  for (double v : sorted) {
    if (!result.empty() && result.back().value == v) {
      ++result.back().count;
    } else {
      result.push_back({v, 1});
    }
  }
  return result;
}

double growth_value(Growth growth, std::int64_t n) {
  if (growth == Growth::sqrt) {
    auto root = static_cast<std::int64_t>(std::sqrt(static_cast<double>(n)));
    while (root * root > n) --root;
    while ((root + 1) * (root + 1) <= n) ++root;
    return static_cast<double>(root);
  }
  return std::max(2.0, std::floor(std::log(static_cast<double>(n))));
}

WeightSequence equal_weights(std::int64_t n) {
  require_dimension(n);
  return WeightSequence(std::vector<double>(static_cast<std::size_t>(n), 1.0), family::Equal{});
}

WeightSequence two_level_weights(std::int64_t n, double m) {
  require_dimension(n);
  require_two_level_parameter(m);
  return WeightSequence(expand(layout_runs(two_level_layout(n, m))), family::TwoLevel{m});
}

WeightSequence diverging_weights(std::int64_t n, Growth growth) {
  const double f = checked_growth(growth, n);
  return WeightSequence(expand(layout_runs(two_level_layout(n, f))), family::Diverging{growth});
}

std::vector<WeightRun> family_runs(const FamilyTag& tag, std::int64_t n) {
  return std::visit(Overloaded{
                        [n](const family::Equal&) {
                          require_dimension(n);
                          return std::vector<WeightRun>{{1.0, n}};
                        },
                        [n](const family::TwoLevel& t) {
                          require_dimension(n);
                          require_two_level_parameter(t.m);
                          return layout_runs(two_level_layout(n, t.m));
                        },
                        [n](const family::Diverging& d) {
                          return layout_runs(two_level_layout(n, checked_growth(d.growth, n)));
                        },
                        [](const family::Custom&) -> std::vector<WeightRun> {
                          throw DomainError("custom weights cannot be generated at another dimension");
                        },
                    },
                    tag);
}

WeightSequence make_weights(const FamilyTag& tag, std::int64_t n) {
  return WeightSequence(expand(family_runs(tag, n)), tag);
}

std::vector<Violation> validate(const WeightSequence& w) {
  std::vector<Violation> violations;
  const auto a = w.values();
  if (a.size() < 2) {
    violations.push_back({Violation::Kind::dimension, 0, "dimension n=" + std::to_string(a.size()) + " is below 2"});
  }
  bool all_positive = true;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(a[i] > 0.0) || !std::isfinite(a[i])) {
      all_positive = false;
      std::ostringstream os;
      os << "positivity violation at index " << i + 1 << ": a=" << a[i];
      violations.push_back({Violation::Kind::positivity, i + 1, os.str()});
    }
  }
  // The sum is only meaningful once every entry is a positive weight.
  if (all_positive && !a.empty()) {
    CompensatedSum sum;
    for (double v : a) sum += v;
    const double n = static_cast<double>(a.size());
    if (std::fabs(sum.value() - n) > kSumTolerance * n) {
      std::ostringstream os;
      os << "sum violation: sum=" << sum.value() << " != n=" << a.size();
      violations.push_back({Violation::Kind::sum, 0, os.str()});
    }
  }
  for (std::size_t i = 1; i < a.size(); ++i) {
    if (a[i] > a[i - 1]) {
      std::ostringstream os;
      os << "ordering violation at index " << i + 1 << ": " << a[i] << " > " << a[i - 1];
      violations.push_back({Violation::Kind::ordering, i + 1, os.str()});
      break;
    }
  }
  return violations;
}

void require_valid(const WeightSequence& w) {
  const auto violations = validate(w);
  if (violations.empty()) return;
  std::ostringstream os;
  os << "invalid weight sequence:";
  for (const auto& v : violations) os << "\n  " << v.message;
  throw DomainError(os.str());
}

std::int64_t total_count(std::span<const WeightRun> runs) {
  std::int64_t n = 0;
  for (const auto& run : runs) n += run.count;
  return n;
}

WeightStats weight_stats(std::span<const WeightRun> runs) {
  const double n = static_cast<double>(total_count(runs));
  CompensatedSum sum;
  double a_max = 0.0;
  for (const auto& run : runs) {
    sum += static_cast<double>(run.count) * (run.value / n) * std::log(run.value);
    a_max = std::max(a_max, run.value);
  }
  const double log_gm = sum.value();
  return {a_max, log_gm, std::exp(-constants::euler_gamma - log_gm)};
}

WeightStats weight_stats(const WeightSequence& w) {
  require_valid(w);
  const double n = static_cast<double>(w.n());
  CompensatedSum sum;
  for (double a : w.values()) sum += (a / n) * std::log(a);
  const double log_gm = sum.value();
  return {w.max(), log_gm, std::exp(-constants::euler_gamma - log_gm)};
}

nlohmann::json to_json(const WeightSequence& w) {
  return {{"n", w.n()}, {"a", std::vector<double>(w.values().begin(), w.values().end())}, {"family", family_name(w.family())}};
}

WeightSequence weights_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("a") || !j.at("a").is_array()) {
    throw DomainError("weight file must be an object with an array field \"a\"");
  }
  std::vector<double> a;
  for (const auto& v : j.at("a")) {
    if (!v.is_number()) throw DomainError("weight entries must be numbers");
    a.push_back(v.get<double>());
  }
  if (j.contains("n")) {
    if (!j.at("n").is_number_integer() || j.at("n").get<std::int64_t>() != static_cast<std::int64_t>(a.size())) {
      throw DomainError("weight file field \"n\" does not match the length of \"a\"");
    }
  }
  return WeightSequence(std::move(a), family::Custom{});
}

}  // namespace gmratio
