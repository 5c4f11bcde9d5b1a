#include "gmratio/moments.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "gmratio/error.hpp"
#include "gmratio/special_fns.hpp"
#include "gmratio/summation.hpp"

namespace gmratio {

namespace {

void require_finite(double s) {
  if (!std::isfinite(s)) throw DomainError("moment exponent must be finite");
}

// Ordering is a storage convention; the moment is permutation invariant,
// so only the remaining invariants are enforced here.
void require_usable(const WeightSequence& w) {
  std::ostringstream os;
  bool failed = false;
  for (const auto& v : validate(w)) {
    if (v.kind == Violation::Kind::ordering) continue;
    os << (failed ? "\n  " : "invalid weight sequence:\n  ") << v.message;
    failed = true;
  }
  if (failed) throw DomainError(os.str());
}

std::optional<double> root(double log_moment, double s, double n, double scale) {
  if (s == 0.0) return std::nullopt;
  return scale * std::exp(log_moment / (s * n));
}

}  // namespace

double log_gamma_ratio(double n, double s) { return log_gamma(n) - log_gamma((1.0 + s) * n); }

double log_weight_product(std::span<const WeightRun> runs, double s) {
  CompensatedSum sum;
  for (const auto& run : runs) {
    const double a = run.value;
    sum += static_cast<double>(run.count) * (log_gamma(1.0 + a * s) - a * s * std::log(a));
  }
  return sum.value();
}

void require_moment_exponent(std::span<const WeightRun> runs, double s) {
  require_finite(s);
  for (const auto& run : runs) {
    if (!(1.0 + s * run.value > 0.0)) {
      std::ostringstream os;
      os << "moment exponent s=" << s << " violates 1 + s*a_i > 0 for a_i=" << run.value;
      throw DomainError(os.str());
    }
  }
}

MomentResult exact_moment_weighted(std::span<const WeightRun> runs, double s) {
  require_moment_exponent(runs, s);
  if (s == 0.0) return {0.0, std::nullopt};
  const double n = static_cast<double>(total_count(runs));
  CompensatedSum sum;
  sum += log_gamma(n);
  sum += -log_gamma((1.0 + s) * n);
  sum += log_weight_product(runs, s);
  const double log_moment = sum.value();
  return {log_moment, root(log_moment, s, n, n)};
}

MomentResult exact_moment_weighted(const WeightSequence& w, double s) {
  require_usable(w);
  const auto runs = w.runs();
  require_finite(s);
  // Name the offending entry by its position in the stored order.
  const auto a = w.values();
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!(1.0 + s * a[i] > 0.0)) {
      std::ostringstream os;
      os << "moment exponent s=" << s << " violates 1 + s*a_i > 0 at index " << i + 1 << " (a_i=" << a[i] << ")";
      throw DomainError(os.str());
    }
  }
  return exact_moment_weighted(runs, s);
}

MomentResult exact_moment_euclidean(std::int64_t n, double s) {
  require_finite(s);
  if (n < 1) throw DomainError("dimension must be positive");
  if (!(s > -1.0)) {
    std::ostringstream os;
    os << "Euclidean moment requires s > -1, got " << s;
    throw DomainError(os.str());
  }
  if (s == 0.0) return {0.0, std::nullopt};
  const double nd = static_cast<double>(n);
  CompensatedSum sum;
  sum += nd * (log_gamma((1.0 + s) / 2.0) - log_gamma(0.5));
  sum += log_gamma(nd / 2.0);
  sum += -log_gamma((1.0 + s) * nd / 2.0);
  const double log_moment = sum.value();
  return {log_moment, root(log_moment, s, nd, std::sqrt(nd))};
}

double log_sphere_area_weighted(const WeightSequence& w) {
  require_valid(w);
  CompensatedSum squares;
  CompensatedSum logs;
  for (double a : w.values()) {
    squares += a * a;
    logs += std::log(a);
  }
  const double n = static_cast<double>(w.n());
  return n * std::numbers::ln2 + 0.5 * std::log(squares.value()) - log_gamma(n) - logs.value();
}

}  // namespace gmratio
