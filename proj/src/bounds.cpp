#include "gmratio/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include "gmratio/error.hpp"
#include "gmratio/moments.hpp"
#include "gmratio/special_fns.hpp"
#include "gmratio/summation.hpp"

namespace gmratio {

namespace {

constexpr int kMinGridExponent = 4;
constexpr int kMaxGridExponent = 24;
constexpr int kFinestS = 20;  // s grid: 2^-20 .. 2^0
constexpr double kTieTolerance = 1e-15;
constexpr int kGoldenIterations = 80;

enum class Tail { upper, lower };

struct Grid {
  std::vector<std::int64_t> dims;
  std::vector<std::vector<WeightRun>> runs;
  std::vector<double> targets;
  double a_max = 0.0;
};

Grid make_grid(const BoundQuery& q, Tail tail) {
  Grid grid;
  grid.dims = dimension_grid(q.weights);
  for (auto n : grid.dims) {
    auto runs = std::holds_alternative<family::Custom>(q.weights.family()) ? q.weights.runs()
                                                                          : family_runs(q.weights.family(), n);
    const auto stats = weight_stats(runs);
    grid.a_max = std::max(grid.a_max, stats.a_max);
    grid.targets.push_back(tail == Tail::upper ? (1.0 + q.epsilon) * exp_neg_gamma()
                                               : (1.0 - q.epsilon) * stats.predicted_center);
    grid.runs.push_back(std::move(runs));
  }
  return grid;
}

bool certifies(Tail tail, double threshold, double target) {
  return tail == Tail::upper ? threshold < target : threshold > target;
}

// True when `candidate` beats `incumbent` for this tail.
bool improves(Tail tail, double candidate, double incumbent) {
  if (!std::isfinite(incumbent)) return std::isfinite(candidate);
  const double margin = kTieTolerance * std::max(std::fabs(candidate), std::fabs(incumbent));
  return tail == Tail::upper ? candidate < incumbent - margin : candidate > incumbent + margin;
}

struct Evaluation {
  std::optional<std::size_t> n_min_index;
  std::vector<double> thresholds;
};

Evaluation evaluate(const Grid& grid, Tail tail, double s, double k) {
  Evaluation e;
  e.thresholds.reserve(grid.dims.size());
  for (const auto& runs : grid.runs) e.thresholds.push_back(ratio_threshold(runs, s, k));
  // Certificates must hold at every grid dimension from n_min upward.
  for (std::size_t i = grid.dims.size(); i-- > 0;) {
    if (!certifies(tail, e.thresholds[i], grid.targets[i])) break;
    e.n_min_index = i;
  }
  return e;
}

// Largest s > 0 with e/(1+s)^{1/s} < 1+δ; the bound increases with s.
double analytic_upper_limit(double delta) {
  double lo = 0.0;
  double hi = 1.0;
  if (gamma_ratio_bound(hi) < 1.0 + delta) return hi;
  for (int i = 0; i < 200 && hi - lo > 1e-17; ++i) {
    const double mid = 0.5 * (lo + hi);
    (gamma_ratio_bound(mid) < 1.0 + delta ? lo : hi) = mid;
  }
  return lo;
}

template <class F>
double golden_section_minimize(F&& f, double lo, double hi) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < kGoldenIterations; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

TailBound optimize(const BoundQuery& q, Tail tail) {
  require_valid(q);
  const Grid grid = make_grid(q, tail);
  const double sign = tail == Tail::upper ? 1.0 : -1.0;

  // Admissible magnitudes |s|.
  double max_magnitude = 1.0;
  if (tail == Tail::upper) {
    max_magnitude = analytic_upper_limit(delta_for_epsilon(q.epsilon));
  } else {
    max_magnitude = std::nextafter(1.0 / grid.a_max, 0.0);
  }
  const auto admissible = [&](double magnitude) {
    if (!(magnitude > 0.0) || magnitude > max_magnitude) return false;
    if (tail == Tail::upper) return gamma_ratio_bound(magnitude) < 1.0 + delta_for_epsilon(q.epsilon);
    return magnitude * grid.a_max < 1.0;
  };

  std::optional<std::size_t> best_index;
  double best_magnitude = 0.0;
  double best_threshold = 0.0;
  double fallback = tail == Tail::upper ? std::numeric_limits<double>::infinity() : 0.0;

  for (int j = kFinestS; j >= 0; --j) {
    const double magnitude = std::ldexp(1.0, -j);
    if (!admissible(magnitude)) continue;
    const auto e = evaluate(grid, tail, sign * magnitude, q.k);
    if (improves(tail, e.thresholds.back(), fallback)) fallback = e.thresholds.back();
    if (!e.n_min_index) continue;
    const auto index = *e.n_min_index;
    const double threshold = e.thresholds[index];
    if (!best_index || index < *best_index || (index == *best_index && improves(tail, threshold, best_threshold))) {
      best_index = index;
      best_magnitude = magnitude;
      best_threshold = threshold;
    }
  }

  if (!best_index) {
    std::ostringstream os;
    os << (tail == Tail::upper ? "upper" : "lower") << " tail: no admissible s certifies the bound for "
       << family_name(q.weights.family()) << " with k=" << q.k << ", eps=" << q.epsilon << " up to n="
       << grid.dims.back();
    throw OptimizationFailure(os.str(), fallback);
  }

  // Refine inside the neighbouring grid bracket at the chosen n_min.
  const std::size_t index = *best_index;
  const double lo = best_magnitude / 2.0;
  const double hi = std::min(2.0 * best_magnitude, max_magnitude);
  const auto objective = [&](double magnitude) {
    if (!admissible(magnitude)) return std::numeric_limits<double>::infinity();
    const double t = ratio_threshold(grid.runs[index], sign * magnitude, q.k);
    if (!std::isfinite(t)) return std::numeric_limits<double>::infinity();
    return tail == Tail::upper ? t : -t;
  };
  if (hi > lo) {
    const double refined = golden_section_minimize(objective, lo, hi);
    if (admissible(refined)) {
      const auto e = evaluate(grid, tail, sign * refined, q.k);
      if (e.n_min_index && (*e.n_min_index < index ||
                            (*e.n_min_index == index && improves(tail, e.thresholds[index], best_threshold)))) {
        return {sign * refined, grid.dims[*e.n_min_index], e.thresholds[*e.n_min_index]};
      }
    }
  }
  return {sign * best_magnitude, grid.dims[index], best_threshold};
}

std::vector<WeightRun> runs_at(const WeightSequence& w, std::int64_t n) {
  if (std::holds_alternative<family::Custom>(w.family())) {
    if (static_cast<std::int64_t>(w.n()) != n) {
      std::ostringstream os;
      os << "custom weights have dimension " << w.n() << ", cannot evaluate at n=" << n;
      throw DomainError(os.str());
    }
    return w.runs();
  }
  return family_runs(w.family(), n);
}

}  // namespace

void require_valid(const BoundQuery& q) {
  std::ostringstream os;
  bool failed = false;
  if (!(q.k > 0.0) || !std::isfinite(q.k)) {
    os << "k must be positive and finite, got " << q.k;
    failed = true;
  }
  if (!(q.epsilon > 0.0 && q.epsilon < 1.0)) {
    os << (failed ? "; " : "") << "epsilon must lie in (0, 1), got " << q.epsilon;
    failed = true;
  }
  if (failed) throw DomainError(os.str());
  require_valid(q.weights);
}

double delta_for_epsilon(double epsilon) { return std::cbrt(1.0 + epsilon) - 1.0; }

double gamma_ratio_bound(double s) {
  if (!(s > -1.0) || s == 0.0) throw DomainError("gamma_ratio_bound requires s > -1 and s != 0");
  return std::exp(1.0 - std::log1p(s) / s);
}

double chebyshev_level(const WeightSequence& w, double s, double k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw DomainError("k must be non-negative and finite");
  const double n = static_cast<double>(w.n());
  return std::numbers::ln2 + k * std::log(n) + exact_moment_weighted(w, s).log_moment;
}

double ratio_threshold(std::span<const WeightRun> runs, double s, double k) {
  if (s == 0.0) throw DomainError("ratio threshold requires s != 0");
  const double n = static_cast<double>(total_count(runs));
  const double log_t = std::numbers::ln2 + k * std::log(n) + exact_moment_weighted(runs, s).log_moment;
  return std::exp(std::log(n) + log_t / (s * n));
}

FactorDecomposition factor_decomposition(const WeightSequence& w, double s, double k) {
  if (s == 0.0) throw DomainError("factor decomposition requires s != 0");
  // Validates the weights and the exponent.
  exact_moment_weighted(w, s);
  const double n = static_cast<double>(w.n());
  const double sn = s * n;
  const auto runs = w.runs();
  return {
      std::exp((std::numbers::ln2 + k * std::log(n)) / sn),
      n * std::exp(log_gamma_ratio(n, s) / sn),
      std::exp(log_weight_product(runs, s) / sn),
      gamma_ratio_bound(s),
  };
}

std::vector<std::int64_t> dimension_grid(const WeightSequence& w) {
  if (std::holds_alternative<family::Custom>(w.family())) return {static_cast<std::int64_t>(w.n())};
  std::vector<std::int64_t> dims;
  for (int e = kMinGridExponent; e <= kMaxGridExponent; ++e) dims.push_back(std::int64_t{1} << e);
  return dims;
}

TailBound optimize_upper(const BoundQuery& q) { return optimize(q, Tail::upper); }

TailBound optimize_lower(const BoundQuery& q) { return optimize(q, Tail::lower); }

BoundCertificate certified_interval(const BoundQuery& q, std::int64_t n) {
  const auto upper = optimize_upper(q);
  const auto lower = optimize_lower(q);
  BoundCertificate c{};
  c.n_min_upper = upper.n_min;
  c.n_min_lower = lower.n_min;
  c.n_min = std::max(upper.n_min, lower.n_min);
  c.n = n > 0 ? n : c.n_min;
  c.s_upper = upper.s;
  c.s_lower = lower.s;
  const auto runs = runs_at(q.weights, c.n);
  c.upper_threshold = ratio_threshold(runs, c.s_upper, q.k);
  c.lower_threshold = ratio_threshold(runs, c.s_lower, q.k);
  if (!(c.lower_threshold < c.upper_threshold)) {
    std::ostringstream os;
    os << "empty certified interval at n=" << c.n << ": lower " << c.lower_threshold << " >= upper "
       << c.upper_threshold;
    throw OptimizationFailure(os.str(), c.upper_threshold);
  }
  const auto stats = weight_stats(runs);
  c.predicted_center = stats.predicted_center;
  c.probability_floor = -std::expm1(-q.k * std::log(static_cast<double>(c.n)));
  c.theorem_matching = c.upper_threshold <= (1.0 + q.epsilon) * exp_neg_gamma() &&
                       c.lower_threshold >= (1.0 - q.epsilon) * stats.predicted_center;
  return c;
}

double log_product_power(std::span<const double> t) {
  CompensatedSum total;
  CompensatedSum log_value;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!(t[i] >= 0.0) || !std::isfinite(t[i])) {
      std::ostringstream os;
      os << "product_power: entry " << i + 1 << " must be finite and non-negative, got " << t[i];
      throw DomainError(os.str());
    }
    total += t[i];
    if (t[i] > 0.0) log_value += t[i] * std::log(t[i]);
  }
  const double n = static_cast<double>(t.size());
  if (total.value() < n - 1e-12 * n) {
    std::ostringstream os;
    os << "product_power: constraint sum(t) >= n violated (sum=" << total.value() << ", n=" << t.size() << ")";
    throw DomainError(os.str());
  }
  return log_value.value();
}

double product_power(std::span<const double> t) { return std::exp(log_product_power(t)); }

}  // namespace gmratio
