#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "gmratio/estimator.hpp"

using namespace gmratio;

namespace {

std::vector<double> draws(std::uint64_t seed, std::size_t count) {
  std::mt19937_64 gen(seed);
  std::gamma_distribution<double> ga(8.0, 1.0);
  std::gamma_distribution<double> gb(6.0, 1.0);
  std::vector<double> v(count);
  for (auto& x : v) {
    const double a = ga(gen);
    x = a / (a + gb(gen));
  }
  return v;
}

EstimatorState feed(std::span<const double> v, std::vector<Interval> intervals = {}) {
  EstimatorState s(std::move(intervals));
  for (double x : v) s.add(x);
  return s;
}

std::uint64_t exact_rank(std::vector<double> sorted, double v) {
  return static_cast<std::uint64_t>(std::upper_bound(sorted.begin(), sorted.end(), v) - sorted.begin());
}

}  // namespace

TEST_CASE("mean and variance match two-pass formulas") {
  const auto v = draws(1, 50'000);
  const auto s = feed(v);
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= v.size();
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  CHECK(s.count() == v.size());
  CHECK(s.mean() == doctest::Approx(mean).epsilon(1e-13));
  CHECK(s.m2() == doctest::Approx(ss).epsilon(1e-11));
  CHECK(s.variance() == doctest::Approx(ss / (v.size() - 1)).epsilon(1e-11));
  CHECK(s.standard_deviation() == doctest::Approx(std::sqrt(ss / (v.size() - 1))).epsilon(1e-11));
}

TEST_CASE("empty and single-sample states") {
  EstimatorState s;
  CHECK(s.count() == 0);
  CHECK(s.variance() == 0.0);
  s.add(0.25);
  CHECK(s.mean() == 0.25);
  CHECK(s.variance() == 0.0);
  CHECK(s.median() == 0.25);
}

TEST_CASE("merging equals the concatenated stream, in any order") {
  const auto v = draws(2, 30'000);
  const std::vector<Interval> iv = {{0.5, 0.6}, {0.0, 0.55}};
  const auto whole = feed(v, iv);

  std::vector<EstimatorState> parts;
  for (std::size_t b = 0; b < 6; ++b) parts.push_back(feed(std::span(v).subspan(b * 5000, 5000), iv));

  std::vector<std::size_t> order = {0, 1, 2, 3, 4, 5};
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 10; ++trial) {
    std::shuffle(order.begin(), order.end(), gen);
    EstimatorState merged(iv);
    for (auto i : order) merged.merge(parts[i]);
    CHECK(merged.count() == whole.count());
    CHECK(merged.mean() == doctest::Approx(whole.mean()).epsilon(1e-12));
    CHECK(merged.m2() == doctest::Approx(whole.m2()).epsilon(1e-12));
    CHECK(merged.histogram() == whole.histogram());
    CHECK(merged.interval_counts()[0] == whole.interval_counts()[0]);
    CHECK(merged.interval_counts()[1] == whole.interval_counts()[1]);
  }

  // Tree-shaped merge.
  auto left = parts[0];
  left.merge(parts[1]);
  left.merge(parts[2]);
  auto right = parts[3];
  right.merge(parts[4]);
  right.merge(parts[5]);
  left.merge(right);
  CHECK(left.mean() == doctest::Approx(whole.mean()).epsilon(1e-12));
  CHECK(left.m2() == doctest::Approx(whole.m2()).epsilon(1e-12));

  auto copy = whole;
  CHECK_THROWS(copy.merge(EstimatorState({{0.1, 0.2}})));
}

TEST_CASE("histogram") {
  EstimatorState s;
  s.add(0.0);
  s.add(0.0005);
  s.add(0.0015);
  s.add(0.5);
  s.add(1.0);
  const auto& h = s.histogram();
  CHECK(h[0] == 2);
  CHECK(h[1] == 1);
  CHECK(h[500] == 1);
  CHECK(h[999] == 1);
  std::uint64_t total = 0;
  for (auto c : h) total += c;
  CHECK(total == 5);
}

TEST_CASE("interval probabilities use open intervals") {
  const Interval iv{0.25, 0.75};
  CHECK(!iv.contains(0.25));
  CHECK(iv.contains(0.5));
  CHECK(!iv.contains(0.75));

  EstimatorState s({iv});
  for (double x : {0.25, 0.3, 0.5, 0.75, 0.9}) s.add(x);
  CHECK(s.interval_counts()[0] == 2);
  CHECK(s.interval_probability(0) == doctest::Approx(0.4));
  CHECK_THROWS(s.interval_probability(1));
}

TEST_CASE("quantile sketch rank error") {
  const auto v = draws(4, 400'000);
  QuantileSketch sketch;
  for (double x : v) sketch.insert(x);
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());

  CHECK(sketch.count() == v.size());
  CHECK(sketch.rank_error_bound() <= v.size() / 1000);
  for (double q : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99}) {
    const double est = sketch.quantile(q);
    const double true_rank = static_cast<double>(exact_rank(sorted, est));
    CAPTURE(q);
    CHECK(std::fabs(true_rank - q * v.size()) <= 1e-3 * v.size());
  }
  for (double probe : {0.3, 0.5, 0.6, 0.8}) {
    const double diff = static_cast<double>(sketch.rank(probe)) - static_cast<double>(exact_rank(sorted, probe));
    CHECK(std::fabs(diff) <= static_cast<double>(sketch.rank_error_bound()) + 1);
  }
}

TEST_CASE("quantile sketch is exact below capacity") {
  QuantileSketch sketch;
  for (int i = 100; i >= 1; --i) sketch.insert(i);
  CHECK(sketch.rank_error_bound() == 0);
  CHECK(sketch.quantile(0.5) == 50);
  CHECK(sketch.quantile(0.0) == 1);
  CHECK(sketch.quantile(1.0) == 100);
  CHECK(sketch.rank(42.5) == 42);
}

TEST_CASE("merged sketches keep the rank bound and are deterministic") {
  const auto v = draws(5, 200'000);
  std::vector<double> sorted = v;
  std::sort(sorted.begin(), sorted.end());

  auto build = [&] {
    QuantileSketch merged;
    for (std::size_t b = 0; b < 20; ++b) {
      QuantileSketch part;
      for (std::size_t i = b * 10'000; i < (b + 1) * 10'000; ++i) part.insert(v[i]);
      merged.merge(part);
    }
    return merged;
  };
  const auto a = build();
  const auto b = build();
  CHECK(a.count() == v.size());
  for (double q : {0.05, 0.5, 0.95}) {
    CHECK(a.quantile(q) == b.quantile(q));
    const double true_rank = static_cast<double>(exact_rank(sorted, a.quantile(q)));
    CHECK(std::fabs(true_rank - q * v.size()) <= 1e-3 * v.size());
  }
}

TEST_CASE("JSON form") {
  EstimatorState s({{0.4, 0.6}});
  for (double x : {0.1, 0.5, 0.55, 0.9}) s.add(x);
  const auto j = s.to_json();
  CHECK(j["count"] == 4);
  CHECK(j["mean"].get<double>() == doctest::Approx(0.5125));
  CHECK(j.contains("sd"));
  CHECK(j.contains("median"));
  CHECK(j["histogram"].size() == EstimatorState::kBins);
  REQUIRE(j["intervals"].size() == 1);
  CHECK(j["intervals"][0]["lo"] == 0.4);
  CHECK(j["intervals"][0]["probability"] == 0.5);
}
