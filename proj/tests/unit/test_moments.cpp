#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gmratio/error.hpp"
#include "gmratio/moments.hpp"
#include "gmratio/sampling.hpp"
#include "gmratio/special_fns.hpp"

using namespace gmratio;

namespace {

WeightSequence random_weights(std::mt19937_64& gen, int n, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> a(n);
  double total = 0.0;
  for (auto& x : a) total += (x = dist(gen));
  for (auto& x : a) x *= n / total;
  std::sort(a.begin(), a.end(), std::greater<>());
  return WeightSequence(a);
}

}  // namespace

TEST_CASE("weighted moment, n = 2") {
  const auto r = exact_moment_weighted(equal_weights(2), 1.0);
  CHECK(std::fabs(std::exp(r.log_moment) - 1.0 / 6.0) <= 1e-12);
  REQUIRE(r.normalized_root);
  CHECK(*r.normalized_root == doctest::Approx(2.0 * std::sqrt(1.0 / 6.0)).epsilon(1e-13));
}

TEST_CASE("weighted moment against high-precision values") {
  // mpmath, 30 digits
  CHECK(exact_moment_weighted(equal_weights(3), 0.5).log_moment == doctest::Approx(-2.12293610318823).epsilon(1e-13));
  CHECK(exact_moment_weighted(two_level_weights(10, 3), 0.7).log_moment ==
        doctest::Approx(-20.292087887114090404).epsilon(1e-12));
  CHECK(exact_moment_weighted(two_level_weights(10, 3), -0.25).log_moment ==
        doctest::Approx(9.8662482103425420691).epsilon(1e-12));
  CHECK(exact_moment_weighted(equal_weights(100'000), 0.01).log_moment ==
        doctest::Approx(-12086.934700573491931).epsilon(1e-10));
}

TEST_CASE("moments at s = 0") {
  for (const auto& w : {equal_weights(4), two_level_weights(20, 3)}) {
    const auto r = exact_moment_weighted(w, 0.0);
    CHECK(r.log_moment == 0.0);
    CHECK(!r.normalized_root);
    CHECK(std::fabs(exact_moment_weighted(w, 1e-9).log_moment) <= 1e-6);
  }
  const auto e = exact_moment_euclidean(9, 0.0);
  CHECK(e.log_moment == 0.0);
  CHECK(!e.normalized_root);
}

TEST_CASE("weighted moment runs overload") {
  const auto w = two_level_weights(1000, 4);
  const auto runs = w.runs();
  CHECK(exact_moment_weighted(runs, 0.3).log_moment ==
        doctest::Approx(exact_moment_weighted(w, 0.3).log_moment).epsilon(1e-13));
}

TEST_CASE("weighted moment precondition") {
  const auto w = two_level_weights(10, 4);  // a_max = 4
  CHECK_NOTHROW(exact_moment_weighted(w, -0.24));
  CHECK_THROWS_AS(exact_moment_weighted(w, -0.25), DomainError);
  try {
    exact_moment_weighted(w, -0.3);
    FAIL("expected a domain error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("index 1") != std::string::npos);
  }
  CHECK_THROWS_AS(exact_moment_weighted(WeightSequence({1, -1}), 0.5), DomainError);
  CHECK_THROWS_AS(exact_moment_weighted(WeightSequence({3, 1}), 0.5), DomainError);
}

TEST_CASE("Euclidean moment") {
  CHECK(std::fabs(std::exp(exact_moment_euclidean(2, 2.0).log_moment) - 0.125) <= 1e-12);
  CHECK(std::exp(exact_moment_euclidean(4, 2.0).log_moment) == doctest::Approx(1.0 / 1920.0).epsilon(1e-13));
  CHECK(exact_moment_euclidean(7, 0.3).log_moment == doctest::Approx(-3.0502054316308260552).epsilon(1e-13));

  const auto r = exact_moment_euclidean(4, 2.0);
  REQUIRE(r.normalized_root);
  CHECK(*r.normalized_root == doctest::Approx(2.0 * std::exp(r.log_moment / 8.0)).epsilon(1e-14));

  CHECK_THROWS_AS(exact_moment_euclidean(4, -1.0), DomainError);
  CHECK_THROWS_AS(exact_moment_euclidean(4, -2.0), DomainError);
  CHECK_THROWS_AS(exact_moment_euclidean(0, 1.0), DomainError);
}

TEST_CASE("sphere area") {
  CHECK(log_sphere_area_weighted(equal_weights(2)) == doctest::Approx(std::log(4 * std::sqrt(2.0))).epsilon(1e-14));
  CHECK(log_sphere_area_weighted(equal_weights(3)) == doctest::Approx(std::log(4 * std::sqrt(3.0))).epsilon(1e-14));
  CHECK_THROWS_AS(log_sphere_area_weighted(WeightSequence({2, 2})), DomainError);
}

TEST_CASE("Monte Carlo agrees with the exact moment") {
  SUBCASE("equal weights, n = 3, s = 0.5") {
    SeededStream rng(42, 0);
    const auto est = empirical_moment(equal_weights(3), 0.5, 10'000'000, rng);
    const double exact = std::exp(exact_moment_weighted(equal_weights(3), 0.5).log_moment);
    CHECK(std::fabs(est.estimate - exact) <= 3.0 * est.standard_error);
  }
  SUBCASE("Euclidean, n = 4, s = 2") {
    SeededStream rng(42, 1);
    const auto est = empirical_moment_euclidean(4, 2.0, 10'000'000, rng);
    CHECK(std::fabs(est.estimate - 1.0 / 1920.0) <= 3.0 * est.standard_error);
  }
  SUBCASE("random weights and exponents") {
    std::mt19937_64 gen(5);
    std::uniform_int_distribution<int> dim(2, 10);
    std::uniform_real_distribution<double> exponent(-0.3, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
      // Weights in [0.75, 1.25] before normalization keep 1 + 2s·a_max > 0,
      // so the estimator has finite variance.
      const auto w = random_weights(gen, dim(gen), 0.75, 1.25);
      const double s = exponent(gen);
      SeededStream rng(7, trial);
      const auto est = empirical_moment(w, s, 1'000'000, rng);
      const double exact = std::exp(exact_moment_weighted(w, s).log_moment);
      CAPTURE(w.n());
      CAPTURE(s);
      CHECK(std::fabs(est.estimate - exact) <= 4.0 * est.standard_error);
    }
  }
}

TEST_CASE("normalized root approaches e^-gamma") {
  for (double s : {0.01, -0.01}) {
    const auto r = exact_moment_weighted(equal_weights(100'000), s);
    REQUIRE(r.normalized_root);
    CHECK(std::fabs(*r.normalized_root / 0.561459 - 1.0) <= 0.02);
  }
}

TEST_CASE("weighted moment is permutation invariant") {
  std::mt19937_64 gen(9);
  const auto w = random_weights(gen, 12, 0.2, 3.0);
  std::vector<double> shuffled(w.values().begin(), w.values().end());
  const double reference = exact_moment_weighted(w, 0.4).log_moment;
  for (int i = 0; i < 10; ++i) {
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    CHECK(exact_moment_weighted(WeightSequence(shuffled), 0.4).log_moment ==
          doctest::Approx(reference).epsilon(1e-13));
  }
}

TEST_CASE("log moment is convex in s") {
  std::mt19937_64 gen(10);
  for (const auto& w : {equal_weights(5), two_level_weights(50, 4), random_weights(gen, 8, 0.5, 2.0)}) {
    const double lo = -0.9 / w.max();
    const double h = 0.01;
    for (double s = lo + h; s + h < 3.0; s += h) {
      const double second = exact_moment_weighted(w, s + h).log_moment - 2 * exact_moment_weighted(w, s).log_moment +
                            exact_moment_weighted(w, s - h).log_moment;
      CAPTURE(s);
      CHECK(second >= -1e-9);
    }
  }
}

TEST_CASE("moment bound from GM <= AM") {
  // n ∏|x_i|^{α_i} ≤ 1 on the sphere gives E ≤ n^{-ns} for s > 0.
  for (const auto& w : {equal_weights(2), equal_weights(50), two_level_weights(100, 3)}) {
    const double n = static_cast<double>(w.n());
    for (double s : {0.01, 0.3, 1.0, 4.0}) {
      CHECK(exact_moment_weighted(w, s).log_moment <= -n * s * std::log(n) + 1e-9);
    }
  }
}
