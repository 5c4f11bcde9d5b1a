#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "doctest.h"
#include "gmratio/error.hpp"
#include "gmratio/special_fns.hpp"

using namespace gmratio;

namespace {

// Reference values from mpmath at 30 digits.
struct Point {
  double z;
  double value;
};

constexpr Point kLogGamma[] = {
    {0.001, 6.9071788853838536825},   {0.1, 2.2527126517342059599},     {0.5, 0.57236494292470008707},
    {0.9, 0.066376239734742971189},   {1.5, -0.12078223763524522235},   {1.9, -0.038984275923083330039},
    {2.5, 0.28468287047291915963},    {3.7, 1.4280723266653879219},     {9.99, 12.77931521435019288},
    {10, 12.801827480081469611},      {47.3, 134.10538214034745469},    {170.6, 704.51803712799877179},
    {1000, 5905.2204232091812118},    {12345.6, 103959.18506616845558}, {1000000, 12815504.56914761166},
};

constexpr Point kDigamma[] = {
    {0.01, -100.5608854578686745},   {0.3, -3.502524222200132989}, {1.5, 0.036489973978576520559},
    {7.25, 1.9104535268837360284},   {100, 4.6001618527380874002}, {1000000, 13.815510057964190771},
};

}  // namespace

TEST_CASE("log_gamma matches high-precision values") {
  for (const auto& p : kLogGamma) {
    CAPTURE(p.z);
    CHECK(std::fabs(log_gamma(p.z) - p.value) <= 1e-13 * std::fabs(p.value));
  }
}

TEST_CASE("log_gamma examples") {
  CHECK(std::fabs(log_gamma(1.0)) <= 1e-15);
  CHECK(std::fabs(log_gamma(2.0)) <= 1e-15);
  CHECK(log_gamma(0.5) == doctest::Approx(std::log(std::numbers::pi) / 2).epsilon(1e-14));

  // 9! by integer multiplication
  std::int64_t factorial = 1;
  for (int i = 2; i <= 9; ++i) factorial *= i;
  CHECK(log_gamma(10.0) == doctest::Approx(std::log(static_cast<double>(factorial))).epsilon(1e-14));
}

TEST_CASE("log_gamma agrees with std::lgamma") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> expo(-3.0, 6.0);
  for (int i = 0; i < 2000; ++i) {
    const double z = std::pow(10.0, expo(gen));
    CAPTURE(z);
    CHECK(log_gamma(z) == doctest::Approx(std::lgamma(z)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("log_gamma recurrence") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> dist(0.5, 50.0);
  for (int i = 0; i < 1000; ++i) {
    const double z = dist(gen);
    const double lhs = log_gamma(z + 1.0);
    CAPTURE(z);
    CHECK(std::fabs(lhs - log_gamma(z) - std::log(z)) <= 1e-12 * std::max(1.0, std::fabs(lhs)));
  }
}

TEST_CASE("gamma(1/2) squared is pi") {
  const double g = std::exp(log_gamma(0.5));
  CHECK(std::fabs(g * g - std::numbers::pi) <= 1e-12 * std::numbers::pi);
}

TEST_CASE("digamma matches high-precision values") {
  for (const auto& p : kDigamma) {
    CAPTURE(p.z);
    CHECK(std::fabs(digamma(p.z) - p.value) <= 1e-10);
  }
}

TEST_CASE("digamma examples") {
  CHECK(std::fabs(digamma(1.0) + constants::euler_gamma) <= 1e-10);
  CHECK(std::fabs(digamma(2.0) - (1.0 - constants::euler_gamma)) <= 1e-10);
  CHECK(std::fabs(digamma(0.5) + constants::euler_gamma + 2.0 * std::numbers::ln2) <= 1e-10);

  const double h = 1e-5;
  const double central = (log_gamma(0.5 + h) - log_gamma(0.5 - h)) / (2 * h);
  CHECK(std::fabs(digamma(0.5) - central) <= 1e-8);
}

TEST_CASE("digamma recurrence") {
  std::mt19937_64 gen(2);
  std::uniform_real_distribution<double> dist(0.01, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const double z = dist(gen);
    CAPTURE(z);
    CHECK(std::fabs(digamma(z + 1.0) - digamma(z) - 1.0 / z) <= 1e-10);
  }
}

TEST_CASE("digamma is the derivative of log_gamma") {
  const double h = 1e-5;
  for (double z = 0.5; z <= 100.0; z *= 1.3) {
    const double fd = (log_gamma(z + h) - log_gamma(z - h)) / (2 * h);
    CAPTURE(z);
    CHECK(std::fabs(digamma(z) - fd) <= 1e-6);
  }
}

TEST_CASE("stirling remainder") {
  // 1/(12z) correction leaves a positive remainder ~ 1/(288 z²).
  CHECK(stirling_remainder(1.0) == doctest::Approx(0.00101927823313312).epsilon(1e-9));
  CHECK(stirling_remainder(1.0) ==
        doctest::Approx(std::exp(1.0) / std::sqrt(2 * std::numbers::pi) / (13.0 / 12.0) - 1.0).epsilon(1e-12));
  CHECK(stirling_remainder(10.0) == doctest::Approx(3.17611230415662e-5).epsilon(1e-7));
  CHECK(stirling_remainder(100.0) == doctest::Approx(3.44251802306594e-7).epsilon(1e-6));
  CHECK(stirling_remainder(1000.0) == doctest::Approx(3.46925156207690e-9).epsilon(1e-4));
  CHECK(std::fabs(stirling_remainder(10.0)) <= 1e-3);
  CHECK(std::fabs(stirling_remainder(100.0)) <= 1e-5);

  for (double z = 10.0; z <= 1e4; z *= 1.5) {
    CAPTURE(z);
    CHECK(std::fabs(stirling_remainder(z)) * z * z <= 0.01);
  }
}

TEST_CASE("constants") {
  CHECK(exp_neg_gamma() == std::exp(-constants::euler_gamma));
  CHECK(exp_neg_gamma() == doctest::Approx(0.561459483566885).epsilon(1e-14));
  CHECK(euclidean_center() == doctest::Approx(std::sqrt(2.0) * std::exp(digamma(0.5) / 2)).epsilon(1e-15));
  CHECK(euclidean_center() == doctest::Approx(0.529839354694838).epsilon(1e-12));

  const auto e = evaluate_gamma(3.5);
  CHECK(e.z == 3.5);
  CHECK(e.log_gamma == log_gamma(3.5));
  CHECK(e.digamma == digamma(3.5));
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
  CHECK_THROWS_AS(log_gamma(std::nan("")), DomainError);
  CHECK_THROWS_AS(log_gamma(INFINITY), DomainError);
  CHECK_THROWS_AS(digamma(0.0), DomainError);
  CHECK_THROWS_AS(digamma(-2.0), DomainError);
  CHECK_THROWS_AS(stirling_remainder(0.5), DomainError);
}
