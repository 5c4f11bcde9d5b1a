#include "gmratio/special_fns.hpp"

#include <array>
#include <cmath>
#include <sstream>

#include "gmratio/error.hpp"

namespace gmratio {

namespace {

constexpr double kHalfLogTwoPi = 0.91893853320467274178;

// Below this argument both functions shift upward with the recurrence.
constexpr double kAsymptoticThreshold = 10.0;

// B_{2k} / (2k (2k-1)), k = 1..8.
constexpr std::array<double, 8> kStirlingCoefficients = {
    1.0 / 12.0,         -1.0 / 360.0,       1.0 / 1260.0,  -1.0 / 1680.0,
    1.0 / 1188.0,       -691.0 / 360360.0,  1.0 / 156.0,   -3617.0 / 122400.0,
};

// B_{2k} / (2k), k = 1..8.
constexpr std::array<double, 8> kDigammaCoefficients = {
    1.0 / 12.0,        -1.0 / 120.0,      1.0 / 252.0, -1.0 / 240.0,
    1.0 / 132.0,       -691.0 / 32760.0,  1.0 / 12.0,  -3617.0 / 8160.0,
};

// ζ(k), k = 2..33.
constexpr std::array<double, 32> kZeta = {
    1.6449340668482264365, 1.2020569031595942854, 1.0823232337111381915,
    1.0369277551433699263, 1.0173430619844491397, 1.0083492773819228268,
    1.0040773561979443394, 1.0020083928260822144, 1.0009945751278180853,
    1.0004941886041194646, 1.0002460865533080483, 1.0001227133475784891,
    1.0000612481350587048, 1.0000305882363070205, 1.0000152822594086519,
    1.0000076371976378998, 1.0000038172932649998, 1.0000019082127165539,
    1.0000009539620338728, 1.0000004769329867878, 1.0000002384505027277,
    1.0000001192199259653, 1.0000000596081890513, 1.0000000298035035147,
    1.0000000149015548284, 1.0000000074507117898, 1.0000000037253340248,
    1.0000000018626597235, 1.0000000009313274324, 1.0000000004656629065,
    1.0000000002328311834, 1.0000000001164155017,
};

// Radius of the Taylor expansion around z = 1 and z = 2.
constexpr double kLocalSeriesRadius = 0.25;

void require_positive(double z, const char* fn) {
  if (!(z > 0.0) || !std::isfinite(z)) {
    std::ostringstream os;
    os << fn << ": argument must be positive and finite, got " << z;
    throw DomainError(os.str());
  }
}

// Σ B_{2k} / (2k (2k-1) z^{2k-1}).
double stirling_series(double z) {
  const double inv = 1.0 / z;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (auto it = kStirlingCoefficients.rbegin(); it != kStirlingCoefficients.rend(); ++it) {
    series = series * inv2 + *it;
  }
  return series * inv;
}

double log_gamma_asymptotic(double z) {
  return (z - 0.5) * std::log(z) - z + kHalfLogTwoPi + stirling_series(z);
}

// ln Γ(1 + x) = −γx + Σ_{k≥2} (−1)^k ζ(k) x^k / k, |x| ≤ kLocalSeriesRadius.
double log_gamma_one_plus(double x) {
  double sum = 0.0;
  for (std::size_t i = kZeta.size(); i-- > 0;) {
    const double k = static_cast<double>(i + 2);
    const double sign = ((i + 2) % 2 == 0) ? 1.0 : -1.0;
    sum = sum * x + sign * kZeta[i] / k;
  }
  return x * (-constants::euler_gamma + x * sum);
}

}  // namespace

double log_gamma(double z) {
  require_positive(z, "log_gamma");
  if (std::fabs(z - 1.0) <= kLocalSeriesRadius) {
    return log_gamma_one_plus(z - 1.0);
  }
  if (std::fabs(z - 2.0) <= kLocalSeriesRadius) {
    const double x = z - 2.0;
    return log_gamma_one_plus(x) + std::log1p(x);
  }
  if (z >= kAsymptoticThreshold) {
    return log_gamma_asymptotic(z);
  }
  double shifted = z;
  double product = 1.0;
  while (shifted < kAsymptoticThreshold) {
    product *= shifted;
    shifted += 1.0;
  }
  return log_gamma_asymptotic(shifted) - std::log(product);
}

double digamma(double z) {
  require_positive(z, "digamma");
  double shift = 0.0;
  while (z < kAsymptoticThreshold) {
    shift -= 1.0 / z;
    z += 1.0;
  }
  const double inv2 = 1.0 / (z * z);
  double series = 0.0;
  for (auto it = kDigammaCoefficients.rbegin(); it != kDigammaCoefficients.rend(); ++it) {
    series = series * inv2 + *it;
  }
  return shift + std::log(z) - 0.5 / z - series * inv2;
}

double stirling_remainder(double z) {
  if (!(z >= 1.0) || !std::isfinite(z)) {
    std::ostringstream os;
    os << "stirling_remainder: argument must be finite and >= 1, got " << z;
    throw DomainError(os.str());
  }
  const double correction = std::log1p(1.0 / (12.0 * z));
  if (z >= kAsymptoticThreshold) {
    // The leading terms cancel exactly against the series representation.
    return std::expm1(stirling_series(z) - correction);
  }
  const double leading = -z + (z - 0.5) * std::log(z) + kHalfLogTwoPi + correction;
  return std::expm1(log_gamma(z) - leading);
}

GammaEval evaluate_gamma(double z) { return {z, log_gamma(z), digamma(z)}; }

double exp_neg_gamma() { return std::exp(-constants::euler_gamma); }

double euclidean_center() { return std::numbers::sqrt2 * std::exp(digamma(0.5) / 2.0); }

}  // namespace gmratio
