#pragma once

#include <numbers>

namespace gmratio {

/// Natural log of the gamma function for z > 0.
///
/// Relative error is below 1e-13 on [1e-3, 1e6] (measured against
/// max(1, |ln Γ(z)|) near the zeros at z = 1 and z = 2, where a local
/// series keeps the error relative to the true value instead).
/// Throws DomainError for non-positive or non-finite z.
double log_gamma(double z);

/// Logarithmic derivative Γ'(z)/Γ(z) for z > 0. Absolute error below
/// 1e-10 on [1e-2, 1e6].
double digamma(double z);

/// Γ(z) / (e^{-z} z^{z-1/2} √(2π) (1 + 1/(12z))) − 1, evaluated in log space.
/// Requires z ≥ 1. Decays like 1/(288 z²).
double stirling_remainder(double z);

struct GammaEval {
  double z;
  double log_gamma;
  double digamma;
};

GammaEval evaluate_gamma(double z);

namespace constants {

inline constexpr double euler_gamma = std::numbers::egamma;

}  // namespace constants

/// e^{-γ}: the concentration center of the GM/AM ratio with equal weights.
double exp_neg_gamma();

/// √2·exp(ψ(1/2)/2): the concentration center of √n ∏|y_i|^{1/n} on the
/// Euclidean sphere.
double euclidean_center();

}  // namespace gmratio
