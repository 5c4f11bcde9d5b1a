#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gmratio/weights.hpp"

namespace gmratio {

/// Chebyshev concentration query: the weight family, the polynomial
/// probability exponent k > 0 and the relative width ε ∈ (0, 1).
///
/// Generated families are re-instantiated at every dimension the optimizers
/// inspect; a Custom sequence only exists at its own n.
struct BoundQuery {
  WeightSequence weights;
  double k;
  double epsilon;
};

void require_valid(const BoundQuery& q);

/// The three factors of n·t^{1/(sn)}:
///   (2n^k)^{1/(sn)} · [n (Γ(n)/Γ((1+s)n))^{1/(sn)}] · (∏ Γ(1+a_i s)/a_i^{a_i s})^{1/(sn)}.
struct FactorDecomposition {
  double prefactor;
  double gamma_ratio_factor;  // includes the leading n
  double product_factor;
  // e/(1+s)^{1/s}: asymptotic upper bound of gamma_ratio_factor for s > 0.
  double gamma_ratio_bound;

  double product() const noexcept { return prefactor * gamma_ratio_factor * product_factor; }
};

/// ln t with t = 2 n^k E(∏|x_i|^{a_i s}). By Markov's inequality the event
/// {∏|x_i|^{a_i s} ≥ t} has probability at most 1/(2n^k).
double chebyshev_level(const WeightSequence& w, double s, double k);

FactorDecomposition factor_decomposition(const WeightSequence& w, double s, double k);

/// n·t^{1/(sn)} for the family member described by `runs`: an upper bound for
/// the GM/AM ratio when s > 0, a lower bound when s < 0, each failing with
/// probability at most 1/(2n^k).
double ratio_threshold(std::span<const WeightRun> runs, double s, double k);

/// δ with (1+δ)³ = 1+ε.
double delta_for_epsilon(double epsilon);

/// e/(1+s)^{1/s}.
double gamma_ratio_bound(double s);

struct TailBound {
  double s;
  std::int64_t n_min;
  double threshold;  // ratio threshold at n_min
};

/// Dimensions inspected by the optimizers: 2^4, 2^5, …, 2^24, or the single
/// dimension of a Custom sequence.
std::vector<std::int64_t> dimension_grid(const WeightSequence& w);

/// Smallest s₀ > 0 (from a logarithmic grid refined by golden section) with
/// e/(1+s₀)^{1/s₀} < 1+δ such that n·t^{1/(s₀n)} < (1+ε)e^{-γ} on the grid
/// from n_min on. Throws OptimizationFailure with the best threshold seen.
TailBound optimize_upper(const BoundQuery& q);

/// Mirror image with s ∈ (−1/a_max, 0): certifies n·t^{1/(sn)} above
/// (1−ε)·e^{-γ}·∏ a_i^{-a_i/n} on the grid from n_min on.
TailBound optimize_lower(const BoundQuery& q);

struct BoundCertificate {
  std::int64_t n;
  double s_upper;
  double s_lower;
  std::int64_t n_min;
  std::int64_t n_min_upper;
  std::int64_t n_min_lower;
  double upper_threshold;
  double lower_threshold;
  double probability_floor;  // 1 − n^{-k}
  double predicted_center;
  bool theorem_matching;
};

/// Both tails at dimension n (n ≤ 0 selects max(n_min_upper, n_min_lower)).
/// P{lower < ratio < upper} ≥ 1 − 1/n^k by the union bound.
BoundCertificate certified_interval(const BoundQuery& q, std::int64_t n = 0);

/// ∏ t_i^{t_i} with 0^0 = 1, for t_i ≥ 0 and Σ t_i ≥ n.
double product_power(std::span<const double> t);
double log_product_power(std::span<const double> t);

}  // namespace gmratio
