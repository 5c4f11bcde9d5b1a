#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "gmratio/weights.hpp"

namespace gmratio {

/// ln E(∏|x_i|^{a_i s}) under the uniform probability on the weighted ℓ1
/// sphere (or ln E(∏|y_i|^s) on the Euclidean sphere).
///
/// `normalized_root` is n·E^{1/(sn)} (weighted) or √n·E^{1/(sn)} (Euclidean),
/// the quantity compared against the concentration center. It is empty at
/// s = 0, where the exponent is 0/0.
struct MomentResult {
  double log_moment;
  std::optional<double> normalized_root;
};

/// Closed form
///   E = Γ(n)/Γ((1+s)n) · ∏ Γ(1 + a_i s) / a_i^{a_i s},
/// summed in log space. Requires 1 + s·a_max > 0 and positive weights
/// summing to n.
MomentResult exact_moment_weighted(const WeightSequence& w, double s);
MomentResult exact_moment_weighted(std::span<const WeightRun> runs, double s);

/// E = (Γ((1+s)/2)/Γ(1/2))^n · Γ(n/2)/Γ((1+s)n/2). Requires s > −1.
MomentResult exact_moment_euclidean(std::int64_t n, double s);

/// ln of the (n−1)-dimensional area 2^n ‖a‖₂ / (Γ(n) ∏ a_i).
double log_sphere_area_weighted(const WeightSequence& w);

/// ln Γ(n) − ln Γ((1+s)n).
double log_gamma_ratio(double n, double s);

/// Σ_i [ln Γ(1 + a_i s) − a_i s ln a_i].
double log_weight_product(std::span<const WeightRun> runs, double s);

/// Throws DomainError unless 1 + s·a_max > 0.
void require_moment_exponent(std::span<const WeightRun> runs, double s);

}  // namespace gmratio
