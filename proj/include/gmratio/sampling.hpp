#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "gmratio/estimator.hpp"
#include "gmratio/rng.hpp"
#include "gmratio/weights.hpp"

namespace gmratio {

enum class SphereKind { weighted_l1, euclidean };

struct SpherePoint {
  std::vector<double> coords;
  SphereKind kind;
};

/// GM/AM ratio at one point, in [0, 1].
struct RatioSample {
  double value;
};

/// Uniform (Hausdorff) probability on {Σ a_i|x_i| = 1}.
///
/// Normalized unit exponentials are uniform on the standard simplex. Every
/// facet of the weighted sphere sits at the same distance 1/‖a‖₂ from the
/// origin, so the per-facet map u ↦ (±u_i/a_i) with independent signs
/// carries that law to normalized surface measure.
SpherePoint sample_weighted_sphere(const WeightSequence& w, SeededStream& rng);
void sample_weighted_sphere(std::span<const double> weights, SeededStream& rng, std::span<double> out);

/// Normalized standard Gaussian vector.
SpherePoint sample_euclidean_sphere(std::int64_t n, SeededStream& rng);
void sample_euclidean_sphere(SeededStream& rng, std::span<double> out);

/// n ∏|x_i|^{a_i/n} for a point on the weighted sphere; 0 if any x_i = 0.
RatioSample gm_am_ratio_weighted(std::span<const double> x, std::span<const double> weights);
RatioSample gm_am_ratio_weighted(std::span<const double> x, const WeightSequence& w);

/// √n ∏|y_i|^{1/n} for a point on the Euclidean unit sphere.
RatioSample gm_am_ratio_euclidean(std::span<const double> y);

/// ∏|x_i|^{α_i} / Σ α_i|x_i| with α_i = a_i/n, for any x ≠ 0. Homogeneous
/// of degree zero; agrees with gm_am_ratio_weighted on the sphere.
RatioSample gm_am_ratio_homogeneous(std::span<const double> x, std::span<const double> weights);

struct MomentEstimate {
  double estimate;
  double standard_error;
  std::uint64_t samples;
};

/// Sample mean of ∏|x_i|^{a_i s} over fresh points. s = 0 returns exactly 1.
MomentEstimate empirical_moment(const WeightSequence& w, double s, std::uint64_t samples, SeededStream& rng);

/// Sample mean of ∏|y_i|^s on the Euclidean sphere.
MomentEstimate empirical_moment_euclidean(std::int64_t n, double s, std::uint64_t samples, SeededStream& rng);

struct EuclideanSphere {
  std::int64_t n;
};

using Sphere = std::variant<WeightSequence, EuclideanSphere>;

std::int64_t dimension(const Sphere& sphere);

struct Simulation {
  Sphere sphere;
  std::uint64_t samples;
  std::uint64_t seed;
  std::vector<Interval> intervals;
  std::uint64_t batch_size = 8192;
  unsigned threads = 0;  // 0: hardware concurrency
};

struct SimulationOutcome {
  EstimatorState state;
  std::uint64_t batches_completed;
  bool complete;
  std::string error;
};

/// Streams `samples` ratio values through an EstimatorState. Batch b draws
/// from SeededStream(seed, b) and batches merge in index order, so the result
/// depends only on (seed, batch_size), not on the thread count. A failing
/// batch stops the run; the returned state holds every batch before it.
SimulationOutcome run_experiment(const Simulation& sim);

}  // namespace gmratio
