#pragma once

#include <cstdint>
#include <random>

namespace gmratio {

/// Reproducible random stream identified by (seed, stream_index). Distinct
/// indices give independent substreams for parallel batches.
class SeededStream {
 public:
  using engine_type = std::mt19937_64;

  SeededStream(std::uint64_t seed, std::uint64_t stream_index);

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_index() const noexcept { return stream_index_; }

  // Unit-rate exponential.
  double exponential() { return exponential_(engine_); }
  double normal() { return normal_(engine_); }
  // ±1 with equal probability.
  double sign();

  engine_type& engine() noexcept { return engine_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_index_;
  engine_type engine_;
  std::exponential_distribution<double> exponential_{1.0};
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uint64_t sign_bits_ = 0;
  int sign_bits_left_ = 0;
};

}  // namespace gmratio
