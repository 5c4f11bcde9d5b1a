#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"

namespace gmratio {

/// Deterministic mergeable quantile sketch built from sorted compactors.
///
/// Level h holds items of weight 2^h. A full level is sorted and every other
/// item (alternating the starting offset between compactions) is promoted.
/// Each compaction at level h moves the rank of any query by at most 2^h, so
/// the rank error is bounded by levels·N/capacity.
class QuantileSketch {
 public:
  static constexpr std::size_t kDefaultCapacity = 16384;

  explicit QuantileSketch(std::size_t capacity = kDefaultCapacity);

  void insert(double value);
  void merge(const QuantileSketch& other);

  std::uint64_t count() const noexcept { return count_; }
  std::size_t capacity() const noexcept { return capacity_; }

  /// Smallest retained value whose estimated rank reaches q·count.
  double quantile(double q) const;

  /// Estimated number of inserted values ≤ value.
  std::uint64_t rank(double value) const;

  /// Worst-case rank error implied by the compactions performed so far.
  std::uint64_t rank_error_bound() const noexcept { return error_bound_; }

 private:
  void compact(std::size_t level);

  std::size_t capacity_;
  std::vector<std::vector<double>> levels_;
  std::vector<std::uint8_t> offsets_;
  std::uint64_t count_ = 0;
  std::uint64_t error_bound_ = 0;
};

/// Open interval (lo, hi).
struct Interval {
  double lo;
  double hi;

  bool contains(double v) const noexcept { return lo < v && v < hi; }
};

/// Streaming statistics of ratio samples in [0, 1]: Welford mean/variance,
/// a 1000-bin histogram, a quantile sketch and exact counts for a fixed set
/// of intervals. merge() combines states of disjoint streams.
class EstimatorState {
 public:
  static constexpr std::size_t kBins = 1000;

  explicit EstimatorState(std::vector<Interval> intervals = {});

  void add(double value);
  void merge(const EstimatorState& other);

  std::uint64_t count() const noexcept { return count_; }
  double mean() const noexcept { return mean_; }
  double m2() const noexcept { return m2_; }
  double variance() const noexcept;  // unbiased
  double standard_deviation() const noexcept;
  double median() const { return sketch_.quantile(0.5); }
  double quantile(double q) const { return sketch_.quantile(q); }

  const std::array<std::uint64_t, kBins>& histogram() const noexcept { return histogram_; }
  const QuantileSketch& sketch() const noexcept { return sketch_; }
  std::span<const Interval> intervals() const noexcept { return intervals_; }
  std::span<const std::uint64_t> interval_counts() const noexcept { return interval_counts_; }
  double interval_probability(std::size_t i) const;

  nlohmann::json to_json() const;

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  std::array<std::uint64_t, kBins> histogram_{};
  QuantileSketch sketch_;
  std::vector<Interval> intervals_;
  std::vector<std::uint64_t> interval_counts_;
};

}  // namespace gmratio
