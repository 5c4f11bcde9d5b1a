#include "gmratio/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "gmratio/error.hpp"

namespace gmratio {

QuantileSketch::QuantileSketch(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ < 2) throw DomainError("quantile sketch capacity must be at least 2");
  levels_.emplace_back();
  offsets_.push_back(0);
}

void QuantileSketch::insert(double value) {
  levels_[0].push_back(value);
  ++count_;
  if (levels_[0].size() >= capacity_) compact(0);
}

void QuantileSketch::compact(std::size_t level) {
  if (level + 1 == levels_.size()) {
    levels_.emplace_back();
    offsets_.push_back(0);
  }
  auto& items = levels_[level];
  std::sort(items.begin(), items.end());
  // An odd leftover stays behind so total weight is preserved exactly.
  const std::size_t paired = items.size() - items.size() % 2;
  auto& next = levels_[level + 1];
  for (std::size_t i = offsets_[level]; i < paired; i += 2) next.push_back(items[i]);
  offsets_[level] ^= 1u;
  if (paired < items.size()) {
    const double leftover = items.back();
    items.assign(1, leftover);
  } else {
    items.clear();
  }
  error_bound_ += std::uint64_t{1} << level;
  if (levels_[level + 1].size() >= capacity_) compact(level + 1);
}

void QuantileSketch::merge(const QuantileSketch& other) {
  while (levels_.size() < other.levels_.size()) {
    levels_.emplace_back();
    offsets_.push_back(0);
  }
  for (std::size_t h = 0; h < other.levels_.size(); ++h) {
    levels_[h].insert(levels_[h].end(), other.levels_[h].begin(), other.levels_[h].end());
  }
  count_ += other.count_;
  error_bound_ += other.error_bound_;
  for (std::size_t h = 0; h < levels_.size(); ++h) {
    if (levels_[h].size() >= capacity_) compact(h);
  }
}

double QuantileSketch::quantile(double q) const {
  if (count_ == 0) throw DomainError("quantile of an empty sketch");
  if (!(q >= 0.0 && q <= 1.0)) throw DomainError("quantile level must lie in [0, 1]");
  std::vector<std::pair<double, std::uint64_t>> weighted;
  for (std::size_t h = 0; h < levels_.size(); ++h) {
    for (double v : levels_[h]) weighted.emplace_back(v, std::uint64_t{1} << h);
  }
  std::sort(weighted.begin(), weighted.end());
  const double target = std::max(1.0, std::ceil(q * static_cast<double>(count_)));
  std::uint64_t cumulative = 0;
  for (const auto& [value, weight] : weighted) {
    cumulative += weight;
    if (static_cast<double>(cumulative) >= target) return value;
  }
  return weighted.back().first;
}

std::uint64_t QuantileSketch::rank(double value) const {
  std::uint64_t r = 0;
  for (std::size_t h = 0; h < levels_.size(); ++h) {
    for (double v : levels_[h]) {
      if (v <= value) r += std::uint64_t{1} << h;
    }
  }
  return r;
}

EstimatorState::EstimatorState(std::vector<Interval> intervals)
    : intervals_(std::move(intervals)), interval_counts_(intervals_.size(), 0) {}

void EstimatorState::add(double value) {
  ++count_;
  const double delta = value - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_ += delta * (value - mean_);
  const auto bin = static_cast<std::size_t>(std::clamp(value * static_cast<double>(kBins), 0.0, kBins - 1.0));
  ++histogram_[bin];
  sketch_.insert(value);
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    if (intervals_[i].contains(value)) ++interval_counts_[i];
  }
}

void EstimatorState::merge(const EstimatorState& other) {
  if (other.intervals_.size() != intervals_.size()) {
    throw DomainError("cannot merge estimator states tracking different intervals");
  }
  if (other.count_ > 0) {
    const double na = static_cast<double>(count_);
    const double nb = static_cast<double>(other.count_);
    const double n = na + nb;
    const double delta = other.mean_ - mean_;
    mean_ += delta * nb / n;
    m2_ += other.m2_ + delta * delta * na * nb / n;
    count_ += other.count_;
  }
  for (std::size_t b = 0; b < kBins; ++b) histogram_[b] += other.histogram_[b];
  sketch_.merge(other.sketch_);
  for (std::size_t i = 0; i < intervals_.size(); ++i) interval_counts_[i] += other.interval_counts_[i];
}

double EstimatorState::variance() const noexcept {
  return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
}

double EstimatorState::standard_deviation() const noexcept { return std::sqrt(variance()); }

double EstimatorState::interval_probability(std::size_t i) const {
  if (i >= intervals_.size()) throw std::out_of_range("interval index");
  return count_ == 0 ? 0.0 : static_cast<double>(interval_counts_[i]) / static_cast<double>(count_);
}

nlohmann::json EstimatorState::to_json() const {
  nlohmann::json j;
  j["count"] = count_;
  j["mean"] = mean_;
  j["sd"] = standard_deviation();
  j["median"] = count_ > 0 ? nlohmann::json(median()) : nlohmann::json(nullptr);
  auto intervals = nlohmann::json::array();
  for (std::size_t i = 0; i < intervals_.size(); ++i) {
    intervals.push_back({{"lo", intervals_[i].lo}, {"hi", intervals_[i].hi}, {"probability", interval_probability(i)}});
  }
  j["intervals"] = std::move(intervals);
  j["histogram"] = histogram_;
  return j;
}

}  // namespace gmratio
