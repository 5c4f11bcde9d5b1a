#include "gmratio/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "gmratio/error.hpp"
#include "gmratio/summation.hpp"

namespace gmratio {

namespace {

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) {
    std::ostringstream os;
    os << "dimension mismatch: " << a << " coordinates vs " << b << " weights";
    throw DomainError(os.str());
  }
}

void require_sample_count(std::uint64_t samples) {
  if (samples == 0) throw DomainError("sample count must be positive");
}

// Welford accumulation for moment estimates.
class MeanAccumulator {
 public:
  void add(double v) {
    ++count_;
    const double delta = v - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (v - mean_);
  }

  MomentEstimate estimate() const {
    const double n = static_cast<double>(count_);
    const double variance = count_ > 1 ? m2_ / (n - 1.0) : 0.0;
    return {mean_, std::sqrt(variance / n), count_};
  }

 private:
  std::uint64_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

// Log of a long product of positive factors without a log per factor: the
// running product is renormalized with frexp every few steps. Factors stay
// above 1e-30 on the sphere, so eight of them cannot underflow.
class LogProduct {
 public:
  void multiply(double v) {
    mantissa_ *= v;
    if (++pending_ == 8) normalize();
  }

  double log() {
    normalize();
    return std::log(mantissa_) + static_cast<double>(exponent_) * std::numbers::ln2;
  }

 private:
  void normalize() {
    int e = 0;
    mantissa_ = std::frexp(mantissa_, &e);
    exponent_ += e;
    pending_ = 0;
  }

  double mantissa_ = 1.0;
  std::int64_t exponent_ = 0;
  int pending_ = 0;
};

EstimatorState run_batch(const Simulation& sim, std::uint64_t batch, std::uint64_t samples) {
  SeededStream rng(sim.seed, batch);
  EstimatorState state(sim.intervals);
  std::vector<double> point(static_cast<std::size_t>(dimension(sim.sphere)));
  if (const auto* w = std::get_if<WeightSequence>(&sim.sphere)) {
    for (std::uint64_t i = 0; i < samples; ++i) {
      sample_weighted_sphere(w->values(), rng, point);
      state.add(gm_am_ratio_weighted(point, w->values()).value);
    }
  } else {
    for (std::uint64_t i = 0; i < samples; ++i) {
      sample_euclidean_sphere(rng, point);
      state.add(gm_am_ratio_euclidean(point).value);
    }
  }
  return state;
}

}  // namespace

void sample_weighted_sphere(std::span<const double> weights, SeededStream& rng, std::span<double> out) {
  require_same_size(out.size(), weights.size());
  for (;;) {
    CompensatedSum total;
    for (auto& e : out) {
      e = rng.exponential();
      total += e;
    }
    const double sum = total.value();
    // Σe = 0 has probability zero; redraw rather than divide by it.
    if (!(sum > 0.0) || !std::isfinite(sum)) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = rng.sign() * (out[i] / sum) / weights[i];
    return;
  }
}

SpherePoint sample_weighted_sphere(const WeightSequence& w, SeededStream& rng) {
  require_valid(w);
  SpherePoint p{std::vector<double>(w.n()), SphereKind::weighted_l1};
  sample_weighted_sphere(w.values(), rng, p.coords);
  return p;
}

void sample_euclidean_sphere(SeededStream& rng, std::span<double> out) {
  for (;;) {
    CompensatedSum squares;
    for (auto& g : out) {
      g = rng.normal();
      squares += g * g;
    }
    const double norm = std::sqrt(squares.value());
    if (!(norm > 0.0) || !std::isfinite(norm)) continue;
    for (auto& g : out) g /= norm;
    return;
  }
}

SpherePoint sample_euclidean_sphere(std::int64_t n, SeededStream& rng) {
  if (n < 2) throw DomainError("Euclidean sphere dimension must be at least 2");
  SpherePoint p{std::vector<double>(static_cast<std::size_t>(n)), SphereKind::euclidean};
  sample_euclidean_sphere(rng, p.coords);
  return p;
}

RatioSample gm_am_ratio_weighted(std::span<const double> x, std::span<const double> weights) {
  require_same_size(x.size(), weights.size());
  const double n = static_cast<double>(x.size());
  CompensatedSum log_gm;
  std::size_t i = 0;
  while (i < x.size()) {
    // Equal weights are contiguous in a non-increasing sequence.
    const double a = weights[i];
    LogProduct run;
    for (; i < x.size() && weights[i] == a; ++i) {
      if (x[i] == 0.0) return {0.0};
      run.multiply(std::fabs(x[i]));
    }
    log_gm += (a / n) * run.log();
  }
  return {std::exp(std::log(n) + log_gm.value())};
}

RatioSample gm_am_ratio_weighted(std::span<const double> x, const WeightSequence& w) {
  return gm_am_ratio_weighted(x, w.values());
}

RatioSample gm_am_ratio_euclidean(std::span<const double> y) {
  const double n = static_cast<double>(y.size());
  LogProduct product;
  for (double v : y) {
    if (v == 0.0) return {0.0};
    product.multiply(std::fabs(v));
  }
  return {std::exp(0.5 * std::log(n) + product.log() / n)};
}

RatioSample gm_am_ratio_homogeneous(std::span<const double> x, std::span<const double> weights) {
  require_same_size(x.size(), weights.size());
  const double n = static_cast<double>(x.size());
  CompensatedSum log_gm;
  CompensatedSum am;
  bool zero = false;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double alpha = weights[i] / n;
    am += alpha * std::fabs(x[i]);
    if (x[i] == 0.0) {
      zero = true;
    } else {
      log_gm += alpha * std::log(std::fabs(x[i]));
    }
  }
  if (!(am.value() > 0.0)) throw DomainError("GM/AM ratio is undefined at the origin");
  if (zero) return {0.0};
  return {std::exp(log_gm.value() - std::log(am.value()))};
}

MomentEstimate empirical_moment(const WeightSequence& w, double s, std::uint64_t samples, SeededStream& rng) {
  require_valid(w);
  require_sample_count(samples);
  if (!(1.0 + s * w.max() > 0.0) || !std::isfinite(s)) {
    std::ostringstream os;
    os << "moment exponent s=" << s << " violates 1 + s*a_max > 0";
    throw DomainError(os.str());
  }
  if (s == 0.0) return {1.0, 0.0, samples};
  MeanAccumulator acc;
  std::vector<double> x(w.n());
  const auto a = w.values();
  for (std::uint64_t k = 0; k < samples; ++k) {
    sample_weighted_sphere(a, rng, x);
    double log_value = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) log_value += a[i] * std::log(std::fabs(x[i]));
    acc.add(std::exp(s * log_value));
  }
  return acc.estimate();
}

MomentEstimate empirical_moment_euclidean(std::int64_t n, double s, std::uint64_t samples, SeededStream& rng) {
  if (n < 2) throw DomainError("Euclidean sphere dimension must be at least 2");
  require_sample_count(samples);
  if (!(s > -1.0) || !std::isfinite(s)) throw DomainError("Euclidean moment requires s > -1");
  if (s == 0.0) return {1.0, 0.0, samples};
  MeanAccumulator acc;
  std::vector<double> y(static_cast<std::size_t>(n));
  for (std::uint64_t k = 0; k < samples; ++k) {
    sample_euclidean_sphere(rng, y);
    double log_value = 0.0;
    for (double v : y) log_value += std::log(std::fabs(v));
    acc.add(std::exp(s * log_value));
  }
  return acc.estimate();
}

std::int64_t dimension(const Sphere& sphere) {
  if (const auto* w = std::get_if<WeightSequence>(&sphere)) return static_cast<std::int64_t>(w->n());
  return std::get<EuclideanSphere>(sphere).n;
}

SimulationOutcome run_experiment(const Simulation& sim) {
  require_sample_count(sim.samples);
  if (sim.batch_size == 0) throw DomainError("batch size must be positive");
  if (const auto* w = std::get_if<WeightSequence>(&sim.sphere)) {
    require_valid(*w);
  } else if (dimension(sim.sphere) < 2) {
    throw DomainError("Euclidean sphere dimension must be at least 2");
  }

  const std::uint64_t batches = (sim.samples + sim.batch_size - 1) / sim.batch_size;
  const unsigned threads = sim.threads > 0 ? sim.threads : std::max(1u, std::thread::hardware_concurrency());
  const auto batch_samples = [&](std::uint64_t b) {
    return std::min(sim.batch_size, sim.samples - b * sim.batch_size);
  };

  SimulationOutcome outcome{EstimatorState(sim.intervals), 0, true, {}};
  for (std::uint64_t wave = 0; wave < batches; wave += threads) {
    const std::uint64_t wave_end = std::min<std::uint64_t>(batches, wave + threads);
    std::vector<std::optional<EstimatorState>> results(wave_end - wave);
    std::vector<std::string> errors(wave_end - wave);
    const auto work = [&](std::uint64_t b) {
      try {
        results[b - wave] = run_batch(sim, b, batch_samples(b));
      } catch (const std::exception& e) {
        errors[b - wave] = e.what();
      }
    };
    if (threads == 1) {
      work(wave);
    } else {
      std::vector<std::jthread> pool;
      for (std::uint64_t b = wave; b < wave_end; ++b) pool.emplace_back(work, b);
    }
    for (std::uint64_t b = wave; b < wave_end; ++b) {
      if (!results[b - wave]) {
        outcome.complete = false;
        outcome.error = "batch " + std::to_string(b) + " failed: " + errors[b - wave];
        return outcome;
      }
      outcome.state.merge(*results[b - wave]);
      ++outcome.batches_completed;
    }
  }
  return outcome;
}

}  // namespace gmratio
