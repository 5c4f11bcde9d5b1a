#include "gmratio/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "gmratio/bounds.hpp"
#include "gmratio/cli.hpp"
#include "gmratio/moments.hpp"
#include "gmratio/sampling.hpp"
#include "gmratio/special_fns.hpp"

namespace gmratio {

namespace {

// Below this many samples the standard-error checks carry no information.
constexpr std::uint64_t kMinStatisticalSamples = 1000;

struct Outcome {
  CheckStatus status;
  std::string detail;
};

Outcome verdict(bool ok, const std::string& detail) { return {ok ? CheckStatus::pass : CheckStatus::fail, detail}; }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

double relative_error(double value, double reference) { return std::fabs(value - reference) / std::fabs(reference); }

// Composite Simpson rule.
double simpson(const std::function<double(double)>& f, double a, double b, int intervals) {
  const double h = (b - a) / intervals;
  double sum = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) sum += f(a + i * h) * (i % 2 == 1 ? 4.0 : 2.0);
  return sum * h / 3.0;
}

class Runner {
 public:
  explicit Runner(const AcceptanceOptions& options) : options_(options) {}

  std::uint64_t samples(std::uint64_t full) const {
    return options_.max_samples ? std::min(full, *options_.max_samples) : full;
  }

  bool statistical(std::uint64_t count) const { return count >= kMinStatisticalSamples; }

  std::uint64_t seed() const { return options_.seed; }

 private:
  AcceptanceOptions options_;
};

Outcome check_weighted_oracle(const Runner&) {
  const auto start = std::chrono::steady_clock::now();
  const double exact = std::exp(exact_moment_weighted(equal_weights(2), 1.0).log_moment);
  const double facet = simpson([](double x) { return x * (1.0 - x); }, 0.0, 1.0, 64);
  const double micros = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - start).count();
  const bool ok = std::fabs(exact - 1.0 / 6.0) <= 1e-12 && std::fabs(facet - exact) <= 1e-10 && micros < 1000.0;
  return verdict(ok, "E=" + fmt(exact) + " facet integral=" + fmt(facet) + " runtime=" + fmt(micros) + "us");
}

Outcome check_euclidean_oracle(const Runner&) {
  const double exact = std::exp(exact_moment_euclidean(2, 2.0).log_moment);
  // Trapezoid rule is exact for trigonometric polynomials of low degree.
  constexpr int points = 64;
  double sum = 0.0;
  for (int i = 0; i < points; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / points;
    sum += std::pow(std::cos(theta) * std::sin(theta), 2);
  }
  const double circle = sum / points;
  const bool ok = std::fabs(exact - 0.125) <= 1e-12 && std::fabs(circle - exact) <= 1e-10;
  return verdict(ok, "E=" + fmt(exact) + " circle quadrature=" + fmt(circle));
}

Outcome check_sampler_uniformity(const Runner& run) {
  const auto count = run.samples(1'000'000);
  if (!run.statistical(count)) return {CheckStatus::skip, "skipped: insufficient samples"};
  const auto start = std::chrono::steady_clock::now();
  std::mt19937_64 gen(run.seed());
  std::uniform_int_distribution<int> dim(2, 8);
  std::uniform_real_distribution<double> raw(0.5, 1.5);
  double worst = 0.0;
  int cases = 0;
  std::uint64_t stream = 0;
  for (int v = 0; v < 10; ++v) {
    const int n = dim(gen);
    std::vector<double> a(n);
    double total = 0.0;
    for (auto& x : a) total += (x = raw(gen));
    for (auto& x : a) x *= n / total;
    std::sort(a.begin(), a.end(), std::greater<>());
    const WeightSequence w(a);
    for (double s : {0.5, 1.0, -0.2}) {
      SeededStream rng(run.seed(), 1000 + stream++);
      const auto est = empirical_moment(w, s, count, rng);
      const double exact = std::exp(exact_moment_weighted(w, s).log_moment);
      worst = std::max(worst, std::fabs(est.estimate - exact) / est.standard_error);
      ++cases;
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return verdict(worst <= 4.0 && seconds < 60.0,
                 std::to_string(cases) + " cases, max |z|=" + fmt(worst) + ", samples=" + std::to_string(count));
}

struct Concentration {
  double median;
  double probability;
  double seconds;
};

Concentration concentrate(const Runner& run, Sphere sphere, Interval interval, std::uint64_t stream_seed) {
  const auto start = std::chrono::steady_clock::now();
  const Simulation sim{std::move(sphere), run.samples(100'000), stream_seed, {interval}};
  const auto outcome = run_experiment(sim);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {outcome.state.median(), outcome.state.interval_probability(0), seconds};
}

Outcome check_equal_concentration(const Runner& run) {
  const double c = exp_neg_gamma();
  const auto r = concentrate(run, equal_weights(10'000), {0.95 * c, 1.05 * c}, run.seed());
  const bool ok = r.probability >= 0.99 && relative_error(r.median, c) <= 0.01 && r.seconds < 60.0;
  return verdict(ok, "P(0.95c<r<1.05c)=" + fmt(r.probability) + " median=" + fmt(r.median) + " target=" + fmt(c));
}

Outcome check_two_level_concentration(const Runner& run) {
  const double c = exp_neg_gamma() / std::pow(4.0, 0.6);
  const auto r = concentrate(run, two_level_weights(10'000, 4.0), {0.95 * c, 1.05 * c}, run.seed() + 1);
  const bool ok = relative_error(r.median, c) <= 0.02 && r.seconds < 60.0;
  return verdict(ok, "median=" + fmt(r.median) + " target=" + fmt(c) + " rel.err=" +
                         fmt(relative_error(r.median, c)));
}

Outcome check_diverging_collapse(const Runner& run) {
  const auto r = concentrate(run, diverging_weights(10'000, Growth::sqrt), {-1.0, 0.05}, run.seed() + 2);
  const bool ok = r.probability >= 0.99 && r.seconds < 60.0;
  return verdict(ok, "P(r<0.05)=" + fmt(r.probability) + " median=" + fmt(r.median));
}

Outcome check_euclidean_concentration(const Runner& run) {
  const double c = euclidean_center();
  const auto r = concentrate(run, EuclideanSphere{10'000}, {0.95 * c, 1.05 * c}, run.seed() + 3);
  const bool ok = relative_error(r.median, c) <= 0.01 && r.seconds < 60.0;
  return verdict(ok, "median=" + fmt(r.median) + " target=" + fmt(c));
}

Outcome check_chebyshev_certificate(const Runner& run) {
  const auto count = run.samples(1'000'000);
  if (!run.statistical(count)) return {CheckStatus::skip, "skipped: insufficient samples"};
  const BoundQuery query{equal_weights(16), 1.0, 0.3};
  const auto cert = certified_interval(query);
  const Simulation sim{equal_weights(cert.n), count, run.seed() + 4,
                       {Interval{cert.lower_threshold, cert.upper_threshold}}};
  const auto outcome = run_experiment(sim);
  const double freq = outcome.state.interval_probability(0);
  const double floor = 1.0 - 1.0 / static_cast<double>(cert.n);
  const double se = std::sqrt(floor * (1.0 - floor) / static_cast<double>(count));
  const bool ok = freq >= floor - 4.0 * se;
  return verdict(ok, "n_min=" + std::to_string(cert.n) + " interval=(" + fmt(cert.lower_threshold) + ", " +
                         fmt(cert.upper_threshold) + ") s=(" + fmt(cert.s_lower) + ", " + fmt(cert.s_upper) +
                         ") frequency=" + fmt(freq) + " floor=" + fmt(floor));
}

Outcome check_factor_identity(const Runner& run) {
  std::mt19937_64 gen(run.seed() + 5);
  std::uniform_int_distribution<int> dim(2, 200);
  std::uniform_real_distribution<double> raw(0.2, 3.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = dim(gen);
    std::vector<double> a(n);
    double total = 0.0;
    for (auto& x : a) total += (x = raw(gen));
    for (auto& x : a) x *= n / total;
    std::sort(a.begin(), a.end(), std::greater<>());
    const WeightSequence w(a);
    const double a_max = a.front();
    // s ∈ (−0.9/a_max, −0.01] ∪ [0.01, 1]
    const double s = unit(gen) < 0.5 ? 0.01 + 0.99 * unit(gen) : -(0.01 + (0.9 / a_max - 0.01) * unit(gen));
    const double k = 0.1 + 2.9 * unit(gen);
    const auto f = factor_decomposition(w, s, k);
    const double direct = n * std::exp(chebyshev_level(w, s, k) / (s * n));
    worst = std::max(worst, relative_error(f.product(), direct));
  }
  return verdict(worst <= 1e-9, "100 trials, max relative deviation=" + fmt(worst));
}

Outcome check_product_power_minimum(const Runner&) {
  constexpr int units = 60;  // Σ t_i = 3 with step 0.05
  double best = std::numeric_limits<double>::infinity();
  std::array<int, 3> arg{};
  for (int i = 0; i <= units; ++i) {
    for (int j = 0; i + j <= units; ++j) {
      const std::array<double, 3> t = {i * 0.05, j * 0.05, (units - i - j) * 0.05};
      const double v = product_power(t);
      if (v < best) {
        best = v;
        arg = {i, j, units - i - j};
      }
    }
  }
  const bool at_center = std::abs(arg[0] - 20) <= 1 && std::abs(arg[1] - 20) <= 1 && std::abs(arg[2] - 20) <= 1;
  return verdict(at_center && std::fabs(best - 1.0) <= 1e-9,
                 "min=" + fmt(best) + " at (" + fmt(arg[0] * 0.05) + ", " + fmt(arg[1] * 0.05) + ", " +
                     fmt(arg[2] * 0.05) + ")");
}

Outcome check_special_functions(const Runner&) {
  const double pi_err = std::fabs(std::exp(2.0 * log_gamma(0.5)) - std::numbers::pi);
  const double psi1_err = std::fabs(digamma(1.0) + constants::euler_gamma);
  const double psi_half_err = std::fabs(digamma(0.5) + constants::euler_gamma + 2.0 * std::numbers::ln2);
  double stirling = 0.0;
  for (double z : {10.0, 100.0, 1000.0}) stirling = std::max(stirling, stirling_remainder(z) * z * z);
  const bool ok = pi_err <= 1e-12 * std::numbers::pi && psi1_err <= 1e-10 && psi_half_err <= 1e-10 && stirling <= 0.01;
  return verdict(ok, "|Γ(1/2)²−π|=" + fmt(pi_err) + " |ψ(1)+γ|=" + fmt(psi1_err) + " |ψ(1/2)+γ+2ln2|=" +
                         fmt(psi_half_err) + " max z²·R(z)=" + fmt(stirling));
}

Outcome check_determinism(const Runner& run) {
  const std::vector<std::string> args = {"simulate", "--n",    "1000",        "--weights", "two-level:4",
                                         "--samples", "20000", "--seed", std::to_string(run.seed())};
  ExperimentConfig config = parse_args(args);
  const std::string first = cmd_simulate(config);
  const std::string second = cmd_simulate(config);

  // Merged batches against one sequential stream over the same draws.
  const auto w = equal_weights(100);
  const Simulation sim{w, 10'000, run.seed(), {}, 1000, 4};
  const auto merged = run_experiment(sim).state;
  EstimatorState single;
  std::vector<double> x(w.n());
  for (std::uint64_t b = 0; b < 10; ++b) {
    SeededStream rng(run.seed(), b);
    for (int i = 0; i < 1000; ++i) {
      sample_weighted_sphere(w.values(), rng, x);
      single.add(gm_am_ratio_weighted(x, w).value);
    }
  }
  const bool same_count = merged.count() == single.count();
  const double mean_err = relative_error(merged.mean(), single.mean());
  const double m2_err = relative_error(merged.m2(), single.m2());
  const bool ok = first == second && same_count && mean_err <= 1e-12 && m2_err <= 1e-12 &&
                  merged.histogram() == single.histogram();
  return verdict(ok, std::string("simulate outputs ") + (first == second ? "identical" : "DIFFER") +
                         ", merged vs single: mean rel.err=" + fmt(mean_err) + " m2 rel.err=" + fmt(m2_err));
}

struct Check {
  int id;
  const char* name;
  Outcome (*fn)(const Runner&);
};

constexpr std::array<Check, 12> kChecks = {{
    {1, "exact moment oracle, n=2", check_weighted_oracle},
    {2, "Euclidean moment oracle, n=2", check_euclidean_oracle},
    {3, "sampler uniformity vs closed-form moments", check_sampler_uniformity},
    {4, "equal-weights concentration at e^-gamma", check_equal_concentration},
    {5, "two-level concentration, M=4", check_two_level_concentration},
    {6, "diverging-weights collapse, f=sqrt", check_diverging_collapse},
    {7, "Euclidean concentration", check_euclidean_concentration},
    {8, "Chebyshev certificate coverage", check_chebyshev_certificate},
    {9, "three-factor identity", check_factor_identity},
    {10, "product-power minimum on the simplex", check_product_power_minimum},
    {11, "special functions", check_special_functions},
    {12, "determinism and batch merging", check_determinism},
}};

}  // namespace

std::vector<CheckResult> run_acceptance(const AcceptanceOptions& options) {
  const Runner runner(options);
  std::vector<CheckResult> results;
  for (const auto& check : kChecks) {
    if (!options.only.empty() && std::find(options.only.begin(), options.only.end(), check.id) == options.only.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = check.fn(runner);
    } catch (const std::exception& e) {
      outcome = {CheckStatus::fail, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    results.push_back({check.id, check.name, outcome.status, outcome.detail, seconds});
  }
  return results;
}

std::string format_check(const CheckResult& r) {
  const char* status = r.status == CheckStatus::pass ? "PASS" : r.status == CheckStatus::fail ? "FAIL" : "SKIP";
  std::ostringstream os;
  os << status << " [" << (r.id < 10 ? " " : "") << r.id << "] " << r.name << ": " << r.detail;
  return os.str();
}

}  // namespace gmratio
