#include "gmratio/cli.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "gmratio/acceptance.hpp"
#include "gmratio/bounds.hpp"
#include "gmratio/error.hpp"
#include "gmratio/format.hpp"
#include "gmratio/moments.hpp"
#include "gmratio/sampling.hpp"
#include "gmratio/special_fns.hpp"

namespace gmratio {

namespace {

constexpr std::array<Command, 5> kCommands = {Command::moment, Command::bound, Command::simulate, Command::verify,
                                              Command::table};

std::string join(const std::vector<std::string>& parts, std::string_view separator) {
  std::string joined;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) joined += separator;
    joined += parts[i];
  }
  return joined;
}

std::string usage_text() {
  return "usage: gmratio <moment|bound|simulate|verify|table> [--n N] [--weights SPEC] [--s S] [--k K]\n"
         "               [--eps EPS] [--samples COUNT] [--seed SEED] [--format csv|json] [--out PATH]\n"
         "  SPEC: equal | two-level:M | diverging:sqrt | diverging:log | custom:@file.json | euclidean\n";
}

// Parses an unsigned integer in decimal or 0x-prefixed hexadecimal.
std::optional<std::uint64_t> parse_unsigned(const std::string& text) {
  if (text.empty() || text.front() == '-' || text.front() == '+') return std::nullopt;
  try {
    std::size_t used = 0;
    const auto value = std::stoull(text, &used, 0);
    if (used != text.size()) return std::nullopt;
    return value;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

WeightSequence load_custom_weights(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open weight file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error("weight file '" + path + "' is not valid JSON: " + e.what());
  }
  auto w = weights_from_json(j);
  require_valid(w);
  return w;
}

// Weights for the weighted commands; custom files fix n.
WeightSequence resolve_weights(const WeightSpec& spec, std::optional<std::int64_t> n) {
  if (spec.kind == WeightSpec::Kind::custom_file) {
    auto w = load_custom_weights(spec.path);
    if (n && *n != static_cast<std::int64_t>(w.n())) {
      throw DomainError("--n " + std::to_string(*n) + " does not match the " + std::to_string(w.n()) +
                        " weights in '" + spec.path + "'");
    }
    return w;
  }
  if (!n) throw DomainError("--n is required for generated weights");
  return make_weights(spec.family, *n);
}

nlohmann::json number_or_null(std::optional<double> v) {
  if (!v || !std::isfinite(*v)) return nullptr;
  return *v;
}

std::string field(std::optional<double> v) { return v ? format_double(*v) : std::string(); }

std::string render(const ExperimentConfig& config, const nlohmann::json& document,
                   const std::vector<std::string>& columns, const std::vector<std::vector<std::string>>& rows) {
  if (config.format == OutputFormat::json) return document.dump(2) + "\n";
  std::string csv = csv_row(columns);
  for (const auto& row : rows) csv += csv_row(row);
  return csv;
}

Simulation make_simulation(const WeightSpec& spec, std::optional<std::int64_t> n, std::uint64_t samples,
                           std::uint64_t seed, double epsilon, double& center) {
  Sphere sphere = EuclideanSphere{0};
  if (spec.kind == WeightSpec::Kind::euclidean) {
    if (!n) throw DomainError("--n is required for the Euclidean sphere");
    sphere = EuclideanSphere{*n};
    center = euclidean_center();
  } else {
    auto w = resolve_weights(spec, n);
    center = weight_stats(w).predicted_center;
    sphere = std::move(w);
  }
  return Simulation{std::move(sphere), samples, seed, {Interval{(1.0 - epsilon) * center, (1.0 + epsilon) * center}}};
}

struct TableRow {
  std::string weights;
  std::int64_t n;
  std::optional<double> m;
  double predicted_center;
  std::optional<double> limit_center;
};

std::vector<TableRow> table_rows(const ExperimentConfig& config, const WeightSpec& spec) {
  std::vector<TableRow> rows;
  const auto n_sweep = [&](std::vector<std::int64_t> dims, const auto& row_for) {
    if (config.n) dims = {*config.n};
    for (auto n : dims) rows.push_back(row_for(n));
  };
  switch (spec.kind) {
    case WeightSpec::Kind::euclidean:
      n_sweep({100, 1000, 10000}, [](std::int64_t n) {
        return TableRow{"euclidean", n, std::nullopt, euclidean_center(), euclidean_center()};
      });
      break;
    case WeightSpec::Kind::custom_file: {
      const auto w = resolve_weights(spec, config.n);
      rows.push_back({config.weight_spec, static_cast<std::int64_t>(w.n()), std::nullopt,
                      weight_stats(w).predicted_center, std::nullopt});
      break;
    }
    case WeightSpec::Kind::family:
      if (std::holds_alternative<family::Equal>(spec.family)) {
        n_sweep({100, 1000, 10000}, [](std::int64_t n) {
          return TableRow{"equal", n, std::nullopt, exp_neg_gamma(), exp_neg_gamma()};
        });
      } else if (std::holds_alternative<family::TwoLevel>(spec.family)) {
        const std::int64_t n = config.n.value_or(10000);
        for (double m : {1.0, 2.0, 4.0, 8.0}) {
          const FamilyTag tag = family::TwoLevel{m};
          const double limit = exp_neg_gamma() / std::pow(m, (m - 1.0) / (m + 1.0));
          rows.push_back({family_name(tag), n, m, weight_stats(family_runs(tag, n)).predicted_center, limit});
        }
      } else {
        const auto tag = spec.family;
        n_sweep({1000, 10000}, [&](std::int64_t n) {
          return TableRow{family_name(tag), n, growth_value(std::get<family::Diverging>(tag).growth, n),
                          weight_stats(family_runs(tag, n)).predicted_center, 0.0};
        });
      }
      break;
  }
  return rows;
}

}  // namespace

UsageError::UsageError(std::vector<std::string> problems)
    : std::runtime_error(join(problems, "; ")), problems_(std::move(problems)) {}

std::string_view command_name(Command c) {
  switch (c) {
    case Command::moment: return "moment";
    case Command::bound: return "bound";
    case Command::simulate: return "simulate";
    case Command::verify: return "verify";
    case Command::table: return "table";
  }
  return "unknown";
}

WeightSpec parse_weight_spec(std::string_view text) {
  if (text == "euclidean") return {WeightSpec::Kind::euclidean, family::Custom{}, {}};
  constexpr std::string_view custom_prefix = "custom:@";
  if (text.starts_with(custom_prefix)) {
    const auto path = text.substr(custom_prefix.size());
    if (path.empty()) throw DomainError("custom weights need a file path: custom:@file.json");
    return {WeightSpec::Kind::custom_file, family::Custom{}, std::string(path)};
  }
  auto tag = parse_family(text);
  if (std::holds_alternative<family::Custom>(tag)) throw DomainError("custom weights need a file: custom:@file.json");
  return {WeightSpec::Kind::family, tag, {}};
}

ExperimentConfig parse_args(std::span<const std::string> args) {
  CLI::App app{"Exact moments, Chebyshev bounds and Monte Carlo checks for the GM/AM ratio", "gmratio"};
  app.set_help_flag();
  app.require_subcommand(1, 1);

  std::int64_t n = 0;
  std::string weights = "equal";
  double s = 0.0;
  double k = 1.0;
  double eps = 0.1;
  std::string samples_text;
  std::string seed_text;
  std::string format = "json";
  std::string out;

  auto* n_opt = app.add_option("--n", n, "dimension");
  app.add_option("--weights", weights, "weight family");
  auto* s_opt = app.add_option("--s", s, "moment exponent");
  app.add_option("--k", k, "probability exponent");
  app.add_option("--eps", eps, "relative interval half-width");
  auto* samples_opt = app.add_option("--samples", samples_text, "Monte Carlo sample count");
  app.add_option("--seed", seed_text, "random seed");
  app.add_option("--format", format, "csv or json");
  auto* out_opt = app.add_option("--out", out, "output path");
  for (auto c : kCommands) app.add_subcommand(std::string(command_name(c)))->fallthrough();

  if (!args.empty() && !args.front().starts_with("-") &&
      std::none_of(kCommands.begin(), kCommands.end(), [&](Command c) { return command_name(c) == args.front(); })) {
    throw UsageError({"unknown command '" + args.front() + "'"});
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw UsageError({e.what()});
  }

  ExperimentConfig config;
  std::vector<std::string> problems;
  for (auto c : kCommands) {
    if (app.got_subcommand(std::string(command_name(c)))) config.command = c;
  }
  if (n_opt->count() > 0) config.n = n;
  config.weight_spec = weights;
  if (s_opt->count() > 0) config.s = s;
  config.k = k;
  config.epsilon = eps;
  if (samples_opt->count() > 0) {
    if (auto v = parse_unsigned(samples_text); v && *v > 0) {
      config.samples = *v;
    } else {
      problems.push_back("--samples must be a positive integer, got '" + samples_text + "'");
    }
  }
  if (!seed_text.empty()) {
    if (auto v = parse_unsigned(seed_text)) {
      config.seed = *v;
    } else {
      problems.push_back("--seed must be an unsigned 64-bit integer, got '" + seed_text + "'");
    }
  }
  if (format == "json") {
    config.format = OutputFormat::json;
  } else if (format == "csv") {
    config.format = OutputFormat::csv;
  } else {
    problems.push_back("--format must be csv or json, got '" + format + "'");
  }
  if (out_opt->count() > 0) config.out = out;

  std::optional<WeightSpec> spec;
  try {
    spec = parse_weight_spec(weights);
  } catch (const DomainError& e) {
    problems.push_back(std::string("--weights: ") + e.what());
  }
  if (config.n && *config.n < 2) problems.push_back("--n must be at least 2");
  if (config.s && !std::isfinite(*config.s)) problems.push_back("--s must be finite");
  if (!(config.k > 0.0) || !std::isfinite(config.k)) problems.push_back("--k must be positive");
  if (!(config.epsilon > 0.0 && config.epsilon < 1.0)) problems.push_back("--eps must lie in (0, 1)");

  const bool fixed_dimension = spec && spec->kind == WeightSpec::Kind::custom_file;
  switch (config.command) {
    case Command::moment:
      if (!config.n && !fixed_dimension) problems.push_back("moment requires --n");
      if (!config.s) problems.push_back("moment requires --s");
      break;
    case Command::simulate:
      if (!config.n && !fixed_dimension) problems.push_back("simulate requires --n");
      break;
    case Command::bound:
      if (spec && spec->kind == WeightSpec::Kind::euclidean) {
        problems.push_back("bound supports weighted spheres only");
      }
      break;
    case Command::verify:
    case Command::table:
      break;
  }
  if (!problems.empty()) throw UsageError(std::move(problems));
  return config;
}

std::vector<std::string> to_args(const ExperimentConfig& c) {
  std::vector<std::string> args{std::string(command_name(c.command))};
  const auto add = [&](std::string flag, std::string value) {
    args.push_back(std::move(flag));
    args.push_back(std::move(value));
  };
  if (c.n) add("--n", std::to_string(*c.n));
  add("--weights", c.weight_spec);
  if (c.s) add("--s", format_double(*c.s));
  add("--k", format_double(c.k));
  add("--eps", format_double(c.epsilon));
  if (c.samples) add("--samples", std::to_string(*c.samples));
  add("--seed", std::to_string(c.seed));
  add("--format", c.format == OutputFormat::csv ? "csv" : "json");
  if (c.out) add("--out", *c.out);
  return args;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  nlohmann::json j;
  j["command"] = command_name(c.command);
  j["n"] = c.n ? nlohmann::json(*c.n) : nlohmann::json(nullptr);
  j["weights"] = c.weight_spec;
  j["s"] = number_or_null(c.s);
  j["k"] = c.k;
  j["epsilon"] = c.epsilon;
  j["samples"] = effective_samples(c);
  j["seed"] = c.seed;
  j["format"] = c.format == OutputFormat::csv ? "csv" : "json";
  return j;
}

std::uint64_t effective_samples(const ExperimentConfig& c) {
  if (c.samples) return *c.samples;
  switch (c.command) {
    case Command::table: return 10000;
    case Command::verify: return 20000;
    default: return 100000;
  }
}

std::string cmd_moment(const ExperimentConfig& config) {
  const auto spec = parse_weight_spec(config.weight_spec);
  const double s = config.s.value_or(0.0);
  MomentResult result{};
  std::int64_t n = 0;
  std::string sphere;
  if (spec.kind == WeightSpec::Kind::euclidean) {
    n = config.n.value_or(0);
    result = exact_moment_euclidean(n, s);
    sphere = "euclidean";
  } else {
    const auto w = resolve_weights(spec, config.n);
    n = static_cast<std::int64_t>(w.n());
    result = exact_moment_weighted(w, s);
    sphere = "weighted";
  }
  std::optional<double> moment;
  const double value = std::exp(result.log_moment);
  if (std::isfinite(value) && value >= DBL_MIN) moment = value;

  nlohmann::json doc = {{"command", "moment"},
                        {"sphere", sphere},
                        {"weights", config.weight_spec},
                        {"n", n},
                        {"s", s},
                        {"log_moment", result.log_moment},
                        {"moment", number_or_null(moment)},
                        {"normalized_root", number_or_null(result.normalized_root)}};
  return render(config, doc, {"sphere", "weights", "n", "s", "log_moment", "moment", "normalized_root"},
                {{sphere, config.weight_spec, std::to_string(n), format_double(s), format_double(result.log_moment),
                  field(moment), field(result.normalized_root)}});
}

std::string cmd_bound(const ExperimentConfig& config) {
  const auto spec = parse_weight_spec(config.weight_spec);
  WeightSequence w = spec.kind == WeightSpec::Kind::custom_file ? resolve_weights(spec, config.n)
                                                                : make_weights(spec.family, 16);
  const BoundQuery query{std::move(w), config.k, config.epsilon};
  const auto cert = certified_interval(query, config.n.value_or(0));
  nlohmann::json doc = {{"command", "bound"},
                        {"weights", config.weight_spec},
                        {"k", config.k},
                        {"epsilon", config.epsilon},
                        {"n", cert.n},
                        {"n_min", cert.n_min},
                        {"n_min_upper", cert.n_min_upper},
                        {"n_min_lower", cert.n_min_lower},
                        {"s_upper", cert.s_upper},
                        {"s_lower", cert.s_lower},
                        {"lower_threshold", cert.lower_threshold},
                        {"upper_threshold", cert.upper_threshold},
                        {"predicted_center", cert.predicted_center},
                        {"probability_floor", cert.probability_floor},
                        {"theorem_matching", cert.theorem_matching}};
  return render(config, doc,
                {"weights", "k", "epsilon", "n", "n_min", "s_upper", "s_lower", "lower_threshold", "upper_threshold",
                 "predicted_center", "probability_floor", "theorem_matching"},
                {{config.weight_spec, format_double(config.k), format_double(config.epsilon), std::to_string(cert.n),
                  std::to_string(cert.n_min), format_double(cert.s_upper), format_double(cert.s_lower),
                  format_double(cert.lower_threshold), format_double(cert.upper_threshold),
                  format_double(cert.predicted_center), format_double(cert.probability_floor),
                  cert.theorem_matching ? "true" : "false"}});
}

std::string cmd_simulate(const ExperimentConfig& config) {
  const auto spec = parse_weight_spec(config.weight_spec);
  double center = 0.0;
  const auto samples = effective_samples(config);
  const auto sim = make_simulation(spec, config.n, samples, config.seed, config.epsilon, center);
  const auto outcome = run_experiment(sim);
  if (!outcome.complete) throw std::runtime_error(outcome.error);
  const auto& st = outcome.state;
  const auto n = dimension(sim.sphere);
  nlohmann::json doc = {{"command", "simulate"},
                        {"weights", config.weight_spec},
                        {"n", n},
                        {"samples", samples},
                        {"seed", config.seed},
                        {"batch_size", sim.batch_size},
                        {"predicted_center", center},
                        {"epsilon", config.epsilon},
                        {"statistics", st.to_json()}};
  return render(config, doc,
                {"weights", "n", "samples", "seed", "count", "mean", "sd", "median", "predicted_center",
                 "interval_lo", "interval_hi", "interval_probability"},
                {{config.weight_spec, std::to_string(n), std::to_string(samples), std::to_string(config.seed),
                  std::to_string(st.count()), format_double(st.mean()), format_double(st.standard_deviation()),
                  format_double(st.median()), format_double(center), format_double(st.intervals()[0].lo),
                  format_double(st.intervals()[0].hi), format_double(st.interval_probability(0))}});
}

std::string cmd_table(const ExperimentConfig& config) {
  const auto spec = parse_weight_spec(config.weight_spec);
  const auto samples = effective_samples(config);
  const std::vector<std::string> columns = {"weights",   "n",  "M",      "samples", "predicted_center",
                                            "limit_center", "mean", "sd", "median",  "interval_probability"};
  std::vector<std::vector<std::string>> rows;
  auto doc_rows = nlohmann::json::array();
  for (const auto& row : table_rows(config, spec)) {
    Sphere sphere = EuclideanSphere{row.n};
    if (spec.kind == WeightSpec::Kind::custom_file) {
      sphere = resolve_weights(spec, config.n);
    } else if (spec.kind == WeightSpec::Kind::family) {
      sphere = make_weights(parse_family(row.weights), row.n);
    }
    const double c = row.predicted_center;
    const Simulation sim{std::move(sphere), samples, config.seed,
                         {Interval{(1.0 - config.epsilon) * c, (1.0 + config.epsilon) * c}}};
    const auto outcome = run_experiment(sim);
    if (!outcome.complete) throw std::runtime_error(outcome.error);
    const auto& st = outcome.state;
    rows.push_back({row.weights, std::to_string(row.n), field(row.m), std::to_string(samples), format_double(c),
                    field(row.limit_center), format_double(st.mean()), format_double(st.standard_deviation()),
                    format_double(st.median()), format_double(st.interval_probability(0))});
    doc_rows.push_back({{"weights", row.weights},
                        {"n", row.n},
                        {"M", number_or_null(row.m)},
                        {"samples", samples},
                        {"predicted_center", c},
                        {"limit_center", number_or_null(row.limit_center)},
                        {"mean", st.mean()},
                        {"sd", st.standard_deviation()},
                        {"median", st.median()},
                        {"interval_probability", st.interval_probability(0)}});
  }
  nlohmann::json doc = {{"command", "table"}, {"seed", config.seed}, {"epsilon", config.epsilon}, {"rows", doc_rows}};
  return render(config, doc, columns, rows);
}

std::pair<std::string, bool> cmd_verify(const ExperimentConfig& config) {
  // A custom weight file is validated up front even though the checklist
  // uses its own weights.
  const auto spec = parse_weight_spec(config.weight_spec);
  if (spec.kind == WeightSpec::Kind::custom_file) load_custom_weights(spec.path);

  AcceptanceOptions options;
  options.seed = config.seed;
  options.max_samples = effective_samples(config);
  std::string report;
  bool ok = true;
  for (const auto& r : run_acceptance(options)) {
    report += format_check(r) + "\n";
    if (r.status == CheckStatus::fail) ok = false;
  }
  report += ok ? "verify: all checks passed\n" : "verify: FAILED\n";
  return {report, ok};
}

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  for (const auto& a : args) {
    if (a == "--help" || a == "-h") {
      out << usage_text();
      return 0;
    }
  }
  ExperimentConfig config;
  try {
    config = parse_args(args);
  } catch (const UsageError& e) {
    for (const auto& p : e.problems()) err << "error: " << p << "\n";
    err << usage_text();
    return 2;
  }

  std::string report;
  int status = 0;
  try {
    switch (config.command) {
      case Command::moment: report = cmd_moment(config); break;
      case Command::bound: report = cmd_bound(config); break;
      case Command::simulate: report = cmd_simulate(config); break;
      case Command::table: report = cmd_table(config); break;
      case Command::verify: {
        auto [text, ok] = cmd_verify(config);
        report = std::move(text);
        status = ok ? 0 : 1;
        break;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  if (config.out) {
    std::ofstream file(*config.out, std::ios::binary);
    if (!file || !(file << report)) {
      err << "error: cannot write '" << *config.out << "'\n";
      return 1;
    }
  } else {
    out << report;
  }
  return status;
}

}  // namespace gmratio
