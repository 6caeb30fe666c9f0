#include "numguard/rebalance_fuzz.hpp"

#include <ostream>
#include <sstream>
#include <stdexcept>

#include "numguard/hexfloat.hpp"
#include "numguard/parallel.hpp"

namespace numguard {

void FuzzConfig::validate() const {
  if (exponent_max < 0 || exponent_max > 62) {
    throw std::invalid_argument("exponent_max must be in [0, 62]");
  }
  if (delta_bound < 0) throw std::invalid_argument("delta_bound must be >= 0");
  if (node_count < 1) throw std::invalid_argument("node_count must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
}

std::int64_t lattice_value(int exponent, std::int64_t delta) {
  if (exponent < 0 || exponent > 62) throw std::invalid_argument("exponent out of range");
  return (std::int64_t{1} << exponent) + delta;
}

std::int64_t sample_value(const FuzzConfig& config, SplitMix64& rng) {
  for (;;) {
    const auto e = static_cast<int>(rng.uniform(0, config.exponent_max));
    const std::int64_t delta = rng.uniform(-config.delta_bound, config.delta_bound);
    const std::int64_t v = lattice_value(e, delta);
    if (v > 0) return v;
  }
}

FuzzTrial draw_trial(const FuzzConfig& config, std::uint64_t index) {
  constexpr int kMaxAttempts = 100000;
  SplitMix64 rng = SplitMix64::stream(config.seed, index);
  FuzzTrial trial;
  trial.tasks.resize(static_cast<std::size_t>(config.node_count));
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    Int128 total = 0;
    for (auto& s : trial.tasks) {
      s = sample_value(config, rng);
      total += s;
    }
    trial.new_total = sample_value(config, rng);
    if (total <= kMaxExactBinary64Integer && trial.new_total <= kMaxExactBinary64Integer) {
      return trial;
    }
    ++trial.resampled;
  }
  throw std::runtime_error("could not draw a binary64-exact input tuple; lower exponent_max");
}

FloatFuzzReport find_float_counterexamples(const FuzzConfig& config) {
  config.validate();
  FloatFuzzReport report;
  report.config = config;

  struct Outcome {
    std::uint64_t resampled = 0;
    std::optional<RebalanceCounterexample> found;
  };

  auto body = [&config](std::uint64_t i) {
    FuzzTrial trial = draw_trial(config, i);
    Outcome outcome;
    outcome.resampled = trial.resampled;
    const TaskDistribution dist(trial.tasks);
    const RebalanceOutput out = rebalance_float(dist, trial.new_total);
    const Int128 lost = Int128{trial.new_total} - out.sum();
    if (lost != 0) {
      outcome.found = RebalanceCounterexample{std::move(trial.tasks), trial.new_total,
                                              std::get<double>(out.final_rest),
                                              static_cast<std::int64_t>(lost), i};
    }
    return outcome;
  };
  auto sink = [&report](std::uint64_t, Outcome&& outcome) {
    report.resampled_tuples += outcome.resampled;
    if (outcome.found) {
      if (outcome.found->lost > 0) {
        ++report.shortfall_count;
      } else {
        ++report.surplus_count;
      }
      report.counterexamples.push_back(std::move(*outcome.found));
    }
  };
  report.iterations_run = run_chunked<Outcome>(config.iterations, config.jobs,
                                               config.time_budget_seconds, body, sink,
                                               &report.stopped_by_time);
  return report;
}

const char* to_string(RebalanceProperty p) {
  switch (p) {
    case RebalanceProperty::ExactSum: return "exact_sum";
    case RebalanceProperty::FloorCeilBounds: return "floor_ceil_bounds";
    case RebalanceProperty::RationalEquivalence: return "rational_equivalence";
    case RebalanceProperty::RestRange: return "rest_range";
  }
  return "unknown";
}

namespace {

std::string int128_to_string(Int128 v) {
  if (v == 0) return "0";
  const bool negative = v < 0;
  std::string digits;
  while (v != 0) {
    const int d = static_cast<int>(v % 10);
    digits.insert(digits.begin(), static_cast<char>('0' + (negative ? -d : d)));
    v /= 10;
  }
  return negative ? "-" + digits : digits;
}

}  // namespace

std::vector<PropertyViolation> check_int_properties(const TaskDistribution& dist,
                                                    std::int64_t new_total) {
  std::vector<PropertyViolation> violations;
  const std::vector<std::int64_t> tasks(dist.tasks().begin(), dist.tasks().end());
  auto report = [&](RebalanceProperty p, std::string detail) {
    violations.push_back(PropertyViolation{tasks, new_total, p, std::move(detail)});
  };

  std::vector<RestTraceRecord> trace;
  const RebalanceOutput result = rebalance_int_traced(dist, new_total, trace);

  if (result.sum() != new_total) {
    report(RebalanceProperty::ExactSum, "sum " + int128_to_string(result.sum()) +
                                            " != new_total " + std::to_string(new_total));
  }

  const Rational total(dist.total());
  const Rational target(new_total);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Rational exact = Rational(tasks[i]) * target / total;
    const BigInt got(static_cast<long>(result.new_tasks[i]));
    if (got < exact.floor() || got > exact.ceil()) {
      report(RebalanceProperty::FloorCeilBounds,
             "t[" + std::to_string(i) + "]=" + got.get_str() + " outside [" +
                 exact.floor().get_str() + ", " + exact.ceil().get_str() + "]");
    }
  }

  const RebalanceOutput reference = rebalance_rational(dist, new_total);
  if (reference.new_tasks != result.new_tasks) {
    std::ostringstream os;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
      if (reference.new_tasks[i] != result.new_tasks[i]) {
        os << "t[" << i << "] int=" << result.new_tasks[i]
           << " rational=" << reference.new_tasks[i] << ' ';
      }
    }
    report(RebalanceProperty::RationalEquivalence, os.str());
  }

  for (const auto& r : trace) {
    if (r.rest_after < 0 || r.rest_after >= dist.total()) {
      report(RebalanceProperty::RestRange, "rest " + std::to_string(r.rest_after) +
                                               " outside [0, total) after iteration " +
                                               std::to_string(r.index));
    }
  }
  if (trace.empty() || trace.back().rest_after != 0) {
    report(RebalanceProperty::RestRange, "rest is not 0 at exit");
  }
  return violations;
}

DifferentialReport differential_fuzz(const FuzzConfig& config) {
  config.validate();
  DifferentialReport report;
  report.config = config;

  struct Outcome {
    std::uint64_t resampled = 0;
    std::vector<PropertyViolation> violations;
  };
  auto body = [&config](std::uint64_t i) {
    const FuzzTrial trial = draw_trial(config, i);
    return Outcome{trial.resampled,
                   check_int_properties(TaskDistribution(trial.tasks), trial.new_total)};
  };
  auto sink = [&report](std::uint64_t, Outcome&& outcome) {
    report.resampled_tuples += outcome.resampled;
    for (auto& v : outcome.violations) report.violations.push_back(std::move(v));
  };
  report.inputs_checked = run_chunked<Outcome>(config.iterations, config.jobs,
                                               config.time_budget_seconds, body, sink,
                                               &report.stopped_by_time);
  return report;
}

namespace {

std::string join_values(const std::vector<std::int64_t>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(values[i]);
  }
  return s;
}

}  // namespace

void write_csv(std::ostream& os, const FloatFuzzReport& report) {
  const FuzzConfig& c = report.config;
  os << "# numguard fuzz-rebalance schema_version=" << kReportSchemaVersion
     << " generator=" << SplitMix64::kName << '\n'
     << "# seed=" << c.seed << " exponent_max=" << c.exponent_max
     << " delta_bound=" << c.delta_bound << " node_count=" << c.node_count
     << " iterations=" << c.iterations << '\n'
     << "# iterations_run=" << report.iterations_run
     << " resampled_tuples=" << report.resampled_tuples
     << " shortfall=" << report.shortfall_count << " surplus=" << report.surplus_count
     << " stopped_by_time=" << (report.stopped_by_time ? "true" : "false") << '\n'
     << "s_values;new_total;final_rest_hex;final_rest_dec;lost\n";
  for (const auto& cx : report.counterexamples) {
    os << join_values(cx.tasks) << ';' << cx.new_total << ';' << to_hex(cx.final_rest) << ';'
       << to_decimal(cx.final_rest) << ';' << cx.lost << '\n';
  }
}

nlohmann::ordered_json to_json(const FuzzConfig& c) {
  return {{"exponent_max", c.exponent_max}, {"delta_bound", c.delta_bound},
          {"node_count", c.node_count},     {"iterations", c.iterations},
          {"time_budget_seconds", c.time_budget_seconds}, {"seed", c.seed}};
}

nlohmann::ordered_json to_json(const FloatFuzzReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& cx : report.counterexamples) {
    rows.push_back({{"s_values", cx.tasks},
                    {"new_total", cx.new_total},
                    {"final_rest_hex", to_hex(cx.final_rest)},
                    {"final_rest_dec", to_decimal(cx.final_rest)},
                    {"lost", cx.lost},
                    {"surplus", cx.lost < 0},
                    {"iteration", cx.iteration}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"command", "fuzz-rebalance"},
          {"generator", SplitMix64::kName},
          {"config", to_json(report.config)},
          {"statistics",
           {{"iterations_run", report.iterations_run},
            {"resampled_tuples", report.resampled_tuples},
            {"shortfall_count", report.shortfall_count},
            {"surplus_count", report.surplus_count},
            {"stopped_by_time", report.stopped_by_time}}},
          {"counterexamples", std::move(rows)}};
}

nlohmann::ordered_json to_json(const DifferentialReport& report) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& v : report.violations) {
    rows.push_back({{"s_values", v.tasks},
                    {"new_total", v.new_total},
                    {"property", to_string(v.property)},
                    {"detail", v.detail}});
  }
  return {{"schema_version", kReportSchemaVersion},
          {"command", "differential-fuzz"},
          {"generator", SplitMix64::kName},
          {"config", to_json(report.config)},
          {"statistics",
           {{"inputs_checked", report.inputs_checked},
            {"resampled_tuples", report.resampled_tuples},
            {"violations", report.violations.size()},
            {"stopped_by_time", report.stopped_by_time}}},
          {"violations", std::move(rows)}};
}

}  // namespace numguard
