#pragma once

// Random search over inputs of the form 2^e + delta for the floating-point
// rebalancer, and differential checking of the integer revision against the
// exact-rational reference.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "numguard/rebalance.hpp"
#include "numguard/rng.hpp"

namespace numguard {

inline constexpr int kReportSchemaVersion = 1;

struct FuzzConfig {
  int exponent_max = 40;
  int delta_bound = 100;
  int node_count = 2;
  std::uint64_t iterations = 1'000'000;
  double time_budget_seconds = 60.0;  // <= 0 disables the budget
  std::uint64_t seed = 0;
  unsigned jobs = 1;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// 2^exponent + delta. Requires 0 <= exponent <= 62.
std::int64_t lattice_value(int exponent, std::int64_t delta);

/// Draws 2^e + delta with e uniform in [0, exponent_max] and delta uniform in
/// [-delta_bound, delta_bound], redrawing non-positive results.
std::int64_t sample_value(const FuzzConfig& config, SplitMix64& rng);

struct RebalanceCounterexample {
  std::vector<std::int64_t> tasks;
  std::int64_t new_total = 0;
  double final_rest = 0.0;
  std::int64_t lost = 0;  // new_total - sum(new_tasks); negative means surplus
  std::uint64_t iteration = 0;
};

struct FloatFuzzReport {
  FuzzConfig config;
  std::uint64_t iterations_run = 0;
  std::uint64_t resampled_tuples = 0;  // draws rejected by rebalance_float's preconditions
  std::uint64_t shortfall_count = 0;
  std::uint64_t surplus_count = 0;
  bool stopped_by_time = false;
  std::vector<RebalanceCounterexample> counterexamples;
};

/// Draws one trial input (tasks and new_total) for iteration `index`.
/// Tuples the float algorithm cannot accept are redrawn; `resampled` counts them.
struct FuzzTrial {
  std::vector<std::int64_t> tasks;
  std::int64_t new_total = 0;
  std::uint64_t resampled = 0;
};
FuzzTrial draw_trial(const FuzzConfig& config, std::uint64_t index);

FloatFuzzReport find_float_counterexamples(const FuzzConfig& config);

enum class RebalanceProperty { ExactSum, FloorCeilBounds, RationalEquivalence, RestRange };
const char* to_string(RebalanceProperty p);

struct PropertyViolation {
  std::vector<std::int64_t> tasks;
  std::int64_t new_total = 0;
  RebalanceProperty property{};
  std::string detail;
};

/// Checks the exact-sum, floor/ceil, rational-equivalence and rest-range
/// properties of rebalance_int on one input. Empty result means all hold.
std::vector<PropertyViolation> check_int_properties(const TaskDistribution& dist,
                                                    std::int64_t new_total);

struct DifferentialReport {
  FuzzConfig config;
  std::uint64_t inputs_checked = 0;
  std::uint64_t resampled_tuples = 0;
  bool stopped_by_time = false;
  std::vector<PropertyViolation> violations;
};

DifferentialReport differential_fuzz(const FuzzConfig& config);

/// `s_values;new_total;final_rest_hex;final_rest_dec;lost`, preceded by
/// `#`-prefixed deterministic header lines.
void write_csv(std::ostream& os, const FloatFuzzReport& report);
nlohmann::ordered_json to_json(const FloatFuzzReport& report);
nlohmann::ordered_json to_json(const DifferentialReport& report);
nlohmann::ordered_json to_json(const FuzzConfig& config);

}  // namespace numguard
