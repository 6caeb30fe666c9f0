#pragma once

// Redistribution of a task load over n nodes when the task total changes.
//
// Three semantics of the same loop are provided:
//   rebalance_float     the original binary64 algorithm, bug for bug
//   rebalance_int       the integer revision (no tasks lost)
//   rebalance_rational  the original control flow over exact rationals

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "numguard/rational.hpp"

namespace numguard {

__extension__ typedef __int128 Int128;

/// FLT_EPSILON of IEEE 754 binary32, used by the original code as an absolute
/// tolerance on binary64 values.
inline constexpr double kFltEpsilon = 0x1p-23;

/// Largest integer magnitude for which every integer is exact in binary64.
inline constexpr std::int64_t kMaxExactBinary64Integer = std::int64_t{1} << 53;

/// A violated input requirement of the rebalancing routines.
class PreconditionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Input load: tasks per node. Non-empty, non-negative, positive total that fits
/// in int64.
class TaskDistribution {
public:
  explicit TaskDistribution(std::vector<std::int64_t> tasks);

  std::span<const std::int64_t> tasks() const { return tasks_; }
  std::size_t size() const { return tasks_.size(); }
  std::int64_t total() const { return total_; }

private:
  std::vector<std::int64_t> tasks_;
  std::int64_t total_ = 0;
};

struct RebalanceOutput {
  std::vector<std::int64_t> new_tasks;
  /// binary64 for rebalance_float; exact fraction of a task otherwise
  /// (rest / total for rebalance_int).
  std::variant<double, Rational> final_rest;

  /// Sum of new_tasks in 128-bit arithmetic.
  Int128 sum() const;
};

/// One loop iteration of rebalance_int: rest is the accumulator after the
/// optional increment.
struct RestTraceRecord {
  std::size_t index;
  std::int64_t floor_size;
  std::int64_t rest_after;
};

/// |a - b| < 2^-23 in binary64; false if either argument is NaN.
bool is_nearly_equal(double a, double b) noexcept;

/// Original floating-point algorithm. Requires the total, every entry, and
/// new_total to be at most 2^53. The output sum may differ from new_total.
RebalanceOutput rebalance_float(const TaskDistribution& dist, std::int64_t new_total);

/// Integer revision. Products new_total * tasks[i] are formed in 128 bits, so
/// every int64 input is accepted. Guarantees sum(new_tasks) == new_total.
RebalanceOutput rebalance_int(const TaskDistribution& dist, std::int64_t new_total);

/// rebalance_int, also returning the per-iteration accumulator trace.
RebalanceOutput rebalance_int_traced(const TaskDistribution& dist, std::int64_t new_total,
                                     std::vector<RestTraceRecord>& trace);

/// Original control flow with exact rationals; the near-equality test becomes
/// rest >= 1.
RebalanceOutput rebalance_rational(const TaskDistribution& dist, std::int64_t new_total);

/// Parses "1,2,3" into task counts. Throws std::invalid_argument.
std::vector<std::int64_t> parse_task_list(const std::string& text);

}  // namespace numguard
