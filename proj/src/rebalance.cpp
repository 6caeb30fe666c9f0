#include "numguard/rebalance.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace numguard {

TaskDistribution::TaskDistribution(std::vector<std::int64_t> tasks) : tasks_(std::move(tasks)) {
  if (tasks_.empty()) throw PreconditionError("requires length tasks >= 1");
  Int128 total = 0;
  for (std::size_t i = 0; i < tasks_.size(); ++i) {
    if (tasks_[i] < 0) {
      throw PreconditionError("requires forall i. tasks[i] >= 0 (violated at i=" +
                              std::to_string(i) + ")");
    }
    total += tasks_[i];
  }
  if (total == 0) throw PreconditionError("requires 0 < total_tasks");
  if (total > std::numeric_limits<std::int64_t>::max()) {
    throw PreconditionError("total_tasks exceeds the int64 range");
  }
  total_ = static_cast<std::int64_t>(total);
}

Int128 RebalanceOutput::sum() const {
  Int128 s = 0;
  for (auto t : new_tasks) s += t;
  return s;
}

bool is_nearly_equal(double a, double b) noexcept {
  return std::fabs(a - b) < kFltEpsilon;
}

namespace {

void require_new_total(std::int64_t new_total) {
  if (new_total < 0) throw PreconditionError("requires 0 <= new_total_tasks");
}

}  // namespace

RebalanceOutput rebalance_float(const TaskDistribution& dist, std::int64_t new_total) {
  require_new_total(new_total);
  if (dist.total() > kMaxExactBinary64Integer || new_total > kMaxExactBinary64Integer) {
    throw PreconditionError("inputs must be exactly representable in binary64 (<= 2^53)");
  }

  const auto tasks = dist.tasks();
  RebalanceOutput out;
  out.new_tasks.resize(tasks.size());

  const double total_tasks = static_cast<double>(dist.total());
  const double new_total_tasks = static_cast<double>(new_total);
  double rest = 0.0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const double share = static_cast<double>(tasks[i]) / total_tasks;
    const double real_size = share * new_total_tasks;
    const double floor_size = std::floor(real_size);
    rest += real_size - floor_size;
    out.new_tasks[i] = static_cast<std::int64_t>(floor_size);
    if (is_nearly_equal(rest, 1.0)) {
      out.new_tasks[i] += 1;
      rest -= 1;
    }
  }
  out.final_rest = rest;
  return out;
}

namespace {

template <typename OnIteration>
RebalanceOutput rebalance_int_impl(const TaskDistribution& dist, std::int64_t new_total,
                                   OnIteration&& on_iteration) {
  require_new_total(new_total);
  const auto tasks = dist.tasks();
  const Int128 total = dist.total();

  RebalanceOutput out;
  out.new_tasks.resize(tasks.size());
  // 0 <= rest < total holds between iterations, so rest + (scaled mod total)
  // stays below 2 * total < 2^64.
  Int128 rest = 0;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Int128 scaled = Int128{new_total} * tasks[i];
    // tasks[i] <= total, hence floor_size <= new_total fits in int64.
    auto floor_size = static_cast<std::int64_t>(scaled / total);
    rest += scaled % total;
    out.new_tasks[i] = floor_size;
    if (rest >= total) {
      out.new_tasks[i] += 1;
      rest -= total;
    }
    on_iteration(RestTraceRecord{i, floor_size, static_cast<std::int64_t>(rest)});
  }
  out.final_rest = Rational(BigInt(static_cast<long>(rest)), BigInt(static_cast<long>(dist.total())));
  return out;
}

}  // namespace

RebalanceOutput rebalance_int(const TaskDistribution& dist, std::int64_t new_total) {
  return rebalance_int_impl(dist, new_total, [](const RestTraceRecord&) {});
}

RebalanceOutput rebalance_int_traced(const TaskDistribution& dist, std::int64_t new_total,
                                     std::vector<RestTraceRecord>& trace) {
  trace.clear();
  trace.reserve(dist.size());
  return rebalance_int_impl(dist, new_total,
                            [&trace](const RestTraceRecord& r) { trace.push_back(r); });
}

RebalanceOutput rebalance_rational(const TaskDistribution& dist, std::int64_t new_total) {
  require_new_total(new_total);
  const auto tasks = dist.tasks();
  const Rational total_tasks(dist.total());
  const Rational new_total_tasks(new_total);
  const Rational one(1);

  RebalanceOutput out;
  out.new_tasks.resize(tasks.size());
  Rational rest(0);
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Rational share = Rational(tasks[i]) / total_tasks;
    const Rational real_size = share * new_total_tasks;
    const BigInt floor_size = real_size.floor();
    rest += real_size - Rational(floor_size, BigInt(1));
    out.new_tasks[i] = floor_size.get_si();
    if (rest >= one) {
      out.new_tasks[i] += 1;
      rest -= one;
    }
  }
  out.final_rest = rest;
  return out;
}

std::vector<std::int64_t> parse_task_list(const std::string& text) {
  std::vector<std::int64_t> values;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string::npos) end = text.size();
    const char* first = text.data() + pos;
    const char* last = text.data() + end;
    while (first < last && *first == ' ') ++first;
    while (last > first && last[-1] == ' ') --last;
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (first == last || ec != std::errc{} || ptr != last) {
      throw std::invalid_argument("malformed task count '" + std::string(first, last) + "'");
    }
    values.push_back(v);
    pos = end + 1;
  }
  return values;
}

}  // namespace numguard
