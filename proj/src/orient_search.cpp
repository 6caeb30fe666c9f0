#include "numguard/orient_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "numguard/hexfloat.hpp"
#include "numguard/parallel.hpp"

namespace numguard {

const char* to_string(SearchMode m) {
  return m == SearchMode::SingleBase ? "single" : "majority";
}

namespace {

constexpr std::array<const char*, 12> kCoordinateNames{"ax", "ay", "az", "bx", "by", "bz",
                                                       "cx", "cy", "cz", "dx", "dy", "dz"};

bool representable(double v, FloatWidth width) {
  return width == FloatWidth::Binary64 || static_cast<double>(static_cast<float>(v)) == v;
}

}  // namespace

void OrientSearchConfig::validate() const {
  if (width != FloatWidth::Binary32 && width != FloatWidth::Binary64) {
    throw std::invalid_argument("float width must be 32 or 64");
  }
  if (exponent_min > exponent_max) throw std::invalid_argument("exponent_min > exponent_max");
  // keep |det| terms, roughly (2^(emax+2))^3, finite at the chosen width
  const bool narrow = width == FloatWidth::Binary32;
  const int lo = narrow ? -100 : -1000;
  const int hi = narrow ? 38 : 300;
  if (exponent_min < lo || exponent_max > hi) {
    throw std::invalid_argument("exponent band must lie in [" + std::to_string(lo) + ", " +
                                std::to_string(hi) + "] for this width");
  }
  if (ulp_radius < 1) throw std::invalid_argument("ulp radius must be >= 1");
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (jobs < 1) throw std::invalid_argument("jobs must be >= 1");
  for (const auto& f : fixed) {
    if (std::find(kCoordinateNames.begin(), kCoordinateNames.end(), f.name) ==
        kCoordinateNames.end()) {
      throw std::invalid_argument("unknown coordinate '" + f.name + "' (use ax..dz)");
    }
    if (!std::isfinite(f.value) || !representable(f.value, width)) {
      throw std::invalid_argument("fixed value for " + f.name +
                                  " is not representable at the configured width");
    }
  }
}

namespace {

template <std::floating_point T>
T random_coordinate(const OrientSearchConfig& config, SplitMix64& rng) {
  // Leave the low mantissa bits clear so the power-of-two affine combination
  // producing the on-plane point is usually exact.
  constexpr int kDigits = std::numeric_limits<T>::digits;
  constexpr int kUsedBits = kDigits - 4;
  const auto mantissa = static_cast<T>(
      rng.uniform(std::int64_t{1} << (kUsedBits - 1), (std::int64_t{1} << kUsedBits) - 1));
  const auto e = static_cast<int>(rng.uniform(config.exponent_min, config.exponent_max));
  const T v = std::ldexp(mantissa, e - (kUsedBits - 1));
  return rng.coin() ? -v : v;
}

template <std::floating_point T>
Point3 random_point(const OrientSearchConfig& config, SplitMix64& rng) {
  const T x = random_coordinate<T>(config, rng);
  const T y = random_coordinate<T>(config, rng);
  const T z = random_coordinate<T>(config, rng);
  return {x, y, z};
}

template <std::floating_point T>
std::optional<NearCoplanarSample> try_sample(const OrientSearchConfig& config, SplitMix64& rng) {
  NearCoplanarSample s;
  s.a = random_point<T>(config, rng);
  s.b = random_point<T>(config, rng);
  s.c = random_point<T>(config, rng);
  const T wb = std::ldexp(T(1), -static_cast<int>(rng.uniform(0, 3)));
  const T wc = std::ldexp(T(1), -static_cast<int>(rng.uniform(0, 3)));
  auto combine = [&](double a, double b, double c) {
    const T ta = static_cast<T>(a);
    return static_cast<double>(ta + (static_cast<T>(b) - ta) * wb + (static_cast<T>(c) - ta) * wc);
  };
  s.on_plane = {combine(s.a.x, s.b.x, s.c.x), combine(s.a.y, s.b.y, s.c.y),
                combine(s.a.z, s.b.z, s.c.z)};
  if (orient_exact(s.a, s.b, s.c, s.on_plane) != OrientationSign::Coplanar) return std::nullopt;

  s.axis = static_cast<int>(rng.uniform(0, 2));
  const auto magnitude = static_cast<int>(rng.uniform(1, config.ulp_radius));
  s.ulps = rng.coin() ? magnitude : -magnitude;
  const T direction = s.ulps > 0 ? std::numeric_limits<T>::infinity()
                                 : -std::numeric_limits<T>::infinity();
  s.d = s.on_plane;
  double* coord = s.axis == 0 ? &s.d.x : s.axis == 1 ? &s.d.y : &s.d.z;
  T moved = static_cast<T>(*coord);
  for (int k = 0; k < magnitude; ++k) moved = std::nextafter(moved, direction);
  if (!std::isfinite(moved)) return std::nullopt;
  *coord = static_cast<double>(moved);

  s.exact_sign = orient_exact(s.a, s.b, s.c, s.d);
  if (s.exact_sign == OrientationSign::Coplanar) return std::nullopt;
  return s;
}

}  // namespace

NearCoplanarSample gen_near_coplanar(const OrientSearchConfig& config, SplitMix64& rng) {
  constexpr std::uint64_t kMaxAttempts = 100000;
  for (std::uint64_t attempt = 1; attempt <= kMaxAttempts; ++attempt) {
    auto s = config.width == FloatWidth::Binary32 ? try_sample<float>(config, rng)
                                                  : try_sample<double>(config, rng);
    if (s) {
      s->attempts = attempt;
      return *s;
    }
  }
  throw std::runtime_error("gen_near_coplanar: no exactly coplanar construction found");
}

OrientCounterexample evaluate_quadruple(const Point3& a, const Point3& b, const Point3& c,
                                        const Point3& d, FloatWidth width) {
  OrientCounterexample cx;
  cx.a = a;
  cx.b = b;
  cx.c = c;
  cx.d = d;
  cx.width = width;
  const MajorityResult m = orient_majority_detail(a, b, c, d, width);
  cx.per_base = m.per_base;
  cx.majority = m.sign;
  cx.tie = m.tie;
  cx.exact = orient_exact(a, b, c, d);
  return cx;
}

bool replays_exactly(const OrientCounterexample& cx) {
  const auto r = evaluate_quadruple(cx.a, cx.b, cx.c, cx.d, cx.width);
  return r.per_base == cx.per_base && r.majority == cx.majority && r.tie == cx.tie &&
         r.exact == cx.exact;
}

bool is_disagreement(const OrientCounterexample& cx, SearchMode mode) {
  if (mode == SearchMode::Majority) return cx.majority != cx.exact;
  for (auto s : cx.per_base) {
    if (s != cx.exact) return true;
  }
  return false;
}

OrientSearchReport search_disagreement(const OrientSearchConfig& config) {
  config.validate();
  OrientSearchReport report;
  report.config = config;

  struct Outcome {
    OrientCounterexample cx;
    std::uint64_t attempts = 0;
  };
  auto body = [&config](std::uint64_t i) {
    SplitMix64 rng = SplitMix64::stream(config.seed, i);
    const NearCoplanarSample s = gen_near_coplanar(config, rng);
    Outcome o{evaluate_quadruple(s.a, s.b, s.c, s.d, config.width), s.attempts};
    o.cx.iteration = i;
    return o;
  };
  OrientSearchStats& st = report.stats;
  auto sink = [&](std::uint64_t, Outcome&& o) {
    const OrientCounterexample& cx = o.cx;
    st.generator_attempts += o.attempts;
    (cx.exact == OrientationSign::Above ? st.exact_above : st.exact_below) += 1;
    int wrong = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      if (cx.per_base[k] != cx.exact) {
        ++wrong;
        ++st.per_base_errors[k];
      }
    }
    if (wrong >= 1) ++st.one_base_errors;
    if (wrong >= 2) ++st.two_base_errors;
    if (cx.majority != cx.exact) ++st.majority_errors;
    if (cx.tie) ++st.majority_ties;
    if (is_disagreement(cx, config.mode) &&
        report.counterexamples.size() < config.max_counterexamples) {
      report.counterexamples.push_back(cx);
    }
  };
  st.iterations_run = run_chunked<Outcome>(config.iterations, config.jobs,
                                           config.time_budget_seconds, body, sink,
                                           &st.stopped_by_time);
  return report;
}

nlohmann::ordered_json to_json(const OrientSearchConfig& c) {
  nlohmann::ordered_json fixed = nlohmann::ordered_json::array();
  for (const auto& f : c.fixed) fixed.push_back({{"name", f.name}, {"value", to_hex(f.value)}});
  return {{"float_width", static_cast<int>(c.width)},
          {"exponent_min", c.exponent_min},
          {"exponent_max", c.exponent_max},
          {"ulp_radius", c.ulp_radius},
          {"iterations", c.iterations},
          {"time_budget_seconds", c.time_budget_seconds},
          {"seed", c.seed},
          {"mode", to_string(c.mode)},
          {"max_counterexamples", c.max_counterexamples},
          {"fixed", std::move(fixed)}};
}

namespace {

nlohmann::ordered_json point_json(const Point3& p) {
  return {to_hex(p.x), to_hex(p.y), to_hex(p.z)};
}

Point3 point_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("point must be 3 strings");
  return {parse_double(j[0].get<std::string>()), parse_double(j[1].get<std::string>()),
          parse_double(j[2].get<std::string>())};
}

OrientationSign sign_from_json(const nlohmann::json& j) {
  const auto s = parse_sign(j.get<std::string>());
  if (!s) throw std::invalid_argument("unknown sign '" + j.get<std::string>() + "'");
  return *s;
}

}  // namespace

nlohmann::ordered_json fixture_json(const OrientCounterexample& cx,
                                    const OrientSearchConfig& config) {
  return {{"schema_version", 1},
          {"float_width", static_cast<int>(cx.width)},
          {"a", point_json(cx.a)},
          {"b", point_json(cx.b)},
          {"c", point_json(cx.c)},
          {"d", point_json(cx.d)},
          {"per_base",
           {to_string(cx.per_base[0]), to_string(cx.per_base[1]), to_string(cx.per_base[2])}},
          {"majority", to_string(cx.majority)},
          {"tie", cx.tie},
          {"exact", to_string(cx.exact)},
          {"iteration", cx.iteration},
          {"seed", config.seed},
          {"generator", SplitMix64::kName},
          {"config", to_json(config)}};
}

OrientCounterexample fixture_from_json(const nlohmann::json& j) {
  OrientCounterexample cx;
  const int width = j.at("float_width").get<int>();
  if (width != 32 && width != 64) throw std::invalid_argument("float_width must be 32 or 64");
  cx.width = static_cast<FloatWidth>(width);
  cx.a = point_from_json(j.at("a"));
  cx.b = point_from_json(j.at("b"));
  cx.c = point_from_json(j.at("c"));
  cx.d = point_from_json(j.at("d"));
  const auto& per = j.at("per_base");
  if (!per.is_array() || per.size() != 3) throw std::invalid_argument("per_base needs 3 signs");
  for (std::size_t k = 0; k < 3; ++k) cx.per_base[k] = sign_from_json(per[k]);
  cx.majority = sign_from_json(j.at("majority"));
  cx.tie = j.at("tie").get<bool>();
  cx.exact = sign_from_json(j.at("exact"));
  cx.iteration = j.value("iteration", std::uint64_t{0});
  return cx;
}

nlohmann::ordered_json to_json(const OrientSearchReport& report) {
  const OrientSearchStats& st = report.stats;
  const double n = st.iterations_run ? static_cast<double>(st.iterations_run) : 1.0;
  nlohmann::ordered_json rates = nlohmann::ordered_json::array();
  for (auto e : st.per_base_errors) rates.push_back(static_cast<double>(e) / n);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& cx : report.counterexamples) rows.push_back(fixture_json(cx, report.config));
  return {{"schema_version", 1},
          {"command", "search-orient"},
          {"generator", SplitMix64::kName},
          {"config", to_json(report.config)},
          {"statistics",
           {{"iterations_run", st.iterations_run},
            {"one_base_errors", st.one_base_errors},
            {"two_base_errors", st.two_base_errors},
            {"majority_errors", st.majority_errors},
            {"majority_ties", st.majority_ties},
            {"per_base_errors", st.per_base_errors},
            {"per_base_error_rates", std::move(rates)},
            {"exact_above", st.exact_above},
            {"exact_below", st.exact_below},
            {"generator_attempts", st.generator_attempts},
            {"monotone_consistent", st.monotone()},
            {"stopped_by_time", st.stopped_by_time}}},
          {"counterexamples", std::move(rows)}};
}

}  // namespace numguard
