#pragma once

// Directed search for near-coplanar quadruples on which the floating-point
// orientation predicates (single base, majority vote) disagree with the exact
// sign, and SMT-LIB2 emission of the same disagreement query.

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "numguard/geometry.hpp"
#include "numguard/rng.hpp"

namespace numguard {

enum class SearchMode { SingleBase, Majority };
const char* to_string(SearchMode m);

/// Pins one of the twelve coordinates (named ax, ay, az, bx, ..., dz) in the
/// emitted SMT query.
struct FixedCoordinate {
  std::string name;
  double value = 0.0;
};

struct OrientSearchConfig {
  FloatWidth width = FloatWidth::Binary64;
  // Coordinates of a, b, c have magnitude in [2^exponent_min, 2^(exponent_max+1)).
  int exponent_min = 0;
  int exponent_max = 2;
  int ulp_radius = 4;
  std::uint64_t iterations = 1'000'000;
  double time_budget_seconds = 300.0;  // <= 0 disables the budget
  std::uint64_t seed = 0;
  SearchMode mode = SearchMode::SingleBase;
  unsigned jobs = 1;
  std::size_t max_counterexamples = 100;  // statistics still count every finding
  std::vector<FixedCoordinate> fixed;     // SMT emission only

  void validate() const;
};

struct NearCoplanarSample {
  Point3 a, b, c, d;
  Point3 on_plane;  // d before perturbation; exactly coplanar with a, b, c
  int axis = 0;     // perturbed coordinate of on_plane: 0 = x, 1 = y, 2 = z
  int ulps = 0;     // signed number of ulp steps, 1 <= |ulps| <= ulp_radius
  OrientationSign exact_sign = OrientationSign::Coplanar;
  std::uint64_t attempts = 1;
};

/// Builds a, b, c in the configured exponent band, an exactly representable
/// on-plane point d0 = a + (b - a) 2^-i + (c - a) 2^-j, and d = d0 moved by a
/// nonzero number of ulps along one axis, all at the configured width. Draws
/// are repeated until d0 is exactly coplanar and d is not; throws
/// std::runtime_error if that fails too often.
NearCoplanarSample gen_near_coplanar(const OrientSearchConfig& config, SplitMix64& rng);

struct OrientCounterexample {
  Point3 a, b, c, d;
  std::array<OrientationSign, 3> per_base{};
  OrientationSign majority = OrientationSign::Coplanar;
  bool tie = false;
  OrientationSign exact = OrientationSign::Coplanar;
  FloatWidth width = FloatWidth::Binary64;
  std::uint64_t iteration = 0;
};

/// Recomputes every sign of a counterexample from its points.
OrientCounterexample evaluate_quadruple(const Point3& a, const Point3& b, const Point3& c,
                                        const Point3& d, FloatWidth width);
/// True iff recomputation reproduces all recorded signs.
bool replays_exactly(const OrientCounterexample& cx);
/// Mode criterion: some base wrong (SingleBase) or majority wrong (Majority).
bool is_disagreement(const OrientCounterexample& cx, SearchMode mode);

struct OrientSearchStats {
  std::uint64_t iterations_run = 0;
  std::uint64_t one_base_errors = 0;  // >= 1 base sign differs from exact
  std::uint64_t two_base_errors = 0;  // >= 2 base signs differ from exact
  std::uint64_t majority_errors = 0;
  std::uint64_t majority_ties = 0;
  std::array<std::uint64_t, 3> per_base_errors{};
  std::uint64_t exact_above = 0;
  std::uint64_t exact_below = 0;
  std::uint64_t generator_attempts = 0;
  bool stopped_by_time = false;

  /// majority_errors <= two_base_errors <= one_base_errors
  bool monotone() const {
    return majority_errors <= two_base_errors && two_base_errors <= one_base_errors;
  }
};

struct OrientSearchReport {
  OrientSearchConfig config;
  OrientSearchStats stats;
  std::vector<OrientCounterexample> counterexamples;
};

OrientSearchReport search_disagreement(const OrientSearchConfig& config);

nlohmann::ordered_json to_json(const OrientSearchConfig& config);
nlohmann::ordered_json to_json(const OrientSearchReport& report);
/// Fixture object: hex-float points, recorded signs, width, config and seed.
nlohmann::ordered_json fixture_json(const OrientCounterexample& cx,
                                    const OrientSearchConfig& config);
/// Reads a fixture object (as produced by fixture_json). Throws on malformed input.
OrientCounterexample fixture_from_json(const nlohmann::json& j);

/// Writes the SMT-LIB2 disagreement query for the configured width and mode.
void emit_smt(const OrientSearchConfig& config, std::ostream& out);

/// IEEE 754 bit-pattern literal `(fp #b. #b. #b.)` of value at width.
std::string smt_fp_literal(double value, FloatWidth width);

}  // namespace numguard
