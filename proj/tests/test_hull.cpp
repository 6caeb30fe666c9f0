#include <doctest.h>

#include <set>

#include "adversarial_cloud.hpp"
#include "numguard/hull.hpp"
#include "numguard/rng.hpp"

using namespace numguard;

namespace {

const std::vector<Point3> kSimplex{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

std::vector<Point3> cube() {
  std::vector<Point3> pts;
  for (int i = 0; i < 8; ++i) pts.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
  return pts;
}

const HullFacets& built(const HullResult& r) {
  REQUIRE(std::holds_alternative<HullFacets>(r));
  return std::get<HullFacets>(r);
}

}  // namespace

TEST_CASE("tetrahedron") {
  for (auto predicate : {HullPredicate::Exact, HullPredicate::FloatSingle, HullPredicate::Majority}) {
    const auto result = incremental_hull(kSimplex, predicate);
    const auto& hull = built(result);
    CHECK(hull.facets().size() == 4);
    for (const auto& [edge, facets] : hull.adjacency()) CHECK(facets.size() == 2);
    const auto v = validate_hull(kSimplex, hull);
    CHECK(v.valid());
    CHECK(v.vertex_count - v.edge_count + v.facet_count == 2);
  }
}

TEST_CASE("cube corners give a triangulated cube") {
  const auto pts = cube();
  const auto result = incremental_hull(pts, HullPredicate::Exact);
  const auto& hull = built(result);
  CHECK(hull.facets().size() == 12);
  const auto v = validate_hull(pts, hull);
  CHECK(v.valid());
  CHECK(v.vertex_count == 8);
  CHECK(v.edge_count == 18);
  CHECK(v.facet_count == 12);
}

TEST_CASE("interior and duplicate points are not hull vertices") {
  auto pts = cube();
  pts.push_back({0.5, 0.5, 0.5});
  pts.push_back({1, 1, 1});
  pts.push_back({0.5, 0.5, 0});  // on a face
  const auto result = incremental_hull(pts, HullPredicate::Exact);
  const auto& hull = built(result);
  const auto v = validate_hull(pts, hull);
  CHECK(v.valid());
  std::set<std::size_t> used;
  for (const auto& f : hull.facets()) used.insert(f.begin(), f.end());
  CHECK(used.count(8) == 0);
  CHECK(used.count(9) == 0);
}

TEST_CASE("degenerate inputs under the exact predicate") {
  CHECK_THROWS_AS(incremental_hull({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}, HullPredicate::Exact),
                  DegenerateInputError);
  CHECK_THROWS_AS(incremental_hull({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {2, 3, 0}},
                                   HullPredicate::Exact),
                  DegenerateInputError);
  CHECK_THROWS_AS(incremental_hull({{0, 0, 0}, {1, 1, 1}, {2, 2, 2}, {3, 3, 3}}, HullPredicate::Exact),
                  DegenerateInputError);
  CHECK_THROWS_AS(incremental_hull({{0, 0, 0}, {0, 0, 0}, {0, 0, 0}, {0, 0, 0}}, HullPredicate::Exact),
                  DegenerateInputError);
}

TEST_CASE("validate_hull negative cases") {
  SUBCASE("one facet reversed") {
    const HullFacets bad(kSimplex, {{0, 1, 2}, {0, 1, 3}, {1, 2, 3}, {2, 0, 3}});
    const auto v = validate_hull(kSimplex, bad);
    CHECK(v.closed);
    CHECK(v.euler);
    CHECK_FALSE(v.oriented);
    CHECK(v.orientation_witnesses == std::vector<Edge>{{0, 1}, {1, 2}, {2, 0}});
    CHECK_FALSE(v.contained);
    CHECK_FALSE(v.valid());
  }
  SUBCASE("missing facet") {
    const HullFacets open(kSimplex, {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}});
    const auto v = validate_hull(kSimplex, open);
    CHECK_FALSE(v.closed);
    CHECK(v.closure_witnesses.size() == 3);
    CHECK_FALSE(v.euler);
  }
  SUBCASE("point outside") {
    auto pts = kSimplex;
    pts.push_back({1, 1, 1});
    const HullFacets small(pts, {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {2, 0, 3}});
    const auto v = validate_hull(pts, small);
    CHECK_FALSE(v.contained);
    CHECK(v.containment_witnesses == std::vector<std::pair<std::size_t, std::size_t>>{{4, 2}});
  }
  SUBCASE("malformed facet") {
    const HullFacets junk(kSimplex, {{0, 0, 1}, {0, 1, 9}});
    const auto v = validate_hull(kSimplex, junk);
    CHECK_FALSE(v.well_formed);
    CHECK(v.malformed_facets == std::vector<std::size_t>{0, 1});
  }
}

TEST_CASE("exact hulls of random clouds are valid") {
  SplitMix64 rng(77);
  for (int trial = 0; trial < 150; ++trial) {
    const auto n = static_cast<std::size_t>(rng.uniform(4, 40));
    std::vector<Point3> pts(n);
    for (auto& p : pts) {
      if (trial % 2) {
        p = {static_cast<double>(rng.uniform(-3, 3)), static_cast<double>(rng.uniform(-3, 3)),
             static_cast<double>(rng.uniform(-3, 3))};
      } else {
        p = {static_cast<double>(rng.next() >> 11) * 0x1p-53, static_cast<double>(rng.next() >> 11) * 0x1p-53,
             static_cast<double>(rng.next() >> 11) * 0x1p-53};
      }
    }
    HullResult result;
    try {
      result = incremental_hull(pts, HullPredicate::Exact);
    } catch (const DegenerateInputError&) {
      continue;
    }
    CHECK(validate_hull(pts, built(result)).valid());
  }
}

TEST_CASE("recorded adversarial cloud breaks the float hull") {
  const auto pts = read_points_file(std::string(NUMGUARD_FIXTURE_DIR) + "/hull_adversarial.pts");
  const auto result = incremental_hull(pts, HullPredicate::FloatSingle);
  if (const auto* hull = std::get_if<HullFacets>(&result)) {
    CHECK_FALSE(validate_hull(pts, *hull).valid());
  } else {
    CHECK(std::get<HullFailure>(result).point_index < pts.size());
  }
  // the exact predicate copes with the same cloud
  CHECK(validate_hull(pts, built(incremental_hull(pts, HullPredicate::Exact))).valid());
}

TEST_CASE("adversarial clouds: exact hull always valid, float hull breaks for some seed") {
  int float_failures = 0;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    const auto cloud = testing::adversarial_cloud(seed);
    CHECK(validate_hull(cloud, built(incremental_hull(cloud, HullPredicate::Exact))).valid());
    const auto r = incremental_hull(cloud, HullPredicate::FloatSingle);
    const auto* hull = std::get_if<HullFacets>(&r);
    if (!hull || !validate_hull(cloud, *hull).valid()) ++float_failures;
  }
  CHECK(float_failures > 0);
}
