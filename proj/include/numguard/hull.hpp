#pragma once

// Minimal incremental 3D convex hull whose visibility decisions go through a
// selectable orientation predicate, plus an exact validity checker.

#include <array>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "numguard/geometry.hpp"

namespace numguard {

enum class HullPredicate { FloatSingle, Majority, Exact };
const char* to_string(HullPredicate p);

using Facet = std::array<std::size_t, 3>;  // counterclockwise seen from outside
using Edge = std::pair<std::size_t, std::size_t>;

/// Indexed triangle set. `adjacency` maps each undirected edge (min, max) to
/// the facets that contain it.
class HullFacets {
public:
  HullFacets() = default;
  HullFacets(std::vector<Point3> vertices, std::vector<Facet> facets);

  const std::vector<Point3>& vertices() const { return vertices_; }
  const std::vector<Facet>& facets() const { return facets_; }
  const std::map<Edge, std::vector<std::size_t>>& adjacency() const { return adjacency_; }

private:
  std::vector<Point3> vertices_;
  std::vector<Facet> facets_;
  std::map<Edge, std::vector<std::size_t>> adjacency_;
};

/// Construction stopped because the predicate produced an inconsistent state.
struct HullFailure {
  std::size_t point_index = 0;
  std::string reason;
};

/// Exact predicate and every point coplanar (or fewer than four points).
class DegenerateInputError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

using HullResult = std::variant<HullFacets, HullFailure>;

/// Inserts points in input order into an initial simplex (the first
/// non-degenerate quadruple), removing the facets the predicate reports the
/// new point Above and stitching the horizon.
HullResult incremental_hull(const std::vector<Point3>& points, HullPredicate predicate);

struct HullValidity {
  bool well_formed = true;  // indices in range, three distinct indices per facet
  std::vector<std::size_t> malformed_facets;

  bool closed = true;  // every undirected edge in exactly two facets
  std::vector<std::pair<Edge, std::size_t>> closure_witnesses;  // edge, facet count

  bool euler = true;  // V - E + F == 2 over referenced vertices
  long vertex_count = 0, edge_count = 0, facet_count = 0;

  bool oriented = true;  // shared edges traversed in opposite directions
  std::vector<Edge> orientation_witnesses;  // directed edge used twice

  bool contained = true;  // no input point strictly Above a facet (exact)
  std::vector<std::pair<std::size_t, std::size_t>> containment_witnesses;  // point, facet

  bool valid() const { return well_formed && closed && euler && oriented && contained; }
};

/// Checks a hull against its input points using orient_exact only.
HullValidity validate_hull(const std::vector<Point3>& points, const HullFacets& hull);

nlohmann::ordered_json to_json(const HullValidity& v);
nlohmann::ordered_json to_json(const HullFacets& hull);

}  // namespace numguard
