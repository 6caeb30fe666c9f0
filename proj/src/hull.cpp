#include "numguard/hull.hpp"

#include <algorithm>
#include <limits>
#include <optional>
#include <set>

namespace numguard {

const char* to_string(HullPredicate p) {
  switch (p) {
    case HullPredicate::FloatSingle: return "float";
    case HullPredicate::Majority: return "majority";
    case HullPredicate::Exact: return "exact";
  }
  return "?";
}

namespace {

Edge undirected(std::size_t u, std::size_t v) { return {std::min(u, v), std::max(u, v)}; }

}  // namespace

HullFacets::HullFacets(std::vector<Point3> vertices, std::vector<Facet> facets)
    : vertices_(std::move(vertices)), facets_(std::move(facets)) {
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    const Facet& t = facets_[f];
    for (int k = 0; k < 3; ++k) adjacency_[undirected(t[k], t[(k + 1) % 3])].push_back(f);
  }
}

namespace {

class HullBuilder {
public:
  HullBuilder(const std::vector<Point3>& points, HullPredicate predicate)
      : points_(points), predicate_(predicate) {}

  HullResult run();

private:
  OrientationSign orient(const Facet& f, std::size_t p) const {
    const Point3 &a = points_[f[0]], &b = points_[f[1]], &c = points_[f[2]], &d = points_[p];
    switch (predicate_) {
      case HullPredicate::FloatSingle: return orient_base(a, b, c, d, Base::First);
      case HullPredicate::Majority: return orient_majority(a, b, c, d);
      case HullPredicate::Exact: return orient_exact(a, b, c, d);
    }
    return OrientationSign::Coplanar;
  }

  bool collinear(std::size_t i, std::size_t j, std::size_t k) const;
  // Returns false if a directed edge of the facet is already in use.
  bool add_facet(const Facet& f);
  void remove_facet(std::size_t index);
  std::optional<HullFailure> insert(std::size_t p);

  const std::vector<Point3>& points_;
  HullPredicate predicate_;
  std::vector<Facet> facets_;
  std::vector<bool> alive_;
  std::size_t alive_count_ = 0;
  std::map<Edge, std::size_t> directed_;  // directed edge -> facet
};

bool HullBuilder::collinear(std::size_t i, std::size_t j, std::size_t k) const {
  // (pj - pi) x (pk - pi) is zero iff it is orthogonal to three axis directions.
  const Point3& o = points_[i];
  constexpr double kInf = std::numeric_limits<double>::infinity();
  const std::array<Point3, 3> probes{Point3{std::nextafter(o.x, kInf), o.y, o.z},
                                     Point3{o.x, std::nextafter(o.y, kInf), o.z},
                                     Point3{o.x, o.y, std::nextafter(o.z, kInf)}};
  return std::all_of(probes.begin(), probes.end(), [&](const Point3& q) {
    return orient_exact(o, points_[j], points_[k], q) == OrientationSign::Coplanar;
  });
}

bool HullBuilder::add_facet(const Facet& f) {
  for (int k = 0; k < 3; ++k) {
    if (directed_.count({f[k], f[(k + 1) % 3]})) return false;
  }
  const std::size_t index = facets_.size();
  facets_.push_back(f);
  alive_.push_back(true);
  ++alive_count_;
  for (int k = 0; k < 3; ++k) directed_[{f[k], f[(k + 1) % 3]}] = index;
  return true;
}

void HullBuilder::remove_facet(std::size_t index) {
  const Facet& f = facets_[index];
  for (int k = 0; k < 3; ++k) directed_.erase({f[k], f[(k + 1) % 3]});
  alive_[index] = false;
  --alive_count_;
}

std::optional<HullFailure> HullBuilder::insert(std::size_t p) {
  std::vector<bool> visible(facets_.size(), false);
  std::size_t visible_count = 0;
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    if (alive_[f] && orient(facets_[f], p) == OrientationSign::Above) {
      visible[f] = true;
      ++visible_count;
    }
  }
  if (visible_count == 0) return std::nullopt;
  if (visible_count == alive_count_) return HullFailure{p, "point is Above every facet"};

  std::map<std::size_t, std::size_t> next;  // horizon u -> v
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    if (!visible[f]) continue;
    for (int k = 0; k < 3; ++k) {
      const std::size_t u = facets_[f][k], v = facets_[f][(k + 1) % 3];
      const auto twin = directed_.find({v, u});
      if (twin == directed_.end()) return HullFailure{p, "open edge before insertion"};
      if (visible[twin->second]) continue;
      if (!next.emplace(u, v).second) {
        return HullFailure{p, "horizon is not a simple cycle (vertex " + std::to_string(u) +
                                  " starts two horizon edges)"};
      }
    }
  }

  std::vector<Edge> cycle;
  std::size_t u = next.begin()->first;
  do {
    const auto it = next.find(u);
    if (it == next.end() || cycle.size() > next.size()) {
      return HullFailure{p, "horizon is not a simple cycle"};
    }
    cycle.emplace_back(u, it->second);
    u = it->second;
  } while (u != next.begin()->first);
  if (cycle.size() != next.size()) {
    return HullFailure{p, "horizon splits into several cycles"};
  }

  for (std::size_t f = 0; f < visible.size(); ++f) {
    if (visible[f]) remove_facet(f);
  }
  for (const auto& [from, to] : cycle) {
    if (!add_facet({from, to, p})) {
      return HullFailure{p, "stitching reuses directed edge " + std::to_string(from) + "->" +
                                std::to_string(to)};
    }
  }
  return std::nullopt;
}

HullResult HullBuilder::run() {
  const std::size_t n = points_.size();
  if (n < 4) throw DegenerateInputError("hull needs at least four points");
  for (std::size_t i = 0; i < n; ++i) {
    if (!points_[i].is_finite()) {
      throw std::invalid_argument("point " + std::to_string(i) + " has a non-finite coordinate");
    }
  }

  const std::size_t i0 = 0;
  std::size_t i1 = 1;
  while (i1 < n && points_[i1] == points_[i0]) ++i1;
  std::size_t i2 = i1 + 1;
  while (i2 < n && collinear(i0, i1, i2)) ++i2;
  if (i1 >= n || i2 >= n) throw DegenerateInputError("all points are collinear");

  std::size_t i3 = i2 + 1;
  OrientationSign s = OrientationSign::Coplanar;
  for (; i3 < n; ++i3) {
    s = orient({i0, i1, i2}, i3);
    if (s != OrientationSign::Coplanar) break;
  }
  if (i3 >= n) {
    if (predicate_ == HullPredicate::Exact) throw DegenerateInputError("all points are coplanar");
    return HullFailure{n - 1, "predicate reports every point coplanar with the first plane"};
  }

  const std::array<std::size_t, 4> simplex{i0, i1, i2, i3};
  const std::size_t b1 = s == OrientationSign::Above ? i1 : i2;
  const std::size_t b2 = s == OrientationSign::Above ? i2 : i1;
  for (const Facet& f : {Facet{i0, b2, b1}, Facet{i0, b1, i3}, Facet{b1, b2, i3},
                         Facet{b2, i0, i3}}) {
    add_facet(f);
  }

  for (std::size_t p = 0; p < n; ++p) {
    if (std::find(simplex.begin(), simplex.end(), p) != simplex.end()) continue;
    if (auto failure = insert(p)) return *failure;
  }

  std::vector<Facet> result;
  result.reserve(alive_count_);
  for (std::size_t f = 0; f < facets_.size(); ++f) {
    if (alive_[f]) result.push_back(facets_[f]);
  }
  return HullFacets(points_, std::move(result));
}

}  // namespace

HullResult incremental_hull(const std::vector<Point3>& points, HullPredicate predicate) {
  return HullBuilder(points, predicate).run();
}

HullValidity validate_hull(const std::vector<Point3>& points, const HullFacets& hull) {
  constexpr std::size_t kMaxWitnesses = 256;
  HullValidity v;
  std::vector<Facet> facets;
  std::vector<std::size_t> original_index;
  for (std::size_t f = 0; f < hull.facets().size(); ++f) {
    const Facet& t = hull.facets()[f];
    const bool in_range = std::all_of(t.begin(), t.end(), [&](auto i) { return i < points.size(); });
    if (!in_range || t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      v.well_formed = false;
      v.malformed_facets.push_back(f);
    } else {
      facets.push_back(t);
      original_index.push_back(f);
    }
  }

  std::map<Edge, std::size_t> directed_count;
  std::map<Edge, std::size_t> undirected_count;
  std::set<std::size_t> referenced;
  for (const Facet& t : facets) {
    for (int k = 0; k < 3; ++k) {
      const std::size_t a = t[k], b = t[(k + 1) % 3];
      ++directed_count[{a, b}];
      ++undirected_count[undirected(a, b)];
      referenced.insert(a);
    }
  }

  for (const auto& [edge, count] : undirected_count) {
    if (count != 2) {
      v.closed = false;
      if (v.closure_witnesses.size() < kMaxWitnesses) v.closure_witnesses.emplace_back(edge, count);
    }
  }

  v.vertex_count = static_cast<long>(referenced.size());
  v.edge_count = static_cast<long>(undirected_count.size());
  v.facet_count = static_cast<long>(facets.size());
  v.euler = v.vertex_count - v.edge_count + v.facet_count == 2;

  for (const auto& [edge, count] : directed_count) {
    if (count > 1) {
      v.oriented = false;
      if (v.orientation_witnesses.size() < kMaxWitnesses) v.orientation_witnesses.push_back(edge);
    }
  }

  for (std::size_t p = 0; p < points.size(); ++p) {
    for (std::size_t f = 0; f < facets.size(); ++f) {
      const Facet& t = facets[f];
      if (orient_exact(points[t[0]], points[t[1]], points[t[2]], points[p]) ==
          OrientationSign::Above) {
        v.contained = false;
        if (v.containment_witnesses.size() < kMaxWitnesses) v.containment_witnesses.emplace_back(p, original_index[f]);
      }
    }
  }
  return v;
}

nlohmann::ordered_json to_json(const HullValidity& v) {
  using nlohmann::ordered_json;
  ordered_json closure = ordered_json::array();
  for (const auto& [edge, count] : v.closure_witnesses) {
    closure.push_back({{"edge", {edge.first, edge.second}}, {"facets", count}});
  }
  ordered_json orientation = ordered_json::array();
  for (const auto& edge : v.orientation_witnesses) orientation.push_back({edge.first, edge.second});
  ordered_json containment = ordered_json::array();
  for (const auto& [point, facet] : v.containment_witnesses) {
    containment.push_back({{"point", point}, {"facet", facet}});
  }
  return {{"valid", v.valid()},
          {"well_formed", {{"pass", v.well_formed}, {"witnesses", v.malformed_facets}}},
          {"closure", {{"pass", v.closed}, {"witnesses", std::move(closure)}}},
          {"euler",
           {{"pass", v.euler},
            {"V", v.vertex_count},
            {"E", v.edge_count},
            {"F", v.facet_count},
            {"characteristic", v.vertex_count - v.edge_count + v.facet_count}}},
          {"orientation", {{"pass", v.oriented}, {"witnesses", std::move(orientation)}}},
          {"containment", {{"pass", v.contained}, {"witnesses", std::move(containment)}}}};
}

nlohmann::ordered_json to_json(const HullFacets& hull) {
  nlohmann::ordered_json facets = nlohmann::ordered_json::array();
  for (const Facet& f : hull.facets()) facets.push_back({f[0], f[1], f[2]});
  return facets;
}

}  // namespace numguard
