#pragma once

// 3D orientation predicate: sign of det[b - a, c - a, d - a].
//
// Above means d lies on the side of plane(a, b, c) from which a, b, c appear
// counterclockwise, i.e. the determinant is positive.

#include <array>
#include <cmath>
#include <concepts>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace numguard {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  bool is_finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
  friend bool operator==(const Point3&, const Point3&) = default;
};

enum class OrientationSign : int { Below = -1, Coplanar = 0, Above = 1 };

const char* to_string(OrientationSign s);
std::optional<OrientationSign> parse_sign(std::string_view text);
inline OrientationSign flip(OrientationSign s) { return static_cast<OrientationSign>(-static_cast<int>(s)); }

/// Which of the three spanning points serves as the base p1 of the plane.
/// The spanning triple is rotated cyclically: First -> (a,b,c),
/// Second -> (b,c,a), Third -> (c,a,b).
enum class Base { First = 0, Second = 1, Third = 2 };
inline constexpr std::array<Base, 3> kAllBases{Base::First, Base::Second, Base::Third};

enum class FloatWidth { Binary32 = 32, Binary64 = 64 };

template <std::floating_point T>
OrientationSign sign_of(T value) {
  if (value > T(0)) return OrientationSign::Above;
  if (value < T(0)) return OrientationSign::Below;
  return OrientationSign::Coplanar;
}

/// Floating-point determinant det[p2 - p1, p3 - p1, d - p1] in scalar T, with
/// each product rounded separately and this exact evaluation order:
///   m1 = vy*wz - vz*wy;  m2 = vx*wz - vz*wx;  m3 = vx*wy - vy*wx
///   det = (ux*m1 - uy*m2) + uz*m3
/// where u = p2 - p1, v = p3 - p1, w = d - p1. Coordinates are first converted
/// to T (exact when they are representable in T).
template <std::floating_point T>
T orient_determinant(const Point3& p1, const Point3& p2, const Point3& p3, const Point3& d) {
  const T ax = static_cast<T>(p1.x), ay = static_cast<T>(p1.y), az = static_cast<T>(p1.z);
  const T ux = static_cast<T>(p2.x) - ax, uy = static_cast<T>(p2.y) - ay,
          uz = static_cast<T>(p2.z) - az;
  const T vx = static_cast<T>(p3.x) - ax, vy = static_cast<T>(p3.y) - ay,
          vz = static_cast<T>(p3.z) - az;
  const T wx = static_cast<T>(d.x) - ax, wy = static_cast<T>(d.y) - ay,
          wz = static_cast<T>(d.z) - az;
  const T m1 = vy * wz - vz * wy;
  const T m2 = vx * wz - vz * wx;
  const T m3 = vx * wy - vy * wx;
  return (ux * m1 - uy * m2) + uz * m3;
}

template <std::floating_point T>
OrientationSign orient_base_as(const Point3& a, const Point3& b, const Point3& c,
                               const Point3& d, Base base) {
  switch (base) {
    case Base::First: return sign_of(orient_determinant<T>(a, b, c, d));
    case Base::Second: return sign_of(orient_determinant<T>(b, c, a, d));
    case Base::Third: return sign_of(orient_determinant<T>(c, a, b, d));
  }
  return OrientationSign::Coplanar;
}

/// Single-base floating-point predicate; binary64 unless width says otherwise.
OrientationSign orient_base(const Point3& a, const Point3& b, const Point3& c, const Point3& d,
                            Base base, FloatWidth width = FloatWidth::Binary64);

struct MajorityResult {
  OrientationSign sign = OrientationSign::Coplanar;
  std::array<OrientationSign, 3> per_base{};
  bool tie = false;  // all three evaluations differ; sign is then Coplanar
};

/// Majority of the three base evaluations.
MajorityResult orient_majority_detail(const Point3& a, const Point3& b, const Point3& c,
                                      const Point3& d, FloatWidth width = FloatWidth::Binary64);

/// Majority vote over three per-base signs, with the Coplanar-on-tie rule.
MajorityResult majority_of(const std::array<OrientationSign, 3>& per_base);

inline OrientationSign orient_majority(const Point3& a, const Point3& b, const Point3& c,
                                       const Point3& d,
                                       FloatWidth width = FloatWidth::Binary64) {
  return orient_majority_detail(a, b, c, d, width).sign;
}

/// Exact sign of det[b - a, c - a, d - a], treating every coordinate as the
/// rational it denotes. Requires finite coordinates (throws otherwise).
OrientationSign orient_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d);

/// Parses "x,y,z" where each field is decimal or hex-float.
Point3 parse_point(std::string_view line);
/// "x,y,z" with hex-float fields.
std::string format_point_hex(const Point3& p);
/// One point per line; blank lines and lines starting with '#' are skipped.
std::vector<Point3> read_points(std::istream& in);
std::vector<Point3> read_points_file(const std::string& path);
void write_points(std::ostream& out, const std::vector<Point3>& points);

}  // namespace numguard
