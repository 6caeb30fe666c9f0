#include "numguard/geometry.hpp"

#include <algorithm>
#include <climits>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

#include <boost/multiprecision/cpp_int.hpp>

#include "numguard/hexfloat.hpp"

namespace numguard {

const char* to_string(OrientationSign s) {
  switch (s) {
    case OrientationSign::Above: return "Above";
    case OrientationSign::Coplanar: return "Coplanar";
    case OrientationSign::Below: return "Below";
  }
  return "?";
}

std::optional<OrientationSign> parse_sign(std::string_view text) {
  if (text == "Above") return OrientationSign::Above;
  if (text == "Coplanar") return OrientationSign::Coplanar;
  if (text == "Below") return OrientationSign::Below;
  return std::nullopt;
}

OrientationSign orient_base(const Point3& a, const Point3& b, const Point3& c, const Point3& d,
                            Base base, FloatWidth width) {
  if (width == FloatWidth::Binary32) return orient_base_as<float>(a, b, c, d, base);
  return orient_base_as<double>(a, b, c, d, base);
}

MajorityResult majority_of(const std::array<OrientationSign, 3>& s) {
  MajorityResult r;
  r.per_base = s;
  if (s[0] == s[1] || s[0] == s[2]) {
    r.sign = s[0];
  } else if (s[1] == s[2]) {
    r.sign = s[1];
  } else {
    r.sign = OrientationSign::Coplanar;
    r.tie = true;
  }
  return r;
}

MajorityResult orient_majority_detail(const Point3& a, const Point3& b, const Point3& c,
                                      const Point3& d, FloatWidth width) {
  return majority_of({orient_base(a, b, c, d, Base::First, width),
                      orient_base(a, b, c, d, Base::Second, width),
                      orient_base(a, b, c, d, Base::Third, width)});
}

namespace {

using boost::multiprecision::cpp_int;

// value = mantissa * 2^exponent with an integer mantissa of at most 53 bits.
struct ScaledBinary64 {
  std::int64_t mantissa = 0;
  int exponent = 0;
};

ScaledBinary64 decompose(double v) {
  if (!std::isfinite(v)) throw std::domain_error("orient_exact: non-finite coordinate");
  if (v == 0.0) return {};
  int e = 0;
  const double f = std::frexp(v, &e);  // v = f * 2^e, 0.5 <= |f| < 1
  auto m = static_cast<std::int64_t>(std::ldexp(f, 53));
  e -= 53;
  while ((m & 1) == 0) {
    m /= 2;
    ++e;
  }
  return {m, e};
}

}  // namespace

OrientationSign orient_exact(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
  const std::array<double, 12> coords{a.x, a.y, a.z, b.x, b.y, b.z,
                                      c.x, c.y, c.z, d.x, d.y, d.z};
  std::array<ScaledBinary64, 12> parts;
  int min_exponent = INT_MAX;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    parts[i] = decompose(coords[i]);
    if (parts[i].mantissa != 0) min_exponent = std::min(min_exponent, parts[i].exponent);
  }
  // Common scale 2^min_exponent > 0 does not change the determinant's sign.
  std::array<cpp_int, 12> n;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    if (parts[i].mantissa == 0) continue;
    n[i] = parts[i].mantissa;
    n[i] <<= static_cast<unsigned>(parts[i].exponent - min_exponent);
  }
  const cpp_int ux = n[3] - n[0], uy = n[4] - n[1], uz = n[5] - n[2];
  const cpp_int vx = n[6] - n[0], vy = n[7] - n[1], vz = n[8] - n[2];
  const cpp_int wx = n[9] - n[0], wy = n[10] - n[1], wz = n[11] - n[2];
  const cpp_int det = ux * (vy * wz - vz * wy) - uy * (vx * wz - vz * wx) + uz * (vx * wy - vy * wx);
  const int s = det.sign();
  return s > 0 ? OrientationSign::Above : s < 0 ? OrientationSign::Below : OrientationSign::Coplanar;
}

Point3 parse_point(std::string_view line) {
  std::array<double, 3> v{};
  std::size_t field = 0;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = line.find(',', pos);
    const std::string_view token =
        line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
    if (field >= 3) throw std::invalid_argument("point has more than three fields");
    v[field++] = parse_double(token);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  if (field != 3) throw std::invalid_argument("point needs three comma-separated fields");
  return {v[0], v[1], v[2]};
}

std::string format_point_hex(const Point3& p) {
  return to_hex(p.x) + "," + to_hex(p.y) + "," + to_hex(p.z);
}

std::vector<Point3> read_points(std::istream& in) {
  std::vector<Point3> points;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      points.push_back(parse_point(line));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return points;
}

std::vector<Point3> read_points_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open points file '" + path + "'");
  return read_points(in);
}

void write_points(std::ostream& out, const std::vector<Point3>& points) {
  for (const auto& p : points) out << format_point_hex(p) << '\n';
}

}  // namespace numguard
