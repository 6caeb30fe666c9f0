#include <doctest.h>

#include <cmath>
#include <sstream>

#include "numguard/orient_search.hpp"
#include "numguard/rational.hpp"

using namespace numguard;

namespace {

// sign of the `axis` component of (b - a) x (c - a), exactly
int normal_component_sign(const NearCoplanarSample& s) {
  auto q = [](double v) { return Rational::from_double(v); };
  const Rational ux = q(s.b.x) - q(s.a.x), uy = q(s.b.y) - q(s.a.y), uz = q(s.b.z) - q(s.a.z);
  const Rational vx = q(s.c.x) - q(s.a.x), vy = q(s.c.y) - q(s.a.y), vz = q(s.c.z) - q(s.a.z);
  const Rational n = s.axis == 0 ? uy * vz - uz * vy : s.axis == 1 ? uz * vx - ux * vz : ux * vy - uy * vx;
  return n.sign();
}

bool in_band(double v, const OrientSearchConfig& c) {
  const double m = std::fabs(v);
  return m >= std::ldexp(1.0, c.exponent_min) && m < std::ldexp(1.0, c.exponent_max + 1);
}

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

std::string strip_comments(const std::string& text) {
  std::istringstream in(text);
  std::string line, body;
  while (std::getline(in, line)) {
    if (!line.starts_with(';')) body += line + '\n';
  }
  return body;
}

}  // namespace

TEST_CASE("near-coplanar generator structure") {
  for (auto width : {FloatWidth::Binary64, FloatWidth::Binary32}) {
    OrientSearchConfig config;
    config.width = width;
    config.ulp_radius = 3;
    SplitMix64 rng(1);
    int above = 0, below = 0;
    for (int i = 0; i < 10000; ++i) {
      const auto s = gen_near_coplanar(config, rng);
      CHECK(orient_exact(s.a, s.b, s.c, s.on_plane) == OrientationSign::Coplanar);
      CHECK(orient_exact(s.a, s.b, s.c, s.d) == s.exact_sign);
      CHECK(s.exact_sign != OrientationSign::Coplanar);
      CHECK(std::abs(s.ulps) >= 1);
      CHECK(std::abs(s.ulps) <= config.ulp_radius);
      // moving d along the axis changes det by (delta * normal component)
      CHECK(static_cast<int>(s.exact_sign) == (s.ulps > 0 ? 1 : -1) * normal_component_sign(s));
      for (double v : {s.a.x, s.a.y, s.a.z, s.b.x, s.b.y, s.b.z, s.c.x, s.c.y, s.c.z}) {
        CHECK(in_band(v, config));
      }
      if (width == FloatWidth::Binary32) {
        for (double v : {s.a.x, s.b.y, s.c.z, s.d.x, s.d.y, s.d.z}) {
          CHECK(static_cast<double>(static_cast<float>(v)) == v);
        }
      }
      (s.exact_sign == OrientationSign::Above ? above : below) += 1;
    }
    CHECK(above > 0);
    CHECK(below > 0);
  }
}

TEST_CASE("search statistics and recorded counterexamples") {
  for (auto mode : {SearchMode::SingleBase, SearchMode::Majority}) {
    OrientSearchConfig config;
    config.mode = mode;
    config.iterations = 20000;
    config.seed = 5;
    const auto report = search_disagreement(config);
    const auto& st = report.stats;
    CHECK(st.iterations_run == 20000);
    CHECK(st.monotone());
    CHECK(st.exact_above + st.exact_below == st.iterations_run);
    CHECK(st.one_base_errors > 0);
    CHECK(st.majority_ties <= st.majority_errors);
    CHECK(report.counterexamples.size() <= config.max_counterexamples);
    for (const auto& cx : report.counterexamples) {
      CHECK(replays_exactly(cx));
      CHECK(is_disagreement(cx, mode));
      const auto round_trip = fixture_from_json(nlohmann::json::parse(fixture_json(cx, config).dump()));
      CHECK(round_trip.a == cx.a);
      CHECK(round_trip.d == cx.d);
      CHECK(replays_exactly(round_trip));
    }
  }
}

TEST_CASE("search is deterministic and partition independent") {
  OrientSearchConfig config;
  config.iterations = 40000;
  config.seed = 123;
  config.mode = SearchMode::Majority;
  const std::string once = to_json(search_disagreement(config)).dump();
  CHECK(once == to_json(search_disagreement(config)).dump());
  config.jobs = 4;
  CHECK(once == to_json(search_disagreement(config)).dump());
  config.seed = 124;
  config.jobs = 1;
  CHECK(once != to_json(search_disagreement(config)).dump());
}

TEST_CASE("search config validation") {
  OrientSearchConfig c;
  c.ulp_radius = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.exponent_min = 3;
  c.exponent_max = 1;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.width = FloatWidth::Binary32;
  c.exponent_max = 60;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.fixed.push_back({"ex", 1.0});
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = {};
  c.width = FloatWidth::Binary32;
  c.fixed.push_back({"ax", 0.1});  // not a binary32 value
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("fp literals") {
  CHECK(smt_fp_literal(1.0, FloatWidth::Binary64) ==
        "(fp #b0 #b01111111111 #b0000000000000000000000000000000000000000000000000000)");
  CHECK(smt_fp_literal(-2.5, FloatWidth::Binary32) == "(fp #b1 #b10000000 #b01000000000000000000000)");
}

TEST_CASE("smt emission") {
  OrientSearchConfig config;
  config.mode = SearchMode::Majority;
  std::ostringstream w64, w32;
  emit_smt(config, w64);
  config.width = FloatWidth::Binary32;
  config.fixed.push_back({"ax", 1.5});
  emit_smt(config, w32);

  for (const std::string& text : {strip_comments(w64.str()), strip_comments(w32.str())}) {
    CHECK(count(text, "(") == count(text, ")"));
    CHECK(count(text, "(declare-const ") == 12);
    CHECK(text.find("(set-logic ALL)") != std::string::npos);
    CHECK(text.find("(assert (not tie))") != std::string::npos);
    CHECK(text.find("(assert (distinct majority se))") != std::string::npos);
    CHECK(text.find("(check-sat)\n(get-model)\n") != std::string::npos);
    CHECK(count(text, "fp.to_real") == 12);
  }
  CHECK(w64.str().find("(_ FloatingPoint 11 53)") != std::string::npos);
  CHECK(w32.str().find("(_ FloatingPoint 8 24)") != std::string::npos);
  CHECK(w32.str().find("(assert (= ax (fp #b0 #b01111111 #b10000000000000000000000)))") !=
        std::string::npos);

  config.mode = SearchMode::SingleBase;
  std::ostringstream single;
  emit_smt(config, single);
  CHECK(single.str().find("(assert (or (distinct s1 se) (distinct s2 se) (distinct s3 se)))") !=
        std::string::npos);
}
