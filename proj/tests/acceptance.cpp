// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "cli.hpp"
#include "numguard/hexfloat.hpp"
#include "numguard/hull.hpp"
#include "numguard/orient_search.hpp"
#include "numguard/rebalance.hpp"
#include "numguard/rebalance_fuzz.hpp"
#include "oracles.hpp"

using namespace numguard;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Pinned budgets and sizes.
constexpr double kKnownRowsSeconds = 1.0;
constexpr double kFuzzSeconds = 60.0;
constexpr std::uint64_t kFuzzIterations = 1'000'000;
constexpr std::uint64_t kPropertyCorpus = 100'000;
constexpr double kPropertySeconds = 120.0;
constexpr int kOracleQuadruples = 100'000;
constexpr std::uint64_t kSearchIterations = 1'000'000;
constexpr double kSearchSeconds = 300.0;
constexpr std::uint64_t kMajorityIterations = 1'000'000;
constexpr int kSmtSolveBudgetMs = 120'000;
constexpr int kHullSets = 1000;
constexpr double kHullSeconds = 120.0;
constexpr std::uint64_t kSeed = 20261019;

const std::string kFixtures = NUMGUARD_FIXTURE_DIR;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + ("failed: " + what);
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

struct Invocation {
  int code;
  std::string out, err;
};

Invocation invoke(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<fs::path> orient_fixtures() {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(kFixtures)) {
    if (e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t body_rows(const std::string& csv) {
  std::istringstream in(csv);
  std::string line;
  std::size_t rows = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.starts_with('#')) continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    ++rows;
  }
  return rows;
}

// ----------------------------------------------------------------------------

Outcome known_rests_replay() {
  struct Row {
    std::string tasks, new_total;
    double rest;
  };
  const std::vector<Row> rows{{"1048627,524206", "1099511627744", 0.9998779296875},
                              {"32779,536870892", "1099511627779", 0.999881774187088},
                              {"67108824,33554439", "1099511627792", 0.9998779296875}};
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& row : rows) {
    const auto r = invoke({"rebalance", "--algo", "float", "--tasks", row.tasks, "--new-total",
                           row.new_total});
    const auto j = json::parse(r.out);
    const double rest = parse_double(j["final_rest_hex"].get<std::string>());
    o.require(std::bit_cast<std::uint64_t>(rest) == std::bit_cast<std::uint64_t>(row.rest),
              row.tasks + " rest " + to_hex(rest) + " != " + to_hex(row.rest));
    o.require(j["lost"] != 0 && r.code == 2, row.tasks + " lost is zero");
  }
  const double dt = seconds_since(start);
  o.require(dt < kKnownRowsSeconds, "runtime " + fmt(dt) + " s");
  o.note("3 rows bit-exact, lost=1 each, " + fmt(dt, 3) + " s");
  return o;
}

Outcome fuzzer_speed() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto r = invoke({"fuzz-rebalance", "--seed", std::to_string(kSeed), "--iters",
                         std::to_string(kFuzzIterations), "--time-budget", fmt(kFuzzSeconds, 0)});
  const double dt = seconds_since(start);
  const std::size_t rows = body_rows(r.out);
  o.require(r.code == 0, "exit code " + std::to_string(r.code));
  o.require(rows >= 1, "no counterexample");
  o.require(dt < kFuzzSeconds, "runtime " + fmt(dt) + " s");
  o.note(std::to_string(rows) + " counterexamples in " + std::to_string(kFuzzIterations) +
         " trials, " + fmt(dt) + " s");
  return o;
}

// One shared corpus for the four rebalancing properties: default lattice with
// n = 2, plus a wider one with n = 5.
struct PropertyRun {
  std::uint64_t inputs = 0;
  std::array<std::size_t, 4> violations{};
  double seconds = 0;
  bool stopped_by_time = false;
  std::string first_detail;
};

const PropertyRun& property_run() {
  static const PropertyRun run = [] {
    PropertyRun r;
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t nodes : {2, 5}) {
      FuzzConfig c;
      c.seed = kSeed;
      c.node_count = nodes;
      c.iterations = kPropertyCorpus;
      c.time_budget_seconds = kPropertySeconds;
      const auto report = differential_fuzz(c);
      r.inputs += report.inputs_checked;
      r.stopped_by_time = r.stopped_by_time || report.stopped_by_time;
      for (const auto& v : report.violations) {
        ++r.violations[static_cast<std::size_t>(v.property)];
        if (r.first_detail.empty()) r.first_detail = v.detail;
      }
    }
    r.seconds = seconds_since(start);
    return r;
  }();
  return run;
}

Outcome property(RebalanceProperty p) {
  const auto& run = property_run();
  Outcome o;
  const auto n = run.violations[static_cast<std::size_t>(p)];
  o.require(run.inputs >= 2 * kPropertyCorpus, "only " + std::to_string(run.inputs) + " inputs");
  o.require(!run.stopped_by_time, "stopped by time budget");
  o.require(n == 0, std::to_string(n) + " violations, e.g. " + run.first_detail);
  o.require(run.seconds < kPropertySeconds, "runtime " + fmt(run.seconds) + " s");
  o.note(std::to_string(run.inputs) + " inputs, " + std::to_string(n) + " violations, corpus " +
         fmt(run.seconds) + " s");
  return o;
}

Outcome exact_cross_check() {
  Outcome o;
  SplitMix64 rng(kSeed);
  OrientSearchConfig near;
  std::size_t mismatches = 0, checked = 0;
  std::array<std::size_t, 3> signs{};
  auto check = [&](const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
    const auto s = orient_exact(a, b, c, d);
    ++signs[static_cast<int>(s) + 1];
    if (s != oracle::rational_orientation(a, b, c, d)) ++mismatches;
    ++checked;
  };
  auto wide = [&] {
    // random sign, mantissa and exponent in [-60, 60]
    const double m = static_cast<double>(rng.next() >> 11) * 0x1p-53;
    return (rng.coin() ? -1.0 : 1.0) * std::ldexp(m, static_cast<int>(rng.uniform(-60, 60)));
  };
  auto small = [&] { return static_cast<double>(rng.uniform(-4, 4)); };
  for (int i = 0; i < kOracleQuadruples; ++i) {
    switch (i % 3) {
      case 0:
        check({wide(), wide(), wide()}, {wide(), wide(), wide()}, {wide(), wide(), wide()},
              {wide(), wide(), wide()});
        break;
      case 1:
        check({small(), small(), small()}, {small(), small(), small()},
              {small(), small(), small()}, {small(), small(), small()});
        break;
      default: {
        near.width = i % 2 ? FloatWidth::Binary64 : FloatWidth::Binary32;
        const auto s = gen_near_coplanar(near, rng);
        check(s.a, s.b, s.c, s.d);
        check(s.a, s.b, s.c, s.on_plane);
      }
    }
  }
  std::size_t fixtures = 0;
  for (const auto& path : orient_fixtures()) {
    std::ifstream in(path);
    const auto cx = fixture_from_json(json::parse(in));
    check(cx.a, cx.b, cx.c, cx.d);
    o.require(orient_exact(cx.a, cx.b, cx.c, cx.d) == cx.exact, path.filename().string());
    ++fixtures;
  }
  const auto cloud = read_points_file(kFixtures + "/hull_adversarial.pts");
  for (std::size_t i = 0; i + 3 < cloud.size(); ++i) check(cloud[i], cloud[i + 1], cloud[i + 2], cloud[i + 3]);
  o.require(mismatches == 0, std::to_string(mismatches) + " mismatches");
  o.require(signs[0] > 0 && signs[1] > 0 && signs[2] > 0, "corpus lacks a sign class");
  o.note(std::to_string(checked) + " quadruples incl. " + std::to_string(fixtures) +
         " orient fixtures (Below/Coplanar/Above " + std::to_string(signs[0]) + "/" +
         std::to_string(signs[1]) + "/" + std::to_string(signs[2]) + "), 0 mismatches");
  return o;
}

Outcome single_base_search() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const auto r = invoke({"search-orient", "--mode", "single", "--width", "64", "--seed",
                         std::to_string(kSeed), "--iters", std::to_string(kSearchIterations),
                         "--time-budget", fmt(kSearchSeconds, 0)});
  const double dt = seconds_since(start);
  o.require(r.code == 0, "exit code");
  const auto report = json::parse(r.out);
  const auto& fixtures = report["counterexamples"];
  o.require(!fixtures.empty(), "no fixture");
  o.require(dt < kSearchSeconds, "runtime " + fmt(dt) + " s");
  if (fixtures.empty()) return o;

  // replay the first fixture from its serialized form, in-process and via the CLI
  const auto cx = fixture_from_json(json::parse(fixtures[0].dump()));
  o.require(replays_exactly(cx), "in-process replay");
  o.require(is_disagreement(cx, SearchMode::SingleBase), "not a disagreement");
  const fs::path file = fs::temp_directory_path() / "numguard_acceptance_single.json";
  std::ofstream(file) << fixtures[0].dump(2);
  for (int base = 1; base <= 3; ++base) {
    const auto replay = json::parse(invoke({"orient", "--predicate", "float", "--base",
                                            std::to_string(base), "--points", file.string(),
                                            "--format", "json"}).out);
    o.require(replay["sign"] == fixtures[0]["per_base"][base - 1], "CLI replay base " + std::to_string(base));
    o.require(replay["exact"] == fixtures[0]["exact"], "CLI replay exact");
  }
  o.note(std::to_string(report["statistics"]["one_base_errors"].get<std::uint64_t>()) +
         " inputs with a wrong base in " + std::to_string(kSearchIterations) + " samples, " +
         std::to_string(fixtures.size()) + " fixtures recorded, first replays bit-exactly, " +
         fmt(dt) + " s");
  return o;
}

Outcome majority_search() {
  Outcome o;
  std::uint64_t found = 0, ties = 0, two_base = 0, samples = 0;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [width, seed] : {std::pair{"64", kSeed}, {"64", kSeed + 1}, {"32", kSeed + 2}}) {
    const auto r = invoke({"search-orient", "--mode", "majority", "--width", width, "--seed",
                           std::to_string(seed), "--iters", std::to_string(kMajorityIterations),
                           "--time-budget", fmt(kSearchSeconds, 0), "--max-fixtures", "10"});
    o.require(r.code == 0, "exit code");
    const auto st = json::parse(r.out)["statistics"];
    for (const char* key : {"per_base_error_rates", "two_base_errors", "one_base_errors",
                            "majority_errors", "majority_ties", "monotone_consistent"}) {
      o.require(st.contains(key), std::string("missing ") + key);
    }
    const auto one = st["one_base_errors"].get<std::uint64_t>();
    const auto two = st["two_base_errors"].get<std::uint64_t>();
    const auto maj = st["majority_errors"].get<std::uint64_t>();
    o.require(maj <= two && two <= one, "monotone inequality, seed " + std::to_string(seed));
    o.require(st["monotone_consistent"] == true, "monotone flag");
    found += maj;
    ties += st["majority_ties"].get<std::uint64_t>();
    two_base += two;
    samples += st["iterations_run"].get<std::uint64_t>();
    for (const auto& f : json::parse(r.out)["counterexamples"]) {
      const auto cx = fixture_from_json(f);
      o.require(replays_exactly(cx) && is_disagreement(cx, SearchMode::Majority), "fixture replay");
    }
  }
  const double dt = seconds_since(start);
  o.require(dt < 3 * kSearchSeconds, "budget");
  o.note("3 runs, " + std::to_string(samples) + " samples, >=2-base errors " +
         std::to_string(two_base) + ", monotone on every run; stretch goal: " +
         std::to_string(found) + " majority-vs-exact disagreements (" + std::to_string(ties) +
         " ties), " + fmt(dt) + " s");
  return o;
}

Outcome smt_emission() {
  Outcome o;
  const std::string command = "'" NUMGUARD_PYTHON "' '" + std::string(NUMGUARD_SMT_CHECK) + "' '" +
                              NUMGUARD_TOOL + "' '" + kFixtures + "' " +
                              std::to_string(kSmtSolveBudgetMs) + " 2>&1";
  std::string output;
  FILE* pipe = popen(command.c_str(), "r");
  if (!pipe) {
    o.require(false, "cannot run smt_check.py");
    return o;
  }
  char buf[512];
  while (fgets(buf, sizeof buf, pipe)) output += buf;
  const int status = pclose(pipe);
  std::cout << output;
  o.require(status == 0, "smt_check.py exit status " + std::to_string(status));
  o.note(output.find("replay") != std::string::npos ? "4 variants parsed by z3 and cvc5; sat model replayed"
                                                    : "4 variants parsed; no model within budget");
  return o;
}

Outcome hull_soundness() {
  Outcome o;
  SplitMix64 rng(kSeed);
  int built = 0, failures = 0, degenerate_draws = 0;
  const auto start = std::chrono::steady_clock::now();
  while (built < kHullSets) {
    const auto n = static_cast<std::size_t>(rng.uniform(4, 64));
    std::vector<Point3> pts(n);
    const int kind = built % 3;
    for (auto& p : pts) {
      if (kind == 0) {
        p = {static_cast<double>(rng.uniform(-2, 2)), static_cast<double>(rng.uniform(-2, 2)),
             static_cast<double>(rng.uniform(-2, 2))};
      } else if (kind == 1) {
        auto u = [&] { return static_cast<double>(rng.next() >> 11) * 0x1p-53 - 0.5; };
        p = {u(), u(), u()};
      } else {
        auto u = [&] { return std::ldexp(static_cast<double>(rng.next() >> 11), -20); };
        p = {u(), u(), u()};
      }
    }
    HullResult result;
    try {
      result = incremental_hull(pts, HullPredicate::Exact);
    } catch (const DegenerateInputError&) {
      ++degenerate_draws;
      continue;
    }
    ++built;
    const auto* hull = std::get_if<HullFacets>(&result);
    if (!hull || !validate_hull(pts, *hull).valid()) ++failures;
  }
  const double dt = seconds_since(start);
  o.require(failures == 0, std::to_string(failures) + " invalid hulls");
  o.require(dt < kHullSeconds, "runtime " + fmt(dt) + " s");
  o.note(std::to_string(built) + " sets (" + std::to_string(degenerate_draws) +
         " degenerate draws redrawn), all four checks pass, " + fmt(dt) + " s");
  return o;
}

Outcome hull_failure_exhibit() {
  Outcome o;
  const auto path = kFixtures + "/hull_adversarial.pts";
  const auto r = invoke({"hull", "--predicate", "float", "--input", path, "--validate"});
  o.require(r.code == 2 || r.code == 3, "float hull exit code " + std::to_string(r.code));
  const auto j = json::parse(r.out);
  if (j.contains("failure")) {
    o.note("construction failure at point " + j["failure"]["point_index"].dump() + ": " +
           j["failure"]["reason"].get<std::string>());
  } else if (j.contains("validity")) {
    o.note("invalid hull: " + j["validity"].dump());
  }
  o.require(invoke({"hull", "--predicate", "exact", "--input", path, "--validate"}).code == 0,
            "exact hull of the same cloud");
  return o;
}

Outcome determinism() {
  Outcome o;
  const std::string seed = std::to_string(kSeed);
  const std::vector<std::vector<std::string>> commands{
      {"fuzz-rebalance", "--seed", seed, "--iters", "200000"},
      {"fuzz-rebalance", "--seed", seed, "--iters", "200000", "--format", "json", "--nodes", "3"},
      {"fuzz-rebalance", "--seed", seed, "--iters", "20000", "--differential"},
      {"search-orient", "--seed", seed, "--iters", "200000", "--mode", "single"},
      {"search-orient", "--seed", seed, "--iters", "200000", "--mode", "majority", "--width", "32"},
  };
  for (const auto& args : commands) {
    const auto first = invoke(args);
    const auto again = invoke(args);
    auto parallel = args;
    parallel.insert(parallel.end(), {"--jobs", "3"});
    const auto threaded = invoke(parallel);
    o.require(!first.out.empty() && first.out == again.out, args[0] + " repeat");
    o.require(first.out == threaded.out, args[0] + " with --jobs 3");
  }
  auto other = commands[0];
  other[2] = std::to_string(kSeed + 1);
  o.require(invoke(other).out != invoke(commands[0]).out, "different seeds give different output");
  o.note(std::to_string(commands.size()) + " randomized commands byte-identical on repeat and across job counts");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"known lost-task inputs replay bit-exactly", known_rests_replay},
      {"fuzzer finds lost tasks quickly", fuzzer_speed},
      {"integer rebalance: exact sum", [] { return property(RebalanceProperty::ExactSum); }},
      {"integer rebalance: floor/ceil bounds", [] { return property(RebalanceProperty::FloorCeilBounds); }},
      {"integer rebalance equals rational reference",
       [] { return property(RebalanceProperty::RationalEquivalence); }},
      {"integer rebalance rest invariant", [] { return property(RebalanceProperty::RestRange); }},
      {"exact predicate matches rational oracle", exact_cross_check},
      {"single-base orientation failure found", single_base_search},
      {"majority-vote search statistics", majority_search},
      {"SMT emission parses and models replay", smt_emission},
      {"exact hull soundness", hull_soundness},
      {"float hull breaks on adversarial cloud", hull_failure_exhibit},
      {"seeded commands are deterministic", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    if (!o.pass) ++failed;
    std::printf("AC%02zu %s  %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
