#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "numguard/geometry.hpp"
#include "numguard/hexfloat.hpp"
#include "numguard/hull.hpp"
#include "numguard/orient_search.hpp"
#include "numguard/rebalance.hpp"
#include "numguard/rebalance_fuzz.hpp"

namespace numguard::cli {

namespace {

using json = nlohmann::ordered_json;

unsigned default_jobs() {
  if (const char* env = std::getenv("NUMGUARD_JOBS")) {
    try {
      const long v = std::stol(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::uint64_t fresh_seed(std::ostream& err) {
  std::random_device rd;
  const std::uint64_t seed = (std::uint64_t{rd()} << 32) ^ rd();
  err << "seed: " << seed << "  (no --seed given; pass --seed " << seed << " to reproduce)\n";
  return seed;
}

// Writes to --out, or to `out` when the path is empty or "-".
template <typename Writer>
void with_output(const std::string& path, std::ostream& out, Writer&& write) {
  if (path.empty() || path == "-") {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::invalid_argument("cannot open output file '" + path + "'");
  write(file);
}

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

// ---------------------------------------------------------------- rebalance

struct RebalanceArgs {
  std::string algo;
  std::string tasks;
  std::int64_t new_total = 0;
  std::string format = "json";
};

int run_rebalance(const RebalanceArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<std::int64_t> tasks;
  try {
    tasks = parse_task_list(a.tasks);
  } catch (const std::invalid_argument& e) {
    err << "error: --tasks: " << e.what() << '\n';
    return kUsage;
  }

  RebalanceOutput result;
  try {
    const TaskDistribution dist(tasks);
    if (a.algo == "float") {
      result = rebalance_float(dist, a.new_total);
    } else if (a.algo == "int") {
      result = rebalance_int(dist, a.new_total);
    } else {
      result = rebalance_rational(dist, a.new_total);
    }
  } catch (const PreconditionError& e) {
    err << "precondition violated: " << e.what() << '\n';
    return kUsage;
  }

  const Int128 sum = result.sum();
  const auto lost = static_cast<std::int64_t>(Int128{a.new_total} - sum);
  bool bounds_ok = true;
  std::int64_t total = 0;
  for (auto t : tasks) total += t;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    const Rational exact = Rational(tasks[i]) * Rational(a.new_total) / Rational(total);
    const BigInt got(static_cast<long>(result.new_tasks[i]));
    if (got < exact.floor() || got > exact.ceil()) bounds_ok = false;
  }

  std::string rest_text;
  std::string rest_hex;
  if (const double* r = std::get_if<double>(&result.final_rest)) {
    rest_text = to_decimal(*r);
    rest_hex = to_hex(*r);
  } else {
    rest_text = std::get<Rational>(result.final_rest).to_string();
  }

  if (a.format == "csv") {
    out << "algo;s_values;new_total;new_tasks;sum;lost;final_rest;final_rest_hex;exact_sum;"
           "floor_ceil_bounds\n"
        << a.algo << ';' << join(tasks) << ';' << a.new_total << ';' << join(result.new_tasks)
        << ';' << static_cast<std::int64_t>(sum) << ';' << lost << ';' << rest_text << ';'
        << rest_hex << ';' << (lost == 0 ? "ok" : "violated") << ';'
        << (bounds_ok ? "ok" : "violated") << '\n';
  } else {
    json j{{"schema_version", kReportSchemaVersion},
           {"command", "rebalance"},
           {"algo", a.algo},
           {"s_values", tasks},
           {"new_total", a.new_total},
           {"new_tasks", result.new_tasks},
           {"sum", static_cast<std::int64_t>(sum)},
           {"lost", lost},
           {"final_rest", rest_text}};
    if (!rest_hex.empty()) j["final_rest_hex"] = rest_hex;
    j["checks"] = {{"exact_sum", lost == 0}, {"floor_ceil_bounds", bounds_ok}};
    out << j.dump(2) << '\n';
  }
  return lost == 0 ? kOk : kFinding;
}

// ----------------------------------------------------------- fuzz-rebalance

struct FuzzArgs {
  FuzzConfig config;
  std::string out_path;
  std::string format;
  bool differential = false;
  bool metadata = false;
};

int run_fuzz_rebalance(FuzzArgs a, bool seed_given, std::ostream& out, std::ostream& err) {
  if (!seed_given) a.config.seed = fresh_seed(err);
  try {
    a.config.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  std::string format = a.format;
  if (format.empty()) {
    format = a.out_path.size() > 5 && a.out_path.ends_with(".json") ? "json" : "csv";
  }
  if (a.differential) format = "json";

  const auto start = std::chrono::steady_clock::now();
  if (a.differential) {
    const DifferentialReport report = differential_fuzz(a.config);
    json j = to_json(report);
    if (a.metadata) {
      const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
      j["metadata"] = {{"elapsed_seconds", dt.count()}};
    }
    with_output(a.out_path, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    err << "differential-fuzz: " << report.inputs_checked << " inputs, "
        << report.violations.size() << " violations\n";
    return report.violations.empty() ? kOk : kFinding;
  }

  const FloatFuzzReport report = find_float_counterexamples(a.config);
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  with_output(a.out_path, out, [&](std::ostream& os) {
    if (format == "json") {
      json j = to_json(report);
      if (a.metadata) j["metadata"] = {{"elapsed_seconds", dt.count()}};
      os << j.dump(2) << '\n';
    } else {
      if (a.metadata) os << "# metadata elapsed_seconds=" << dt.count() << '\n';
      write_csv(os, report);
    }
  });
  err << "fuzz-rebalance: " << report.iterations_run << " iterations, "
      << report.counterexamples.size() << " counterexamples (" << report.shortfall_count
      << " shortfall, " << report.surplus_count << " surplus)\n";
  return kOk;
}

// ------------------------------------------------------------------- orient

struct OrientArgs {
  std::string predicate;
  int base = 1;
  std::string points;
  int width = 64;
  std::string format = "text";
};

std::vector<Point3> load_points(const std::string& spec) {
  std::error_code ec;
  if (std::filesystem::is_regular_file(spec, ec)) {
    if (std::filesystem::path(spec).extension() != ".json") return read_points_file(spec);
    // a search-orient fixture
    std::ifstream in(spec);
    try {
      const auto cx = fixture_from_json(nlohmann::json::parse(in));
      return {cx.a, cx.b, cx.c, cx.d};
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(e.what());
    }
  }
  std::string text = spec;
  for (char& ch : text) {
    if (ch == ';') ch = '\n';
  }
  std::istringstream in(text);
  return read_points(in);
}

int run_orient(const OrientArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<Point3> pts;
  try {
    pts = load_points(a.points);
  } catch (const std::invalid_argument& e) {
    err << "error: --points: " << e.what() << '\n';
    return kUsage;
  }
  if (pts.size() != 4) {
    err << "error: --points needs exactly 4 points, got " << pts.size() << '\n';
    return kUsage;
  }
  const FloatWidth width = a.width == 32 ? FloatWidth::Binary32 : FloatWidth::Binary64;
  const Point3 &pa = pts[0], &pb = pts[1], &pc = pts[2], &pd = pts[3];

  const OrientationSign exact = orient_exact(pa, pb, pc, pd);
  OrientationSign sign = exact;
  std::optional<MajorityResult> majority;
  if (a.predicate == "float") {
    sign = orient_base(pa, pb, pc, pd, static_cast<Base>(a.base - 1), width);
  } else if (a.predicate == "majority") {
    majority = orient_majority_detail(pa, pb, pc, pd, width);
    sign = majority->sign;
  }

  if (a.format == "json") {
    json j{{"schema_version", 1},
           {"command", "orient"},
           {"predicate", a.predicate},
           {"float_width", a.width},
           {"points", json::array()}};
    for (const auto& p : pts) j["points"].push_back({to_hex(p.x), to_hex(p.y), to_hex(p.z)});
    if (a.predicate == "float") j["base"] = a.base;
    j["sign"] = to_string(sign);
    if (majority) {
      j["per_base"] = {to_string(majority->per_base[0]), to_string(majority->per_base[1]),
                       to_string(majority->per_base[2])};
      j["tie"] = majority->tie;
    }
    j["exact"] = to_string(exact);
    j["agrees_with_exact"] = sign == exact;
    out << j.dump(2) << '\n';
  } else {
    out << "sign: " << to_string(sign) << '\n';
    if (majority) {
      out << "per_base: " << to_string(majority->per_base[0]) << ','
          << to_string(majority->per_base[1]) << ',' << to_string(majority->per_base[2]) << '\n'
          << "tie: " << (majority->tie ? "true" : "false") << '\n';
    }
    if (a.predicate != "exact") {
      out << "exact: " << to_string(exact) << '\n'
          << "agrees_with_exact: " << (sign == exact ? "true" : "false") << '\n';
    }
  }
  return kOk;
}

// --------------------------------------------------------------------- hull

struct HullArgs {
  std::string predicate;
  std::string input;
  bool validate = false;
  std::string format = "json";
};

int run_hull(const HullArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<Point3> pts;
  try {
    pts = read_points_file(a.input);
  } catch (const std::invalid_argument& e) {
    err << "error: --input: " << e.what() << '\n';
    return kUsage;
  }
  const HullPredicate predicate = a.predicate == "exact"      ? HullPredicate::Exact
                                  : a.predicate == "majority" ? HullPredicate::Majority
                                                              : HullPredicate::FloatSingle;
  HullResult result;
  try {
    result = incremental_hull(pts, predicate);
  } catch (const DegenerateInputError& e) {
    err << "degenerate input: " << e.what() << '\n';
    return kUsage;
  }

  json j{{"schema_version", 1},
         {"command", "hull"},
         {"predicate", to_string(predicate)},
         {"point_count", pts.size()}};
  int code = kOk;
  std::optional<HullValidity> validity;
  if (const auto* failure = std::get_if<HullFailure>(&result)) {
    j["status"] = "construction_failure";
    j["failure"] = {{"point_index", failure->point_index}, {"reason", failure->reason}};
    code = kConstruction;
  } else {
    const auto& hull = std::get<HullFacets>(result);
    j["status"] = "built";
    j["facets"] = to_json(hull);
    if (a.validate) {
      validity = validate_hull(pts, hull);
      j["validity"] = to_json(*validity);
      if (!validity->valid()) code = kFinding;
    }
  }

  if (a.format == "text") {
    out << "status: " << j["status"].get<std::string>() << '\n';
    if (j.contains("failure")) {
      out << "failure: point " << j["failure"]["point_index"] << ": "
          << j["failure"]["reason"].get<std::string>() << '\n';
    }
    if (j.contains("facets")) {
      for (const auto& f : j["facets"]) out << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    }
    if (validity) out << "validity: " << to_json(*validity).dump() << '\n';
  } else {
    out << j.dump(2) << '\n';
  }
  return code;
}

// ------------------------------------------------- search-orient / emit-smt

struct SearchArgs {
  OrientSearchConfig config;
  std::string mode = "single";
  int width = 64;
  std::string out_path;
  std::vector<std::string> fixed;
  bool metadata = false;
};

void finish_search_config(SearchArgs& a) {
  a.config.mode = a.mode == "majority" ? SearchMode::Majority : SearchMode::SingleBase;
  a.config.width = a.width == 32 ? FloatWidth::Binary32 : FloatWidth::Binary64;
  for (const auto& f : a.fixed) {
    const auto eq = f.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--fix expects name=value");
    a.config.fixed.push_back({f.substr(0, eq), parse_double(f.substr(eq + 1))});
  }
  a.config.validate();
}

int run_search_orient(SearchArgs a, bool seed_given, std::ostream& out, std::ostream& err) {
  if (!seed_given) a.config.seed = fresh_seed(err);
  try {
    finish_search_config(a);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  const auto start = std::chrono::steady_clock::now();
  const OrientSearchReport report = search_disagreement(a.config);
  json j = to_json(report);
  if (a.metadata) {
    const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
    j["metadata"] = {{"elapsed_seconds", dt.count()}};
  }
  with_output(a.out_path, out, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
  const auto& st = report.stats;
  err << "search-orient: " << st.iterations_run << " iterations; >=1 base wrong "
      << st.one_base_errors << ", >=2 bases wrong " << st.two_base_errors
      << ", majority wrong " << st.majority_errors << " (ties " << st.majority_ties
      << "); recorded " << report.counterexamples.size() << " fixtures\n";
  return kOk;
}

int run_emit_smt(SearchArgs a, std::ostream& out, std::ostream& err) {
  try {
    finish_search_config(a);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  with_output(a.out_path, out, [&](std::ostream& os) { emit_smt(a.config, os); });
  return kOk;
}

void add_search_flags(CLI::App* cmd, SearchArgs& a) {
  cmd->add_option("--mode", a.mode, "single or majority")
      ->check(CLI::IsMember({"single", "majority"}))
      ->capture_default_str();
  cmd->add_option("--width", a.width, "predicate float width")
      ->check(CLI::IsMember({32, 64}))
      ->capture_default_str();
  cmd->add_option("--emin", a.config.exponent_min, "lowest coordinate exponent")
      ->capture_default_str();
  cmd->add_option("--emax", a.config.exponent_max, "highest coordinate exponent")
      ->capture_default_str();
  cmd->add_option("--out", a.out_path, "output file (default: stdout)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"numguard: floating-point robustness checks for task rebalancing and 3D "
               "orientation predicates"};
  app.require_subcommand(1);
  const unsigned jobs = default_jobs();

  RebalanceArgs rb;
  auto* rebalance = app.add_subcommand("rebalance", "redistribute tasks onto a new total");
  rebalance->add_option("--algo", rb.algo, "float, int or rational")
      ->required()
      ->check(CLI::IsMember({"float", "int", "rational"}));
  rebalance->add_option("--tasks", rb.tasks, "comma-separated task counts")->required();
  rebalance->add_option("--new-total", rb.new_total, "new total task count")->required();
  rebalance->add_option("--format", rb.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  FuzzArgs fz;
  fz.config.jobs = jobs;
  auto* fuzz = app.add_subcommand("fuzz-rebalance", "search 2^e+delta inputs for lost tasks");
  auto* fuzz_seed = fuzz->add_option("--seed", fz.config.seed, "master seed");
  fuzz->add_option("--iters", fz.config.iterations, "trials")->capture_default_str();
  fuzz->add_option("--emax", fz.config.exponent_max, "largest exponent e")->capture_default_str();
  fuzz->add_option("--delta", fz.config.delta_bound, "offset bound |delta|")->capture_default_str();
  fuzz->add_option("--nodes", fz.config.node_count, "node count n")->capture_default_str();
  fuzz->add_option("--time-budget", fz.config.time_budget_seconds, "seconds (<= 0: none)")
      ->capture_default_str();
  fuzz->add_option("--jobs", fz.config.jobs, "worker threads (env NUMGUARD_JOBS)")
      ->capture_default_str();
  fuzz->add_option("--out", fz.out_path, "output file (default: stdout)");
  fuzz->add_option("--format", fz.format, "csv or json (default: from --out extension)")
      ->check(CLI::IsMember({"csv", "json"}));
  fuzz->add_flag("--differential", fz.differential,
                 "check the integer algorithm against the exact reference instead");
  fuzz->add_flag("--metadata", fz.metadata, "add a timing metadata block");

  OrientArgs ori;
  auto* orient = app.add_subcommand("orient", "classify point d against plane(a, b, c)");
  orient->add_option("--predicate", ori.predicate, "float, majority or exact")
      ->required()
      ->check(CLI::IsMember({"float", "majority", "exact"}));
  orient->add_option("--base", ori.base, "base point for --predicate float")
      ->check(CLI::IsMember({1, 2, 3}))
      ->capture_default_str();
  orient->add_option("--points", ori.points,
                     "points file, fixture .json, or inline \"x,y,z;x,y,z;...\"")
      ->required();
  orient->add_option("--width", ori.width, "float width")
      ->check(CLI::IsMember({32, 64}))
      ->capture_default_str();
  orient->add_option("--format", ori.format, "text or json")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();

  HullArgs hl;
  auto* hull = app.add_subcommand("hull", "incremental convex hull");
  hull->add_option("--predicate", hl.predicate, "float, majority or exact")
      ->required()
      ->check(CLI::IsMember({"float", "majority", "exact"}));
  hull->add_option("--input", hl.input, "points file")->required();
  hull->add_flag("--validate", hl.validate, "run the exact validity checks");
  hull->add_option("--format", hl.format, "json or text")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  SearchArgs sr;
  sr.config.jobs = jobs;
  auto* search = app.add_subcommand("search-orient", "search near-coplanar predicate failures");
  add_search_flags(search, sr);
  search->add_option("--ulp-radius", sr.config.ulp_radius, "max ulp perturbation of d")
      ->capture_default_str();
  auto* search_seed = search->add_option("--seed", sr.config.seed, "master seed");
  search->add_option("--iters", sr.config.iterations, "samples")->capture_default_str();
  search->add_option("--time-budget", sr.config.time_budget_seconds, "seconds (<= 0: none)")
      ->capture_default_str();
  search->add_option("--max-fixtures", sr.config.max_counterexamples, "fixtures to record")
      ->capture_default_str();
  search->add_option("--jobs", sr.config.jobs, "worker threads (env NUMGUARD_JOBS)")
      ->capture_default_str();
  search->add_flag("--metadata", sr.metadata, "add a timing metadata block");

  SearchArgs sm;
  sm.mode = "majority";
  auto* smt = app.add_subcommand("emit-smt", "write the SMT-LIB2 disagreement query");
  add_search_flags(smt, sm);
  smt->add_option("--fix", sm.fixed, "pin a coordinate, e.g. ax=0x1.8p+0 (repeatable)");

  std::vector<const char*> argv{"numguard"};
  for (const auto& s : args) argv.push_back(s.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (rebalance->parsed()) return run_rebalance(rb, out, err);
    if (fuzz->parsed()) return run_fuzz_rebalance(fz, fuzz_seed->count() > 0, out, err);
    if (orient->parsed()) return run_orient(ori, out, err);
    if (hull->parsed()) return run_hull(hl, out, err);
    if (search->parsed()) return run_search_orient(sr, search_seed->count() > 0, out, err);
    if (smt->parsed()) return run_emit_smt(sm, out, err);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace numguard::cli
