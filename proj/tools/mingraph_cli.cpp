// mingraph: config-driven runner for the invariant suites, algebra scans,
// the minimal surface solver, pointwise diagnostics and volume measurements.
//
// Exit codes: 0 ok, 1 assertion failed, 2 solver did not converge, 3 bad input.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mingraph/mingraph.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace mingraph;

namespace {

enum Exit { kOk = 0, kAssertion = 1, kNoConvergence = 2, kBadInput = 3 };

struct Common {
  std::string config_path;
  std::string out_dir = "mingraph_out";
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
};

json load_config(const std::string& path) {
  if (path.empty()) return json::object();
  if (!fs::exists(path)) throw InvalidInput("config file not found: " + path);
  std::ifstream in(path);
  try {
    json j = json::parse(in);
    if (!j.is_object()) throw InvalidInput("config must be a JSON object");
    return j;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("config is not valid JSON: ") + e.what());
  }
}

void only_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw InvalidInput(where + " must be an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw InvalidInput("unknown key '" + k + "' in " + where);
}

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("config key '") + key + "' has the wrong type");
  }
}

json section(const json& cfg, const char* key) {
  if (!cfg.contains(key)) return json::object();
  return cfg.at(key);
}

bool section_enabled(const json& cfg, const char* key) {
  return !(cfg.contains(key) && cfg.at(key).is_boolean() && !cfg.at(key).get<bool>());
}

fs::path prepare_out(const Common& c) {
  fs::path out(c.out_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw InvalidInput("cannot create output directory " + out.string());
  return out;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::trunc | std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + p.string());
  out << text;
}

void write_json(const fs::path& p, const json& j) { write_text(p, j.dump(2) + "\n"); }

// Timestamps go here and nowhere else, so reports stay byte-identical.
void log_run(const fs::path& out, const std::string& command, int status) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ofstream log(out / "run.log", std::ios::app);
  log << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << " " << command << " exit=" << status
      << " threads=" << parallel::thread_limit() << "\n";
}

Matrix matrix_from_json(const json& j, const std::string& what) {
  try {
    const auto rows = j.get<std::vector<std::vector<double>>>();
    if (rows.empty() || rows[0].empty()) throw InvalidInput(what + " must be a non-empty matrix");
    Matrix a(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != rows[0].size()) throw InvalidInput(what + " rows differ in length");
      for (std::size_t k = 0; k < rows[i].size(); ++k) a(i, k) = rows[i][k];
    }
    return a;
  } catch (const json::exception&) {
    throw InvalidInput(what + " must be an array of numeric rows");
  }
}

Vector vector_from_json(const json& j, const std::string& what) {
  try {
    const auto v = j.get<std::vector<double>>();
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
  } catch (const json::exception&) {
    throw InvalidInput(what + " must be a numeric array");
  }
}

json to_array(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

// Model plus the resolved description that is echoed into reports.
AnalyticModel model_from_config(const json& cfg, json& resolved) {
  const std::string label = get_or<std::string>(cfg, "model", "");
  if (label.empty()) throw InvalidInput("config needs a 'model' label (see `zoo list`)");
  resolved["model"] = label;
  if (label == "affine") {
    const json a = section(cfg, "affine");
    only_keys(a, {"A", "b"}, "affine");
    const Matrix big_a = a.contains("A") ? matrix_from_json(a.at("A"), "affine.A") : Matrix::Zero(2, 2);
    const Vector b = a.contains("b") ? vector_from_json(a.at("b"), "affine.b") : Vector::Zero(big_a.rows());
    json rows = json::array();
    for (int i = 0; i < big_a.rows(); ++i) rows.push_back(to_array(big_a.row(i).transpose()));
    resolved["affine"] = {{"A", rows}, {"b", to_array(b)}};
    return model_affine(big_a, b);
  }
  return model_by_label(label);
}

// ---------------------------------------------------------------- invariants

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

int cmd_invariants(const Common& c, const std::string& fault) {
  FaultInjection inj;
  if (fault == "slope-sign") {
    inj.slope_sign_flip = true;
  } else if (!fault.empty()) {
    throw InvalidInput("unknown fault '" + fault + "' (known: slope-sign)");
  }
  const fs::path out = prepare_out(c);
  const std::uint64_t seed = c.seed.value_or(1);
  const auto suites = run_invariant_suites(seed, inj);
  int failures = 0, cases = 0;
  for (const auto& s : suites) {
    failures += s.failures;
    cases += s.cases;
  }
  std::ostringstream xml;
  xml << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  xml << "<testsuites name=\"invariants\" tests=\"" << cases << "\" failures=\"" << failures << "\">\n";
  for (const auto& s : suites) {
    xml << "  <testsuite name=\"" << xml_escape(s.name) << "\" tests=\"" << s.cases << "\" failures=\"" << s.failures
        << "\">\n";
    if (s.failures == 0) {
      xml << "    <testcase name=\"" << xml_escape(s.name) << ".all\"/>\n";
    } else {
      for (const auto& msg : s.messages)
        xml << "    <testcase name=\"" << xml_escape(msg) << "\"><failure message=\"" << xml_escape(msg)
            << "\"/></testcase>\n";
    }
    xml << "  </testsuite>\n";
  }
  xml << "</testsuites>\n";
  write_text(out / "invariants.xml", xml.str());

  for (const auto& s : suites) std::cout << s.name << ": " << s.cases << " cases, " << s.failures << " failures\n";
  if (failures) {
    for (const auto& s : suites)
      for (std::size_t k = 0; k < s.messages.size() && k < 20; ++k) std::cerr << "FAIL " << s.name << ": " << s.messages[k] << "\n";
    return kAssertion;
  }
  return kOk;
}

// ------------------------------------------------------------ verify-algebra

std::vector<int> int_list(const json& j, const char* key, std::vector<int> fallback) {
  return get_or<std::vector<int>>(j, key, std::move(fallback));
}

int cmd_verify_algebra(const Common& c) {
  const json cfg = load_config(c.config_path);
  only_keys(cfg, {"seed", "mu123", "mu123_lambda", "sqrt2", "lambda_inequality", "app1"}, "verify-algebra config");
  const fs::path out = prepare_out(c);
  const std::uint64_t seed = c.seed.value_or(get_or<std::uint64_t>(cfg, "seed", 1));
  json resolved = {{"seed", seed}};
  json reports = json::array();
  std::uint64_t violations = 0;
  json first_witness = nullptr;
  auto record = [&](const ScanReport& r) {
    json j = to_json(r);
    reports.push_back(j);
    if (r.violations && first_witness.is_null()) first_witness = {{"check", r.check}, {"witness", j["witness"]}};
    violations += r.violations;
  };

  if (section_enabled(cfg, "mu123")) {
    const json s = section(cfg, "mu123");
    only_keys(s, {"step", "mu_max", "constraint", "region_cap"}, "mu123");
    Mu123ScanOptions o;
    o.step = get_or(s, "step", 0.05);
    o.mu_max = get_or(s, "mu_max", 4.0);
    const std::string constraint = get_or<std::string>(s, "constraint", "strict");
    if (constraint == "weakened") {
      o.constraint = Mu123Constraint::weakened;
    } else if (constraint != "strict") {
      throw InvalidInput("mu123.constraint must be 'strict' or 'weakened'");
    }
    if (s.contains("region_cap")) o.region_cap = get_or(s, "region_cap", o.region_cap);
    resolved["mu123"] = {{"step", o.step}, {"mu_max", o.mu_max}, {"constraint", constraint}};
    if (std::isfinite(o.region_cap)) resolved["mu123"]["region_cap"] = o.region_cap;
    record(scan_mu123(o));
  }
  if (section_enabled(cfg, "mu123_lambda")) {
    const json s = section(cfg, "mu123_lambda");
    only_keys(s, {"lambdas", "step", "mu_max"}, "mu123_lambda");
    const auto lambdas = get_or<std::vector<double>>(s, "lambdas", {0.5, 1.0, 1.2, std::sqrt(2.0)});
    const double step = get_or(s, "step", 0.05);
    const double mu_max = get_or(s, "mu_max", 4.0);
    resolved["mu123_lambda"] = {{"lambdas", lambdas}, {"step", step}, {"mu_max", mu_max}};
    for (double l : lambdas) record(scan_mu123_lambda(l, step, mu_max));
  }
  auto pointwise = [&](const char* key, bool with_lambda) {
    if (!section_enabled(cfg, key)) return;
    const json s = section(cfg, key);
    only_keys(s, {"n", "m", "samples", "lambda_upper", "lambda"}, key);
    const auto ns = int_list(s, "n", {2, 3, 4});
    const auto ms = int_list(s, "m", {2, 3, 4});
    PointwiseSamplerOptions o;
    o.samples = get_or<std::uint64_t>(s, "samples", 100000);
    o.lambda_upper = get_or(s, "lambda_upper", 3.0);
    o.seed = seed;
    const double big_lambda = get_or(s, "lambda", 1.2);
    resolved[key] = {{"n", ns}, {"m", ms}, {"samples", o.samples}, {"lambda_upper", o.lambda_upper}};
    if (with_lambda) resolved[key]["lambda"] = big_lambda;
    for (int n : ns)
      for (int m : ms) {
        o.n = n;
        o.m = m;
        record(with_lambda ? check_lambda_inequality(big_lambda, o) : check_sqrt2_inequality(o));
      }
  };
  pointwise("sqrt2", false);
  pointwise("lambda_inequality", true);
  if (section_enabled(cfg, "app1")) {
    const json s = section(cfg, "app1");
    only_keys(s, {"lambda", "epsilons", "samples", "max_bound", "slack"}, "app1");
    App1Options o;
    o.lambda = get_or(s, "lambda", 1.0);
    o.samples = get_or<std::uint64_t>(s, "samples", 10000);
    o.seed = seed;
    const auto eps = get_or<std::vector<double>>(s, "epsilons", {0.3, 0.1, 0.03, 0.01});
    const double max_bound = get_or(s, "max_bound", 1.1);
    const double slack = get_or(s, "slack", 0.02);
    resolved["app1"] = {{"lambda", o.lambda}, {"epsilons", eps}, {"samples", o.samples}, {"max_bound", max_bound},
                        {"slack", slack}};
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < eps.size(); ++k) {
      o.epsilon = eps[k];
      ScanReport r = app1_sampler(o);
      // Trend check: max |xi_11| must not grow as eps shrinks.
      if (r.max_value > previous + slack) {
        ++r.violations;
        r.witness = r.argmax;
      }
      previous = r.max_value;
      if (k + 1 == eps.size() && r.max_value > max_bound) {
        ++r.violations;
        r.witness = r.argmax;
      }
      record(r);
    }
  }
  const json doc = {{"command", "verify-algebra"}, {"config", resolved}, {"reports", reports},
                    {"violations", violations}};
  write_json(out / "verify_algebra.json", doc);
  std::cout << "verify-algebra: " << reports.size() << " reports, " << violations << " violations\n";
  if (violations) {
    std::cerr << "violation witness: " << first_witness.dump() << "\n";
    return kAssertion;
  }
  return kOk;
}

// --------------------------------------------------------------------- solve

int cmd_solve(const Common& c) {
  const json cfg = load_config(c.config_path);
  only_keys(cfg, {"patch", "generator", "tol", "max_iter", "initial_guess", "output"}, "solve config");
  const fs::path out = prepare_out(c);
  json resolved;
  std::optional<AnalyticModel> reference;
  std::optional<GraphPatch> patch;
  if (cfg.contains("patch") == cfg.contains("generator"))
    throw InvalidInput("solve config needs exactly one of 'patch' or 'generator'");
  if (cfg.contains("patch")) {
    const std::string p = get_or<std::string>(cfg, "patch", "");
    if (!fs::exists(p)) throw InvalidInput("patch manifest not found: " + p);
    patch = read_patch(p);
    resolved["patch"] = p;
  } else {
    const json g = cfg.at("generator");
    only_keys(g, {"model", "affine", "dims", "origin", "spacing"}, "generator");
    json model_desc;
    reference = model_from_config(g, model_desc);
    const auto dims = get_or<std::vector<int>>(g, "dims", std::vector<int>(reference->n(), 33));
    if (static_cast<int>(dims.size()) != reference->n()) throw InvalidInput("generator.dims must have n entries");
    const Vector origin = g.contains("origin") ? vector_from_json(g.at("origin"), "generator.origin")
                                               : Vector::Zero(reference->n());
    const double spacing = get_or(g, "spacing", 1.0 / (dims[0] - 1));
    model_desc["dims"] = dims;
    model_desc["origin"] = to_array(origin);
    model_desc["spacing"] = spacing;
    resolved["generator"] = model_desc;
    patch = boundary_patch(*reference, dims, spacing, origin);
  }
  SolveOptions opt;
  opt.tol = get_or(cfg, "tol", opt.tol);
  opt.max_iter = get_or(cfg, "max_iter", opt.max_iter);
  const std::string guess = get_or<std::string>(cfg, "initial_guess", "transfinite");
  if (guess == "keep") {
    opt.initial_guess = InitialGuess::keep;
  } else if (guess != "transfinite") {
    throw InvalidInput("initial_guess must be 'transfinite' or 'keep'");
  }
  const std::string stem = get_or<std::string>(cfg, "output", "solution");
  resolved["tol"] = opt.tol;
  resolved["max_iter"] = opt.max_iter;
  resolved["initial_guess"] = guess;
  resolved["output"] = stem;

  const SolveReport rep = solve(*patch, opt);
  json doc = {{"command", "solve"}, {"config", resolved}, {"report", to_json(rep)}};
  if (reference) {
    double err = 0.0;
    for (std::size_t node = 0; node < patch->node_count(); ++node)
      if (!patch->is_boundary(node))
        err = std::max(err, (patch->node_value(node) - reference->value(patch->coords(node))).cwiseAbs().maxCoeff());
    doc["interior_sup_error"] = err;
  }
  write_patch(*patch, out / (stem + ".json"));
  write_json(out / "solve_report.json", doc);
  std::cout << "solve: iterations " << rep.iterations << ", residual " << format_double(rep.residual)
            << (rep.converged ? ", converged\n" : ", NOT converged\n");
  return rep.converged ? kOk : kNoConvergence;
}

// ------------------------------------------------------------------ diagnose

std::vector<Vector> diagnose_points(const json& spec, int n, std::uint64_t seed, json& resolved) {
  std::vector<Vector> pts;
  only_keys(spec, {"list", "random"}, "points");
  if (spec.contains("list")) {
    for (const auto& p : spec.at("list")) {
      Vector x = vector_from_json(p, "points.list entry");
      if (x.size() != n) throw InvalidInput("points.list entries must have n coordinates");
      pts.push_back(x);
    }
    resolved = {{"list", spec.at("list")}};
    return pts;
  }
  const json r = spec.contains("random") ? spec.at("random") : json::object();
  only_keys(r, {"count", "r_min", "r_max", "center"}, "points.random");
  const int count = get_or(r, "count", 1000);
  const double r_min = get_or(r, "r_min", 0.5);
  const double r_max = get_or(r, "r_max", 2.0);
  const Vector center = r.contains("center") ? vector_from_json(r.at("center"), "points.random.center") : Vector::Zero(n);
  if (count < 1 || !(r_min >= 0.0) || !(r_max >= r_min) || center.size() != n)
    throw InvalidInput("points.random: need count >= 1, 0 <= r_min <= r_max and an n-dimensional center");
  resolved = {{"random", {{"count", count}, {"r_min", r_min}, {"r_max", r_max}, {"center", to_array(center)}}}};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> radius(r_min, r_max);
  for (int k = 0; k < count; ++k) {
    Vector dir(n);
    do {
      for (int i = 0; i < n; ++i) dir(i) = normal(rng);
    } while (dir.norm() < 1e-12);
    pts.push_back(center + radius(rng) * dir.normalized());
  }
  return pts;
}

struct ColumnCheck {
  const char* name;
  double DiagnosticRow::*field;
};

int cmd_diagnose(const Common& c) {
  const json cfg = load_config(c.config_path);
  only_keys(cfg, {"model", "affine", "patch", "points", "h_fd", "seed", "assert"}, "diagnose config");
  const fs::path out = prepare_out(c);
  const std::uint64_t seed = c.seed.value_or(get_or<std::uint64_t>(cfg, "seed", 1));
  const double h_fd = get_or(cfg, "h_fd", 5e-3);
  json resolved = {{"seed", seed}, {"h_fd", h_fd}};

  std::vector<DiagnosticRow> rows;
  int n = 0;
  if (cfg.contains("patch")) {
    const std::string p = get_or<std::string>(cfg, "patch", "");
    if (!fs::exists(p)) throw InvalidInput("patch manifest not found: " + p);
    const GraphPatch patch = read_patch(p);
    resolved["patch"] = p;
    n = patch.n();
    std::vector<std::size_t> nodes;
    for (std::size_t node = 0; node < patch.node_count(); ++node)
      if (patch.depth(node) >= 2) nodes.push_back(node);
    rows.resize(nodes.size());
    parallel::map_ranges<int>(nodes.size(), 256, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) rows[k] = diagnose_patch_node(patch, nodes[k]);
      return 0;
    });
  } else {
    const AnalyticModel model = model_from_config(cfg, resolved);
    n = model.n();
    json pts_resolved;
    const auto pts = diagnose_points(section(cfg, "points"), n, seed, pts_resolved);
    resolved["points"] = pts_resolved;
    rows.resize(pts.size());
    parallel::map_ranges<int>(pts.size(), 64, [&](std::size_t b, std::size_t e) {
      for (std::size_t k = b; k < e; ++k) rows[k] = diagnose_point(model, pts[k], h_fd);
      return 0;
    });
  }

  std::ostringstream csv;
  {
    CsvWriter w(csv, diagnostic_header(n));
    for (const auto& r : rows) w.row(diagnostic_values(r));
  }
  write_text(out / "diagnose.csv", csv.str());

  // Configured assertions, checked row by row in order.
  const json a = section(cfg, "assert");
  only_keys(a, {"v", "lip", "dilation", "tol", "max_residual", "min_margin_b", "max_abs_gap", "min_margin_lambda"},
            "assert");
  const double tol = get_or(a, "tol", 1e-10);
  json checks = json::object();
  std::optional<std::size_t> witness;
  std::string failed;
  auto check_rows = [&](const char* name, auto&& ok) {
    for (std::size_t k = 0; k < rows.size(); ++k)
      if (!ok(rows[k])) {
        checks[name] = false;
        if (!witness) {
          witness = k;
          failed = name;
        }
        return;
      }
    checks[name] = true;
  };
  for (ColumnCheck col : {ColumnCheck{"v", &DiagnosticRow::v}, ColumnCheck{"lip", &DiagnosticRow::lip},
                          ColumnCheck{"dilation", &DiagnosticRow::dilation}}) {
    if (!a.contains(col.name)) continue;
    const double target = get_or(a, col.name, 0.0);
    check_rows(col.name, [&](const DiagnosticRow& r) { return std::abs(r.*col.field - target) <= tol; });
  }
  if (a.contains("max_residual")) {
    const double lim = get_or(a, "max_residual", 0.0);
    check_rows("max_residual", [&](const DiagnosticRow& r) { return r.residual <= lim; });
  }
  if (a.contains("min_margin_b")) {
    const double lim = get_or(a, "min_margin_b", 0.0);
    check_rows("min_margin_b", [&](const DiagnosticRow& r) { return r.margin_b >= lim; });
  }
  if (a.contains("min_margin_lambda")) {
    const double lim = get_or(a, "min_margin_lambda", 0.0);
    check_rows("min_margin_lambda", [&](const DiagnosticRow& r) {
      return r.dilation >= std::sqrt(2.0) || r.margin_lambda >= lim;
    });
  }
  if (a.contains("max_abs_gap")) {
    const double lim = get_or(a, "max_abs_gap", 0.0);
    check_rows("max_abs_gap", [&](const DiagnosticRow& r) { return std::abs(r.gap) <= lim; });
  }
  if (!a.empty()) {
    resolved["assert"] = a;
    resolved["assert"]["tol"] = tol;
  }

  json summary = {{"command", "diagnose"}, {"config", resolved}, {"rows", rows.size()}, {"checks", checks}};
  if (!rows.empty()) {
    auto column_range = [&](double DiagnosticRow::*f) {
      double lo = rows[0].*f, hi = rows[0].*f;
      for (const auto& r : rows) {
        lo = std::min(lo, r.*f);
        hi = std::max(hi, r.*f);
      }
      return json{{"min", json_number(lo)}, {"max", json_number(hi)}};
    };
    summary["ranges"] = {{"v", column_range(&DiagnosticRow::v)},
                         {"lip", column_range(&DiagnosticRow::lip)},
                         {"dilation", column_range(&DiagnosticRow::dilation)},
                         {"B2", column_range(&DiagnosticRow::b_norm_sq)},
                         {"gap", column_range(&DiagnosticRow::gap)},
                         {"residual", column_range(&DiagnosticRow::residual)}};
  }
  if (witness) {
    std::ostringstream row;
    const auto vals = diagnostic_values(rows[*witness]);
    for (std::size_t k = 0; k < vals.size(); ++k) row << (k ? "," : "") << format_double(vals[k]);
    summary["witness"] = {{"check", failed}, {"row", *witness}, {"values", row.str()}};
  }
  write_json(out / "diagnose.json", summary);
  std::cout << "diagnose: " << rows.size() << " rows\n";
  if (witness) {
    std::cerr << "assertion '" << failed << "' failed at row " << *witness << ": "
              << summary["witness"]["values"].get<std::string>() << "\n";
    return kAssertion;
  }
  return kOk;
}

// ------------------------------------------------------------------- measure

int cmd_measure(const Common& c) {
  const json cfg = load_config(c.config_path);
  only_keys(cfg, {"model", "affine", "mode", "center_x", "center", "radii", "scales", "resolution", "lambda", "assert",
                  "half_width"},
            "measure config");
  const fs::path out = prepare_out(c);
  json resolved;
  const AnalyticModel model = model_from_config(cfg, resolved);
  const std::string mode = get_or<std::string>(cfg, "mode", "profile");
  QuadratureOptions q;
  q.resolution = get_or(cfg, "resolution", 0);
  if (q.resolution == 0) q.resolution = default_resolution(model.n());
  const auto radii = get_or<std::vector<double>>(cfg, "radii", {1.0, 2.0, 4.0, 8.0});
  resolved["mode"] = mode;
  resolved["resolution"] = q.resolution;
  const json a = section(cfg, "assert");
  json checks = json::object();
  std::string failure;

  auto center_from_config = [&]() -> Vector {
    if (cfg.contains("center")) {
      Vector cen = vector_from_json(cfg.at("center"), "center");
      if (cen.size() != model.n() + model.m()) throw InvalidInput("center must have n + m coordinates");
      return cen;
    }
    const Vector x0 = cfg.contains("center_x") ? vector_from_json(cfg.at("center_x"), "center_x") : Vector::Zero(model.n());
    if (x0.size() != model.n()) throw InvalidInput("center_x must have n coordinates");
    return graph_center(model, x0);
  };

  std::ostringstream csv;
  json summary = {{"command", "measure"}};
  if (mode == "profile") {
    only_keys(a, {"monotone", "band", "ratio_equals", "ratio_tol", "ratio_constant_tol", "min_ratio"}, "assert");
    const Vector center = center_from_config();
    resolved["center"] = to_array(center);
    resolved["radii"] = radii;
    const DensityProfile p = density_profile(model, center, radii, q);
    CsvWriter w(csv, {"radius", "volume", "ratio", "est_error"});
    for (std::size_t k = 0; k < p.radii.size(); ++k) w.row({p.radii[k], p.volumes[k], p.ratios[k], p.est_errors[k]});
    summary["profile"] = to_json(p);
    const bool want_monotone = get_or(a, "monotone", true);
    const double band = get_or(a, "band", 3.0);
    if (want_monotone) {
      checks["monotone"] = p.monotone_within(band);
      if (!checks["monotone"].get<bool>()) failure = "density ratio decreases beyond " + format_double(band) + "x error";
    }
    if (a.contains("ratio_equals")) {
      const double target = get_or(a, "ratio_equals", 1.0), tol = get_or(a, "ratio_tol", 0.005);
      bool ok = true;
      for (double r : p.ratios) ok = ok && std::abs(r - target) <= tol;
      checks["ratio_equals"] = ok;
      if (!ok && failure.empty()) failure = "ratio differs from " + format_double(target);
    }
    if (a.contains("ratio_constant_tol")) {
      const double tol = get_or(a, "ratio_constant_tol", 0.01);
      bool ok = true;
      for (double r : p.ratios) ok = ok && std::abs(r / p.ratios.front() - 1.0) <= tol;
      checks["ratio_constant"] = ok;
      if (!ok && failure.empty()) failure = "ratio is not constant";
    }
    if (a.contains("min_ratio")) {
      const double lo = get_or(a, "min_ratio", 1.0);
      bool ok = true;
      for (std::size_t k = 0; k < p.ratios.size(); ++k) ok = ok && p.ratios[k] >= lo - p.est_errors[k];
      checks["min_ratio"] = ok;
      if (!ok && failure.empty()) failure = "ratio below " + format_double(lo);
    }
  } else if (mode == "levg") {
    // Volume in B_{sqrt3 r}(0) against r(r^2 - 1).
    only_keys(a, {"max_rel_error"}, "assert");
    const double max_rel = get_or(a, "max_rel_error", 0.01);
    resolved["radii"] = radii;
    resolved["assert"] = {{"max_rel_error", max_rel}};
    CsvWriter w(csv, {"radius", "volume", "ratio", "est_error"});
    json rows = json::array();
    bool ok = true;
    for (double r : radii) {
      const VolumeReport v = graph_volume(model, Vector::Zero(model.n() + model.m()), std::sqrt(3.0) * r, q);
      const double bound = r * (r * r - 1.0);
      w.row({r, v.value, v.value / bound, v.est_error});
      const bool row_ok = v.value >= bound && v.relative_error() <= max_rel;
      rows.push_back({{"r", r}, {"volume", v.value}, {"bound", bound}, {"est_error", v.est_error}, {"ok", row_ok}});
      if (!row_ok && failure.empty()) failure = "volume bound or error budget fails at r = " + format_double(r);
      ok = ok && row_ok;
    }
    checks["levg"] = ok;
    summary["levg"] = rows;
  } else if (mode == "growth") {
    only_keys(a, {}, "assert");
    const double lambda = get_or(cfg, "lambda", 1.0);
    const Vector center = center_from_config();
    resolved["lambda"] = lambda;
    resolved["center"] = to_array(center);
    resolved["radii"] = radii;
    try {
      const VolumeGrowthReport rep = volume_growth_bound_check(model, lambda, center, radii, q);
      CsvWriter w(csv, {"radius", "volume", "ratio", "est_error"});
      const auto& p = rep.profile;
      for (std::size_t k = 0; k < p.radii.size(); ++k) w.row({p.radii[k], p.volumes[k], p.ratios[k], p.est_errors[k]});
      summary["growth"] = {{"ok", rep.ok}, {"constant", rep.constant}, {"max_dilation", rep.max_dilation},
                           {"profile", to_json(p)}};
      checks["growth"] = rep.ok;
      if (!rep.ok) failure = "density ratio grows by more than 1.5x";
    } catch (const PredicateViolation& e) {
      csv << "radius,volume,ratio,est_error\n";
      summary["growth"] = {{"ok", false}, {"predicate_violation", e.what()}};
      checks["growth"] = false;
      failure = e.what();
    }
  } else if (mode == "curvature") {
    only_keys(a, {"slope", "slope_tol"}, "assert");
    const Vector center = center_from_config();
    resolved["center"] = to_array(center);
    resolved["radii"] = radii;
    const CurvatureIntegral ci = curvature_integral(model, center, radii, q);
    CsvWriter w(csv, {"radius", "volume", "ratio", "est_error"});
    for (std::size_t k = 0; k < ci.radii.size(); ++k)
      w.row({ci.radii[k], ci.values[k], ci.values[k] / std::pow(ci.radii[k], model.n() - 2), ci.est_errors[k]});
    summary["curvature"] = {{"loglog_slope", json_number(ci.loglog_slope)}, {"values", json_vector(ci.values)}};
    if (a.contains("slope")) {
      const double target = get_or(a, "slope", 0.0), tol = get_or(a, "slope_tol", 0.05);
      const bool ok = std::abs(ci.loglog_slope - target) <= tol;
      checks["slope"] = ok;
      if (!ok) failure = "log-log slope " + format_double(ci.loglog_slope) + " is off target";
    }
  } else if (mode == "blowdown") {
    only_keys(a, {}, "assert");
    const auto scales = get_or<std::vector<double>>(cfg, "scales", {1.0, 2.0, 4.0, 8.0});
    const double half = get_or(cfg, "half_width", 1.0);
    resolved["scales"] = scales;
    resolved["half_width"] = half;
    CsvWriter w(csv, {"scale", "max_slope"});
    json vals = json::array();
    for (double s : scales) {
      const double v = max_slope(blow_down(model, s), half, 32);
      w.row({s, v});
      vals.push_back(json_number(v));
    }
    summary["blowdown"] = {{"max_slope", vals}};
  } else {
    throw InvalidInput("measure.mode must be one of profile, levg, growth, curvature, blowdown");
  }
  if (!a.empty() && !resolved.contains("assert")) resolved["assert"] = a;
  summary["config"] = resolved;
  summary["checks"] = checks;
  if (!failure.empty()) summary["failure"] = failure;
  write_text(out / "measure.csv", csv.str());
  write_json(out / "measure.json", summary);
  std::cout << "measure (" << mode << "): " << (failure.empty() ? "ok" : "FAILED") << "\n";
  if (!failure.empty()) {
    std::cerr << "assertion failed: " << failure << "\n";
    return kAssertion;
  }
  return kOk;
}

int cmd_zoo_list() {
  for (const auto& label : model_labels()) {
    const AnalyticModel m = model_by_label(label);
    std::cout << label << "  n=" << m.n() << " m=" << m.m() << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mingraph: minimal graph experiments"};
  app.require_subcommand(1);
  Common common;
  std::uint64_t seed_value = 0;
  std::string fault;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", common.config_path, "JSON config file");
    if (needs_config) opt->required();
    sub->add_option("--out", common.out_dir, "output directory")->capture_default_str();
    sub->add_option("--threads", common.threads, "worker cap (0 = all cores)");
    sub->add_option("--seed", seed_value, "seed override");
  };
  auto* inv = app.add_subcommand("invariants", "run the property suites");
  add_common(inv, false);
  inv->add_option("--inject-fault", fault, "corrupt a quantity on purpose (slope-sign)");
  auto* alg = app.add_subcommand("verify-algebra", "grid scans and random samplers");
  add_common(alg, false);
  auto* sol = app.add_subcommand("solve", "Dirichlet problem for the minimal surface system");
  add_common(sol, true);
  auto* dia = app.add_subcommand("diagnose", "pointwise geometry table");
  add_common(dia, true);
  auto* mea = app.add_subcommand("measure", "volumes, density ratios, curvature integrals");
  add_common(mea, true);
  auto* zoo = app.add_subcommand("zoo", "model zoo");
  zoo->require_subcommand(1);
  auto* zoo_list = zoo->add_subcommand("list", "list model labels");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kBadInput;
  }

  auto* sub = app.get_subcommands().front();
  for (auto* s : {inv, alg, sol, dia, mea})
    if (s == sub && s->count("--seed")) common.seed = seed_value;
  parallel::set_thread_limit(common.threads);

  const std::string name = sub->get_name();
  int status = kOk;
  try {
    if (sub == inv) status = cmd_invariants(common, fault);
    else if (sub == alg) status = cmd_verify_algebra(common);
    else if (sub == sol) status = cmd_solve(common);
    else if (sub == dia) status = cmd_diagnose(common);
    else if (sub == mea) status = cmd_measure(common);
    else if (zoo_list->parsed()) return cmd_zoo_list();
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    status = kBadInput;
  } catch (const DimensionMismatch& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    status = kBadInput;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = kAssertion;
  }
  if (sub != zoo) {
    std::error_code ec;
    if (fs::is_directory(common.out_dir, ec)) log_run(common.out_dir, name, status);
  }
  return status;
}
