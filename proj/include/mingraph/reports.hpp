#ifndef MINGRAPH_REPORTS_HPP
#define MINGRAPH_REPORTS_HPP

// JSON and CSV serialization of the module reports. Output depends only on
// the values, so identical runs produce identical bytes.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mingraph/algebra_verifier.hpp"
#include "mingraph/diagnostics.hpp"
#include "mingraph/measure_tools.hpp"
#include "mingraph/mss_solver.hpp"

namespace mingraph {

/// Round-trip decimal form; "nan", "inf", "-inf" for non-finite values.
inline std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// JSON number, or null when not finite.
inline nlohmann::json json_number(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

inline nlohmann::json json_vector(const std::vector<double>& xs) {
  auto out = nlohmann::json::array();
  for (double x : xs) out.push_back(json_number(x));
  return out;
}

inline nlohmann::json to_json(const ScanReport& r) {
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [k, v] : r.params) params[k] = json_number(v);
  nlohmann::json j = {
      {"check", r.check},
      {"params", params},
      {"samples", r.samples},
      {"min_value", json_number(r.min_value)},
      {"argmin", json_vector(r.argmin)},
      {"max_value", json_number(r.max_value)},
      {"argmax", json_vector(r.argmax)},
      {"violations", r.violations},
      {"witness", json_vector(r.witness)},
      {"seed", r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr)},
  };
  if (r.attempts) j["attempts"] = r.attempts;
  if (r.check.rfind("mu123", 0) == 0 && r.check != "mu123-lambda") {
    j["unconstrained_region"] = r.unconstrained_region;
    j["pair_product_violations"] = r.pair_product_violations;
  }
  return j;
}

inline nlohmann::json to_json(const SolveReport& r) {
  return {{"iterations", r.iterations},
          {"residual", json_number(r.residual)},
          {"converged", r.converged},
          {"diverged", r.diverged},
          {"damping_history", json_vector(r.damping_history)},
          {"residual_history", json_vector(r.residual_history)}};
}

inline nlohmann::json to_json(const DensityProfile& p) {
  std::vector<double> c(p.center.data(), p.center.data() + p.center.size());
  return {{"center", json_vector(c)},
          {"radii", json_vector(p.radii)},
          {"volumes", json_vector(p.volumes)},
          {"ratios", json_vector(p.ratios)},
          {"est_errors", json_vector(p.est_errors)},
          {"monotonicity_margin", json_number(p.monotonicity_margin())},
          {"monotone_within_3x_error", p.monotone_within(3.0)}};
}

/// Minimal CSV writer: header once, then rows of doubles.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const std::vector<std::string>& header) : out_(out), columns_(header.size()) {
    for (std::size_t k = 0; k < header.size(); ++k) out_ << (k ? "," : "") << header[k];
    out_ << '\n';
  }

  void row(const std::vector<double>& values) {
    if (values.size() != columns_) throw InvalidInput("CsvWriter: row has the wrong number of columns");
    for (std::size_t k = 0; k < values.size(); ++k) out_ << (k ? "," : "") << format_double(values[k]);
    out_ << '\n';
  }

 private:
  std::ostream& out_;
  std::size_t columns_;
};

inline std::vector<std::string> diagnostic_header(int n) {
  std::vector<std::string> h;
  for (int i = 0; i < n; ++i) h.push_back("x" + std::to_string(i + 1));
  for (const char* c : {"v", "lip", "dilation", "B2", "lhs", "rhs", "gap", "margin_lambda", "margin_b", "residual"})
    h.emplace_back(c);
  return h;
}

inline std::vector<double> diagnostic_values(const DiagnosticRow& r) {
  std::vector<double> v(r.x.data(), r.x.data() + r.x.size());
  for (double c : {r.v, r.lip, r.dilation, r.b_norm_sq, r.lhs, r.rhs, r.gap, r.margin_lambda, r.margin_b, r.residual})
    v.push_back(c);
  return v;
}

}  // namespace mingraph

#endif  // MINGRAPH_REPORTS_HPP
