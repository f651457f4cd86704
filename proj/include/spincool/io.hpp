#pragma once

// Trace and report serialization. CSV is the human-diffable view (biases
// in units of eps0, 6 significant digits); JSON carries full-precision
// values plus the S&S diagonal for n <= 12 and, on the rational backend,
// exact numerator/denominator strings. Identical configurations must
// produce byte-identical files, so nothing time- or locale-dependent goes
// in here.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "spincool/analysis.hpp"
#include "spincool/core.hpp"
#include "spincool/runner.hpp"

namespace spincool {

using json = nlohmann::ordered_json;

inline std::string format_g6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// CSV

inline std::string render_trace_csv(const Trace& trace, const RunMeta& meta) {
  std::string out = "step_index,label";
  for (int i = 0; i < meta.n; ++i) out += ",bias_" + std::to_string(i);
  out += "\n";
  for (const auto& rec : trace.records) {
    out += std::to_string(rec.step_index);
    out += ',';
    out += rec.label;
    for (int i = 0; i < meta.n; ++i) {
      out += ',';
      out += format_g6(rec.bias_config[i] / meta.eps0);
    }
    out += "\n";
  }
  return out;
}

// ---------------------------------------------------------------------------
// Summary / JSON

/// Residuals of the k-step fixed-point equations in eps0 units:
/// r_l = b_{l-1} - sum_{j=1..min(k,l-1)} b_{l-1-j}, l = 3..n.
inline std::vector<double> fixed_point_residuals(const BiasVector& biases,
                                                 double eps0, int k) {
  const int n = biases.n();
  std::vector<double> r;
  for (int l = 3; l <= n; ++l) {
    double sum = 0.0;
    for (int j = 1; j <= std::min(k, l - 1); ++j) sum += biases[l - 1 - j];
    r.push_back((biases[l - 1] - sum) / eps0);
  }
  return r;
}

inline json summary_json(const Trace& trace, const RunMeta& meta) {
  json s;
  s["total_steps"] = trace.total_steps;
  s["outer_iterations"] = trace.outer_iterations;
  s["converged"] = trace.converged;
  s["dropped_records"] = trace.dropped_records;

  json fb = json::array();
  for (double b : trace.final_biases.values) fb.push_back(b / meta.eps0);
  s["final_bias_over_eps0"] = fb;
  s["final_top_bias_over_eps0"] =
      trace.final_biases.values.empty()
          ? 0.0
          : trace.final_biases.values.back() / meta.eps0;
  if (!trace.final_bias_over_eps0_exact.empty())
    s["final_bias_over_eps0_exact"] = trace.final_bias_over_eps0_exact;
  if (trace.final_sands) s["final_sands"] = trace.final_sands->values;
  if (!trace.final_sands_exact.empty())
    s["final_sands_exact"] = trace.final_sands_exact;

  if (meta.k >= 2) {
    const auto res = fixed_point_residuals(trace.final_biases, meta.eps0, meta.k);
    s["fixed_point_residuals_over_eps0"] = res;
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, std::abs(r));
    s["max_fixed_point_residual_over_eps0"] = worst;
  }

  json bounds;
  bounds["shannon_bias_over_eps0"] = std::sqrt(double(meta.n));
  bounds["final_top_exceeds_shannon"] =
      !trace.final_biases.values.empty() &&
      trace.final_biases.values.back() / meta.eps0 > std::sqrt(double(meta.n));
  bounds["theorem1_prob_bound"] = theorem1_bound(meta.n, meta.epsilon);
  bounds["max_prob_seen"] = trace.max_prob_seen;
  bounds["within_theorem1"] =
      trace.max_prob_seen <= theorem1_bound(meta.n, meta.epsilon) + 1e-12;
  s["bounds"] = bounds;
  return s;
}

inline json meta_json(const RunMeta& meta) {
  json m;
  m["algorithm"] = meta.algorithm;
  m["backend"] = meta.backend;
  m["mode"] = meta.mode;
  m["init"] = meta.init;
  m["style"] = meta.style;
  m["n"] = meta.n;
  if (meta.k >= 2) m["k"] = meta.k;
  if (meta.L >= 1) m["L"] = meta.L;
  m["eps0"] = meta.eps0;
  m["epsilon"] = meta.epsilon;
  m["delta"] = meta.delta;
  m["max_steps"] = meta.max_steps;
  m["reps"] = meta.reps;
  return m;
}

inline json trace_to_json(const Trace& trace, const RunMeta& meta) {
  json doc;
  doc["format"] = "spincool-trace-v1";
  doc["config"] = meta_json(meta);
  json recs = json::array();
  for (const auto& rec : trace.records) {
    json r;
    r["step"] = rec.step_index;
    r["label"] = rec.label;
    json b = json::array();
    for (double v : rec.bias_config.values) b.push_back(v / meta.eps0);
    r["bias_over_eps0"] = b;
    r["max_prob"] = rec.max_prob;
    if (rec.is_product) r["is_product"] = *rec.is_product;
    if (rec.sands) r["sands"] = rec.sands->values;
    if (!rec.sands_exact.empty()) r["sands_exact"] = rec.sands_exact;
    if (!rec.bias_over_eps0_exact.empty())
      r["bias_over_eps0_exact"] = rec.bias_over_eps0_exact;
    recs.push_back(std::move(r));
  }
  doc["records"] = recs;
  doc["summary"] = summary_json(trace, meta);
  return doc;
}

// ---------------------------------------------------------------------------
// Validation of emitted traces

/// Re-check core invariants on a parsed trace document. Returns a list of
/// problems; empty means the trace is internally consistent.
inline std::vector<std::string> validate_trace_json(const json& doc) {
  std::vector<std::string> problems;
  auto fail = [&problems](long step, const std::string& what) {
    problems.push_back("step " + std::to_string(step) + ": " + what);
  };
  if (!doc.contains("config") || !doc.contains("records")) {
    problems.push_back("missing config or records");
    return problems;
  }
  const auto& cfg = doc["config"];
  const int n = cfg.at("n").get<int>();
  const double eps0 = cfg.at("eps0").get<double>();
  const double epsilon = cfg.at("epsilon").get<double>();
  const double t1 = theorem1_bound(n, epsilon);
  for (const auto& rec : doc["records"]) {
    const long step = rec.at("step").get<long>();
    const auto& b = rec.at("bias_over_eps0");
    if (static_cast<int>(b.size()) != n) {
      fail(step, "bias vector size != n");
      continue;
    }
    for (const auto& v : b) {
      const double bias = v.get<double>() * eps0;
      if (!(bias >= -1.0 - 1e-12 && bias <= 1.0 + 1e-12))
        fail(step, "bias outside [-1,1]");
    }
    const double mp = rec.at("max_prob").get<double>();
    if (!(mp >= 0.0 && mp <= 1.0 + 1e-12)) fail(step, "max_prob outside [0,1]");
    if (mp > t1 + 1e-12) fail(step, "max_prob exceeds cooling bound");
    if (rec.contains("sands")) {
      const auto& sands = rec["sands"];
      if (sands.size() != dim_of(n)) {
        fail(step, "sands size != 2^n");
        continue;
      }
      SandSDiagonal d;
      d.values.reserve(sands.size());
      double sum = 0.0;
      for (const auto& v : sands) {
        d.values.push_back(v.get<double>());
        sum += d.values.back();
      }
      // total probability: sum p - 1 = eps0 * sum(sands) / 2^n
      if (std::abs(eps0 * sum / double(dim_of(n))) > 1e-9)
        fail(step, "probabilities do not sum to 1");
      double min_p = 1.0;
      for (double v : d.values)
        min_p = std::min(min_p, (1.0 + eps0 * v) / double(dim_of(n)));
      if (min_p < -1e-12) fail(step, "negative probability");
      for (int s = 0; s < n; ++s) {
        const double from_sands_bias = sands_bias_over_eps0(d, n, s);
        const double recorded = b[s].get<double>();
        if (std::abs(from_sands_bias - recorded) > 1e-6)
          fail(step, "bias does not match S&S marginal for spin " +
                         std::to_string(s));
      }
    }
  }
  return problems;
}

// ---------------------------------------------------------------------------
// Comparison of two runs

struct CompareReport {
  std::vector<double> bias_ratio;  // per spin, run A / run B
  double max_abs_log_ratio = 0.0;
  std::optional<double> max_sands_discrepancy;
};

inline CompareReport compare_outputs(const RunOutput& a, const RunOutput& b) {
  if (a.meta.n != b.meta.n || a.meta.eps0 != b.meta.eps0)
    throw std::invalid_argument("compare: runs must share n and eps0");
  CompareReport rep;
  for (int i = 0; i < a.meta.n; ++i) {
    const double ra = a.trace.final_biases[i];
    const double rb = b.trace.final_biases[i];
    const double ratio = rb == 0.0 ? (ra == 0.0 ? 1.0 : INFINITY) : ra / rb;
    rep.bias_ratio.push_back(ratio);
    if (ratio > 0.0 && std::isfinite(ratio))
      rep.max_abs_log_ratio =
          std::max(rep.max_abs_log_ratio, std::abs(std::log(ratio)));
    else
      rep.max_abs_log_ratio = INFINITY;
  }
  if (a.trace.final_sands && b.trace.final_sands &&
      a.trace.final_sands->dim() == b.trace.final_sands->dim()) {
    double worst = 0.0;
    for (std::size_t j = 0; j < a.trace.final_sands->dim(); ++j)
      worst = std::max(worst, std::abs(a.trace.final_sands->values[j] -
                                       b.trace.final_sands->values[j]));
    rep.max_sands_discrepancy = worst;
  }
  return rep;
}

inline json compare_to_json(const RunOutput& a, const RunOutput& b,
                            const CompareReport& rep) {
  json doc;
  doc["format"] = "spincool-compare-v1";
  doc["run_a"] = meta_json(a.meta);
  doc["run_b"] = meta_json(b.meta);
  json fa = json::array(), fb = json::array();
  for (double v : a.trace.final_biases.values) fa.push_back(v / a.meta.eps0);
  for (double v : b.trace.final_biases.values) fb.push_back(v / b.meta.eps0);
  doc["final_bias_over_eps0_a"] = fa;
  doc["final_bias_over_eps0_b"] = fb;
  doc["bias_ratio_a_over_b"] = rep.bias_ratio;
  doc["max_abs_log_ratio"] = rep.max_abs_log_ratio;
  if (rep.max_sands_discrepancy)
    doc["max_sands_discrepancy"] = *rep.max_sands_discrepancy;
  return doc;
}

// ---------------------------------------------------------------------------
// Files

inline void write_text_file(const std::string& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << body;
  if (!out) throw std::runtime_error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string render_summary_text(const Trace& trace, const RunMeta& meta) {
  std::ostringstream os;
  os << meta.run_name << " [" << meta.backend << ", " << meta.mode << "]\n";
  os << "  steps: " << trace.total_steps
     << "  outer: " << trace.outer_iterations
     << "  converged: " << (trace.converged ? "yes" : "no") << "\n";
  os << "  final bias / eps0:";
  for (auto it = trace.final_biases.values.rbegin();
       it != trace.final_biases.values.rend(); ++it)
    os << " " << format_g6(*it / meta.eps0);
  os << "  (top spin first)\n";
  if (meta.k >= 2) {
    const auto res = fixed_point_residuals(trace.final_biases, meta.eps0, meta.k);
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, std::abs(r));
    os << "  max fixed-point residual / eps0: " << format_g6(worst) << "\n";
  }
  os << "  max basis-state probability: " << format_g6(trace.max_prob_seen)
     << "  (bound " << format_g6(theorem1_bound(meta.n, meta.epsilon)) << ")\n";
  return os.str();
}

}  // namespace spincool
