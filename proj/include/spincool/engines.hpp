#pragma once

// Simulation backends. All three expose the same stepping surface
// (compress / reset_spins / swap_spins / bias) so the schedulers are
// written once:
//
//  * BiasEngine     - leading-order closed-form updates on a bias vector.
//  * ExactEngine    - exact diagonal density-matrix evolution (doubles).
//  * RationalEngine - exact-rational evolution of the shifted-and-scaled
//                     diagonal under the leading-order reset rule; this is
//                     the arithmetic in which golden traces are dyadic.
//
// Engines own their state; runs are independent and may execute in
// parallel. A single run is sequential by nature.

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spincool/core.hpp"
#include "spincool/gates.hpp"
#include "spincool/leading_order.hpp"
#include "spincool/rational.hpp"

namespace spincool {

// ---------------------------------------------------------------------------
// BiasEngine

class BiasEngine {
 public:
  BiasEngine(SpinSystem sys, BiasVector initial,
             CompMode mode = CompMode::Approx)
      : sys_(std::move(sys)), b_(std::move(initial)), mode_(mode) {
    if (b_.n() != sys_.n)
      throw std::invalid_argument("BiasEngine: bias vector size != n");
    b_.validate();
  }

  int n() const { return sys_.n; }
  double epsilon0() const { return sys_.epsilon0; }
  const SpinSystem& system() const { return sys_; }
  const BiasVector& biases() const { return b_; }

  // Only the cooled spin's bias is updated: the other operands' post-
  // compression biases are never consumed at leading order (they are
  // re-cooled before their next use).
  void compress(std::span<const int> spins) {
    if (spins.size() < 3)
      throw std::invalid_argument("compress needs at least 3 spins");
    detail::check_operands(sys_.n, spins);
    std::vector<double> others;
    others.reserve(spins.size() - 1);
    for (std::size_t i = 1; i < spins.size(); ++i) others.push_back(b_[spins[i]]);
    b_[spins[0]] = (mode_ == CompMode::Approx)
                       ? compk_update(b_[spins[0]], others)
                       : compk_update_exact(b_[spins[0]], others);
  }

  void reset_spins(std::span<const int> spins) {
    b_ = reset_bias(b_, spins, sys_);
  }

  void swap_spins(int a, int b) {
    detail::check_operands(sys_.n, std::array{a, b});
    std::swap(b_.values[a], b_.values[b]);
  }

  double bias(int spin) const { return b_[spin]; }

  // Largest basis-state probability of the implied tensor-product state.
  double max_basis_prob() const {
    double p = 1.0;
    for (double b : b_.values) p *= (1.0 + std::abs(b)) / 2.0;
    return p;
  }

  void fill_record(TraceRecord& rec, const TraceOptions& opts) const {
    rec.bias_config = b_;
    rec.max_prob = max_basis_prob();
    rec.is_product = true;
    if (opts.store_sands && sys_.n <= 12) {
      std::vector<double> v(dim_of(sys_.n));
      for (std::size_t j = 0; j < v.size(); ++j) {
        double s = 0.0;
        for (int i = 0; i < sys_.n; ++i)
          s += (bit_of(j, i) ? -1.0 : 1.0) * b_[i] / sys_.epsilon0;
        v[j] = s;
      }
      rec.sands = SandSDiagonal(std::move(v));
    }
  }

 private:
  SpinSystem sys_;
  BiasVector b_;
  CompMode mode_;
};

// ---------------------------------------------------------------------------
// ExactEngine

class ExactEngine {
 public:
  ExactEngine(SpinSystem sys, DiagonalState initial)
      : sys_(std::move(sys)), st_(std::move(initial)) {
    if (st_.n != sys_.n)
      throw std::invalid_argument("ExactEngine: state size != n");
    if (sys_.n > kMaxExactSpins)
      throw std::invalid_argument("ExactEngine: n exceeds exact-backend cap");
    st_.validate();
  }

  int n() const { return sys_.n; }
  double epsilon0() const { return sys_.epsilon0; }
  const SpinSystem& system() const { return sys_; }
  const DiagonalState& state() const { return st_; }

  void compress(std::span<const int> spins) {
    detail::apply_comp_exchange(st_.probs, sys_.n, spins);
  }

  void reset_spins(std::span<const int> spins) {
    for (int s : spins) {
      if (!sys_.is_reset_spin(s))
        throw std::invalid_argument("reset: spin is not a designated reset spin");
      detail::apply_reset_probs(st_.probs, sys_.n, s, sys_.epsilon0);
    }
  }

  void swap_spins(int a, int b) { detail::apply_swap(st_.probs, sys_.n, a, b); }
  void cnot(int control, int target) {
    detail::apply_cnot(st_.probs, sys_.n, control, target);
  }
  void not_gate(int spin) { detail::apply_not(st_.probs, sys_.n, spin); }
  void cswap(int control, int t1, int t2) {
    detail::apply_cswap(st_.probs, sys_.n, control, t1, t2);
  }

  void sort_state() { detail::apply_sort_descending(st_.probs); }

  double bias(int spin) const { return marginal_bias(st_, spin); }
  double max_basis_prob() const { return max_probability(st_); }

  std::vector<double> sands_snapshot() const {
    return to_sands(st_, sys_.epsilon0).values;
  }

  void fill_record(TraceRecord& rec, const TraceOptions& opts) const {
    rec.bias_config.values.resize(sys_.n);
    for (int s = 0; s < sys_.n; ++s) rec.bias_config[s] = bias(s);
    rec.max_prob = max_basis_prob();
    if (opts.compute_product && sys_.n <= 12)
      rec.is_product = is_product_state(st_);
    if (opts.store_sands && sys_.n <= 12)
      rec.sands = to_sands(st_, sys_.epsilon0);
  }

 private:
  SpinSystem sys_;
  DiagonalState st_;
};

// ---------------------------------------------------------------------------
// RationalEngine

class RationalEngine {
 public:
  /// `initial_sands` is the S&S diagonal in eps0 units; defaults to the
  /// completely mixed state (all zeros).
  RationalEngine(SpinSystem sys, std::vector<Rational> initial_sands = {})
      : sys_(std::move(sys)), sands_(std::move(initial_sands)) {
    if (sys_.n > kMaxRationalSpins)
      throw std::invalid_argument("RationalEngine: n exceeds rational-backend cap");
    if (sands_.empty()) sands_.assign(dim_of(sys_.n), Rational(0));
    if (sands_.size() != dim_of(sys_.n))
      throw std::invalid_argument("RationalEngine: sands size != 2^n");
  }

  /// Tensor-product configuration with per-spin biases c_i*eps0 (leading
  /// order): p'_j = sum of +-c_i over the spins' bit values.
  static RationalEngine from_bias_over_eps0(SpinSystem sys,
                                            const std::vector<Rational>& coefs) {
    if (static_cast<int>(coefs.size()) != sys.n)
      throw std::invalid_argument("RationalEngine: coef count != n");
    std::vector<Rational> v(dim_of(sys.n));
    for (std::size_t j = 0; j < v.size(); ++j) {
      Rational s = 0;
      for (int i = 0; i < sys.n; ++i)
        s += bit_of(j, i) ? -coefs[i] : coefs[i];
      v[j] = s;
    }
    return RationalEngine(std::move(sys), std::move(v));
  }

  int n() const { return sys_.n; }
  double epsilon0() const { return sys_.epsilon0; }
  const SpinSystem& system() const { return sys_; }
  const std::vector<Rational>& sands() const { return sands_; }

  void compress(std::span<const int> spins) {
    detail::apply_comp_exchange(sands_, sys_.n, spins);
  }

  void reset_spins(std::span<const int> spins) {
    for (int s : spins) {
      if (!sys_.is_reset_spin(s))
        throw std::invalid_argument("reset: spin is not a designated reset spin");
      detail::apply_reset_sands(sands_, sys_.n, s);
    }
  }

  void swap_spins(int a, int b) { detail::apply_swap(sands_, sys_.n, a, b); }
  void cnot(int control, int target) {
    detail::apply_cnot(sands_, sys_.n, control, target);
  }
  void not_gate(int spin) { detail::apply_not(sands_, sys_.n, spin); }
  void cswap(int control, int t1, int t2) {
    detail::apply_cswap(sands_, sys_.n, control, t1, t2);
  }

  void sort_state() { detail::apply_sort_descending(sands_); }

  Rational bias_over_eps0(int spin) const {
    if (spin < 0 || spin >= sys_.n)
      throw std::out_of_range("bias_over_eps0: spin out of range");
    Rational b = 0;
    for (std::size_t j = 0; j < sands_.size(); ++j)
      b += bit_of(j, spin) ? -sands_[j] : sands_[j];
    return b / Rational(dim_of(sys_.n));
  }

  double bias(int spin) const {
    return to_double(bias_over_eps0(spin)) * sys_.epsilon0;
  }

  double max_basis_prob() const {
    Rational m = sands_[0];
    for (const auto& v : sands_)
      if (v > m) m = v;
    return (1.0 + sys_.epsilon0 * to_double(m)) / double(dim_of(sys_.n));
  }

  std::vector<double> sands_snapshot() const {
    std::vector<double> v(sands_.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = to_double(sands_[j]);
    return v;
  }

  /// Exact tensor-product check in the leading-order picture: a product
  /// configuration has an additive S&S diagonal.
  bool is_product_now() const {
    std::vector<Rational> m(sys_.n);
    for (int i = 0; i < sys_.n; ++i) m[i] = bias_over_eps0(i);
    for (std::size_t j = 0; j < sands_.size(); ++j) {
      Rational s = 0;
      for (int i = 0; i < sys_.n; ++i) s += bit_of(j, i) ? -m[i] : m[i];
      if (s != sands_[j]) return false;
    }
    return true;
  }

  void fill_record(TraceRecord& rec, const TraceOptions& opts) const {
    rec.bias_config.values.resize(sys_.n);
    rec.bias_over_eps0_exact.resize(sys_.n);
    for (int s = 0; s < sys_.n; ++s) {
      const Rational b = bias_over_eps0(s);
      rec.bias_config[s] = to_double(b) * sys_.epsilon0;
      rec.bias_over_eps0_exact[s] = to_string(b);
    }
    rec.max_prob = max_basis_prob();
    if (opts.compute_product) rec.is_product = is_product_now();
    rec.sands = SandSDiagonal(sands_snapshot());
    rec.sands_exact = to_strings(sands_);
  }

 private:
  SpinSystem sys_;
  std::vector<Rational> sands_;
};

// ---------------------------------------------------------------------------
// Tracer

/// Collects one TraceRecord per executed step, up to a record cap; the
/// step count and running probability maximum are tracked regardless.
class Tracer {
 public:
  explicit Tracer(TraceOptions opts = {}) : opts_(opts) {}

  template <typename Engine>
  void record(const Engine& eng, std::string label) {
    ++trace_.total_steps;
    ++step_counter_;
    const double mp = eng.max_basis_prob();
    if (mp > trace_.max_prob_seen) trace_.max_prob_seen = mp;
    if (trace_.records.size() >= opts_.max_records) {
      ++trace_.dropped_records;
      return;
    }
    TraceRecord rec;
    rec.step_index = step_counter_;
    rec.label = std::move(label);
    eng.fill_record(rec, opts_);
    trace_.records.push_back(std::move(rec));
  }

  /// Step 0 snapshot of the initial state; does not count as a step.
  template <typename Engine>
  void record_initial(const Engine& eng) {
    TraceRecord rec;
    rec.step_index = 0;
    rec.label = "INIT";
    eng.fill_record(rec, opts_);
    const double mp = rec.max_prob;
    if (mp > trace_.max_prob_seen) trace_.max_prob_seen = mp;
    trace_.records.push_back(std::move(rec));
  }

  template <typename Engine>
  Trace finish(const Engine& eng) {
    TraceRecord fin;
    TraceOptions final_opts = opts_;
    final_opts.store_sands = true;
    eng.fill_record(fin, final_opts);
    trace_.final_biases = fin.bias_config;
    trace_.final_sands = fin.sands;
    trace_.final_sands_exact = fin.sands_exact;
    trace_.final_bias_over_eps0_exact = fin.bias_over_eps0_exact;
    return std::move(trace_);
  }

  Trace& trace() { return trace_; }
  long total_steps() const { return trace_.total_steps; }

 private:
  TraceOptions opts_;
  Trace trace_;
  long step_counter_ = 0;
};

}  // namespace spincool
