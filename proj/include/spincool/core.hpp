#pragma once

// Core domain types for heat-bath algorithmic cooling simulations:
// spin systems, bias configurations, diagonal density-matrix states and
// their shifted-and-scaled (S&S) form, run schedules and trace records.
//
// Bit convention: spin 0 is the least significant bit of a basis-state
// index and is the designated reset spin of the partner pairing algorithm.
// Algorithms whose operands are listed top-spin-first (A_n,...,A_1) map
// A_i onto spin i-1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spincool {

/// Exact diagonal backend holds 2^n probabilities; keep allocations sane.
inline constexpr int kMaxExactSpins = 20;
/// Exact-rational S&S backend is meant for small golden traces.
inline constexpr int kMaxRationalSpins = 6;

inline std::size_t dim_of(int n) { return std::size_t{1} << n; }

inline int bit_of(std::size_t basis_index, int spin) {
  return static_cast<int>((basis_index >> spin) & 1u);
}

// ---------------------------------------------------------------------------
// SpinSystem

/// Static configuration of a spin system: spin count, which spins may be
/// reset by the heat bath, and the equilibrium polarization bias
/// eps0 = tanh(eps).
struct SpinSystem {
  int n = 0;
  std::vector<int> reset_spins;  // sorted, unique
  double epsilon0 = 0.0;         // equilibrium bias, 0 < eps0 < 1
  double epsilon = 0.0;          // inverse-temperature parameter

  static SpinSystem from_epsilon0(int n, std::vector<int> reset_spins,
                                  double epsilon0) {
    SpinSystem sys;
    sys.n = n;
    sys.reset_spins = std::move(reset_spins);
    sys.epsilon0 = epsilon0;
    sys.epsilon = std::atanh(epsilon0);
    sys.validate();
    return sys;
  }

  static SpinSystem from_epsilon(int n, std::vector<int> reset_spins,
                                 double epsilon) {
    SpinSystem sys;
    sys.n = n;
    sys.reset_spins = std::move(reset_spins);
    sys.epsilon = epsilon;
    sys.epsilon0 = std::tanh(epsilon);
    sys.validate();
    return sys;
  }

  bool is_reset_spin(int s) const {
    return std::binary_search(reset_spins.begin(), reset_spins.end(), s);
  }

  void validate() const {
    if (n < 1) throw std::invalid_argument("SpinSystem: n must be >= 1");
    if (!(epsilon0 > 0.0 && epsilon0 < 1.0))
      throw std::invalid_argument("SpinSystem: epsilon0 must be in (0,1)");
    const double rel =
        std::abs(epsilon0 - std::tanh(epsilon)) / std::abs(epsilon0);
    if (rel > 1e-15 * 8)
      throw std::invalid_argument("SpinSystem: epsilon0 != tanh(epsilon)");
    std::vector<int> rs = reset_spins;
    std::sort(rs.begin(), rs.end());
    if (std::adjacent_find(rs.begin(), rs.end()) != rs.end())
      throw std::invalid_argument("SpinSystem: duplicate reset spin");
    if (rs != reset_spins)
      throw std::invalid_argument("SpinSystem: reset spins must be sorted");
    for (int s : reset_spins)
      if (s < 0 || s >= n)
        throw std::out_of_range("SpinSystem: reset spin out of range");
  }
};

// ---------------------------------------------------------------------------
// BiasVector

/// One polarization bias per spin, each in [-1,1]. Index i = spin i.
/// Stored in absolute units (not multiples of eps0).
struct BiasVector {
  std::vector<double> values;

  BiasVector() = default;
  explicit BiasVector(std::vector<double> v) : values(std::move(v)) {}
  static BiasVector zeros(int n) { return BiasVector(std::vector<double>(n, 0.0)); }
  static BiasVector constant(int n, double b) {
    return BiasVector(std::vector<double>(n, b));
  }

  int n() const { return static_cast<int>(values.size()); }
  double operator[](int i) const { return values.at(i); }
  double& operator[](int i) { return values.at(i); }

  void validate() const {
    for (double b : values)
      if (!(b >= -1.0 && b <= 1.0))
        throw std::invalid_argument("BiasVector: bias outside [-1,1]");
  }
};

// ---------------------------------------------------------------------------
// DiagonalState

/// Diagonal density matrix of n spins: probability vector over the 2^n
/// basis states. None of the gates used here create off-diagonal elements,
/// so this is the exact state.
struct DiagonalState {
  int n = 0;
  std::vector<double> probs;

  DiagonalState() = default;
  DiagonalState(int n_, std::vector<double> p) : n(n_), probs(std::move(p)) {}

  static DiagonalState completely_mixed(int n) {
    check_n(n);
    return DiagonalState(n, std::vector<double>(dim_of(n), 1.0 / double(dim_of(n))));
  }

  /// Tensor-product state with per-spin biases b_i:
  /// P(spin i = 0) = (1+b_i)/2.
  static DiagonalState product(const BiasVector& biases) {
    const int n = biases.n();
    check_n(n);
    const std::size_t d = dim_of(n);
    std::vector<double> p(d, 1.0);
    for (std::size_t j = 0; j < d; ++j)
      for (int s = 0; s < n; ++s)
        p[j] *= bit_of(j, s) ? (1.0 - biases[s]) / 2.0 : (1.0 + biases[s]) / 2.0;
    return DiagonalState(n, std::move(p));
  }

  static DiagonalState thermal(const SpinSystem& sys) {
    return product(BiasVector::constant(sys.n, sys.epsilon0));
  }

  std::size_t dim() const { return probs.size(); }

  void validate(double sum_tol = 1e-12) const {
    if (probs.size() != dim_of(n))
      throw std::invalid_argument("DiagonalState: size != 2^n");
    double sum = 0.0;
    for (double p : probs) {
      if (!(p >= -1e-15))
        throw std::invalid_argument("DiagonalState: negative probability");
      sum += p;
    }
    if (std::abs(sum - 1.0) > sum_tol)
      throw std::invalid_argument("DiagonalState: probabilities do not sum to 1");
  }

 private:
  static void check_n(int n) {
    if (n < 1 || n > kMaxExactSpins)
      throw std::invalid_argument("DiagonalState: n out of supported range");
  }
};

// ---------------------------------------------------------------------------
// SandSDiagonal

/// Shifted-and-scaled diagonal: p'_j = 2^n (p_j - 2^-n) / eps0, i.e. the
/// deviation from the completely mixed state in units of eps0.
struct SandSDiagonal {
  std::vector<double> values;

  SandSDiagonal() = default;
  explicit SandSDiagonal(std::vector<double> v) : values(std::move(v)) {}
  std::size_t dim() const { return values.size(); }
};

// ---------------------------------------------------------------------------
// Core operations

/// P(spin = 0) - P(spin = 1) of a diagonal state.
inline double marginal_bias(const DiagonalState& state, int spin) {
  if (spin < 0 || spin >= state.n)
    throw std::out_of_range("marginal_bias: spin index out of range");
  double b = 0.0;
  for (std::size_t j = 0; j < state.dim(); ++j)
    b += bit_of(j, spin) ? -state.probs[j] : state.probs[j];
  return b;
}

/// Bias of `spin` conditioned on `cond_spin` being in state `cond_value`.
inline double conditional_bias(const DiagonalState& state, int spin,
                               int cond_spin, int cond_value) {
  if (spin < 0 || spin >= state.n || cond_spin < 0 || cond_spin >= state.n)
    throw std::out_of_range("conditional_bias: spin index out of range");
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < state.dim(); ++j) {
    if (bit_of(j, cond_spin) != cond_value) continue;
    den += state.probs[j];
    num += bit_of(j, spin) ? -state.probs[j] : state.probs[j];
  }
  if (den <= 0.0)
    throw std::invalid_argument("conditional_bias: conditioning event has zero mass");
  return num / den;
}

inline SandSDiagonal to_sands(const DiagonalState& state, double epsilon0) {
  if (!(epsilon0 > 0.0))
    throw std::invalid_argument("to_sands: epsilon0 must be positive");
  const double d = double(dim_of(state.n));
  std::vector<double> v(state.dim());
  for (std::size_t j = 0; j < state.dim(); ++j)
    v[j] = (d * state.probs[j] - 1.0) / epsilon0;
  return SandSDiagonal(std::move(v));
}

inline DiagonalState from_sands(const SandSDiagonal& sands, int n,
                                double epsilon0) {
  if (!(epsilon0 > 0.0))
    throw std::invalid_argument("from_sands: epsilon0 must be positive");
  if (sands.dim() != dim_of(n))
    throw std::invalid_argument("from_sands: size != 2^n");
  const double inv_d = 1.0 / double(dim_of(n));
  std::vector<double> p(sands.dim());
  for (std::size_t j = 0; j < sands.dim(); ++j)
    p[j] = inv_d * (epsilon0 * sands.values[j] + 1.0);
  return DiagonalState(n, std::move(p));
}

/// Marginal bias of `spin` in units of eps0, computed directly from an S&S
/// diagonal (the uniform part cancels spin-wise).
inline double sands_bias_over_eps0(const SandSDiagonal& sands, int n, int spin) {
  double b = 0.0;
  for (std::size_t j = 0; j < sands.dim(); ++j)
    b += bit_of(j, spin) ? -sands.values[j] : sands.values[j];
  return b / double(dim_of(n));
}

inline double max_probability(const DiagonalState& state) {
  return *std::max_element(state.probs.begin(), state.probs.end());
}

/// Shannon entropy (bits) of the full diagonal distribution.
inline double shannon_entropy(const DiagonalState& state) {
  double h = 0.0;
  for (double p : state.probs)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

/// Whether the state equals the tensor product of its own single-spin
/// marginals within `tol` (absolute, per basis state). Post-compression
/// states carry classical correlations and fail this check.
inline bool is_product_state(const DiagonalState& state, double tol = 1e-12) {
  BiasVector b;
  b.values.resize(state.n);
  for (int s = 0; s < state.n; ++s) b[s] = marginal_bias(state, s);
  const DiagonalState q = DiagonalState::product(b);
  for (std::size_t j = 0; j < state.dim(); ++j)
    if (std::abs(state.probs[j] - q.probs[j]) > tol) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Schedule

enum class Algorithm {
  Fernandez,
  Fibonacci,
  Tribonacci,
  KBonacci,
  AllBonacci,
  Pac1,
  Pac2,
  Ppa,
  Bcs,
};

enum class Mode { Reps, Exhaustive };

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Fernandez: return "fernandez";
    case Algorithm::Fibonacci: return "fibonacci";
    case Algorithm::Tribonacci: return "tribonacci";
    case Algorithm::KBonacci: return "kbonacci";
    case Algorithm::AllBonacci: return "allbonacci";
    case Algorithm::Pac1: return "pac1";
    case Algorithm::Pac2: return "pac2";
    case Algorithm::Ppa: return "ppa";
    case Algorithm::Bcs: return "bcs";
  }
  return "?";
}

inline Algorithm algorithm_from_string(const std::string& s) {
  for (Algorithm a :
       {Algorithm::Fernandez, Algorithm::Fibonacci, Algorithm::Tribonacci,
        Algorithm::KBonacci, Algorithm::AllBonacci, Algorithm::Pac1,
        Algorithm::Pac2, Algorithm::Ppa, Algorithm::Bcs})
    if (to_string(a) == s) return a;
  throw std::invalid_argument("unknown algorithm: " + s);
}

/// One algorithm instance. In Reps mode `reps` lists the per-level
/// repetition counts m_n,...,m_3 (top level first); a single entry is
/// accepted for algorithms with one count (Fernandez's m, the PPA's
/// elementary step count). In Exhaustive mode each recursion level is
/// iterated until its target bias changes by less than delta*eps0.
struct Schedule {
  Algorithm algorithm = Algorithm::Fibonacci;
  Mode mode = Mode::Exhaustive;
  std::vector<long> reps;
  double delta = 1e-6;
  long max_steps = 10'000'000;
  int k = 0;  // KBonacci order
  int L = 0;  // PAC purification level

  // Optional per-invocation repetition counts (Reps mode): called with the
  // recursion level (spin-window size) and the 0-based invocation index of
  // that level; overrides `reps` when set. Not serialized.
  std::function<long(int level, long invocation)> rep_callback;

  static Schedule exhaustive(Algorithm a, double delta = 1e-6) {
    Schedule s;
    s.algorithm = a;
    s.mode = Mode::Exhaustive;
    s.delta = delta;
    return s;
  }

  static Schedule with_reps(Algorithm a, std::vector<long> reps) {
    Schedule s;
    s.algorithm = a;
    s.mode = Mode::Reps;
    s.reps = std::move(reps);
    return s;
  }

  void validate(int n) const {
    if (mode == Mode::Reps) {
      if (reps.empty() && !rep_callback)
        throw std::invalid_argument("Schedule: Reps mode requires rep counts");
      for (long m : reps)
        if (m < 0) throw std::invalid_argument("Schedule: negative rep count");
    } else {
      if (!reps.empty())
        throw std::invalid_argument(
            "Schedule: exhaustive mode must not carry rep counts");
      if (!(delta > 0.0))
        throw std::invalid_argument("Schedule: delta must be positive");
    }
    if (max_steps <= 0)
      throw std::invalid_argument("Schedule: max_steps must be positive");
    if (algorithm == Algorithm::KBonacci && (k < 2 || k > n - 1))
      throw std::invalid_argument("Schedule: KBonacci requires 2 <= k <= n-1");
    if ((algorithm == Algorithm::Pac1 || algorithm == Algorithm::Pac2) && L < 1)
      throw std::invalid_argument("Schedule: PAC requires L >= 1");
  }
};

// ---------------------------------------------------------------------------
// Trace

/// Snapshot after one algorithm step. Biases are absolute; `sands` (when
/// stored) is in eps0 units. On the exact-rational backend `sands_exact`
/// and `bias_over_eps0_exact` carry the same data as canonical
/// numerator/denominator strings. `is_product` reports whether the state is
/// a tensor product of its marginals; when false the per-spin biases are
/// marginals only and do not define per-spin temperatures.
struct TraceRecord {
  long step_index = 0;
  std::string label;
  BiasVector bias_config;
  std::optional<SandSDiagonal> sands;
  std::vector<std::string> sands_exact;
  std::vector<std::string> bias_over_eps0_exact;
  double max_prob = 0.0;
  std::optional<bool> is_product;
};

struct Trace {
  std::vector<TraceRecord> records;
  long total_steps = 0;       // steps executed (records may be capped)
  long dropped_records = 0;   // steps beyond the record cap
  long outer_iterations = 0;  // top-level loop count (m, PPA rounds, ...)
  bool converged = true;      // exhaustive run hit its tolerance
  double max_prob_seen = 0.0;

  BiasVector final_biases;
  std::optional<SandSDiagonal> final_sands;
  std::vector<std::string> final_sands_exact;
  std::vector<std::string> final_bias_over_eps0_exact;

  const TraceRecord& at_step(long step_index) const {
    for (const auto& r : records)
      if (r.step_index == step_index) return r;
    throw std::out_of_range("Trace: no record for step index");
  }
};

struct TraceOptions {
  bool store_sands = false;       // keep per-record S&S diagonals
  bool compute_product = true;    // evaluate the tensor-product flag
  std::size_t max_records = 1u << 20;
};

}  // namespace spincool
