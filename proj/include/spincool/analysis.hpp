#pragma once

// Fixed-point and bound analysis: k-step Fibonacci sequences, the
// all-bonacci limit configuration, PPA invariance checks, and the entropy
// and basis-state-probability bounds on cooling.

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spincool/core.hpp"
#include "spincool/gates.hpp"

namespace spincool {

/// First n elements a_1..a_n of the k-step Fibonacci sequence:
/// a_1 = a_2 = 1, a_l = sum of the previous min(l-1, k) elements.
/// For l <= k+1 this gives a_l = 2^{l-2}.
inline std::vector<std::int64_t> kstep_sequence(int k, int n) {
  if (k < 2) throw std::invalid_argument("kstep_sequence: k >= 2 required");
  if (n < 1) throw std::invalid_argument("kstep_sequence: n >= 1 required");
  if (n > 62) throw std::invalid_argument("kstep_sequence: n too large for int64");
  std::vector<std::int64_t> a(n);
  for (int l = 1; l <= n; ++l) {
    if (l <= 2) {
      a[l - 1] = 1;
      continue;
    }
    std::int64_t sum = 0;
    for (int i = 1; i <= std::min(l - 1, k); ++i) sum += a[l - 1 - i];
    a[l - 1] = sum;
  }
  return a;
}

/// S&S diagonal of the all-bonacci limit configuration
/// {2^{n-2},...,4,2,1,1} * eps0, to leading order. Sorted non-increasing by
/// construction (each coefficient exceeds the sum of those below it only by
/// the doubled trailing 1).
inline SandSDiagonal allbonacci_limit_diagonal(int n) {
  if (n < 3) throw std::invalid_argument("allbonacci_limit_diagonal: n >= 3");
  if (n > kMaxExactSpins)
    throw std::invalid_argument("allbonacci_limit_diagonal: n too large");
  std::vector<double> coef(n);
  coef[0] = 1.0;
  for (int i = 1; i < n; ++i) coef[i] = std::ldexp(1.0, i - 1);  // 2^{i-1}
  std::vector<double> v(dim_of(n));
  for (std::size_t j = 0; j < v.size(); ++j) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += bit_of(j, i) ? -coef[i] : coef[i];
    v[j] = s;
  }
  return SandSDiagonal(std::move(v));
}

/// Result of applying one PPA round (RESET of spin 0, then SORT) to an S&S
/// diagonal. The asserted drift is measured in the leading-order picture,
/// where the limit configurations are invariant; `exact_round_drift`
/// additionally reports the drift when the round acts on true
/// probabilities, which carries an O(eps0 * 2^{n-2}) reset correction.
struct InvarianceReport {
  SandSDiagonal after_reset;
  SandSDiagonal after_round;
  double max_drift = 0.0;
  std::optional<double> exact_round_drift;
  double top_bias_before_over_eps0 = 0.0;
  double top_bias_after_over_eps0 = 0.0;
};

inline InvarianceReport check_ppa_invariance(const SandSDiagonal& diag,
                                             double epsilon0) {
  const std::size_t d = diag.dim();
  int n = 0;
  while (dim_of(n) < d) ++n;
  if (dim_of(n) != d)
    throw std::invalid_argument("check_ppa_invariance: size not a power of 2");

  InvarianceReport rep;
  rep.top_bias_before_over_eps0 = sands_bias_over_eps0(diag, n, n - 1);

  std::vector<double> v = diag.values;
  detail::apply_reset_sands(v, n, 0);
  rep.after_reset = SandSDiagonal(v);
  detail::apply_sort_descending(v);
  rep.after_round = SandSDiagonal(v);

  double drift = 0.0;
  for (std::size_t j = 0; j < d; ++j)
    drift = std::max(drift, std::abs(v[j] - diag.values[j]));
  rep.max_drift = drift;
  rep.top_bias_after_over_eps0 = sands_bias_over_eps0(rep.after_round, n, n - 1);

  if (epsilon0 > 0.0) {
    bool valid = true;
    for (double s : diag.values)
      if (epsilon0 * s < -1.0) valid = false;  // would give negative probability
    if (valid) {
      DiagonalState st = from_sands(diag, n, epsilon0);
      detail::apply_reset_probs(st.probs, n, 0, epsilon0);
      detail::apply_sort_descending(st.probs);
      const SandSDiagonal round = to_sands(st, epsilon0);
      double ed = 0.0;
      for (std::size_t j = 0; j < d; ++j)
        ed = std::max(ed, std::abs(round.values[j] - diag.values[j]));
      rep.exact_round_drift = ed;
    }
  }
  return rep;
}

/// Entropy-conservation bound on reversible compression alone:
/// eps_final <= eps0 * sqrt(n).
inline double shannon_bound(int n, double epsilon0) {
  if (n < 1) throw std::invalid_argument("shannon_bound: n >= 1 required");
  return epsilon0 * std::sqrt(double(n));
}

/// Upper bound on any basis-state probability reachable by algorithmic
/// cooling from the completely mixed state: min{2^-n e^{2^n eps}, 1}.
/// With `strict`, the tighter claimed exponent 2^{n-1} eps is used.
inline double theorem1_bound(int n, double epsilon, bool strict = false) {
  if (n < 1) throw std::invalid_argument("theorem1_bound: n >= 1 required");
  const double scale = std::ldexp(1.0, strict ? n - 1 : n);
  const double b = std::ldexp(1.0, -n) * std::exp(scale * epsilon);
  return std::min(b, 1.0);
}

}  // namespace spincool
