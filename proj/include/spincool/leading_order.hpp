#pragma once

// Closed-form bias updates for compression gates, used by the leading-order
// backend. The 3-spin update has an exact form; wider compressions use the
// leading-order formula, with an exact variant obtained by applying the
// exchange to a constructed tensor-product state (no new algebra).
//
// Reset here is instantaneous and perfect, and computation spins never
// decay: the whole run is assumed to finish well inside the computation
// spins' relaxation time.

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "spincool/core.hpp"
#include "spincool/gates.hpp"

namespace spincool {

enum class CompMode { Exact, Approx };

namespace detail {
inline void check_bias_range(double b) {
  if (!(b >= -1.0 && b <= 1.0))
    throw std::invalid_argument("bias outside [-1,1]");
}
}  // namespace detail

/// New bias of the cooled spin after a 3-spin compression on biases
/// (eC, eB, eA): exact (eC+eB+eA-eC*eB*eA)/2, leading order (eC+eB+eA)/2.
inline double comp3_update(double e_c, double e_b, double e_a,
                           CompMode mode = CompMode::Exact) {
  detail::check_bias_range(e_c);
  detail::check_bias_range(e_b);
  detail::check_bias_range(e_a);
  if (mode == CompMode::Exact)
    return (e_c + e_b + e_a - e_c * e_b * e_a) / 2.0;
  return (e_c + e_b + e_a) / 2.0;
}

/// Leading-order (k+1)-spin compression update for the cooled spin:
/// ((2^{k-1}-1)*e_top + sum(others)) / 2^{k-1}, with k = others.size().
inline double compk_update(double e_top, std::span<const double> others) {
  const int k = static_cast<int>(others.size());
  if (k < 2) throw std::invalid_argument("compk_update: needs k >= 2 biases");
  detail::check_bias_range(e_top);
  double sum = 0.0;
  for (double b : others) {
    detail::check_bias_range(b);
    sum += b;
  }
  const double scale = std::ldexp(1.0, k - 1);  // 2^{k-1}
  return ((scale - 1.0) * e_top + sum) / scale;
}
inline double compk_update(double e_top, std::initializer_list<double> others) {
  return compk_update(e_top, std::span<const double>(others.begin(), others.size()));
}

/// Exact (k+1)-spin compression update: build the tensor-product state with
/// these biases, apply the exchange, and read the cooled spin's marginal.
inline double compk_update_exact(double e_top, std::span<const double> others) {
  const int k = static_cast<int>(others.size());
  if (k < 2) throw std::invalid_argument("compk_update_exact: needs k >= 2 biases");
  const int n = k + 1;
  BiasVector b = BiasVector::zeros(n);
  b[n - 1] = e_top;
  for (int i = 0; i < k; ++i) b[n - 2 - i] = others[i];
  b.validate();
  DiagonalState st = DiagonalState::product(b);
  std::vector<int> spins(n);
  for (int i = 0; i < n; ++i) spins[i] = n - 1 - i;
  detail::apply_comp_exchange(st.probs, n, spins);
  return marginal_bias(st, n - 1);
}
inline double compk_update_exact(double e_top,
                                 std::initializer_list<double> others) {
  return compk_update_exact(
      e_top, std::span<const double>(others.begin(), others.size()));
}

/// 4-spin compression update (eA+eB+eC+3*eD)/4 to leading order; pass
/// CompMode::Exact for the tensor-product construction.
inline double comp4_update(double e_d, double e_c, double e_b, double e_a,
                           CompMode mode = CompMode::Approx) {
  const double others[] = {e_c, e_b, e_a};
  if (mode == CompMode::Exact) return compk_update_exact(e_d, others);
  return compk_update(e_d, others);
}

/// Perfect reset: listed spins return to the equilibrium bias eps0.
inline BiasVector reset_bias(const BiasVector& vec, std::span<const int> spins,
                             const SpinSystem& sys) {
  BiasVector out = vec;
  for (int s : spins) {
    if (s < 0 || s >= out.n())
      throw std::out_of_range("reset_bias: spin out of range");
    if (!sys.is_reset_spin(s))
      throw std::invalid_argument("reset_bias: spin is not a reset spin");
    out[s] = sys.epsilon0;
  }
  return out;
}
inline BiasVector reset_bias(const BiasVector& vec,
                             std::initializer_list<int> spins,
                             const SpinSystem& sys) {
  return reset_bias(vec, std::span<const int>(spins.begin(), spins.size()), sys);
}

}  // namespace spincool
