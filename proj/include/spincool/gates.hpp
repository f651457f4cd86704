#pragma once

// Exact operations on diagonal states: compression exchanges, elementary
// permutation gates, heat-bath reset, and the descending sort used by the
// partner pairing algorithm.
//
// Every gate except reset permutes the probability vector, so the
// probability multiset and the full-state entropy are invariant. The
// kernels are templated on the entry type: they act identically on
// probabilities and on shifted-and-scaled values (the S&S map is affine
// and increasing).

#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "spincool/core.hpp"

namespace spincool {

namespace detail {

inline void check_operands(int n, std::span<const int> spins) {
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (spins[i] < 0 || spins[i] >= n)
      throw std::out_of_range("gate operand out of range");
    for (std::size_t j = i + 1; j < spins.size(); ++j)
      if (spins[i] == spins[j])
        throw std::invalid_argument("gate operands must be distinct");
  }
}

/// Exchange |100...0> <-> |011...1> on the given spins (first operand is
/// the cooled spin) for every assignment of the remaining spins.
template <typename T>
void apply_comp_exchange(std::vector<T>& v, int n, std::span<const int> spins) {
  if (spins.size() < 3)
    throw std::invalid_argument("comp_exchange needs at least 3 spins");
  check_operands(n, spins);
  std::size_t mask_all = 0, pattern = std::size_t{1} << spins[0];
  for (int s : spins) mask_all |= std::size_t{1} << s;
  const std::size_t d = v.size();
  for (std::size_t j = 0; j < d; ++j)
    if ((j & mask_all) == pattern) std::swap(v[j], v[j ^ mask_all]);
}

template <typename T>
void apply_not(std::vector<T>& v, int n, int spin) {
  const int ops[] = {spin};
  check_operands(n, ops);
  const std::size_t bit = std::size_t{1} << spin;
  for (std::size_t j = 0; j < v.size(); ++j)
    if (!(j & bit)) std::swap(v[j], v[j | bit]);
}

/// Target bit flips where the control bit is set.
template <typename T>
void apply_cnot(std::vector<T>& v, int n, int control, int target) {
  const int ops[] = {control, target};
  check_operands(n, ops);
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t tbit = std::size_t{1} << target;
  for (std::size_t j = 0; j < v.size(); ++j)
    if ((j & cbit) && !(j & tbit)) std::swap(v[j], v[j | tbit]);
}

template <typename T>
void apply_swap(std::vector<T>& v, int n, int s1, int s2) {
  const int ops[] = {s1, s2};
  check_operands(n, ops);
  const std::size_t b1 = std::size_t{1} << s1;
  const std::size_t b2 = std::size_t{1} << s2;
  for (std::size_t j = 0; j < v.size(); ++j)
    if ((j & b1) && !(j & b2)) std::swap(v[j], v[(j ^ b1) | b2]);
}

/// Targets swap where the control bit is set.
template <typename T>
void apply_cswap(std::vector<T>& v, int n, int control, int t1, int t2) {
  const int ops[] = {control, t1, t2};
  check_operands(n, ops);
  const std::size_t cbit = std::size_t{1} << control;
  const std::size_t b1 = std::size_t{1} << t1;
  const std::size_t b2 = std::size_t{1} << t2;
  for (std::size_t j = 0; j < v.size(); ++j)
    if ((j & cbit) && (j & b1) && !(j & b2)) std::swap(v[j], v[(j ^ b1) | b2]);
}

/// Heat-bath reset of one spin on a probability vector: each pair of basis
/// states differing only in that spin redistributes its mass as
/// (1+eps0)/2 : (1-eps0)/2.
inline void apply_reset_probs(std::vector<double>& p, int n, int spin,
                              double epsilon0) {
  const int ops[] = {spin};
  check_operands(n, ops);
  const std::size_t bit = std::size_t{1} << spin;
  const double up = (1.0 + epsilon0) / 2.0;
  const double down = (1.0 - epsilon0) / 2.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (j & bit) continue;
    const double t = p[j] + p[j | bit];
    p[j] = t * up;
    p[j | bit] = t * down;
  }
}

/// The same reset acting on a shifted-and-scaled diagonal, to leading
/// order in eps0: each pair becomes (mean+1, mean-1). Exact on the
/// rational backend; this rule is what makes golden traces dyadic.
template <typename T>
void apply_reset_sands(std::vector<T>& v, int n, int spin) {
  const int ops[] = {spin};
  check_operands(n, ops);
  const std::size_t bit = std::size_t{1} << spin;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j & bit) continue;
    const T mean = (v[j] + v[j | bit]) / 2;
    v[j] = mean + 1;
    v[j | bit] = mean - 1;
  }
}

/// Stable descending sort. Returns the permutation mapping old index to
/// new index; ties keep their original order so traces are deterministic.
template <typename T>
std::vector<std::size_t> apply_sort_descending(std::vector<T>& v) {
  const std::size_t d = v.size();
  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&v](std::size_t a, std::size_t b) { return v[b] < v[a]; });
  std::vector<T> sorted;
  sorted.reserve(d);
  std::vector<std::size_t> old_to_new(d);
  for (std::size_t r = 0; r < d; ++r) {
    sorted.push_back(std::move(v[order[r]]));
    old_to_new[order[r]] = r;
  }
  v = std::move(sorted);
  return old_to_new;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// GateSpec

enum class GateKind { CompExchange, Cnot, Not, Cswap, Swap, Reset, Sort, BcsStep };

/// A gate plus its ordered operand spins, validated against its arity.
struct GateSpec {
  GateKind kind = GateKind::Not;
  std::vector<int> operands;

  void validate(int n) const {
    detail::check_operands(n, operands);
    const auto arity = operands.size();
    switch (kind) {
      case GateKind::CompExchange:
        if (arity < 3)
          throw std::invalid_argument("CompExchange takes >= 3 spins");
        break;
      case GateKind::Cnot:
      case GateKind::Swap:
        if (arity != 2) throw std::invalid_argument("gate takes 2 spins");
        break;
      case GateKind::Not:
      case GateKind::Reset:
        if (arity != 1) throw std::invalid_argument("gate takes 1 spin");
        break;
      case GateKind::Cswap:
        if (arity != 3) throw std::invalid_argument("CSWAP takes 3 spins");
        break;
      case GateKind::Sort:
        if (arity != 0) throw std::invalid_argument("Sort takes no operands");
        break;
      case GateKind::BcsStep:
        if (arity < 2) throw std::invalid_argument("BcsStep takes >= 2 spins");
        break;
    }
  }
};

// ---------------------------------------------------------------------------
// Pure-value gate API

/// Compression exchange on an ordered spin tuple; the first operand is the
/// cooled spin. Self-inverse.
inline DiagonalState comp_exchange(const DiagonalState& state,
                                   std::span<const int> spins) {
  DiagonalState out = state;
  detail::apply_comp_exchange(out.probs, out.n, spins);
  return out;
}
inline DiagonalState comp_exchange(const DiagonalState& state,
                                   std::initializer_list<int> spins) {
  return comp_exchange(state, std::span<const int>(spins.begin(), spins.size()));
}

inline DiagonalState cnot(const DiagonalState& state, int control, int target) {
  DiagonalState out = state;
  detail::apply_cnot(out.probs, out.n, control, target);
  return out;
}

inline DiagonalState not_gate(const DiagonalState& state, int spin) {
  DiagonalState out = state;
  detail::apply_not(out.probs, out.n, spin);
  return out;
}

inline DiagonalState cswap(const DiagonalState& state, int control, int t1,
                           int t2) {
  DiagonalState out = state;
  detail::apply_cswap(out.probs, out.n, control, t1, t2);
  return out;
}

inline DiagonalState swap_gate(const DiagonalState& state, int s1, int s2) {
  DiagonalState out = state;
  detail::apply_swap(out.probs, out.n, s1, s2);
  return out;
}

/// Heat-bath reset: sets the spin's marginal to exactly eps0 and removes
/// its correlations with the rest of the system. The spin must be declared
/// as a reset spin.
inline DiagonalState reset(const DiagonalState& state, int spin,
                           const SpinSystem& sys) {
  if (!sys.is_reset_spin(spin))
    throw std::invalid_argument("reset: spin is not a designated reset spin");
  DiagonalState out = state;
  detail::apply_reset_probs(out.probs, out.n, spin, sys.epsilon0);
  return out;
}

/// Descending stable sort of the diagonal. Returns the sorted state and
/// the permutation old index -> new index.
inline std::pair<DiagonalState, std::vector<std::size_t>> sort_step(
    const DiagonalState& state) {
  DiagonalState out = state;
  auto perm = detail::apply_sort_descending(out.probs);
  return {std::move(out), std::move(perm)};
}

/// Basic compression subroutine: CNOT(y -> x), NOT(x), then conditional
/// relocation of y's cooled state along `chain` by alternating CSWAP
/// (controlled on x) and SWAP gates, starting with a CSWAP.
inline DiagonalState bcs_step(const DiagonalState& state, int x, int y,
                              std::span<const int> chain) {
  std::vector<int> all = {x, y};
  all.insert(all.end(), chain.begin(), chain.end());
  detail::check_operands(state.n, all);
  DiagonalState out = state;
  detail::apply_cnot(out.probs, out.n, /*control=*/y, /*target=*/x);
  detail::apply_not(out.probs, out.n, x);
  int prev = y;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i % 2 == 0)
      detail::apply_cswap(out.probs, out.n, x, prev, chain[i]);
    else
      detail::apply_swap(out.probs, out.n, prev, chain[i]);
    prev = chain[i];
  }
  return out;
}
inline DiagonalState bcs_step(const DiagonalState& state, int x, int y,
                              std::initializer_list<int> chain) {
  return bcs_step(state, x, y, std::span<const int>(chain.begin(), chain.size()));
}

}  // namespace spincool
