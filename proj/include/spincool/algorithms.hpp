#pragma once

// Schedulers: each cooling algorithm realized as a sequence of engine
// operations, one trace record per elementary step.
//
// The bonacci family shares one recursive driver. At a recursion level of
// `level` spins the compression arity is min(k, level-1) + 1, so k-bonacci
// on its minimal window narrows to (k-1)-bonacci and the base level is the
// three-spin compress/reset loop. Exhaustive mode iterates each level until
// its target-spin bias changes by less than delta*eps0 (two iterations
// minimum: the first compression of a cold window carries no information
// about convergence).

#include <algorithm>
#include <cmath>
#include <concepts>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "spincool/core.hpp"
#include "spincool/engines.hpp"

namespace spincool {

/// How exhaustive mode schedules the recursion.
///  Nested: every level fully re-converges inside each outer iteration.
///  Sweeps: repeat single passes (one compression per level per pass) until
///          every level's target bias is stable; same fixed point, bounded
///          step count on the exact backend.
enum class ExhaustiveStyle { Nested, Sweeps };

struct RunOptions {
  TraceOptions trace;
  ExhaustiveStyle style = ExhaustiveStyle::Nested;
};

template <typename E>
concept DiagonalEngine = requires(E e, const E c) {
  e.sort_state();
  { c.sands_snapshot() } -> std::convertible_to<std::vector<double>>;
};

template <typename E>
concept PermutationGateEngine = requires(E e) {
  e.cnot(0, 1);
  e.not_gate(0);
  e.cswap(0, 1, 2);
};

namespace detail {

inline std::string spin_list(std::span<const int> spins) {
  std::string s;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(spins[i]);
  }
  return s;
}

inline std::string comp_label(std::span<const int> spins) {
  return std::to_string(spins.size()) + "B-Comp(" + spin_list(spins) + ")";
}

template <typename Engine>
class BonacciRun {
 public:
  BonacciRun(Engine& eng, Tracer& tr, const Schedule& sched, int k,
             ExhaustiveStyle style)
      : eng_(eng),
        tr_(tr),
        sched_(sched),
        n_(eng.n()),
        k_(k),
        style_(style),
        invocations_(n_ + 1, 0) {}

  void run() {
    if (sched_.mode == Mode::Exhaustive && style_ == ExhaustiveStyle::Sweeps)
      run_sweeps();
    else
      run_level(n_);
  }

  bool converged() const { return converged_; }
  long outer_iterations() const { return outer_iterations_; }

 private:
  bool budget_left() {
    if (tr_.total_steps() < sched_.max_steps) return true;
    converged_ = false;
    return false;
  }

  long rep_count(int level, long invocation) const {
    if (sched_.rep_callback) return sched_.rep_callback(level, invocation);
    return sched_.reps.at(static_cast<std::size_t>(n_ - level));
  }

  void body(int level, bool nested) {
    const int ke = std::min(k_, level - 1);
    std::vector<int> spins(ke + 1);
    for (int i = 0; i <= ke; ++i) spins[i] = level - 1 - i;
    eng_.compress(spins);
    tr_.record(eng_, comp_label(spins));
    if (level == 3) {
      const int rs[] = {1, 0};
      eng_.reset_spins(rs);
      tr_.record(eng_, "RESET(1,0)");
    } else if (nested) {
      run_level(level - 1);
    } else {
      body(level - 1, false);
    }
  }

  void run_level(int level) {
    const bool exhaustive = (sched_.mode == Mode::Exhaustive);
    const long invocation = invocations_[level]++;
    const long m = exhaustive ? 0 : rep_count(level, invocation);
    const double tol = sched_.delta * eng_.epsilon0();
    long iter = 0;
    while (budget_left() && converged_) {
      if (!exhaustive && iter >= m) break;
      const double before = eng_.bias(level - 1);
      body(level, /*nested=*/true);
      ++iter;
      if (exhaustive && iter >= 2 &&
          std::abs(eng_.bias(level - 1) - before) < tol)
        break;
    }
    if (level == n_) outer_iterations_ = iter;
  }

  void run_sweeps() {
    const double tol = sched_.delta * eng_.epsilon0();
    std::vector<double> before(n_);
    long iter = 0;
    while (budget_left()) {
      for (int s = 2; s < n_; ++s) before[s] = eng_.bias(s);
      body(n_, /*nested=*/false);
      ++iter;
      double worst = 0.0;
      for (int s = 2; s < n_; ++s)
        worst = std::max(worst, std::abs(eng_.bias(s) - before[s]));
      if (worst < tol) break;
    }
    outer_iterations_ = iter;
  }

  Engine& eng_;
  Tracer& tr_;
  const Schedule& sched_;
  int n_;
  int k_;
  ExhaustiveStyle style_;
  std::vector<long> invocations_;
  bool converged_ = true;
  long outer_iterations_ = 0;
};

template <typename Engine>
Trace run_bonacci(Engine& eng, int k, const Schedule& sched,
                  const RunOptions& opts) {
  const int n = eng.n();
  if (n < k + 1)
    throw std::invalid_argument("bonacci run needs n >= k+1 spins");
  if (k < 2) throw std::invalid_argument("bonacci run needs k >= 2");
  if (!eng.system().is_reset_spin(0) || !eng.system().is_reset_spin(1))
    throw std::invalid_argument("bonacci run: spins 0 and 1 must be reset spins");
  if (sched.mode == Mode::Reps && !sched.rep_callback &&
      sched.reps.size() != static_cast<std::size_t>(n - 2))
    throw std::invalid_argument(
        "bonacci run: reps must list m_n..m_3 (n-2 counts)");
  Tracer tr(opts.trace);
  tr.record_initial(eng);
  BonacciRun<Engine> run(eng, tr, sched, k, opts.style);
  run.run();
  Trace t = tr.finish(eng);
  t.converged = run.converged();
  t.outer_iterations = run.outer_iterations();
  return t;
}

// PAC1 purification procedure M_j applied to the spin window topped by
// `top`. M_1 groups its three polarization transfers into one step, as the
// step sequences are conventionally written; deeper levels interleave WAIT
// steps between sub-procedures.
template <typename Engine>
void pac1_m(Engine& eng, Tracer& tr, int j, int top) {
  const int spins[] = {top, top - 1, top - 2};
  if (j == 1) {
    eng.reset_spins(spins);
    tr.record(eng, "PT(" + spin_list(spins) + ")");
  } else {
    for (int i = 0; i < 3; ++i) {
      pac1_m(eng, tr, j - 1, top - i);
      if (i < 2) tr.record(eng, "WAIT");
    }
  }
  eng.compress(spins);
  tr.record(eng, comp_label(spins));
}

// PAC2 initialization: bubble the reset spin's polarization up to `target`
// through nearest-neighbour transfers, then re-thermalize the reset spin.
template <typename Engine>
void pac2_init(Engine& eng, Tracer& tr, int target) {
  for (int i = 0; i < target; ++i) {
    eng.swap_spins(i, i + 1);
    tr.record(eng,
              "PT(" + std::to_string(i) + "->" + std::to_string(i + 1) + ")");
  }
  const int rs[] = {0};
  eng.reset_spins(rs);
  tr.record(eng, "RESET(0)");
}

template <typename Engine>
void pac2_n(Engine& eng, Tracer& tr, int j, int top) {
  if (j == 1) {
    pac2_init(eng, tr, top);
    pac2_init(eng, tr, top - 1);
    // For the lowest window the reset spin itself joins the compression;
    // its last RESET already initialized it.
    if (top - 2 > 0) pac2_init(eng, tr, top - 2);
  } else {
    pac2_n(eng, tr, j - 1, top);
    pac2_n(eng, tr, j - 1, top - 1);
    pac2_n(eng, tr, j - 1, top - 2);
  }
  const int spins[] = {top, top - 1, top - 2};
  eng.compress(spins);
  tr.record(eng, comp_label(spins));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public runners

/// Exhaustive three-spin cooling: repeat { 3B-Comp(2;1;0); RESET(1,0) }.
template <typename Engine>
Trace run_fernandez(Engine& eng, const Schedule& sched,
                    const RunOptions& opts = {}) {
  if (eng.n() != 3)
    throw std::invalid_argument("fernandez requires exactly 3 spins");
  return detail::run_bonacci(eng, 2, sched, opts);
}

template <typename Engine>
Trace run_fibonacci(Engine& eng, const Schedule& sched,
                    const RunOptions& opts = {}) {
  if (eng.n() < 3) throw std::invalid_argument("fibonacci requires n >= 3");
  return detail::run_bonacci(eng, 2, sched, opts);
}

template <typename Engine>
Trace run_tribonacci(Engine& eng, const Schedule& sched,
                     const RunOptions& opts = {}) {
  if (eng.n() < 4) throw std::invalid_argument("tribonacci requires n >= 4");
  return detail::run_bonacci(eng, 3, sched, opts);
}

template <typename Engine>
Trace run_kbonacci(Engine& eng, const Schedule& sched,
                   const RunOptions& opts = {}) {
  sched.validate(eng.n());
  return detail::run_bonacci(eng, sched.k, sched, opts);
}

/// k-bonacci with k = n-1: full-width compression at every level.
template <typename Engine>
Trace run_allbonacci(Engine& eng, const Schedule& sched,
                     const RunOptions& opts = {}) {
  if (eng.n() < 3) throw std::invalid_argument("allbonacci requires n >= 3");
  return detail::run_bonacci(eng, eng.n() - 1, sched, opts);
}

/// PAC1: dedicated reset spin per computation spin (modeled as direct
/// resets); cools spin n-1 to purification level L. Needs n >= 2L+1.
template <typename Engine>
Trace run_pac1(Engine& eng, const Schedule& sched, const RunOptions& opts = {}) {
  const int n = eng.n();
  const int L = sched.L;
  if (L < 1) throw std::invalid_argument("pac1 requires L >= 1");
  if (n < 2 * L + 1)
    throw std::invalid_argument("pac1 requires n >= 2L+1 computation spins");
  for (int s = n - 1 - 2 * L; s < n; ++s)
    if (!eng.system().is_reset_spin(s))
      throw std::invalid_argument(
          "pac1: every involved spin needs a dedicated reset partner");
  Tracer tr(opts.trace);
  tr.record_initial(eng);
  detail::pac1_m(eng, tr, L, n - 1);
  Trace t = tr.finish(eng);
  t.outer_iterations = L;
  return t;
}

/// PAC2: a single reset spin (spin 0) also participates in compressions;
/// cools spin 2L. Needs n >= 2L+1.
template <typename Engine>
Trace run_pac2(Engine& eng, const Schedule& sched, const RunOptions& opts = {}) {
  const int n = eng.n();
  const int L = sched.L;
  if (L < 1) throw std::invalid_argument("pac2 requires L >= 1");
  if (n < 2 * L + 1) throw std::invalid_argument("pac2 requires n >= 2L+1 spins");
  if (!eng.system().is_reset_spin(0))
    throw std::invalid_argument("pac2: spin 0 must be the reset spin");
  Tracer tr(opts.trace);
  tr.record_initial(eng);
  detail::pac2_n(eng, tr, L, 2 * L);
  Trace t = tr.finish(eng);
  t.outer_iterations = L;
  return t;
}

/// Partner pairing algorithm: alternate RESET of spin 0 with a full
/// descending SORT of the diagonal. Exhaustive mode stops once a whole
/// round moves no S&S entry by delta or more. Reps mode runs an exact
/// number of elementary steps (RESET,SORT,RESET,...).
template <DiagonalEngine Engine>
Trace run_ppa(Engine& eng, const Schedule& sched, const RunOptions& opts = {}) {
  if (eng.system().reset_spins != std::vector<int>{0})
    throw std::invalid_argument(
        "ppa requires exactly one designated reset spin (spin 0)");
  Tracer tr(opts.trace);
  tr.record_initial(eng);
  const int rs[] = {0};
  bool converged = true;
  long rounds = 0;
  if (sched.mode == Mode::Reps) {
    if (sched.reps.size() != 1)
      throw std::invalid_argument("ppa reps mode takes one elementary step count");
    const long steps = sched.reps[0];
    for (long s = 0; s < steps; ++s) {
      if (s % 2 == 0) {
        eng.reset_spins(rs);
        tr.record(eng, "RESET");
      } else {
        eng.sort_state();
        tr.record(eng, "SORT");
      }
    }
    rounds = steps;
  } else {
    std::vector<double> before = eng.sands_snapshot();
    for (;;) {
      if (tr.total_steps() + 2 > sched.max_steps) {
        converged = false;
        break;
      }
      eng.reset_spins(rs);
      tr.record(eng, "RESET");
      eng.sort_state();
      tr.record(eng, "SORT");
      ++rounds;
      std::vector<double> after = eng.sands_snapshot();
      double worst = 0.0;
      for (std::size_t j = 0; j < after.size(); ++j)
        worst = std::max(worst, std::abs(after[j] - before[j]));
      if (worst < sched.delta) break;
      before = std::move(after);
    }
  }
  Trace t = tr.finish(eng);
  t.converged = converged;
  t.outer_iterations = rounds;
  return t;
}

/// One basic compression subroutine on spins (x,y) = (0,1) with the
/// relocation chain running up the remaining spins.
template <PermutationGateEngine Engine>
Trace run_bcs(Engine& eng, const Schedule& sched, const RunOptions& opts = {}) {
  (void)sched;
  if (eng.n() < 2) throw std::invalid_argument("bcs requires n >= 2");
  Tracer tr(opts.trace);
  tr.record_initial(eng);
  eng.cnot(/*control=*/1, /*target=*/0);
  tr.record(eng, "CNOT(1->0)");
  eng.not_gate(0);
  tr.record(eng, "NOT(0)");
  int prev = 1;
  for (int c = 2; c < eng.n(); ++c) {
    if ((c - 2) % 2 == 0) {
      eng.cswap(0, prev, c);
      tr.record(eng, "CSWAP(0;" + std::to_string(prev) + "," + std::to_string(c) + ")");
    } else {
      eng.swap_spins(prev, c);
      tr.record(eng, "SWAP(" + std::to_string(prev) + "," + std::to_string(c) + ")");
    }
    prev = c;
  }
  Trace t = tr.finish(eng);
  t.outer_iterations = 1;
  return t;
}

}  // namespace spincool
