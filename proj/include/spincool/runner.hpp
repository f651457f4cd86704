#pragma once

// Runtime dispatch shared by the CLI and the test suites: resolve a run
// configuration (algorithm, backend, spin system, initial state), execute
// it, and hand back the trace plus the metadata that goes into reports.

#include <stdexcept>
#include <string>
#include <vector>

#include "spincool/algorithms.hpp"
#include "spincool/core.hpp"
#include "spincool/engines.hpp"

namespace spincool {

enum class Backend { Bias, Exact, Rational };
enum class InitKind { Default, Cms, Thermal };

inline std::string to_string(Backend b) {
  switch (b) {
    case Backend::Bias: return "bias";
    case Backend::Exact: return "exact";
    case Backend::Rational: return "rational";
  }
  return "?";
}

inline Backend backend_from_string(const std::string& s) {
  if (s == "bias") return Backend::Bias;
  if (s == "exact") return Backend::Exact;
  if (s == "rational") return Backend::Rational;
  throw std::invalid_argument("unknown backend: " + s);
}

inline std::string to_string(InitKind i) {
  switch (i) {
    case InitKind::Default: return "default";
    case InitKind::Cms: return "cms";
    case InitKind::Thermal: return "thermal";
  }
  return "?";
}

inline InitKind init_from_string(const std::string& s) {
  if (s == "default") return InitKind::Default;
  if (s == "cms") return InitKind::Cms;
  if (s == "thermal") return InitKind::Thermal;
  throw std::invalid_argument("unknown init: " + s);
}

inline std::string to_string(ExhaustiveStyle s) {
  return s == ExhaustiveStyle::Nested ? "nested" : "sweeps";
}

struct RunConfig {
  Algorithm alg = Algorithm::Fibonacci;
  Backend backend = Backend::Bias;
  int n = 3;
  double eps0 = 1e-6;
  bool epsilon_given = false;  // if set, `epsilon` defines the system
  double epsilon = 0.0;
  Schedule schedule;
  InitKind init = InitKind::Default;
  RunOptions options;
};

struct RunMeta {
  std::string algorithm, backend, mode, init, style;
  int n = 0, k = 0, L = 0;
  double eps0 = 0.0, epsilon = 0.0, delta = 0.0;
  long max_steps = 0;
  std::vector<long> reps;
  std::string run_name;
};

struct RunOutput {
  Trace trace;
  RunMeta meta;
  SpinSystem sys;
};

inline bool is_bonacci(Algorithm a) {
  return a == Algorithm::Fernandez || a == Algorithm::Fibonacci ||
         a == Algorithm::Tribonacci || a == Algorithm::KBonacci ||
         a == Algorithm::AllBonacci;
}

/// Effective k of the bonacci family member (0 for the others).
inline int bonacci_k(Algorithm a, int n, int k_flag) {
  switch (a) {
    case Algorithm::Fernandez:
    case Algorithm::Fibonacci: return 2;
    case Algorithm::Tribonacci: return 3;
    case Algorithm::KBonacci: return k_flag;
    case Algorithm::AllBonacci: return n - 1;
    default: return 0;
  }
}

inline std::vector<int> default_reset_spins(Algorithm a, int n) {
  switch (a) {
    case Algorithm::Ppa:
    case Algorithm::Pac2: return {0};
    case Algorithm::Pac1: {
      std::vector<int> all(n);
      for (int i = 0; i < n; ++i) all[i] = i;
      return all;
    }
    case Algorithm::Bcs: return {};
    default: return {0, 1};
  }
}

/// Initial per-spin bias profile in units of eps0. The bonacci family
/// starts with cold computation spins and thermalized reset spins; the PPA
/// starts from the completely mixed state; BCS acts on a thermal pair.
inline std::vector<int> initial_bias_profile(Algorithm a, InitKind init, int n) {
  std::vector<int> c(n, 0);
  switch (init) {
    case InitKind::Cms: return c;
    case InitKind::Thermal: return std::vector<int>(n, 1);
    case InitKind::Default: break;
  }
  switch (a) {
    case Algorithm::Ppa:
    case Algorithm::Pac1:
      break;  // completely mixed; PAC1 initializes every spin it touches
    case Algorithm::Pac2:
      c[0] = 1;
      break;
    case Algorithm::Bcs:
      c.assign(n, 1);
      break;
    default:
      c[0] = 1;
      if (n > 1) c[1] = 1;
      break;
  }
  return c;
}

/// Backend default for exhaustive scheduling. The bias backend follows the
/// nested per-level convergence; the diagonal backends use bounded sweeps,
/// whose step count stays polynomial when compressions perturb the lower
/// spins they recurse over.
inline ExhaustiveStyle default_style(Backend b) {
  return b == Backend::Bias ? ExhaustiveStyle::Nested : ExhaustiveStyle::Sweeps;
}

namespace detail {

template <typename Engine>
Trace dispatch_algorithm(Engine& eng, const Schedule& sched,
                         const RunOptions& opts) {
  switch (sched.algorithm) {
    case Algorithm::Fernandez: return run_fernandez(eng, sched, opts);
    case Algorithm::Fibonacci: return run_fibonacci(eng, sched, opts);
    case Algorithm::Tribonacci: return run_tribonacci(eng, sched, opts);
    case Algorithm::KBonacci: return run_kbonacci(eng, sched, opts);
    case Algorithm::AllBonacci: return run_allbonacci(eng, sched, opts);
    case Algorithm::Pac1: return run_pac1(eng, sched, opts);
    case Algorithm::Pac2: return run_pac2(eng, sched, opts);
    case Algorithm::Ppa:
      if constexpr (DiagonalEngine<Engine>)
        return run_ppa(eng, sched, opts);
      else
        throw std::invalid_argument("ppa requires the exact or rational backend");
    case Algorithm::Bcs:
      if constexpr (PermutationGateEngine<Engine>)
        return run_bcs(eng, sched, opts);
      else
        throw std::invalid_argument("bcs requires the exact or rational backend");
  }
  throw std::logic_error("unhandled algorithm");
}

}  // namespace detail

inline std::string make_run_name(const RunConfig& cfg) {
  std::string name = to_string(cfg.alg);
  if (cfg.alg == Algorithm::KBonacci) name += std::to_string(cfg.schedule.k);
  if (cfg.alg == Algorithm::Pac1 || cfg.alg == Algorithm::Pac2)
    name += "_L" + std::to_string(cfg.schedule.L);
  name += "_n" + std::to_string(cfg.n);
  return name;
}

inline RunOutput run_config(RunConfig cfg) {
  cfg.schedule.algorithm = cfg.alg;
  SpinSystem sys =
      cfg.epsilon_given
          ? SpinSystem::from_epsilon(cfg.n, default_reset_spins(cfg.alg, cfg.n),
                                     cfg.epsilon)
          : SpinSystem::from_epsilon0(cfg.n, default_reset_spins(cfg.alg, cfg.n),
                                      cfg.eps0);
  cfg.schedule.validate(cfg.n);

  const std::vector<int> profile = initial_bias_profile(cfg.alg, cfg.init, cfg.n);

  Trace trace;
  switch (cfg.backend) {
    case Backend::Bias: {
      BiasVector b = BiasVector::zeros(cfg.n);
      for (int i = 0; i < cfg.n; ++i) b[i] = profile[i] * sys.epsilon0;
      BiasEngine eng(sys, b);
      trace = detail::dispatch_algorithm(eng, cfg.schedule, cfg.options);
      break;
    }
    case Backend::Exact: {
      BiasVector b = BiasVector::zeros(cfg.n);
      for (int i = 0; i < cfg.n; ++i) b[i] = profile[i] * sys.epsilon0;
      ExactEngine eng(sys, DiagonalState::product(b));
      trace = detail::dispatch_algorithm(eng, cfg.schedule, cfg.options);
      break;
    }
    case Backend::Rational: {
      std::vector<Rational> coefs(cfg.n);
      for (int i = 0; i < cfg.n; ++i) coefs[i] = profile[i];
      RationalEngine eng = RationalEngine::from_bias_over_eps0(sys, coefs);
      trace = detail::dispatch_algorithm(eng, cfg.schedule, cfg.options);
      break;
    }
  }

  RunMeta meta;
  meta.algorithm = to_string(cfg.alg);
  meta.backend = to_string(cfg.backend);
  meta.mode = cfg.schedule.mode == Mode::Reps ? "reps" : "exhaustive";
  meta.init = to_string(cfg.init);
  meta.style = to_string(cfg.options.style);
  meta.n = cfg.n;
  meta.k = bonacci_k(cfg.alg, cfg.n, cfg.schedule.k);
  meta.L = cfg.schedule.L;
  meta.eps0 = sys.epsilon0;
  meta.epsilon = sys.epsilon;
  meta.delta = cfg.schedule.delta;
  meta.max_steps = cfg.schedule.max_steps;
  meta.reps = cfg.schedule.reps;
  meta.run_name = make_run_name(cfg);
  return RunOutput{std::move(trace), std::move(meta), std::move(sys)};
}

}  // namespace spincool
