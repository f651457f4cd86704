// spincool command-line front end.
//
// Subcommands:
//   run      - execute one cooling run, write trace + summary files
//   compare  - run two configurations on the same system and compare
//   sweep    - repeat a run over a range of spin counts
//   validate - re-check invariants on an emitted JSON trace
//
// Exit codes: 0 success, 2 configuration error, 3 numeric-validation
// failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "spincool/spincool.hpp"

namespace fs = std::filesystem;
using namespace spincool;

namespace {

struct SideFlags {
  std::string alg = "fibonacci";
  std::string backend;  // empty: bias, except ppa/bcs default to exact
  std::string mode = "auto";
  std::string reps_csv;
  long steps = -1;
  int k = 0;
  int L = 0;
};

struct RunFlags {
  SideFlags side;
  int n = 3;
  double eps0 = 1e-6;
  double eps = 0.0;
  bool eps_set = false;
  double delta = 1e-6;
  long max_steps = 10'000'000;
  std::string init = "default";
  std::string style = "auto";
  std::string out = ".";
  std::string format = "both";
};

void add_side_flags(CLI::App* cmd, SideFlags& f, const std::string& suffix) {
  cmd->add_option("--alg" + suffix, f.alg,
                  "algorithm: fernandez|fibonacci|tribonacci|kbonacci|"
                  "allbonacci|pac1|pac2|ppa|bcs");
  cmd->add_option("--backend" + suffix, f.backend,
                  "backend: bias|exact|rational (default: bias; ppa and bcs "
                  "default to exact)");
  cmd->add_option("--mode" + suffix, f.mode, "termination: reps|exhaustive");
  cmd->add_option("--reps" + suffix, f.reps_csv,
                  "comma-separated repetition counts m_n,...,m_3");
  cmd->add_option("--steps" + suffix, f.steps,
                  "single repetition/step count (fernandez m, ppa steps)");
  cmd->add_option("--k" + suffix, f.k, "k for kbonacci");
  cmd->add_option("--L" + suffix, f.L, "purification level for pac1/pac2");
}

void add_common_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--n", f.n, "number of spins")->check(CLI::PositiveNumber);
  auto* e0 = cmd->add_option("--eps0", f.eps0, "equilibrium bias (0,1)");
  auto* e = cmd->add_option("--eps", f.eps, "inverse-temperature parameter");
  e->excludes(e0);
  cmd->add_option("--delta", f.delta, "exhaustive-mode tolerance (units of eps0)");
  cmd->add_option("--max-steps", f.max_steps, "safety cap on elementary steps");
  cmd->add_option("--init", f.init, "initial state: default|cms|thermal");
  cmd->add_option("--style", f.style, "exhaustive scheduling: auto|nested|sweeps");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--format", f.format, "trace format: csv|json|both");
  cmd->set_config("--config", "", "read options from an INI config file");
  cmd->callback([cmd, &f]() { f.eps_set = cmd->count("--eps") > 0; });
}

std::vector<long> parse_reps(const std::string& csv) {
  std::vector<long> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(std::stol(item));
  }
  return out;
}

RunConfig make_config(const RunFlags& f, const SideFlags& s) {
  RunConfig cfg;
  cfg.alg = algorithm_from_string(s.alg);
  if (!s.backend.empty())
    cfg.backend = backend_from_string(s.backend);
  else if (cfg.alg == Algorithm::Ppa || cfg.alg == Algorithm::Bcs)
    cfg.backend = Backend::Exact;
  else
    cfg.backend = Backend::Bias;
  cfg.n = f.n;
  cfg.eps0 = f.eps0;
  cfg.epsilon_given = f.eps_set;
  cfg.epsilon = f.eps;
  cfg.init = init_from_string(f.init);

  Schedule& sched = cfg.schedule;
  sched.algorithm = cfg.alg;
  sched.delta = f.delta;
  sched.max_steps = f.max_steps;
  sched.k = s.k;
  sched.L = s.L;
  std::vector<long> reps = parse_reps(s.reps_csv);
  if (s.steps >= 0) {
    if (!reps.empty())
      throw std::invalid_argument("--steps and --reps are mutually exclusive");
    reps = {s.steps};
  }
  if (s.mode == "reps" || (s.mode == "auto" && !reps.empty())) {
    if (reps.empty())
      throw std::invalid_argument("reps mode requires --reps or --steps");
    sched.mode = Mode::Reps;
    sched.reps = std::move(reps);
  } else if (s.mode == "exhaustive" || s.mode == "auto") {
    if (!reps.empty())
      throw std::invalid_argument(
          "--reps/--steps conflict with exhaustive mode");
    sched.mode = Mode::Exhaustive;
  } else {
    throw std::invalid_argument("unknown mode: " + s.mode);
  }

  if (f.style == "nested")
    cfg.options.style = ExhaustiveStyle::Nested;
  else if (f.style == "sweeps")
    cfg.options.style = ExhaustiveStyle::Sweeps;
  else if (f.style == "auto")
    cfg.options.style = default_style(cfg.backend);
  else
    throw std::invalid_argument("unknown style: " + f.style);

  cfg.options.trace.store_sands = cfg.backend != Backend::Bias && cfg.n <= 12;
  cfg.options.trace.compute_product = cfg.n <= 12;
  return cfg;
}

void write_run_files(const RunOutput& ro, const std::string& out_dir,
                     const std::string& format) {
  fs::create_directories(out_dir);
  const std::string base = (fs::path(out_dir) / ro.meta.run_name).string();
  if (format == "csv" || format == "both")
    write_text_file(base + "_trace.csv", render_trace_csv(ro.trace, ro.meta));
  if (format == "json" || format == "both")
    write_text_file(base + "_trace.json",
                    trace_to_json(ro.trace, ro.meta).dump(2) + "\n");
  write_text_file(base + "_summary.json",
                  summary_json(ro.trace, ro.meta).dump(2) + "\n");
}

int cmd_run(const RunFlags& f) {
  RunConfig cfg = make_config(f, f.side);
  RunOutput ro = run_config(cfg);
  write_run_files(ro, f.out, f.format);
  std::cout << render_summary_text(ro.trace, ro.meta);
  // round-trip validation of what was just emitted
  const auto problems = validate_trace_json(trace_to_json(ro.trace, ro.meta));
  if (!problems.empty()) {
    for (const auto& p : problems)
      std::cerr << "validation: " << p << "\n";
    return 3;
  }
  return 0;
}

int cmd_compare(const RunFlags& f, const SideFlags& a, const SideFlags& b) {
  RunConfig ca = make_config(f, a);
  RunConfig cb = make_config(f, b);
  RunOutput ra = run_config(ca);
  RunOutput rb = run_config(cb);
  const CompareReport rep = compare_outputs(ra, rb);
  fs::create_directories(f.out);
  const std::string path =
      (fs::path(f.out) / ("compare_" + ra.meta.run_name + "_vs_" +
                          rb.meta.run_name + ".json"))
          .string();
  write_text_file(path, compare_to_json(ra, rb, rep).dump(2) + "\n");
  std::cout << "compare " << ra.meta.run_name << " (A) vs " << rb.meta.run_name
            << " (B)\n";
  for (int i = f.n - 1; i >= 0; --i)
    std::cout << "  spin " << i << ": A/eps0="
              << format_g6(ra.trace.final_biases[i] / ra.meta.eps0)
              << "  B/eps0="
              << format_g6(rb.trace.final_biases[i] / rb.meta.eps0)
              << "  ratio=" << format_g6(rep.bias_ratio[i]) << "\n";
  if (rep.max_sands_discrepancy)
    std::cout << "  max S&S discrepancy: "
              << format_g6(*rep.max_sands_discrepancy) << "\n";
  return 0;
}

int cmd_sweep(const RunFlags& f, int n_min, int n_max) {
  if (n_min < 1 || n_max < n_min)
    throw std::invalid_argument("sweep requires 1 <= n-min <= n-max");
  fs::create_directories(f.out);
  std::string csv =
      "n,final_top_bias_over_eps0,total_steps,outer_iterations,converged\n";
  for (int n = n_min; n <= n_max; ++n) {
    RunFlags fn = f;
    fn.n = n;
    RunConfig cfg = make_config(fn, fn.side);
    cfg.options.trace.max_records = 1;  // sweeps keep summaries only
    RunOutput ro = run_config(cfg);
    const double top = ro.trace.final_biases.values.back() / ro.meta.eps0;
    csv += std::to_string(n) + "," + format_g6(top) + "," +
           std::to_string(ro.trace.total_steps) + "," +
           std::to_string(ro.trace.outer_iterations) + "," +
           (ro.trace.converged ? "1" : "0") + "\n";
    std::cout << "n=" << n << "  top bias/eps0=" << format_g6(top)
              << "  steps=" << ro.trace.total_steps << "\n";
  }
  const std::string path =
      (fs::path(f.out) / ("sweep_" + f.side.alg + ".csv")).string();
  write_text_file(path, csv);
  return 0;
}

int cmd_validate(const std::string& file) {
  const std::string body = read_text_file(file);
  const json doc = json::parse(body);
  const auto problems = validate_trace_json(doc);
  if (problems.empty()) {
    std::cout << file << ": ok (" << doc["records"].size() << " records)\n";
    return 0;
  }
  for (const auto& p : problems) std::cerr << file << ": " << p << "\n";
  return 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spincool: heat-bath algorithmic cooling simulator"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "execute one cooling run");
  add_side_flags(run, run_flags.side, "");
  add_common_flags(run, run_flags);

  RunFlags cmp_flags;
  SideFlags side_a, side_b;
  auto* cmp = app.add_subcommand("compare", "run and compare two configurations");
  add_side_flags(cmp, side_a, "-a");
  add_side_flags(cmp, side_b, "-b");
  add_common_flags(cmp, cmp_flags);

  RunFlags sweep_flags;
  int n_min = 3, n_max = 8;
  auto* sweep = app.add_subcommand("sweep", "run over a range of spin counts");
  add_side_flags(sweep, sweep_flags.side, "");
  add_common_flags(sweep, sweep_flags);
  sweep->add_option("--n-min", n_min, "smallest spin count");
  sweep->add_option("--n-max", n_max, "largest spin count");

  std::string validate_file;
  auto* val = app.add_subcommand("validate", "validate an emitted JSON trace");
  val->add_option("file", validate_file, "trace JSON file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run->parsed()) return cmd_run(run_flags);
    if (cmp->parsed()) return cmd_compare(cmp_flags, side_a, side_b);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, n_min, n_max);
    if (val->parsed()) return cmd_validate(validate_file);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
