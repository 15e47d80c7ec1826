#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pwlbfgs/experiments.hpp"

using namespace pwlbfgs;

namespace {

struct CommonFlags {
  long precision_bits = PrecisionContext::kDefaultBits;
  std::string c1 = "1e-4";
  std::string c2 = "0.5";
  std::string ls_mode = "analytic";
  int max_ls_trials = 1000;
  bool allow_degenerate = false;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--precision-bits", flags.precision_bits,
                  "mantissa width in bits (>= 53)")
      ->capture_default_str();
  cmd->add_option("--c1", flags.c1, "sufficient-decrease parameter")
      ->capture_default_str();
  cmd->add_option("--c2", flags.c2, "curvature parameter")->capture_default_str();
  cmd->add_option("--ls-mode", flags.ls_mode, "analytic | emulate-paper")
      ->check(CLI::IsMember({"analytic", "emulate-paper"}))
      ->capture_default_str();
  cmd->add_option("--max-ls-trials", flags.max_ls_trials, "line-search trial cap")
      ->capture_default_str();
  cmd->add_flag("--allow-degenerate-params", flags.allow_degenerate,
                "admit c1 = 0 and c2 = 1");
}

LsMode parse_mode(const std::string& text) {
  return text == "analytic" ? LsMode::analytic : LsMode::emulate_paper;
}

int cmd_run(const CommonFlags& flags, int dim, bool dim_given, std::uint64_t seed,
            const std::string& init_file, const std::string& out, bool svg,
            int digits, bool hex) {
  PrecisionContext ctx(flags.precision_bits);
  SeededInit init = init_file.empty() ? make_seeded_init(dim, seed, ctx)
                                      : read_init_file(init_file, ctx);
  const int n = init.x0.size();
  if (!init_file.empty() && dim_given && dim != n) {
    throw std::invalid_argument("--dim disagrees with the init file dimension");
  }
  PwlObjective obj = PwlObjective::canonical(n, ctx);
  LineSearchParams params =
      LineSearchParams::custom(ctx, flags.c1, flags.c2, flags.allow_degenerate);
  params.max_trials = flags.max_ls_trials;

  RunOptions opts;
  opts.mode = parse_mode(flags.ls_mode);
  RunRecord rec = run(obj, init.x0, init.H0, params, ctx, opts);
  if (init_file.empty()) rec.config.seed = seed;

  InvariantReport report = verify_record(rec);
  TraceFormat format{digits, hex};
  write_file(out + ".csv", trace_csv(rec, format));
  write_file(out + ".json",
             summary_json(rec, report, n <= 10 ? &init : nullptr));
  write_file(out + ".invariants.json", report.to_json_string());
  write_file(out + ".invariants.txt", report.to_text());
  if (svg) write_file(out + ".svg", figure_svg(rec));

  std::cout << "terminated at iteration " << rec.termination_index << " ("
            << rec.iterations() << " line searches, cause " << to_string(rec.cause)
            << ")\n"
            << "f went from " << rec.rows.front().f.to_decimal(10) << " to "
            << rec.rows.back().f.to_decimal(10) << "\n"
            << "invariants: " << (report.all_pass ? "all pass" : "VIOLATIONS (see report)")
            << "\n"
            << "wrote " << out << ".csv, .json, .invariants.{json,txt}"
            << (svg ? ", .svg" : "") << "\n";
  return 0;
}

int cmd_ensemble(const CommonFlags& flags, int dim, int runs, std::uint64_t seed,
                 int jobs, bool verify, const std::string& out) {
  EnsembleConfig config;
  config.n = dim;
  config.runs = runs;
  config.seed = seed;
  config.precision_bits = flags.precision_bits;
  config.c1 = flags.c1;
  config.c2 = flags.c2;
  config.allow_degenerate = flags.allow_degenerate;
  config.mode = parse_mode(flags.ls_mode);
  config.max_ls_trials = flags.max_ls_trials;
  config.jobs = jobs;
  config.verify = verify;

  EnsembleStats stats = run_ensemble(config);
  write_file(out + ".json", stats.to_json_string());
  write_file(out + ".csv", stats.per_run_csv);
  std::cout << "n=" << dim << " runs=" << runs << " iterations min/median/mean/max = "
            << stats.min_iterations << " / " << stats.median_iterations << " / "
            << stats.mean_iterations << " / " << stats.max_iterations << "\n"
            << "causes: unbounded_direction=" << stats.count_unbounded
            << " trial_cap_exceeded=" << stats.count_trial_cap << "\n";
  if (verify) {
    std::cout << "invariant violations: " << stats.violations << " of "
              << stats.verified_runs << " runs\n";
  }
  std::cout << "wrote " << out << ".json, " << out << ".csv\n";
  return stats.count_trial_cap == 0 && stats.violations == 0 ? 0 : 3;
}

int cmd_verify(const CommonFlags& flags, const std::string& suite, int runs,
               std::uint64_t seed, const std::vector<int>& dims) {
  std::vector<SuiteResult> results;
  if (suite == "recursion" || suite == "all") {
    int per_dim = std::max(1, runs / static_cast<int>(dims.size()));
    results.push_back(suite_recursion(dims, per_dim, seed, flags.precision_bits));
  }
  if (suite == "lemmas" || suite == "all") {
    results.push_back(suite_lemmas(dims, runs, seed, flags.precision_bits));
    results.push_back(suite_prediction(dims, runs, seed + 1, flags.precision_bits));
  }
  if (suite == "affine" || suite == "all") {
    results.push_back(suite_affine(dims, std::min(runs, 200), seed, flags.precision_bits));
  }
  if (results.empty()) {
    std::cerr << "unknown suite: " << suite << "\n";
    return 2;
  }
  bool ok = true;
  for (const SuiteResult& r : results) {
    std::cout << r.suite << ": " << (r.pass() ? "PASS" : "FAIL") << " (" << r.runs
              << " runs, " << r.failures << " failures";
    if (!r.max_deviation.empty()) std::cout << ", max deviation " << r.max_deviation;
    std::cout << ")\n";
    for (const std::string& note : r.notes) std::cout << "  " << note << "\n";
    ok = ok && r.pass();
  }
  return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"BFGS with Armijo-Wolfe line search on two-piece piecewise-linear objectives"};
  app.require_subcommand(1);

  CommonFlags run_flags, ens_flags, ver_flags;

  auto* run_cmd = app.add_subcommand("run", "single seeded or file-initialized run");
  int dim = 3;
  std::uint64_t seed = 0;
  std::string init_file, out = "run";
  bool svg = false, hex = false;
  int digits = 30;
  auto* dim_opt =
      run_cmd->add_option("--dim", dim, "problem dimension")->capture_default_str();
  run_cmd->add_option("--seed", seed, "root seed")->capture_default_str();
  run_cmd->add_option("--init-file", init_file, "JSON file with x0 and H0");
  run_cmd->add_option("--out", out, "output path prefix")->capture_default_str();
  run_cmd->add_flag("--svg", svg, "also write the three-series log plot");
  run_cmd->add_option("--digits", digits, "significant digits in the CSV")
      ->capture_default_str();
  run_cmd->add_flag("--hex", hex, "append exact hex-float columns to the CSV");
  add_common(run_cmd, run_flags);

  auto* ens_cmd = app.add_subcommand("ensemble", "seeded Monte-Carlo ensemble");
  int ens_dim = 2, ens_runs = 5000, jobs = 0;
  std::uint64_t ens_seed = 0;
  bool verify = false;
  std::string ens_out = "ensemble";
  ens_cmd->add_option("--dim", ens_dim, "problem dimension")->capture_default_str();
  ens_cmd->add_option("--runs", ens_runs, "number of runs")->capture_default_str();
  ens_cmd->add_option("--seed", ens_seed, "root seed")->capture_default_str();
  ens_cmd->add_option("--jobs", jobs, "worker threads (0 = all cores)")
      ->capture_default_str();
  ens_cmd->add_flag("--verify", verify, "run the invariant checks on every run");
  ens_cmd->add_option("--out", ens_out, "output path prefix")->capture_default_str();
  add_common(ens_cmd, ens_flags);

  auto* ver_cmd = app.add_subcommand("verify", "property suites over seeded corpora");
  std::string suite = "all";
  int ver_runs = 100;
  std::uint64_t ver_seed = 0;
  std::vector<int> dims{2, 3, 5};
  ver_cmd->add_option("--suite", suite, "lemmas | recursion | affine | all")
      ->check(CLI::IsMember({"lemmas", "recursion", "affine", "all"}))
      ->capture_default_str();
  ver_cmd->add_option("--runs", ver_runs, "runs per suite")->capture_default_str();
  ver_cmd->add_option("--seed", ver_seed, "root seed")->capture_default_str();
  ver_cmd->add_option("--dim-list", dims, "dimensions to cycle over")
      ->delimiter(',')
      ->capture_default_str();
  add_common(ver_cmd, ver_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      return cmd_run(run_flags, dim, dim_opt->count() > 0, seed, init_file, out, svg,
                     digits, hex);
    }
    if (ens_cmd->parsed()) {
      return cmd_ensemble(ens_flags, ens_dim, ens_runs, ens_seed, jobs, verify, ens_out);
    }
    if (ver_cmd->parsed()) {
      return cmd_verify(ver_flags, suite, ver_runs, ver_seed, dims);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
