#ifndef PWLBFGS_EXPERIMENTS_HPP
#define PWLBFGS_EXPERIMENTS_HPP

#include <map>
#include <string>

#include "pwlbfgs/affine.hpp"
#include "pwlbfgs/invariants.hpp"

namespace pwlbfgs {

// Initialization scheme of the experiments: H0 = X^T X with i.i.d. standard
// normal X, x0 i.i.d. standard normal (first coordinate redrawn in the
// measure-zero case that it lands exactly on the kink).
struct SeededInit {
  Vector x0;
  SymMatrix H0;
};

SeededInit make_seeded_init(int n, std::uint64_t seed, const PrecisionContext& ctx);

struct EnsembleConfig {
  int n = 2;
  int runs = 5000;
  std::uint64_t seed = 0;
  long precision_bits = PrecisionContext::kDefaultBits;
  std::string c1 = "1e-4";
  std::string c2 = "0.5";
  bool allow_degenerate = false;
  LsMode mode = LsMode::analytic;
  int max_ls_trials = 1000;
  int jobs = 0;  // 0 = hardware concurrency
  bool verify = false;
};

struct EnsembleStats {
  EnsembleConfig config;
  int min_iterations = 0;
  int max_iterations = 0;
  long long sum_iterations = 0;
  double mean_iterations = 0.0;
  double median_iterations = 0.0;
  int count_unbounded = 0;
  int count_trial_cap = 0;
  int verified_runs = 0;
  int violations = 0;
  std::map<int, int> histogram;  // iterations -> run count
  std::string per_run_csv;       // run,seed,termination_index,iterations,cause

  std::string to_json_string() const;
};

// Independent seeded runs with counter-split streams; the job count does not
// change any result, only the wall time.
EnsembleStats run_ensemble(const EnsembleConfig& config);

struct TraceFormat {
  int digits = 30;
  bool hex = false;
};

// One CSV row per recorded iteration; the final row belongs to the failing
// line search and has empty step-size columns.
std::string trace_csv(const RunRecord& record, const TraceFormat& format);

// Stable-key-order run summary. The initialization echo (full-precision
// decimal strings, sufficient for exact replay) is included when provided.
std::string summary_json(const RunRecord& record, const InvariantReport& report,
                         const SeededInit* init_echo);

// Standalone vector plot of log(delta*psi), log(a), log(psi) against the
// iteration index. Timestamp-free; byte-identical across runs.
std::string figure_svg(const RunRecord& record);

std::string init_file_json(const SeededInit& init);
SeededInit parse_init_json(const std::string& text, const PrecisionContext& ctx);
SeededInit read_init_file(const std::string& path, const PrecisionContext& ctx);

void write_file(const std::string& path, const std::string& content);

// Property-suite drivers shared by the verification CLI and the test suites.
struct SuiteResult {
  std::string suite;
  int runs = 0;
  int failures = 0;
  std::string max_deviation;  // decimal, when the suite tracks one
  std::vector<std::string> notes;
  bool pass() const { return failures == 0; }
};

// Closed-form tracker against the matrix iteration, componentwise.
SuiteResult suite_recursion(const std::vector<int>& dims, int runs_per_dim,
                            std::uint64_t seed, long precision_bits);

// Full invariant report over seeded runs, spread across the given dimensions.
SuiteResult suite_lemmas(const std::vector<int>& dims, int total_runs,
                         std::uint64_t seed, long precision_bits);

// Termination prediction over seeded runs, each replayed with both the
// standard and the degenerate parameter pair.
SuiteResult suite_prediction(const std::vector<int>& dims, int total_runs,
                             std::uint64_t seed, long precision_bits);

// Transport equivalence over random general objectives.
SuiteResult suite_affine(const std::vector<int>& dims, int count,
                         std::uint64_t seed, long precision_bits);

// The unbounded one-dimensional family terminates within two iterations.
SuiteResult suite_beta(const std::vector<std::string>& betas, int runs_each,
                       std::uint64_t seed, long precision_bits);

}  // namespace pwlbfgs

#endif
