#ifndef PWLBFGS_SOLVER_HPP
#define PWLBFGS_SOLVER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "pwlbfgs/linesearch.hpp"

namespace pwlbfgs {

// s^T y was not positive at an update; with a correct line search this
// cannot happen, so the run is aborted rather than patched.
class CurvatureViolation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The closed-form tracker and the matrix iteration disagreed beyond the
// context band.
class ShadowDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IterationCapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An injected step size failed the Armijo-Wolfe re-check during replay.
class ReplayError : public std::runtime_error {
 public:
  ReplayError(std::string what, int iteration)
      : std::runtime_error(std::move(what)), k(iteration) {}
  int k;
};

struct SolverState {
  int k = 0;
  Vector x;
  SymMatrix H;
  Real f_val;
  Vector g;
};

struct IterationRow {
  int k = 0;
  Real f;
  Real x1;  // signed kink argument at the iterate
  std::optional<Real> alpha;  // absent on the final, failing iteration
  int trials = 0;
  ScalarState direct;  // recomputed from the live matrix every iteration
  ScalarState shadow;  // advanced by the closed-form recursions
  DerivedQuantities derived;  // from the direct state
  Real shadow_dev;            // componentwise relative deviation, this row
  std::optional<Vector> x, p, g;
  std::optional<SymMatrix> H;
};

enum class TerminationCause {
  unbounded_direction,
  trial_cap_exceeded,
  replay_exhausted,  // replay ran out of steps at a still-feasible state
};

const char* to_string(TerminationCause cause);

struct RunConfig {
  int n = 0;
  std::optional<std::uint64_t> seed;
  Real c1, c2;
  long precision_bits = PrecisionContext::kDefaultBits;
  LsMode mode = LsMode::analytic;
  int max_ls_trials = 1000;
  bool degenerate = false;
  ObjectiveKind objective = ObjectiveKind::canonical;
};

struct RunRecord {
  std::vector<IterationRow> rows;  // contiguous from k = 0 through the failure
  TerminationCause cause = TerminationCause::unbounded_direction;
  int termination_index = 0;  // 0-based k of the iteration whose search failed
  // Count in the style of the ensemble statistics: line searches attempted,
  // including the failing one.
  int iterations() const { return termination_index + 1; }
  Real max_shadow_dev;
  bool spd_verified = false;  // every post-update H passed the pivot test
  RunConfig config;
};

struct RecordOptions {
  bool keep_vectors = true;
  bool keep_matrices = false;
};

struct RunOptions {
  LsMode mode = LsMode::analytic;
  int iteration_cap = 10000;
  bool check_spd = true;
  bool shadow_abort = true;
  bool guard_enabled = true;
  RecordOptions record;
  const std::vector<Real>* replay_steps = nullptr;
};

// p = -H g; descent is automatic for positive definite H.
Vector direction(const SymMatrix& H, const Vector& g);

// Rank-two inverse-Hessian update
//   H' = (I - rho s y^T) H (I - rho y s^T) + rho s s^T,  rho = 1 / (s^T y),
// computed as H - rho (s w^T + w s^T) + rho (1 + rho y^T w) s s^T with w = H y.
SymMatrix update_H(const SymMatrix& H, const Vector& s, const Vector& y);

// Full solver loop: direction, line search, iterate and matrix update, with
// the scalar tracker running in shadow. Returns the complete trace; the
// final row belongs to the iteration whose line search failed.
RunRecord run(const PwlObjective& obj, const Vector& x0, const SymMatrix& H0,
              const LineSearchParams& params, const PrecisionContext& ctx,
              const RunOptions& options = RunOptions{});

}  // namespace pwlbfgs

#endif
