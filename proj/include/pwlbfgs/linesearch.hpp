#ifndef PWLBFGS_LINESEARCH_HPP
#define PWLBFGS_LINESEARCH_HPP

#include <optional>

#include "pwlbfgs/objective.hpp"
#include "pwlbfgs/random.hpp"
#include "pwlbfgs/reflection.hpp"

namespace pwlbfgs {

class NotDescent : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyInterval : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LineSearchParams {
  Real c1;
  Real c2;
  int max_trials = 1000;
  Real initial_step;
  bool allow_degenerate = false;

  static LineSearchParams standard(const PrecisionContext& ctx);  // c1=1e-4, c2=1/2
  static LineSearchParams custom(const PrecisionContext& ctx, const std::string& c1,
                                 const std::string& c2, bool allow_degenerate = false);

  // Enforces 0 <= c1 < c2 <= 1; the boundary values c1 = 0 and c2 = 1 are
  // admitted only when allow_degenerate is set.
  void validate() const;

  bool degenerate() const;  // c1 == 0 or c2 == 1
};

enum class FailureCause { unbounded_direction, trial_cap_exceeded };

struct LineSearchOutcome {
  bool accepted = false;
  std::optional<Real> alpha;
  int trials = 0;
  FailureCause cause = FailureCause::unbounded_direction;
};

enum class LsMode {
  analytic,       // closed-form infeasibility test decides failure instantly
  emulate_paper,  // failure is detected only by exhausting the trial cap
};

// True iff no step size can satisfy the curvature condition on this ray:
// the directional derivative only takes the values g0 and slope_inf, so the
// condition is unsatisfiable exactly when slope_inf <= c2 * g0. (Equality is
// counted as infeasible; acceptance requires strict curvature improvement,
// which also keeps the kink crossing enforced when c2 = 1.)
bool analytic_infeasible(const PwlObjective& obj, const Vector& x, const Vector& p,
                         const Real& c2);

// Armijo-Wolfe bracketing: start at initial_step with lower bound 0 and no
// upper bound; an Armijo failure halves toward the lower bound, a curvature
// failure doubles (or bisects once an upper bound exists). A trial landing
// exactly on the kink counts as a curvature failure.
LineSearchOutcome bracketing_search(const PwlObjective& obj, const Vector& x,
                                    const Vector& p, const LineSearchParams& params,
                                    LsMode mode = LsMode::analytic);

// Acceptability of one specific step size, checked from scratch: Armijo
// non-strictly, curvature strictly, iterate off the kink.
bool step_acceptable(const PwlObjective& obj, const Vector& x, const Vector& p,
                     const Real& alpha, const LineSearchParams& params);

// Open interval of acceptable step sizes in reflected coordinates:
//   lower = zx / ez
//   upper = 2 zx / (2 ez - (1 - c1) ee)   when that denominator is positive,
//           +infinity otherwise,
// and empty when 2 ez <= (1 - c2) ee. Requires ez > 0, else InvalidState.
struct WolfeInterval {
  bool feasible = false;
  Real lower;
  std::optional<Real> upper;  // absent = unbounded above

  bool contains(const Real& alpha) const;
};

WolfeInterval wolfe_interval(const ScalarState& s, const LineSearchParams& params);

// Keeps an accepted step off the kink hyperplane: if x + alpha p lands on it
// exactly, nudges alpha by factors (1 +/- 2^-j) while staying inside the
// acceptable interval. A no-op in the generic case.
Real assumption_guard(const PwlObjective& obj, const Vector& x, const Vector& p,
                      Real alpha, const WolfeInterval& interval);

// Step strictly inside the interval: uniform for a bounded interval, and
// lower * (1 + Exp(1)) when unbounded above.
Real oracle_sample(const WolfeInterval& interval, Rng& rng,
                   const PrecisionContext& ctx);

}  // namespace pwlbfgs

#endif
