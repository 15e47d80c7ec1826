#include "pwlbfgs/linesearch.hpp"

#include <cmath>

namespace pwlbfgs {

LineSearchParams LineSearchParams::standard(const PrecisionContext& ctx) {
  LineSearchParams p{ctx.real("1e-4"), ctx.real(1L) / 2, 1000, ctx.one(), false};
  return p;
}

LineSearchParams LineSearchParams::custom(const PrecisionContext& ctx,
                                          const std::string& c1, const std::string& c2,
                                          bool allow_degenerate) {
  LineSearchParams p{ctx.real(c1), ctx.real(c2), 1000, ctx.one(), allow_degenerate};
  p.validate();
  return p;
}

bool LineSearchParams::degenerate() const {
  PrecisionContext ctx(c1.prec());
  return c1.is_zero() || c2 == ctx.one();
}

void LineSearchParams::validate() const {
  PrecisionContext ctx(c1.prec());
  if (c2.prec() != c1.prec()) throw PrecisionError("line search params mix contexts");
  if (c1.sign() < 0 || c2 > ctx.one() || !(c1 < c2)) {
    throw std::invalid_argument("line search requires 0 <= c1 < c2 <= 1");
  }
  if (degenerate() && !allow_degenerate) {
    throw std::invalid_argument(
        "degenerate parameters (c1 = 0 or c2 = 1) need the explicit override");
  }
  if (max_trials < 1) throw std::invalid_argument("max_trials must be positive");
  if (!(initial_step.sign() > 0)) {
    throw std::invalid_argument("initial_step must be positive");
  }
}

bool analytic_infeasible(const PwlObjective& obj, const Vector& x, const Vector& p,
                         const Real& c2) {
  RayGeometry ray = ray_geometry(obj, x, p);
  if (!(ray.g0.sign() < 0)) throw NotDescent("not a descent direction");
  return ray.slope_inf <= c2 * ray.g0;
}

namespace {

enum class TrialVerdict { armijo_fail, curvature_fail, accept };

TrialVerdict classify_trial(const PwlObjective& obj, const Vector& x, const Vector& p,
                            const Real& fx, const Real& g0, const Real& alpha,
                            const LineSearchParams& params) {
  Vector xn = x + alpha * p;
  if (!(obj.eval(xn) <= fx + params.c1 * alpha * g0)) {
    return TrialVerdict::armijo_fail;
  }
  // On the kink the gradient does not exist; the crossing has not strictly
  // happened yet, so treat it as the curvature side and move on.
  if (obj.kink_argument(xn).is_zero()) return TrialVerdict::curvature_fail;
  if (!(obj.grad(xn).dot(p) > params.c2 * g0)) return TrialVerdict::curvature_fail;
  return TrialVerdict::accept;
}

}  // namespace

LineSearchOutcome bracketing_search(const PwlObjective& obj, const Vector& x,
                                    const Vector& p, const LineSearchParams& params,
                                    LsMode mode) {
  params.validate();
  const Real fx = obj.eval(x);
  const Real g0 = obj.grad(x).dot(p);
  if (!(g0.sign() < 0)) throw NotDescent("not a descent direction");

  LineSearchOutcome out;
  if (mode == LsMode::analytic && analytic_infeasible(obj, x, p, params.c2)) {
    out.accepted = false;
    out.cause = FailureCause::unbounded_direction;
    return out;
  }

  PrecisionContext ctx(obj.prec());
  Real lower = ctx.zero();
  std::optional<Real> upper;
  Real alpha = params.initial_step;
  for (int t = 1; t <= params.max_trials; ++t) {
    out.trials = t;
    switch (classify_trial(obj, x, p, fx, g0, alpha, params)) {
      case TrialVerdict::armijo_fail:
        upper = alpha;
        alpha = (lower + *upper) / 2;
        break;
      case TrialVerdict::curvature_fail:
        lower = alpha;
        alpha = upper ? (lower + *upper) / 2 : alpha * 2;
        break;
      case TrialVerdict::accept: {
        WolfeInterval bracket{true, lower, upper};
        out.alpha = assumption_guard(obj, x, p, alpha, bracket);
        out.accepted = true;
        return out;
      }
    }
  }
  out.accepted = false;
  out.cause = FailureCause::trial_cap_exceeded;
  return out;
}

bool step_acceptable(const PwlObjective& obj, const Vector& x, const Vector& p,
                     const Real& alpha, const LineSearchParams& params) {
  if (!(alpha.sign() > 0)) return false;
  const Real fx = obj.eval(x);
  const Real g0 = obj.grad(x).dot(p);
  if (!(g0.sign() < 0)) return false;
  return classify_trial(obj, x, p, fx, g0, alpha, params) == TrialVerdict::accept;
}

bool WolfeInterval::contains(const Real& alpha) const {
  if (!feasible) return false;
  if (!(alpha > lower)) return false;
  return !upper || alpha < *upper;
}

WolfeInterval wolfe_interval(const ScalarState& s, const LineSearchParams& params) {
  if (!(s.ez.sign() > 0)) {
    throw InvalidState("wolfe_interval: <eta,zeta> not positive, no further step exists");
  }
  PrecisionContext ctx(s.ez.prec());
  WolfeInterval w;
  const Real two_ez = s.ez * 2;
  // Curvature-side feasibility of the state, with equality counted out.
  if (!(two_ez > (ctx.one() - params.c2) * s.ee)) {
    w.feasible = false;
    w.lower = ctx.zero();
    return w;
  }
  w.feasible = true;
  w.lower = s.zx / s.ez;
  const Real denom = two_ez - (ctx.one() - params.c1) * s.ee;
  if (denom.sign() > 0) w.upper = (s.zx * 2) / denom;
  return w;
}

Real assumption_guard(const PwlObjective& obj, const Vector& x, const Vector& p,
                      Real alpha, const WolfeInterval& interval) {
  if (!obj.kink_argument(x + alpha * p).is_zero()) return alpha;
  PrecisionContext ctx(alpha.prec());
  for (long j = 1; j < ctx.bits() + 8; ++j) {
    Real eps(ctx.bits());
    mpfr_set_ui_2exp(eps.raw(), 1, -j, MPFR_RNDN);  // 2^-j, exact
    for (const Real& candidate : {alpha * (ctx.one() + eps), alpha * (ctx.one() - eps)}) {
      if (!interval.contains(candidate)) continue;
      if (!obj.kink_argument(x + candidate * p).is_zero()) return candidate;
    }
  }
  // The acceptable set is open, so a perturbation always exists.
  throw std::logic_error("assumption_guard: no off-kink step found in an open interval");
}

Real oracle_sample(const WolfeInterval& interval, Rng& rng, const PrecisionContext& ctx) {
  if (!interval.feasible) throw EmptyInterval("oracle_sample: empty interval");
  if (interval.upper) {
    Real u = ctx.real(rng.uniform_open01());
    return interval.lower + u * (*interval.upper - interval.lower);
  }
  // lower * (1 + Exp(1)); for a zero lower bound fall back to Exp(1) itself.
  Real excess = -log(ctx.real(rng.uniform_open01()));
  if (interval.lower.is_zero()) return excess;
  return interval.lower * (ctx.one() + excess);
}

}  // namespace pwlbfgs
