#include "pwlbfgs/solver.hpp"

namespace pwlbfgs {

const char* to_string(TerminationCause cause) {
  switch (cause) {
    case TerminationCause::unbounded_direction: return "unbounded_direction";
    case TerminationCause::trial_cap_exceeded: return "trial_cap_exceeded";
    case TerminationCause::replay_exhausted: return "replay_exhausted";
  }
  return "?";
}

Vector direction(const SymMatrix& H, const Vector& g) {
  return -matvec(H, g);
}

SymMatrix update_H(const SymMatrix& H, const Vector& s, const Vector& y) {
  const int n = H.size();
  if (s.size() != n || y.size() != n) {
    throw DimensionMismatch("update_H: dimension mismatch");
  }
  const Real sy = s.dot(y);
  if (!(sy.sign() > 0)) {
    throw CurvatureViolation("update_H: s^T y = " + sy.to_decimal(20) +
                             " is not positive");
  }
  PrecisionContext ctx(H.prec());
  const Real rho = ctx.one() / sy;
  const Vector w = matvec(H, y);
  const Real coef = rho * (ctx.one() + rho * y.dot(w));
  SymMatrix out(n, ctx);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      out.set(i, j, H.at(i, j) - rho * (s[i] * w[j] + w[i] * s[j]) + coef * s[i] * s[j]);
    }
  }
  return out;
}

namespace {

LineSearchOutcome replay_step(const PwlObjective& obj, const Vector& x,
                              const Vector& p, const LineSearchParams& params,
                              const Real& alpha, int k) {
  if (!step_acceptable(obj, x, p, alpha, params)) {
    throw ReplayError("replayed step " + alpha.to_decimal(20) +
                      " rejected at iteration " + std::to_string(k), k);
  }
  LineSearchOutcome out;
  out.accepted = true;
  out.alpha = alpha;
  out.trials = 0;
  return out;
}

}  // namespace

RunRecord run(const PwlObjective& obj, const Vector& x0, const SymMatrix& H0,
              const LineSearchParams& params, const PrecisionContext& ctx,
              const RunOptions& options) {
  params.validate();
  if (obj.prec() != ctx.bits() || x0.prec() != ctx.bits() || H0.prec() != ctx.bits()) {
    throw PrecisionError("run: inputs disagree with the context");
  }
  if (x0.size() != obj.dim() || H0.size() != obj.dim()) {
    throw DimensionMismatch("run: dimension mismatch");
  }
  if (obj.kink_argument(x0).is_zero()) {
    throw NondifferentiablePoint("run: x0 sits on the kink");
  }
  if (options.check_spd) {
    SpdVerdict v = spd_check(H0);
    if (!v) {
      throw std::invalid_argument("run: H0 is not positive definite (pivot " +
                                  std::to_string(v.first_bad_pivot) + ")");
    }
  }

  RunRecord rec;
  rec.config.n = obj.dim();
  rec.config.c1 = params.c1;
  rec.config.c2 = params.c2;
  rec.config.precision_bits = ctx.bits();
  rec.config.mode = options.mode;
  rec.config.max_ls_trials = params.max_trials;
  rec.config.degenerate = params.degenerate();
  rec.config.objective = obj.kind();
  rec.max_shadow_dev = ctx.zero();
  rec.spd_verified = options.check_spd;

  const Real band = tolerance_band(ctx);
  SolverState st{0, x0, H0, obj.eval(x0), obj.grad(x0)};
  std::optional<ScalarState> shadow;

  for (int k = 0; k <= options.iteration_cap; ++k) {
    st.k = k;
    st.g = obj.grad(st.x);
    st.f_val = obj.eval(st.x);
    ScalarState direct = scalar_state_at(obj, st.x, st.H, k);
    if (!shadow) shadow = direct;

    IterationRow row;
    row.k = k;
    row.f = st.f_val;
    row.x1 = obj.kink_argument(st.x);
    row.direct = direct;
    row.shadow = *shadow;
    row.shadow_dev = state_deviation(direct, *shadow);
    if (row.shadow_dev > rec.max_shadow_dev) rec.max_shadow_dev = row.shadow_dev;
    if (options.shadow_abort && !within_band(ctx.zero(), row.shadow_dev, band)) {
      throw ShadowDivergence("iteration " + std::to_string(k) +
                             ": tracker deviates by " + row.shadow_dev.to_decimal(8));
    }

    Vector p = direction(st.H, st.g);
    if (options.record.keep_vectors) {
      row.x = st.x;
      row.p = p;
      row.g = st.g;
    }
    if (options.record.keep_matrices) row.H = st.H;

    LineSearchOutcome ls;
    if (options.replay_steps) {
      const auto& steps = *options.replay_steps;
      if (k < static_cast<int>(steps.size())) {
        ls = replay_step(obj, st.x, p, params, steps[k], k);
      } else if (analytic_infeasible(obj, st.x, p, params.c2)) {
        ls.accepted = false;
        ls.cause = FailureCause::unbounded_direction;
      } else {
        // out of injected steps at a state that could still continue
        row.derived = derived_unchecked(direct, std::nullopt);
        rec.rows.push_back(std::move(row));
        rec.cause = TerminationCause::replay_exhausted;
        rec.termination_index = k;
        return rec;
      }
    } else {
      ls = bracketing_search(obj, st.x, p, params, options.mode);
    }

    if (!ls.accepted) {
      row.trials = ls.trials;
      row.derived = derived_unchecked(direct, std::nullopt);
      rec.rows.push_back(std::move(row));
      rec.cause = ls.cause == FailureCause::unbounded_direction
                      ? TerminationCause::unbounded_direction
                      : TerminationCause::trial_cap_exceeded;
      rec.termination_index = k;
      return rec;
    }

    Real alpha = *ls.alpha;
    row.alpha = alpha;
    row.trials = ls.trials;
    row.derived = derived_unchecked(direct, alpha);
    rec.rows.push_back(std::move(row));

    Vector xn = st.x + alpha * p;
    if (obj.kink_argument(xn).is_zero()) {
      if (!options.guard_enabled) {
        throw NondifferentiablePoint("iterate " + std::to_string(k + 1) +
                                     " landed on the kink with the guard disabled");
      }
      // Accepted steps cross the kink strictly, so this is unreachable; the
      // guard inside the line search already nudged the step.
      throw std::logic_error("accepted step landed on the kink");
    }
    Vector s = alpha * p;
    Vector y = obj.grad(xn) - st.g;
    st.H = update_H(st.H, s, y);
    if (options.check_spd) {
      SpdVerdict v = spd_check(st.H);
      if (!v) {
        rec.spd_verified = false;
        throw std::runtime_error("H lost positive definiteness at iteration " +
                                 std::to_string(k + 1) + " (pivot " +
                                 std::to_string(v.first_bad_pivot) + ")");
      }
    }
    shadow = advance(*shadow, alpha);
    st.x = std::move(xn);
  }
  throw IterationCapExceeded("no termination within " +
                             std::to_string(options.iteration_cap) + " iterations");
}

}  // namespace pwlbfgs
