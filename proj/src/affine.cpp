#include "pwlbfgs/affine.hpp"

namespace pwlbfgs {

std::vector<Vector> extend_basis(const Vector& v1, const Vector& v2, Rng& rng) {
  const int n = v1.size();
  PrecisionContext ctx(v1.prec());
  std::vector<Vector> basis{v1, v2};
  if (exact_rank(basis) != 2) {
    throw std::invalid_argument("extend_basis: inputs are not independent");
  }
  int attempts = 0;
  while (static_cast<int>(basis.size()) < n) {
    Vector candidate(n, ctx);
    for (int i = 0; i < n; ++i) candidate[i] = ctx.real(rng.normal());
    basis.push_back(candidate);
    if (exact_rank(basis) != static_cast<int>(basis.size())) {
      basis.pop_back();
      if (++attempts > 64 * n) {
        throw std::runtime_error("extend_basis: rank refuses to grow");
      }
    }
  }
  return std::vector<Vector>(basis.begin() + 2, basis.end());
}

AffineReduction build_transform(const std::vector<Vector>& basis) {
  const int n = static_cast<int>(basis.size());
  if (n < 2 || basis[0].size() != n) {
    throw DimensionMismatch("build_transform: need a full basis");
  }
  if (exact_rank(basis) != n) {
    throw std::invalid_argument("build_transform: rank-deficient input");
  }
  PrecisionContext ctx(basis[0].prec());
  Matrix A(n, ctx);
  for (int j = 0; j < n; ++j) A.set(0, j, basis[0][j]);
  for (int i = 1; i + 1 < n; ++i) {
    for (int j = 0; j < n; ++j) A.set(i, j, basis[i][j] - basis[i + 1][j]);
  }
  for (int j = 0; j < n; ++j) A.set(n - 1, j, basis[n - 1][j]);

  std::vector<Vector> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) rows.push_back(A.row(i));
  if (exact_rank(rows) != n) {
    throw std::invalid_argument("build_transform: assembled transform not invertible");
  }

  // The row telescope collapses to v2, so f(A x) = |v1.x| + v2.x; spot-check
  // the identity on unit directions and a fixed pseudo-random point set.
  PwlObjective f = PwlObjective::canonical(n, ctx);
  Rng probe(0x9d2c5680u ^ static_cast<std::uint64_t>(n));
  for (int trial = 0; trial < n + 8; ++trial) {
    Vector x(n, ctx);
    if (trial < n) {
      x[trial] = ctx.one();
    } else {
      for (int i = 0; i < n; ++i) x[i] = ctx.real(probe.normal());
    }
    Real lhs = f.eval(matvec(A, x));
    Real rhs = abs(basis[0].dot(x)) + basis[1].dot(x);
    if (!within_band(lhs, rhs, tolerance_band(ctx))) {
      throw std::logic_error("build_transform: f(Ax) != g(x) at a sample point");
    }
  }
  return AffineReduction{std::move(A), basis};
}

EquivalenceVerdict equivalence_check(const PwlObjective& g_obj, const Vector& x0,
                                     const SymMatrix& H0,
                                     const LineSearchParams& params,
                                     const PrecisionContext& ctx, Rng& rng) {
  if (g_obj.kind() != ObjectiveKind::general) {
    throw std::invalid_argument("equivalence_check: needs a general objective");
  }
  EquivalenceVerdict verdict;
  verdict.max_deviation = ctx.zero();
  const int n = g_obj.dim();
  const Real band = tolerance_band(ctx);

  std::vector<Vector> basis{g_obj.v1(), g_obj.v2()};
  for (Vector& v : extend_basis(g_obj.v1(), g_obj.v2(), rng)) {
    basis.push_back(std::move(v));
  }
  AffineReduction red = build_transform(basis);

  RunOptions opts;
  opts.record.keep_vectors = true;
  opts.record.keep_matrices = true;

  RunRecord direct = run(g_obj, x0, H0, params, ctx, opts);
  verdict.termination_g = direct.termination_index;

  std::vector<Real> steps;
  for (const IterationRow& r : direct.rows) {
    if (r.alpha) steps.push_back(*r.alpha);
  }

  PwlObjective f_obj = PwlObjective::canonical(n, ctx);
  Vector y0 = matvec(red.A, x0);
  SymMatrix G0 = congruence(red.A, H0);
  RunOptions replay_opts = opts;
  replay_opts.replay_steps = &steps;

  RunRecord transported;
  try {
    transported = run(f_obj, y0, G0, params, ctx, replay_opts);
  } catch (const ReplayError& e) {
    verdict.ok = false;
    verdict.first_divergence_k = e.k;
    verdict.detail = e.what();
    return verdict;
  }
  verdict.termination_f = transported.termination_index;

  if (transported.cause != direct.cause ||
      transported.termination_index != direct.termination_index) {
    verdict.ok = false;
    verdict.first_divergence_k = std::min(direct.termination_index,
                                          transported.termination_index);
    verdict.detail = std::string("termination mismatch: direct ") +
                     to_string(direct.cause) + " at " +
                     std::to_string(direct.termination_index) + ", transported " +
                     to_string(transported.cause) + " at " +
                     std::to_string(transported.termination_index);
    return verdict;
  }

  for (size_t k = 0; k < direct.rows.size(); ++k) {
    const IterationRow& rg = direct.rows[k];
    const IterationRow& rf = transported.rows[k];
    Real dev = ctx.zero();
    Vector Ax = matvec(red.A, *rg.x);
    for (int i = 0; i < n; ++i) {
      Real d = relative_deviation((*rf.x)[i], Ax[i]);
      if (d > dev) dev = d;
    }
    SymMatrix AHA = congruence(red.A, *rg.H);
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        Real d = relative_deviation(rf.H->at(i, j), AHA.at(i, j));
        if (d > dev) dev = d;
      }
    }
    if (dev > verdict.max_deviation) verdict.max_deviation = dev;
    if (!within_band(ctx.zero(), dev, band)) {
      verdict.ok = false;
      verdict.first_divergence_k = static_cast<int>(k);
      verdict.detail = "iterate/matrix transport deviates by " + dev.to_decimal(8) +
                       " at k=" + std::to_string(k);
      return verdict;
    }
    // Acceptable-step transfer: the step accepted for g must be acceptable
    // for the transported canonical run as well.
    if (rg.alpha && !step_acceptable(f_obj, *rf.x, *rf.p, *rg.alpha, params)) {
      verdict.ok = false;
      verdict.first_divergence_k = static_cast<int>(k);
      verdict.detail = "step not acceptable after transport at k=" + std::to_string(k);
      return verdict;
    }
  }
  return verdict;
}

}  // namespace pwlbfgs
