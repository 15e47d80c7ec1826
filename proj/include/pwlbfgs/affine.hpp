#ifndef PWLBFGS_AFFINE_HPP
#define PWLBFGS_AFFINE_HPP

#include "pwlbfgs/solver.hpp"

namespace pwlbfgs {

// Invertible change of variables A with f(A x) = g(x) for a general
// objective g: rows v1^T, v2^T - v3^T, ..., v_{n-1}^T - v_n^T, v_n^T over a
// basis extending {v1, v2}.
struct AffineReduction {
  Matrix A;
  std::vector<Vector> basis;
};

// Completes {v1, v2} to a basis by rejection-sampling random candidates and
// keeping those that raise the rank (decided exactly at working precision).
std::vector<Vector> extend_basis(const Vector& v1, const Vector& v2, Rng& rng);

// Assembles A from a full basis, verifies invertibility, and spot-checks
// f(A x) = |v1.x| + v2.x on a deterministic set of sample points.
AffineReduction build_transform(const std::vector<Vector>& basis);

struct EquivalenceVerdict {
  bool ok = true;
  int first_divergence_k = -1;
  std::string detail;
  Real max_deviation;
  int termination_g = -1;  // failing iteration of the direct run
  int termination_f = -1;  // failing iteration of the transported replay
};

// Runs the solver on the general objective, then replays its accepted step
// sizes on the canonical objective from the transported initialization
// (A x0, A H0 A^T) and verifies that iterates and matrices transport exactly
// (to the context band), that every step is acceptable on both sides, and
// that both runs fail at the same iteration for the same cause.
EquivalenceVerdict equivalence_check(const PwlObjective& g_obj, const Vector& x0,
                                     const SymMatrix& H0,
                                     const LineSearchParams& params,
                                     const PrecisionContext& ctx, Rng& rng);

}  // namespace pwlbfgs

#endif
