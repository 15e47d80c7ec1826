#ifndef PWLBFGS_REFLECTION_HPP
#define PWLBFGS_REFLECTION_HPP

#include <optional>
#include <utility>

#include "pwlbfgs/objective.hpp"

namespace pwlbfgs {

// A state precondition required by the closed-form recursions was violated
// (the eta-zeta inner product is not positive).
class InvalidState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Compact state of one iterate under the reflected inner product
// <u,v> = u^T H~ v: the three products among the all-ones vector eta and the
// first unit vector zeta, their Gram determinant D, and the first reflected
// iterate coordinate zx.
struct ScalarState {
  Real ee;  // <eta, eta>
  Real ez;  // <eta, zeta>
  Real zz;  // <zeta, zeta>
  Real D;   // ee*zz - ez^2
  Real zx;  // zeta . x~
  int k = 0;
};

struct DerivedQuantities {
  std::optional<Real> delta;       // 1 - ee / (2 ez)
  std::optional<Real> alpha_star;  // (D / ez^2) / delta, threshold step
  std::optional<Real> a;           // alpha / alpha_star, normalized step
  std::optional<Real> psi;         // ez * zx / D
  std::optional<Real> gamma;       // zx / ez, kink crossing parameter
};

// Reflects with diag(-1,1,...,1) applied k times: flips the first coordinate
// of x (and the first row/column sign pattern of H) when k is odd.
std::pair<Vector, SymMatrix> reflect(const Vector& x, const SymMatrix& H, int k);

// State from explicitly reflected inputs.
ScalarState scalar_state(const Vector& x_refl, const SymMatrix& H_refl, int k);

// Same state computed without forming reflected copies, valid for every
// objective kind: with g = grad(x), z = the kink normal, s = sign of the
// kink argument,
//   ee = g^T H g,  ez = s * g^T H z,  zz = z^T H z,  zx = |kink argument|.
ScalarState scalar_state_at(const PwlObjective& obj, const Vector& x,
                            const SymMatrix& H, int k);

// One closed-form step of the tracked state under an accepted step size:
//   ee' = (D/ez^2) ee + (alpha/2) (ee - 2 ez)^2 / ez
//   ez' = alpha (ez - ee/2)
//   zz' = (alpha/2) ez
//   zx' = -zx + alpha ez
//   D'  = (alpha/2) (ee/ez) D
// The Gram identity D' = ee' zz' - ez'^2 is re-verified to the context band.
ScalarState advance(const ScalarState& s, const Real& alpha);

// Derived quantities; alpha_star and a are absent when delta is zero.
// Requires ez > 0.
DerivedQuantities derived(const ScalarState& s, const std::optional<Real>& alpha);

// Division-guarded variant used for reporting on arbitrary states, including
// the final infeasible one: each field is present iff its denominators are
// nonzero. No positivity contract.
DerivedQuantities derived_unchecked(const ScalarState& s,
                                    const std::optional<Real>& alpha);

// Largest relative deviation across the five components.
Real state_deviation(const ScalarState& a, const ScalarState& b);

}  // namespace pwlbfgs

#endif
