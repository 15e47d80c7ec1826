#ifndef PWLBFGS_OBJECTIVE_HPP
#define PWLBFGS_OBJECTIVE_HPP

#include <optional>

#include "pwlbfgs/linalg.hpp"

namespace pwlbfgs {

// Evaluation point sits exactly on the kink hyperplane, where the gradient
// does not exist. Iterates are required to stay off it.
class NondifferentiablePoint : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// The two defining vectors of a general objective are parallel; carries the
// ratio so the caller can fall back to the one-dimensional beta family.
class LinearlyDependent : public std::invalid_argument {
 public:
  LinearlyDependent(std::string what, Real beta_ratio)
      : std::invalid_argument(std::move(what)), beta(std::move(beta_ratio)) {}
  Real beta;
};

enum class ObjectiveKind { canonical, general, beta };

// Convex piecewise-linear objective with two pieces:
//   canonical: f(x) = |x_1| + sum_{i>=2} x_i
//   general:   g(x) = |v1.x| + v2.x   with v1, v2 linearly independent
//   beta:      g(x) = |x_1| + beta * x_1
class PwlObjective {
 public:
  static PwlObjective canonical(int n, const PrecisionContext& ctx);
  static PwlObjective beta_family(int n, Real beta, const PrecisionContext& ctx);

  ObjectiveKind kind() const { return kind_; }
  int dim() const { return n_; }
  long prec() const;

  Real eval(const Vector& x) const;

  // Region-constant gradient; throws NondifferentiablePoint when the
  // absolute-value argument is exactly zero.
  Vector grad(const Vector& x) const;

  // Signed argument of the absolute value: x_1, v1.x, or x_1.
  Real kink_argument(const Vector& x) const;

  const Vector& v1() const;
  const Vector& v2() const;
  const Real& beta() const;

  friend PwlObjective make_general(const Vector& v1, const Vector& v2);

 private:
  PwlObjective(ObjectiveKind kind, int n, long prec)
      : kind_(kind), n_(n), prec_(prec) {}

  ObjectiveKind kind_;
  int n_;
  long prec_;
  std::optional<Vector> v1_, v2_;
  std::optional<Real> beta_;
};

// General objective from a nonzero, linearly independent pair. Independence
// is decided exactly at working precision by the 2x2 minors of the stacked
// pair; a parallel pair raises LinearlyDependent with the ratio beta.
PwlObjective make_general(const Vector& v1, const Vector& v2);

// Geometry of the restriction t -> f(x + t p), which is affine with slope g0
// up to the kink crossing (if the ray crosses at all) and affine with slope
// slope_inf beyond it.
struct RayGeometry {
  Real g0;                        // directional derivative at t = 0
  Real slope_inf;                 // directional derivative past the kink
  std::optional<Real> alpha_kink; // positive crossing parameter, if any
};

RayGeometry ray_geometry(const PwlObjective& obj, const Vector& x, const Vector& p);

}  // namespace pwlbfgs

#endif
