#include "pwlbfgs/objective.hpp"

namespace pwlbfgs {

PwlObjective PwlObjective::canonical(int n, const PrecisionContext& ctx) {
  if (n < 2) throw DimensionMismatch("canonical objective needs n >= 2");
  return PwlObjective(ObjectiveKind::canonical, n, ctx.bits());
}

PwlObjective PwlObjective::beta_family(int n, Real beta, const PrecisionContext& ctx) {
  if (n < 1) throw DimensionMismatch("beta objective needs n >= 1");
  if (beta.prec() != ctx.bits()) throw PrecisionError("beta outside the run context");
  PwlObjective o(ObjectiveKind::beta, n, ctx.bits());
  o.beta_ = std::move(beta);
  return o;
}

long PwlObjective::prec() const { return prec_; }

const Vector& PwlObjective::v1() const { return *v1_; }
const Vector& PwlObjective::v2() const { return *v2_; }
const Real& PwlObjective::beta() const { return *beta_; }

Real PwlObjective::kink_argument(const Vector& x) const {
  if (x.size() != n_) throw DimensionMismatch("kink_argument: dimension mismatch");
  if (kind_ == ObjectiveKind::general) return v1_->dot(x);
  return x[0];
}

Real PwlObjective::eval(const Vector& x) const {
  if (x.size() != n_) throw DimensionMismatch("eval: dimension mismatch");
  switch (kind_) {
    case ObjectiveKind::canonical: {
      Real acc = abs(x[0]);
      for (int i = 1; i < n_; ++i) acc += x[i];
      return acc;
    }
    case ObjectiveKind::general:
      return abs(v1_->dot(x)) + v2_->dot(x);
    case ObjectiveKind::beta:
      return abs(x[0]) + *beta_ * x[0];
  }
  throw std::logic_error("unreachable");
}

Vector PwlObjective::grad(const Vector& x) const {
  if (x.size() != n_) throw DimensionMismatch("grad: dimension mismatch");
  const Real arg = kink_argument(x);
  const int s = arg.sign();
  if (s == 0) throw NondifferentiablePoint("gradient undefined on the kink");
  PrecisionContext ctx(prec_);
  switch (kind_) {
    case ObjectiveKind::canonical: {
      Vector g(n_, ctx);
      g[0] = ctx.real(static_cast<long>(s));
      for (int i = 1; i < n_; ++i) g[i] = ctx.one();
      return g;
    }
    case ObjectiveKind::general: {
      // sign(v1.x) * v1 + v2
      std::vector<Real> out;
      out.reserve(n_);
      for (int i = 0; i < n_; ++i) {
        out.push_back(s > 0 ? (*v1_)[i] + (*v2_)[i] : (*v2_)[i] - (*v1_)[i]);
      }
      return Vector(std::move(out));
    }
    case ObjectiveKind::beta: {
      Vector g(n_, ctx);
      g[0] = ctx.real(static_cast<long>(s)) + *beta_;
      return g;
    }
  }
  throw std::logic_error("unreachable");
}

PwlObjective make_general(const Vector& v1, const Vector& v2) {
  if (v1.size() != v2.size()) throw DimensionMismatch("make_general: length mismatch");
  const int n = v1.size();
  if (n < 2) throw DimensionMismatch("make_general: n must be >= 2");
  PrecisionContext ctx(v1.prec());
  if (v2.prec() != v1.prec()) throw PrecisionError("make_general: mixed contexts");

  bool v1_zero = true, v2_zero = true;
  for (int i = 0; i < n; ++i) {
    if (!v1[i].is_zero()) v1_zero = false;
    if (!v2[i].is_zero()) v2_zero = false;
  }
  if (v1_zero || v2_zero) throw std::invalid_argument("make_general: zero vector");

  // All 2x2 minors of the stacked pair vanish exactly iff v2 is a multiple
  // of v1. Inputs are exact fixtures, so the zero threshold is exact zero.
  bool dependent = true;
  for (int i = 0; i < n && dependent; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Real minor = v1[i] * v2[j] - v1[j] * v2[i];
      if (!minor.is_zero()) {
        dependent = false;
        break;
      }
    }
  }
  if (dependent) {
    for (int i = 0; i < n; ++i) {
      if (!v1[i].is_zero()) {
        throw LinearlyDependent("make_general: v2 parallel to v1", v2[i] / v1[i]);
      }
    }
  }

  PwlObjective o(ObjectiveKind::general, n, ctx.bits());
  o.v1_ = v1;
  o.v2_ = v2;
  return o;
}

RayGeometry ray_geometry(const PwlObjective& obj, const Vector& x, const Vector& p) {
  const Vector g = obj.grad(x);  // inherits NondifferentiablePoint
  Real g0 = g.dot(p);

  // Far-side slope and kink crossing in terms of the signed kink arguments.
  Real ax = obj.kink_argument(x);
  Real ap = obj.kink_argument(p);
  PrecisionContext ctx(obj.prec());

  Real slope_inf = ctx.zero();
  switch (obj.kind()) {
    case ObjectiveKind::canonical: {
      slope_inf = abs(p[0]);
      for (int i = 1; i < p.size(); ++i) slope_inf += p[i];
      break;
    }
    case ObjectiveKind::general:
      slope_inf = abs(ap) + obj.v2().dot(p);
      break;
    case ObjectiveKind::beta:
      slope_inf = abs(p[0]) + obj.beta() * p[0];
      break;
  }

  std::optional<Real> alpha_kink;
  if (!ap.is_zero()) {
    Real t = -(ax / ap);
    if (t.sign() > 0) alpha_kink = std::move(t);
  }
  return RayGeometry{std::move(g0), std::move(slope_inf), std::move(alpha_kink)};
}

}  // namespace pwlbfgs
