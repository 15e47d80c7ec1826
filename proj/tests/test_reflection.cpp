#include <cmath>
#include "doctest.h"
#include "pwlbfgs/linesearch.hpp"
#include "pwlbfgs/random.hpp"
#include "pwlbfgs/reflection.hpp"

using namespace pwlbfgs;

namespace {

const PrecisionContext& ctx() {
  static PrecisionContext c = make_context(1664);
  return c;
}

Vector vec(std::initializer_list<const char*> entries) {
  std::vector<Real> out;
  for (const char* e : entries) out.push_back(ctx().real(e));
  return Vector(std::move(out));
}

ScalarState state(const char* ee, const char* ez, const char* zz, const char* D,
                  const char* zx, int k = 0) {
  return ScalarState{ctx().real(ee), ctx().real(ez), ctx().real(zz), ctx().real(D),
                     ctx().real(zx), k};
}

SymMatrix example_H0() {
  const char* entries[3][3] = {
      {"2.9778", "-0.614829", "-0.764638"},
      {"-0.614829", "0.93846", "-0.699262"},
      {"-0.764638", "-0.699262", "1.11173"}};
  SymMatrix H(3, ctx());
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) H.set(i, j, ctx().real(entries[i][j]));
  }
  return H;
}

}  // namespace

TEST_CASE("reflection flips the first coordinate on odd counts only") {
  Vector x = vec({"-2", "3"});
  SymMatrix H(2, ctx());
  H.set(0, 0, ctx().one());
  H.set(0, 1, ctx().real(2L));
  H.set(1, 1, ctx().real(5L));

  auto [x_even, H_even] = reflect(x, H, 4);
  CHECK(x_even[0] == x[0]);
  CHECK(H_even.at(0, 1) == H.at(0, 1));

  auto [x_odd, H_odd] = reflect(x, H, 1);
  CHECK(x_odd[0] == ctx().real(2L));
  CHECK(x_odd[1] == ctx().real(3L));
  CHECK(H_odd.at(0, 0) == ctx().one());
  CHECK(H_odd.at(0, 1) == ctx().real(-2L));
  CHECK(H_odd.at(1, 1) == ctx().real(5L));
}

TEST_CASE("scalar state from identity forms") {
  SymMatrix I3 = SymMatrix::identity(3, ctx());
  ScalarState s = scalar_state(vec({"2", "7", "-1"}), I3, 0);
  CHECK(s.ee == ctx().real(3L));
  CHECK(s.ez == ctx().one());
  CHECK(s.zz == ctx().one());
  CHECK(s.D == ctx().real(2L));
  CHECK(s.zx == ctx().real(2L));

  SymMatrix I2 = SymMatrix::identity(2, ctx());
  CHECK(scalar_state(vec({"1", "0"}), I2, 0).D == ctx().one());
}

TEST_CASE("gradient-form state agrees with explicit reflection on both sides") {
  PwlObjective f = PwlObjective::canonical(3, ctx());
  SymMatrix H = example_H0();

  // positive side: no reflection needed
  Vector xp = vec({"1.24613", "0.974014", "-2.07329"});
  ScalarState a = scalar_state_at(f, xp, H, 0);
  ScalarState b = scalar_state(xp, H, 0);
  CHECK(state_deviation(a, b).is_zero());

  // negative side: one reflection brings the iterate back
  Vector xm = vec({"-1.24613", "0.974014", "-2.07329"});
  auto [xr, Hr] = reflect(xm, H, 1);
  ScalarState c = scalar_state_at(f, xm, H, 1);
  ScalarState d = scalar_state(xr, Hr, 1);
  CHECK(state_deviation(c, d) <= tolerance_band(ctx()));
}

TEST_CASE("objective value is invariant under reflection") {
  PwlObjective f = PwlObjective::canonical(3, ctx());
  SymMatrix H = example_H0();
  for (const char* first : {"0.75", "-0.75"}) {
    Vector x = vec({first, "2", "-3.5"});
    auto [xr, Hr] = reflect(x, H, 1);
    // eta . x~ equals the objective at the unreflected iterate
    Real eta_dot = xr[0] + xr[1] + xr[2];
    if (x[0].sign() < 0) {
      CHECK(eta_dot == f.eval(x));
    } else {
      CHECK(f.eval(xr) == f.eval(x));
    }
  }
}

TEST_CASE("example initialization state matches the direct quadratic forms") {
  PwlObjective f = PwlObjective::canonical(3, ctx());
  ScalarState s =
      scalar_state_at(f, vec({"1.24613", "0.974014", "-2.07329"}), example_H0(), 0);
  Real close = ctx().real("1e-480");
  CHECK(abs(s.ee - ctx().real("0.870532")) < close);
  CHECK(abs(s.ez - ctx().real("1.598333")) < close);
  CHECK(abs(s.zz - ctx().real("2.9778")) < close);
  CHECK(abs(s.D - ctx().real("0.037601810711")) < close);
  CHECK(abs(s.zx - ctx().real("1.24613")) < close);
}

TEST_CASE("closed-form advance on exact fixtures") {
  ScalarState s = state("3", "1", "1", "2", "0.3");
  ScalarState n = advance(s, ctx().one());
  CHECK(n.ee == ctx().real("6.5"));
  CHECK(n.ez == ctx().real("-0.5"));
  CHECK(n.zz == ctx().real("0.5"));
  CHECK(n.zx == ctx().real("0.7"));
  CHECK(n.D == ctx().real(3L));
  CHECK(n.k == 1);

  // boundary: ez' lands exactly on zero, the no-continuation signal
  ScalarState z = advance(state("2", "1", "1", "1", "1"), ctx().real(2L));
  CHECK(z.ez.is_zero());
  CHECK_THROWS_AS(advance(z, ctx().one()), InvalidState);
  CHECK_THROWS_AS(advance(s, ctx().zero()), InvalidState);
}

TEST_CASE("derived quantities on exact fixtures") {
  ScalarState s = state("1", "1", "2", "1", "1");
  DerivedQuantities d = derived(s, ctx().real(3L));
  CHECK(*d.delta == ctx().one() / 2);
  CHECK(*d.psi == ctx().one());
  CHECK(*d.gamma == ctx().one());
  CHECK(*d.alpha_star == ctx().real(2L));
  CHECK(*d.a == ctx().real(3L) / 2);

  // delta = 0 leaves the threshold step undefined
  DerivedQuantities dz = derived(state("2", "1", "1", "1", "1"), std::nullopt);
  CHECK(*dz.delta == ctx().zero());
  CHECK_FALSE(dz.alpha_star.has_value());
  CHECK_FALSE(dz.a.has_value());

  ScalarState bad = state("1", "-1", "2", "1", "1");
  CHECK_THROWS_AS(derived(bad, std::nullopt), InvalidState);
  CHECK(derived_unchecked(bad, std::nullopt).delta.has_value());
}

TEST_CASE("advance keeps the Gram identity and the sign structure") {
  Rng rng(5150);
  LineSearchParams params = LineSearchParams::standard(ctx());
  int tested = 0;
  for (int trial = 0; trial < 200 && tested < 40; ++trial) {
    // random state with D > 0 and ez > 0
    double ee = 0.1 + 3.0 * rng.uniform01();
    double zz = 0.1 + 3.0 * rng.uniform01();
    double ez = (0.05 + 0.9 * rng.uniform01()) * std::sqrt(ee * zz);
    double zx = 0.05 + 2.0 * rng.uniform01();
    ScalarState s{ctx().real(ee), ctx().real(ez), ctx().real(zz), ctx().zero(),
                  ctx().real(zx), 0};
    s.D = s.ee * s.zz - s.ez * s.ez;
    WolfeInterval w = wolfe_interval(s, params);
    if (!w.feasible) continue;
    Real alpha = oracle_sample(w, rng, ctx());
    ScalarState n = advance(s, alpha);
    ++tested;
    CHECK(within_band(n.D, n.ee * n.zz - n.ez * n.ez, tolerance_band(ctx())));
    CHECK(n.D.sign() > 0);
    CHECK(n.zx.sign() > 0);  // alpha above the crossing parameter
    CHECK(n.zz.sign() > 0);
  }
  CHECK(tested >= 20);
}
