#include "doctest.h"
#include "pwlbfgs/experiments.hpp"
#include "pwlbfgs/solver.hpp"

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

SeededInit example_init(const PrecisionContext& c) {
  return read_init_file(std::string(PWLBFGS_SOURCE_DIR) + "/data/example3d.json", c);
}

}  // namespace

TEST_CASE("search direction") {
  SymMatrix I3 = SymMatrix::identity(3, ctx());
  Vector eta = vec({"1", "1", "1"});
  Vector p = direction(I3, eta);
  for (int i = 0; i < 3; ++i) CHECK(p[i] == ctx().real(-1L));

  SymMatrix D(3, ctx());
  D.set(0, 0, ctx().real(2L));
  D.set(1, 1, ctx().one());
  D.set(2, 2, ctx().one());
  Vector p2 = direction(D, eta);
  CHECK(p2[0] == ctx().real(-2L));
  CHECK(p2[1] == ctx().real(-1L));
  CHECK(p2[2] == ctx().real(-1L));

  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Rng rng(stream_seed(12, seed));
    SymMatrix H = gaussian_matrix(4, rng, ctx());
    Vector g = gaussian_vector(4, rng, ctx());
    CHECK(g.dot(direction(H, g)).sign() < 0);
  }
}

TEST_CASE("rank-two update on projector fixtures") {
  SymMatrix I3 = SymMatrix::identity(3, ctx());
  Vector zeta = vec({"1", "0", "0"});

  SymMatrix same = update_H(I3, zeta, zeta);
  for (int i = 0; i < 3; ++i) {
    for (int j = i; j < 3; ++j) {
      CHECK(same.at(i, j) == I3.at(i, j));
    }
  }

  Vector two_zeta = vec({"2", "0", "0"});
  SymMatrix stretched = update_H(I3, two_zeta, zeta);
  CHECK(stretched.at(0, 0) == ctx().real(2L));
  CHECK(stretched.at(1, 1) == ctx().one());
  CHECK(stretched.at(0, 1).is_zero());

  CHECK_THROWS_AS(update_H(I3, zeta, -zeta), CurvatureViolation);
}

TEST_CASE("rank-two update preserves positive definiteness") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(stream_seed(900, seed));
    const int n = 2 + static_cast<int>(seed % 4);
    SymMatrix H = gaussian_matrix(n, rng, ctx());
    Vector s = gaussian_vector(n, rng, ctx());
    if (s[0].sign() >= 0) s[0] = -s[0] - ctx().one();
    Vector y(n, ctx());
    y[0] = ctx().real(-2L);  // gradient difference after a crossing step
    REQUIRE(s.dot(y).sign() > 0);
    CHECK(spd_check(update_H(H, s, y)).positive_definite);
  }
}

TEST_CASE("example run terminates at iteration 9 and replays exactly") {
  SeededInit init = example_init(ctx());
  PwlObjective f = PwlObjective::canonical(3, ctx());
  LineSearchParams params = LineSearchParams::standard(ctx());
  RunRecord rec = run(f, init.x0, init.H0, params, ctx());

  CHECK(rec.termination_index == 9);
  CHECK(rec.iterations() == 10);
  CHECK(rec.cause == TerminationCause::unbounded_direction);
  CHECK(rec.rows.size() == 10);
  CHECK(rec.spd_verified);
  CHECK(rec.max_shadow_dev <= tolerance_band(ctx()));
  REQUIRE(rec.rows[0].alpha.has_value());
  CHECK(*rec.rows[0].alpha == ctx().one());
  CHECK_FALSE(rec.rows.back().alpha.has_value());

  // replaying the recorded steps reproduces the identical trace
  std::vector<Real> steps;
  for (const IterationRow& r : rec.rows) {
    if (r.alpha) steps.push_back(*r.alpha);
  }
  RunOptions replay;
  replay.replay_steps = &steps;
  RunRecord again = run(f, init.x0, init.H0, params, ctx(), replay);
  CHECK(again.termination_index == rec.termination_index);
  CHECK(again.cause == rec.cause);
  for (size_t k = 0; k < rec.rows.size(); ++k) {
    CHECK(again.rows[k].f == rec.rows[k].f);
    CHECK(again.rows[k].x1 == rec.rows[k].x1);
  }
}

TEST_CASE("example run with degenerate parameters stretches to iteration 10") {
  SeededInit init = example_init(ctx());
  PwlObjective f = PwlObjective::canonical(3, ctx());
  LineSearchParams params = LineSearchParams::custom(ctx(), "0", "1", true);
  RunRecord rec = run(f, init.x0, init.H0, params, ctx());
  CHECK(rec.termination_index == 10);
  CHECK(rec.cause == TerminationCause::unbounded_direction);
}

TEST_CASE("trace structure: descent, alternation, state signs") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);
    SeededInit init = make_seeded_init(n, stream_seed(5001, seed), ctx());
    PwlObjective f = PwlObjective::canonical(n, ctx());
    RunRecord rec = run(f, init.x0, init.H0, LineSearchParams::standard(ctx()), ctx());
    CHECK(rec.cause == TerminationCause::unbounded_direction);
    for (size_t k = 0; k + 1 < rec.rows.size(); ++k) {
      CHECK(rec.rows[k + 1].f < rec.rows[k].f);
      CHECK(rec.rows[k + 1].x1.sign() == -rec.rows[k].x1.sign());
    }
    for (const IterationRow& r : rec.rows) {
      CHECK(r.direct.D.sign() > 0);
      CHECK(r.direct.zx.sign() > 0);
    }
  }
}

TEST_CASE("beta family terminates within two iterations from either side") {
  PwlObjective g = PwlObjective::beta_family(2, ctx().real(2L), ctx());
  SymMatrix I2 = SymMatrix::identity(2, ctx());
  LineSearchParams params = LineSearchParams::standard(ctx());

  RunRecord neg = run(g, vec({"-1", "0"}), I2, params, ctx());
  CHECK(neg.termination_index == 0);
  CHECK(neg.cause == TerminationCause::unbounded_direction);

  RunRecord pos = run(g, vec({"1", "0"}), I2, params, ctx());
  CHECK(pos.termination_index == 1);
  CHECK(pos.cause == TerminationCause::unbounded_direction);
}

TEST_CASE("run preconditions") {
  PwlObjective f = PwlObjective::canonical(2, ctx());
  SymMatrix I2 = SymMatrix::identity(2, ctx());
  LineSearchParams params = LineSearchParams::standard(ctx());
  CHECK_THROWS_AS(run(f, vec({"0", "1"}), I2, params, ctx()), NondifferentiablePoint);

  SymMatrix indef(2, ctx());
  indef.set(0, 0, ctx().one());
  indef.set(1, 1, ctx().real(-1L));
  CHECK_THROWS(run(f, vec({"1", "1"}), indef, params, ctx()));
}

TEST_CASE("iteration cap aborts loudly") {
  SeededInit init = example_init(ctx());
  PwlObjective f = PwlObjective::canonical(3, ctx());
  RunOptions opts;
  opts.iteration_cap = 3;
  CHECK_THROWS_AS(run(f, init.x0, init.H0, LineSearchParams::standard(ctx()), ctx(), opts),
                  IterationCapExceeded);
}

TEST_CASE("emulate-paper mode agrees with the analytic verdict") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    SeededInit init = make_seeded_init(2, stream_seed(606, seed), ctx());
    PwlObjective f = PwlObjective::canonical(2, ctx());
    LineSearchParams params = LineSearchParams::standard(ctx());
    RunRecord analytic = run(f, init.x0, init.H0, params, ctx());
    RunOptions opts;
    opts.mode = LsMode::emulate_paper;
    RunRecord emulated = run(f, init.x0, init.H0, params, ctx(), opts);
    CHECK(analytic.termination_index == emulated.termination_index);
    CHECK(analytic.cause == TerminationCause::unbounded_direction);
    CHECK(emulated.cause == TerminationCause::trial_cap_exceeded);
    CHECK(emulated.rows.back().trials == params.max_trials);
  }
}

TEST_CASE("the default width reproduces a double-width run") {
  PrecisionContext lo = make_context(1664);
  PrecisionContext hi = make_context(3328);
  Real threshold = Real::from_string("0x1p-1600", 3328);

  SeededInit init_lo = make_seeded_init(3, 31337, lo);
  SeededInit init_hi = make_seeded_init(3, 31337, hi);
  RunRecord rec_lo = run(PwlObjective::canonical(3, lo), init_lo.x0, init_lo.H0,
                         LineSearchParams::standard(lo), lo);
  RunRecord rec_hi = run(PwlObjective::canonical(3, hi), init_hi.x0, init_hi.H0,
                         LineSearchParams::standard(hi), hi);
  REQUIRE(rec_lo.termination_index == rec_hi.termination_index);

  auto widen = [&](const Real& v) { return Real::from_string(v.to_hex(), 3328); };
  for (size_t k = 0; k < rec_lo.rows.size(); ++k) {
    const IterationRow& a = rec_lo.rows[k];
    const IterationRow& b = rec_hi.rows[k];
    CHECK(relative_deviation(widen(a.f), b.f) <= threshold);
    CHECK(relative_deviation(widen(a.direct.ee), b.direct.ee) <= threshold);
    CHECK(relative_deviation(widen(a.direct.ez), b.direct.ez) <= threshold);
    CHECK(relative_deviation(widen(a.direct.zx), b.direct.zx) <= threshold);
    if (a.alpha) CHECK(widen(*a.alpha) == *b.alpha);  // dyadic trial schedule
  }
}
