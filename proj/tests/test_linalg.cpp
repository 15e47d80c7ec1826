#include "doctest.h"
#include "pwlbfgs/linalg.hpp"
#include "pwlbfgs/random.hpp"

using namespace pwlbfgs;

namespace {

const PrecisionContext& ctx() {
  static PrecisionContext c = make_context(1664);
  return c;
}

Vector ones(int n) {
  Vector v(n, ctx());
  for (int i = 0; i < n; ++i) v[i] = ctx().one();
  return v;
}

Vector unit(int n, int i) {
  Vector v(n, ctx());
  v[i] = ctx().one();
  return v;
}

// The printed 3x3 example initialization used across the test suites.
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

TEST_CASE("quadratic form on simple fixtures") {
  SymMatrix I3 = SymMatrix::identity(3, ctx());
  Vector eta = ones(3), zeta = unit(3, 0);
  CHECK(quadratic_form(I3, eta, eta) == ctx().real(3L));
  CHECK(quadratic_form(I3, eta, zeta) == ctx().one());

  SymMatrix D(3, ctx());
  D.set(0, 0, ctx().real(2L));
  D.set(1, 1, ctx().one());
  D.set(2, 2, ctx().one());
  CHECK(quadratic_form(D, eta, zeta) == ctx().real(2L));

  Vector short2(2, ctx());
  CHECK_THROWS_AS(quadratic_form(I3, short2, short2), DimensionMismatch);
}

TEST_CASE("spd verdicts") {
  CHECK(spd_check(SymMatrix::identity(4, ctx())).positive_definite);

  SymMatrix indef(2, ctx());
  indef.set(0, 0, ctx().one());
  indef.set(1, 1, ctx().real(-1L));
  SpdVerdict v = spd_check(indef);
  CHECK_FALSE(v.positive_definite);
  CHECK(v.first_bad_pivot == 2);

  CHECK(spd_check(example_H0()).positive_definite);
}

TEST_CASE("gaussian draws: reproducible, symmetric, seed-sensitive, SPD") {
  Rng r1(42), r2(42), r3(43);
  SymMatrix A = gaussian_matrix(4, r1, ctx());
  SymMatrix B = gaussian_matrix(4, r2, ctx());
  SymMatrix C = gaussian_matrix(4, r3, ctx());
  bool identical = true, differs = false;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      identical = identical && A.at(i, j) == B.at(i, j);
      differs = differs || A.at(i, j) != C.at(i, j);
      CHECK(A.at(i, j) == A.at(j, i));
    }
  }
  CHECK(identical);
  CHECK(differs);
  CHECK(spd_check(A).positive_definite);
  CHECK_THROWS_AS(gaussian_matrix(1, r1, ctx()), DimensionMismatch);
}

TEST_CASE("Cauchy-Schwarz strictness under random SPD forms") {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    Rng rng(stream_seed(99, seed));
    const int n = 2 + static_cast<int>(seed % 4);
    SymMatrix H = gaussian_matrix(n, rng, ctx());
    Vector u = gaussian_vector(n, rng, ctx());
    Vector v = gaussian_vector(n, rng, ctx());
    Real uu = quadratic_form(H, u, u);
    Real vv = quadratic_form(H, v, v);
    Real uv = quadratic_form(H, u, v);
    CHECK((uu * vv - uv * uv).sign() > 0);
  }
}

TEST_CASE("exact rank decisions") {
  Vector e1 = unit(3, 0), e2 = unit(3, 1);
  CHECK(exact_rank({e1, e2}) == 2);
  CHECK(exact_rank({e1, e1 + e1}) == 1);
  CHECK(exact_rank({e1, e2, ones(3)}) == 3);
  Vector z(3, ctx());
  CHECK(exact_rank({z}) == 0);
}
