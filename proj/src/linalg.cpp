#include "pwlbfgs/linalg.hpp"

namespace pwlbfgs {

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw DimensionMismatch(what);
}
}  // namespace

Vector::Vector(int n, const PrecisionContext& ctx) {
  require(n >= 1, "vector length must be positive");
  e_.reserve(n);
  for (int i = 0; i < n; ++i) e_.push_back(ctx.zero());
}

Vector::Vector(std::vector<Real> entries) : e_(std::move(entries)) {
  require(!e_.empty(), "vector length must be positive");
  for (const Real& r : e_) {
    if (r.prec() != e_[0].prec()) throw PrecisionError("mixed precision in vector");
  }
}

Real Vector::dot(const Vector& o) const {
  require(size() == o.size(), "dot: length mismatch");
  Real acc = Real::from_long(0, prec());
  for (int i = 0; i < size(); ++i) acc += e_[i] * o.e_[i];
  return acc;
}

Vector operator+(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "vector add: length mismatch");
  std::vector<Real> out;
  out.reserve(a.size());
  for (int i = 0; i < a.size(); ++i) out.push_back(a[i] + b[i]);
  return Vector(std::move(out));
}

Vector operator-(const Vector& a, const Vector& b) {
  require(a.size() == b.size(), "vector sub: length mismatch");
  std::vector<Real> out;
  out.reserve(a.size());
  for (int i = 0; i < a.size(); ++i) out.push_back(a[i] - b[i]);
  return Vector(std::move(out));
}

Vector operator*(const Real& s, const Vector& v) {
  std::vector<Real> out;
  out.reserve(v.size());
  for (int i = 0; i < v.size(); ++i) out.push_back(s * v[i]);
  return Vector(std::move(out));
}

Vector Vector::operator-() const {
  std::vector<Real> out;
  out.reserve(size());
  for (int i = 0; i < size(); ++i) out.push_back(-e_[i]);
  return Vector(std::move(out));
}

SymMatrix::SymMatrix(int n, const PrecisionContext& ctx) : n_(n) {
  require(n >= 1, "matrix order must be positive");
  e_.reserve(n * (n + 1) / 2);
  for (int i = 0; i < n * (n + 1) / 2; ++i) e_.push_back(ctx.zero());
}

SymMatrix SymMatrix::identity(int n, const PrecisionContext& ctx) {
  SymMatrix m(n, ctx);
  for (int i = 0; i < n; ++i) m.set(i, i, ctx.one());
  return m;
}

int SymMatrix::index(int i, int j) const {
  if (i > j) std::swap(i, j);
  return i * n_ - i * (i - 1) / 2 + (j - i);
}

Matrix::Matrix(int n, const PrecisionContext& ctx) : n_(n) {
  require(n >= 1, "matrix order must be positive");
  e_.reserve(n * n);
  for (int i = 0; i < n * n; ++i) e_.push_back(ctx.zero());
}

Matrix Matrix::identity(int n, const PrecisionContext& ctx) {
  Matrix m(n, ctx);
  for (int i = 0; i < n; ++i) m.set(i, i, ctx.one());
  return m;
}

Vector Matrix::row(int i) const {
  std::vector<Real> out;
  out.reserve(n_);
  for (int j = 0; j < n_; ++j) out.push_back(at(i, j));
  return Vector(std::move(out));
}

Vector matvec(const SymMatrix& H, const Vector& x) {
  require(H.size() == x.size(), "matvec: dimension mismatch");
  const int n = H.size();
  std::vector<Real> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Real acc = Real::from_long(0, x.prec());
    for (int j = 0; j < n; ++j) acc += H.at(i, j) * x[j];
    out.push_back(std::move(acc));
  }
  return Vector(std::move(out));
}

Vector matvec(const Matrix& A, const Vector& x) {
  require(A.size() == x.size(), "matvec: dimension mismatch");
  const int n = A.size();
  std::vector<Real> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    Real acc = Real::from_long(0, x.prec());
    for (int j = 0; j < n; ++j) acc += A.at(i, j) * x[j];
    out.push_back(std::move(acc));
  }
  return Vector(std::move(out));
}

Real quadratic_form(const SymMatrix& H, const Vector& u, const Vector& v) {
  require(H.size() == u.size() && H.size() == v.size(),
          "quadratic form: dimension mismatch");
  return u.dot(matvec(H, v));
}

SymMatrix congruence(const Matrix& A, const SymMatrix& H) {
  require(A.size() == H.size(), "congruence: dimension mismatch");
  const int n = A.size();
  PrecisionContext ctx(H.prec());
  // B = H A^T, then the upper triangle of A B.
  Matrix B(n, ctx);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      Real acc = ctx.zero();
      for (int k = 0; k < n; ++k) acc += H.at(i, k) * A.at(j, k);
      B.set(i, j, std::move(acc));
    }
  }
  SymMatrix out(n, ctx);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Real acc = ctx.zero();
      for (int k = 0; k < n; ++k) acc += A.at(i, k) * B.at(k, j);
      out.set(i, j, std::move(acc));
    }
  }
  return out;
}

SpdVerdict spd_check(const SymMatrix& H) {
  const int n = H.size();
  PrecisionContext ctx(H.prec());
  Matrix L(n, ctx);
  std::vector<Real> d;
  d.reserve(n);
  for (int j = 0; j < n; ++j) {
    Real pivot = H.at(j, j);
    for (int r = 0; r < j; ++r) pivot -= L.at(j, r) * L.at(j, r) * d[r];
    if (!(pivot.sign() > 0)) return SpdVerdict{false, j + 1};
    for (int i = j + 1; i < n; ++i) {
      Real v = H.at(i, j);
      for (int r = 0; r < j; ++r) v -= L.at(i, r) * L.at(j, r) * d[r];
      L.set(i, j, v / pivot);
    }
    d.push_back(std::move(pivot));
  }
  return SpdVerdict{true, 0};
}

int exact_rank(const std::vector<Vector>& rows) {
  if (rows.empty()) return 0;
  const int n = rows[0].size();
  std::vector<std::vector<Real>> w;
  for (const Vector& r : rows) {
    if (r.size() != n) throw DimensionMismatch("rank: ragged rows");
    std::vector<Real> cp;
    cp.reserve(n);
    for (int j = 0; j < n; ++j) cp.push_back(r[j]);
    w.push_back(std::move(cp));
  }
  const int m = static_cast<int>(w.size());
  int rank = 0;
  std::vector<bool> used_col(n, false);
  for (int step = 0; step < m && rank < n; ++step) {
    // full pivot over remaining rows/columns
    int pi = -1, pj = -1;
    for (int i = rank; i < m; ++i) {
      for (int j = 0; j < n; ++j) {
        if (used_col[j] || w[i][j].is_zero()) continue;
        if (pi < 0 || abs(w[i][j]) > abs(w[pi][pj])) { pi = i; pj = j; }
      }
    }
    if (pi < 0) break;
    std::swap(w[rank], w[pi]);
    used_col[pj] = true;
    for (int i = rank + 1; i < m; ++i) {
      if (w[i][pj].is_zero()) continue;
      Real factor = w[i][pj] / w[rank][pj];
      for (int j = 0; j < n; ++j) w[i][j] -= factor * w[rank][j];
      w[i][pj] = Real::from_long(0, w[i][pj].prec());
    }
    ++rank;
  }
  return rank;
}

}  // namespace pwlbfgs
