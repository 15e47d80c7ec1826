#ifndef PWLBFGS_LINALG_HPP
#define PWLBFGS_LINALG_HPP

#include <vector>

#include "pwlbfgs/precision.hpp"

namespace pwlbfgs {

class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Fixed-length column vector; length is set at construction.
class Vector {
 public:
  Vector(int n, const PrecisionContext& ctx);
  Vector(std::vector<Real> entries);

  int size() const { return static_cast<int>(e_.size()); }
  long prec() const { return e_.empty() ? PrecisionContext::kMinBits : e_[0].prec(); }
  const Real& operator[](int i) const { return e_[i]; }
  Real& operator[](int i) { return e_[i]; }

  Real dot(const Vector& o) const;

  friend Vector operator+(const Vector& a, const Vector& b);
  friend Vector operator-(const Vector& a, const Vector& b);
  friend Vector operator*(const Real& s, const Vector& v);
  Vector operator-() const;

 private:
  std::vector<Real> e_;
};

// Symmetric matrix with packed upper-triangular storage, so the (i,j) and
// (j,i) entries are one and the same scalar.
class SymMatrix {
 public:
  SymMatrix(int n, const PrecisionContext& ctx);

  static SymMatrix identity(int n, const PrecisionContext& ctx);

  int size() const { return n_; }
  long prec() const { return e_.empty() ? PrecisionContext::kMinBits : e_[0].prec(); }

  const Real& at(int i, int j) const { return e_[index(i, j)]; }
  void set(int i, int j, Real v) { e_[index(i, j)] = std::move(v); }

 private:
  int index(int i, int j) const;
  int n_;
  std::vector<Real> e_;
};

// General square matrix, row-major. Used for basis-change transforms.
class Matrix {
 public:
  Matrix(int n, const PrecisionContext& ctx);

  static Matrix identity(int n, const PrecisionContext& ctx);

  int size() const { return n_; }
  const Real& at(int i, int j) const { return e_[i * n_ + j]; }
  void set(int i, int j, Real v) { e_[i * n_ + j] = std::move(v); }

  Vector row(int i) const;

 private:
  int n_;
  std::vector<Real> e_;
};

Vector matvec(const SymMatrix& H, const Vector& x);
Vector matvec(const Matrix& A, const Vector& x);

// u^T H v under the operands' context.
Real quadratic_form(const SymMatrix& H, const Vector& u, const Vector& v);

// A H A^T, symmetric by construction.
SymMatrix congruence(const Matrix& A, const SymMatrix& H);

struct SpdVerdict {
  bool positive_definite;
  int first_bad_pivot;  // 1-based index of the first non-positive pivot; 0 if PD

  explicit operator bool() const { return positive_definite; }
};

// Root-free symmetric triangular factorization in natural order; the verdict
// is positive_definite iff every pivot comes out strictly positive. No
// tolerance is applied.
SpdVerdict spd_check(const SymMatrix& H);

// Exact-zero rank decision by Gaussian elimination with full pivoting.
// Rows are given as vectors; returns the rank at working precision.
int exact_rank(const std::vector<Vector>& rows);

}  // namespace pwlbfgs

#endif
