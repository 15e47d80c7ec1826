#ifndef PWLBFGS_PRECISION_HPP
#define PWLBFGS_PRECISION_HPP

#include <mpfr.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pwlbfgs {

// Thrown when a context is constructed with too few mantissa bits, or when
// values from different contexts meet in one arithmetic expression.
class PrecisionError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class Real;

// Arbitrary-precision binary floating point with round-to-nearest-even.
// One context is created per run; every scalar in that run carries its
// mantissa width and operations refuse to mix widths.
class PrecisionContext {
 public:
  static constexpr long kMinBits = 53;
  static constexpr long kDefaultBits = 1664;  // ~500.9 decimal digits

  explicit PrecisionContext(long mantissa_bits);

  long bits() const { return bits_; }
  int decimal_digits() const;  // floor(bits * log10(2))

  Real real(double v) const;                // exact widening of a binary64
  Real real(long v) const;                  // exact integer
  Real real(const std::string& text) const; // correctly rounded decimal/hex parse
  Real zero() const;
  Real one() const;

  bool operator==(const PrecisionContext& o) const { return bits_ == o.bits_; }

 private:
  long bits_;
};

PrecisionContext make_context(long mantissa_bits);

// Value type wrapping one mpfr number. Copyable, movable, comparable.
// Binary operations require both operands to carry the same mantissa width.
class Real {
 public:
  Real();                       // NaN at the minimum width; a trap value
  explicit Real(long prec);     // NaN at the given width
  Real(const Real& o);
  Real(Real&& o) noexcept;
  Real& operator=(const Real& o);
  Real& operator=(Real&& o) noexcept;
  ~Real();

  static Real from_double(double v, long prec);
  static Real from_long(long v, long prec);
  static Real from_string(const std::string& text, long prec);

  long prec() const { return mpfr_get_prec(v_); }
  mpfr_ptr raw() { return v_; }
  mpfr_srcptr raw() const { return v_; }

  double to_double() const;
  std::string to_decimal(int significant_digits) const;
  std::string to_decimal_full() const;  // enough digits to round-trip
  std::string to_hex() const;           // %Ra hex-float, exact

  bool is_nan() const { return mpfr_nan_p(v_) != 0; }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const;  // -1, 0, +1

  Real& operator+=(const Real& o);
  Real& operator-=(const Real& o);
  Real& operator*=(const Real& o);
  Real& operator/=(const Real& o);
  Real operator-() const;

  friend Real operator+(const Real& a, const Real& b);
  friend Real operator-(const Real& a, const Real& b);
  friend Real operator*(const Real& a, const Real& b);
  friend Real operator/(const Real& a, const Real& b);

  // Exact integer scaling, no context questions involved.
  friend Real operator*(const Real& a, long b);
  friend Real operator/(const Real& a, long b);

  friend bool operator<(const Real& a, const Real& b) { return cmp(a, b) < 0; }
  friend bool operator<=(const Real& a, const Real& b) { return cmp(a, b) <= 0; }
  friend bool operator>(const Real& a, const Real& b) { return cmp(a, b) > 0; }
  friend bool operator>=(const Real& a, const Real& b) { return cmp(a, b) >= 0; }
  friend bool operator==(const Real& a, const Real& b) { return cmp(a, b) == 0; }
  friend bool operator!=(const Real& a, const Real& b) { return cmp(a, b) != 0; }

 private:
  static int cmp(const Real& a, const Real& b);
  static long common_prec(const Real& a, const Real& b);
  mpfr_t v_;
};

Real abs(const Real& a);
Real sqrt(const Real& a);
Real log(const Real& a);   // natural log; argument must be > 0
Real pow10(long e, long prec);  // 10^e, correctly rounded

// Guard band for strict comparisons and for cross-route agreement checks:
// 10^-(decimal_digits - 50), floored at 10^-6 for very narrow contexts.
// At the 1664-bit default this is exactly 1e-450.
Real tolerance_band(const PrecisionContext& ctx);

// x > y beyond the band: x - y > band * max(|x|, |y|, 1).
bool strictly_greater(const Real& x, const Real& y, const Real& band);

// |a - b| <= band * max(|a|, |b|, 1).
bool within_band(const Real& a, const Real& b, const Real& band);

// |a - b| / max(|a|, |b|, 1), the deviation measure used by the
// recursion-versus-matrix cross checks.
Real relative_deviation(const Real& a, const Real& b);

}  // namespace pwlbfgs

#endif
