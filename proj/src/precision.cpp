#include "pwlbfgs/precision.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

namespace pwlbfgs {

PrecisionContext::PrecisionContext(long mantissa_bits) : bits_(mantissa_bits) {
  if (mantissa_bits < kMinBits) {
    throw PrecisionError("mantissa width " + std::to_string(mantissa_bits) +
                         " below the 53-bit floor");
  }
}

int PrecisionContext::decimal_digits() const {
  return static_cast<int>(std::floor(static_cast<double>(bits_) * 0.3010299956639812));
}

Real PrecisionContext::real(double v) const { return Real::from_double(v, bits_); }
Real PrecisionContext::real(long v) const { return Real::from_long(v, bits_); }
Real PrecisionContext::real(const std::string& text) const {
  return Real::from_string(text, bits_);
}
Real PrecisionContext::zero() const { return Real::from_long(0, bits_); }
Real PrecisionContext::one() const { return Real::from_long(1, bits_); }

PrecisionContext make_context(long mantissa_bits) {
  return PrecisionContext(mantissa_bits);
}

Real::Real() { mpfr_init2(v_, PrecisionContext::kMinBits); }

Real::Real(long prec) { mpfr_init2(v_, prec); }

Real::Real(const Real& o) {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_set(v_, o.v_, MPFR_RNDN);
}

Real::Real(Real&& o) noexcept {
  mpfr_init2(v_, mpfr_get_prec(o.v_));
  mpfr_swap(v_, o.v_);
}

Real& Real::operator=(const Real& o) {
  if (this != &o) {
    mpfr_set_prec(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  return *this;
}

Real& Real::operator=(Real&& o) noexcept {
  if (this != &o) mpfr_swap(v_, o.v_);
  return *this;
}

Real::~Real() { mpfr_clear(v_); }

Real Real::from_double(double v, long prec) {
  Real r(prec);
  mpfr_set_d(r.v_, v, MPFR_RNDN);
  return r;
}

Real Real::from_long(long v, long prec) {
  Real r(prec);
  mpfr_set_si(r.v_, v, MPFR_RNDN);
  return r;
}

Real Real::from_string(const std::string& text, long prec) {
  Real r(prec);
  // base 0 auto-detects the 0x hex-float prefix used for exact replay
  if (mpfr_set_str(r.v_, text.c_str(), 0, MPFR_RNDN) != 0) {
    throw std::invalid_argument("unparseable numeric literal: " + text);
  }
  return r;
}

double Real::to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }

std::string Real::to_decimal(int significant_digits) const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%.*Rg", significant_digits, v_);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

std::string Real::to_decimal_full() const {
  long digits = static_cast<long>(std::ceil(static_cast<double>(prec()) * 0.3010299956639812)) + 2;
  return to_decimal(static_cast<int>(digits));
}

std::string Real::to_hex() const {
  char* s = nullptr;
  mpfr_asprintf(&s, "%Ra", v_);
  std::string out(s);
  mpfr_free_str(s);
  return out;
}

int Real::sign() const {
  if (mpfr_nan_p(v_)) throw PrecisionError("sign of NaN");
  return mpfr_sgn(v_);
}

long Real::common_prec(const Real& a, const Real& b) {
  long pa = a.prec(), pb = b.prec();
  if (pa != pb) {
    throw PrecisionError("mixed precision contexts: " + std::to_string(pa) +
                         " vs " + std::to_string(pb) + " bits");
  }
  return pa;
}

int Real::cmp(const Real& a, const Real& b) {
  common_prec(a, b);
  if (a.is_nan() || b.is_nan()) throw PrecisionError("comparison with NaN");
  return mpfr_cmp(a.v_, b.v_);
}

Real& Real::operator+=(const Real& o) {
  common_prec(*this, o);
  mpfr_add(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator-=(const Real& o) {
  common_prec(*this, o);
  mpfr_sub(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator*=(const Real& o) {
  common_prec(*this, o);
  mpfr_mul(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real& Real::operator/=(const Real& o) {
  common_prec(*this, o);
  mpfr_div(v_, v_, o.v_, MPFR_RNDN);
  return *this;
}

Real Real::operator-() const {
  Real r(prec());
  mpfr_neg(r.v_, v_, MPFR_RNDN);
  return r;
}

Real operator+(const Real& a, const Real& b) {
  Real r(Real::common_prec(a, b));
  mpfr_add(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator-(const Real& a, const Real& b) {
  Real r(Real::common_prec(a, b));
  mpfr_sub(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator*(const Real& a, const Real& b) {
  Real r(Real::common_prec(a, b));
  mpfr_mul(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator/(const Real& a, const Real& b) {
  Real r(Real::common_prec(a, b));
  mpfr_div(r.v_, a.v_, b.v_, MPFR_RNDN);
  return r;
}

Real operator*(const Real& a, long b) {
  Real r(a.prec());
  mpfr_mul_si(r.v_, a.v_, b, MPFR_RNDN);
  return r;
}

Real operator/(const Real& a, long b) {
  Real r(a.prec());
  mpfr_div_si(r.v_, a.v_, b, MPFR_RNDN);
  return r;
}

Real abs(const Real& a) {
  Real r(a.prec());
  mpfr_abs(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

Real sqrt(const Real& a) {
  Real r(a.prec());
  mpfr_sqrt(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

Real log(const Real& a) {
  if (a.sign() <= 0) throw std::domain_error("log of non-positive value");
  Real r(a.prec());
  mpfr_log(r.raw(), a.raw(), MPFR_RNDN);
  return r;
}

Real pow10(long e, long prec) {
  Real r(prec);
  mpfr_set_si(r.raw(), 10, MPFR_RNDN);
  mpfr_pow_si(r.raw(), r.raw(), e, MPFR_RNDN);
  return r;
}

Real tolerance_band(const PrecisionContext& ctx) {
  long digits = ctx.decimal_digits() - 50;
  if (digits < 6) digits = 6;
  return pow10(-digits, ctx.bits());
}

static Real scale_of(const Real& x, const Real& y) {
  Real m = abs(x);
  Real ay = abs(y);
  if (ay > m) m = ay;
  Real one = Real::from_long(1, x.prec());
  if (one > m) m = one;
  return m;
}

bool strictly_greater(const Real& x, const Real& y, const Real& band) {
  return (x - y) > band * scale_of(x, y);
}

bool within_band(const Real& a, const Real& b, const Real& band) {
  return abs(a - b) <= band * scale_of(a, b);
}

Real relative_deviation(const Real& a, const Real& b) {
  return abs(a - b) / scale_of(a, b);
}

}  // namespace pwlbfgs
