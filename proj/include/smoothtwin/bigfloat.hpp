#pragma once

#include <cmath>
#include <string>
#include <utility>

#include <gmpxx.h>
#include <mpfr.h>

namespace smoothtwin {

/// Owning wrapper around an mpfr_t with a fixed working precision.
///
/// Binary operators produce a result at the larger operand precision and
/// round to nearest. Hot loops should use `get()` with the raw MPFR API.
class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t prec = 256) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
  BigFloat(double x, mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_d(v_, x, MPFR_RNDN); }
  BigFloat(const mpz_class& z, mpfr_prec_t prec) {
    mpfr_init2(v_, prec);
    mpfr_set_z(v_, z.get_mpz_t(), MPFR_RNDN);
  }
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  mpfr_ptr get() { return v_; }
  mpfr_srcptr get() const { return v_; }
  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  long double to_long_double() const { return mpfr_get_ld(v_, MPFR_RNDN); }
  /// Mantissa in [0.5, 1) and binary exponent, so huge values survive.
  double to_double_2exp(long* exp) const { return mpfr_get_d_2exp(exp, v_, MPFR_RNDN); }
  /// log2 |x|, finite for any nonzero value regardless of magnitude.
  double log2_abs() const {
    long e = 0;
    double m = to_double_2exp(&e);
    return std::log2(std::fabs(m)) + static_cast<double>(e);
  }
  mpz_class round_to_integer() const {
    mpz_class z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDN);
    return z;
  }
  bool is_zero() const { return mpfr_zero_p(v_) != 0; }
  int sign() const { return mpfr_sgn(v_); }

  std::string to_string(int digits = 20) const {
    char buf[128];
    mpfr_snprintf(buf, sizeof buf, "%.*Rg", digits, v_);
    return buf;
  }

  friend BigFloat operator+(const BigFloat& a, const BigFloat& b) { return binary(a, b, mpfr_add); }
  friend BigFloat operator-(const BigFloat& a, const BigFloat& b) { return binary(a, b, mpfr_sub); }
  friend BigFloat operator*(const BigFloat& a, const BigFloat& b) { return binary(a, b, mpfr_mul); }
  friend BigFloat operator/(const BigFloat& a, const BigFloat& b) { return binary(a, b, mpfr_div); }
  BigFloat operator-() const {
    BigFloat out(precision());
    mpfr_neg(out.v_, v_, MPFR_RNDN);
    return out;
  }
  BigFloat& operator+=(const BigFloat& b) { mpfr_add(v_, v_, b.v_, MPFR_RNDN); return *this; }
  BigFloat& operator-=(const BigFloat& b) { mpfr_sub(v_, v_, b.v_, MPFR_RNDN); return *this; }
  BigFloat& operator*=(const BigFloat& b) { mpfr_mul(v_, v_, b.v_, MPFR_RNDN); return *this; }
  BigFloat& operator/=(const BigFloat& b) { mpfr_div(v_, v_, b.v_, MPFR_RNDN); return *this; }

  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_) != 0; }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_) != 0; }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_) != 0; }
  friend bool operator>=(const BigFloat& a, const BigFloat& b) { return mpfr_greaterequal_p(a.v_, b.v_) != 0; }

  friend BigFloat log(const BigFloat& a) { return unary(a, mpfr_log); }
  friend BigFloat log1p(const BigFloat& a) { return unary(a, mpfr_log1p); }
  friend BigFloat exp(const BigFloat& a) { return unary(a, mpfr_exp); }
  friend BigFloat sqrt(const BigFloat& a) { return unary(a, mpfr_sqrt); }
  friend BigFloat abs(const BigFloat& a) { return unary(a, mpfr_abs); }

  /// x * 2^e exactly.
  friend BigFloat ldexp(const BigFloat& a, long e) {
    BigFloat out(a.precision());
    mpfr_mul_2si(out.v_, a.v_, e, MPFR_RNDN);
    return out;
  }
  /// 2^e at the given precision; exact for integral and rounded otherwise.
  static BigFloat exp2(double e, mpfr_prec_t prec) {
    BigFloat out(e, prec);
    mpfr_exp2(out.v_, out.v_, MPFR_RNDN);
    return out;
  }

 private:
  template <class Op>
  static BigFloat binary(const BigFloat& a, const BigFloat& b, Op op) {
    BigFloat out(std::max(a.precision(), b.precision()));
    op(out.v_, a.v_, b.v_, MPFR_RNDN);
    return out;
  }
  template <class Op>
  static BigFloat unary(const BigFloat& a, Op op) {
    BigFloat out(a.precision());
    op(out.v_, a.v_, MPFR_RNDN);
    return out;
  }

  mpfr_t v_;
};

}  // namespace smoothtwin
