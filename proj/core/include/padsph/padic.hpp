#pragma once

#include <limits>
#include <vector>

#include "padsph/integer.hpp"

namespace padsph {

/// An element of Q_p known to a finite relative precision: p^valuation * unit,
/// with the unit known modulo p^precision. Zero is exact and carries no
/// precision.
///
/// Multiplication and inversion keep relative precision (the minimum of the
/// operands). Addition tracks absolute precision: digits lost to cancellation
/// reduce the relative precision of the sum, and a sum whose known digits
/// all cancel is zero. A zero still records a precision, used only as the
/// working precision of results built from it (exp(0), (1+0)^b, ...).
class PadicScalar {
 public:
  static constexpr long kZeroValuation = std::numeric_limits<long>::max();

  PadicScalar() = default;

  static PadicScalar zero(long p, int precision = 1);
  /// p^valuation * unit; the unit must be coprime to p.
  static PadicScalar from_unit(long p, int precision, long valuation, const Int& unit);
  /// An integer, carrying `precision` relative digits.
  static PadicScalar from_integer(long p, int precision, const Int& value);
  /// An integer known modulo p^abs_precision (zero if it vanishes there).
  static PadicScalar from_integer_abs(long p, int abs_precision, const Int& value);
  static PadicScalar from_rational(long p, int precision, const Rational& value);

  long prime() const { return p_; }
  bool is_zero() const { return valuation_ == kZeroValuation; }
  long valuation() const { return valuation_; }
  int precision() const { return precision_; }
  long absolute_precision() const;
  /// Unit part, reduced into [0, p^precision).
  const Int& unit() const { return unit_; }

  /// |x|_p as an exact rational.
  Rational abs() const;
  /// x mod p^abs_precision as an integer in [0, p^abs_precision); requires
  /// valuation >= 0 and enough known digits.
  Int residue(long abs_precision) const;
  /// The representative p^valuation * unit as a rational number.
  Rational to_rational() const;
  PadicScalar with_precision(int precision) const;

  PadicScalar inverse() const;
  PadicScalar pow(long e) const;

  PadicScalar operator-() const;
  friend PadicScalar operator+(const PadicScalar& a, const PadicScalar& b);
  friend PadicScalar operator-(const PadicScalar& a, const PadicScalar& b);
  friend PadicScalar operator*(const PadicScalar& a, const PadicScalar& b);
  friend PadicScalar operator/(const PadicScalar& a, const PadicScalar& b);
  PadicScalar& operator+=(const PadicScalar& b) { return *this = *this + b; }
  PadicScalar& operator-=(const PadicScalar& b) { return *this = *this - b; }
  PadicScalar& operator*=(const PadicScalar& b) { return *this = *this * b; }

  /// Equality modulo the precision both operands know.
  friend bool operator==(const PadicScalar& a, const PadicScalar& b);

 private:
  PadicScalar(long p, int precision, long valuation, Int unit)
      : p_(p), precision_(precision), valuation_(valuation), unit_(std::move(unit)) {}

  long p_ = 0;
  int precision_ = 0;
  long valuation_ = kZeroValuation;
  Int unit_ = 0;
};

/// Checks that p is an odd prime; throws DomainError otherwise.
void require_odd_prime(long p);

/// The expansion x = p^valuation * sum_i digits[i] p^i with every digit a
/// (p-1)-th root of unity or zero, each stored modulo p^precision.
struct TeichmullerDigitsQp {
  long prime = 0;
  int precision = 0;
  long valuation = 0;
  std::vector<Int> digits;

  PadicScalar recompose() const;
};

/// Teichmuller lift of the residue a (mod p) to Z/p^precision, computed as the
/// limit of a^(p^k).
Int teichmuller_lift_qp(long p, int precision, const Int& a);

TeichmullerDigitsQp teichmuller_digits_qp(const PadicScalar& x);

/// Membership in the "positive" group p^Z * (1 + pZ_p).
bool is_positive(const PadicScalar& x);

/// Smallest index I such that i*nu - (i - s_p(i))/(p-1) >= precision for every
/// i >= I. Terms of the binomial series from I on vanish modulo p^precision.
long mahler_truncation_index(long p, long nu, int precision);

/// (1+z)^beta via the binomial (Mahler) series; z in pZ_p, beta in Z_p.
PadicScalar pow_zp_exponent(const PadicScalar& z, const PadicScalar& beta);

/// The unique principal unit y with y^n = zeta; requires gcd(n, p) = 1.
PadicScalar nth_root_principal(const PadicScalar& zeta, long n);

/// p-adic logarithm on 1 + pZ_p.
PadicScalar log_principal(const PadicScalar& u);
/// p-adic exponential on pZ_p.
PadicScalar exp_principal(const PadicScalar& z);

}  // namespace padsph
