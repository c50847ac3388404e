#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "padsph/integer.hpp"
#include "padsph/padic.hpp"

namespace padsph {

class FieldContext;
using FieldPtr = std::shared_ptr<const FieldContext>;

/// An element of the unramified extension K = Q_p[t]/(m(t)), stored as
/// p^valuation * u where u is a unit of O given by its power-basis
/// coefficients (1, t, ..., t^(n-1)) modulo p^precision. In an unramified
/// extension a vector with one unit coordinate is a unit, so this is the
/// exact analogue of PadicScalar: products and inverses keep relative
/// precision, sums track absolute precision.
///
/// The canonical basis used for input/output and for ||x|| = (max |x_j|_p)^n
/// is theta_j = t^j (j = 1..n-1) followed by theta_n = 1.
class ExtElement {
 public:
  static constexpr long kZeroValuation = PadicScalar::kZeroValuation;

  ExtElement() = default;

  static ExtElement zero(FieldPtr field);
  /// p^valuation * (sum_j coeffs[j] t^j); the coefficients are reduced
  /// mod p^precision and any common factor of p is moved into the valuation.
  static ExtElement from_power_coefficients(FieldPtr field, long valuation, std::vector<Int> coeffs,
                                            int precision);
  static ExtElement from_scalar(FieldPtr field, const PadicScalar& lambda);
  /// An integer at the field's working precision.
  static ExtElement from_integer(FieldPtr field, const Int& value);
  static ExtElement from_rational(FieldPtr field, const Rational& value);
  /// Coefficients in the canonical basis theta_1, ..., theta_n (theta_n = 1).
  static ExtElement from_canonical(FieldPtr field, std::span<const PadicScalar> coeffs);

  const FieldPtr& field_ptr() const { return field_; }
  const FieldContext& field() const { return *field_; }
  bool is_zero() const { return valuation_ == kZeroValuation; }
  long valuation() const { return valuation_; }
  int precision() const { return precision_; }
  long absolute_precision() const;
  /// Unit part in the power basis, entries in [0, p^precision).
  const std::vector<Int>& unit() const { return unit_; }

  std::vector<PadicScalar> canonical_coefficients() const;
  std::vector<PadicScalar> power_coefficients() const;
  /// Integer power-basis coefficients of x mod p^abs_precision; x integral.
  std::vector<Int> integral_coefficients(long abs_precision) const;
  /// Index of the residue class of the unit part: sum_j (u_j mod p) p^j.
  std::uint64_t residue_index() const;

  bool is_unit() const { return !is_zero() && valuation_ == 0; }
  bool is_principal_unit() const;

  ExtElement with_precision(int precision) const;
  ExtElement inverse() const;
  ExtElement pow(long e) const;
  ExtElement scale(const PadicScalar& lambda) const;

  ExtElement operator-() const;
  friend ExtElement operator+(const ExtElement& a, const ExtElement& b);
  friend ExtElement operator-(const ExtElement& a, const ExtElement& b);
  friend ExtElement operator*(const ExtElement& a, const ExtElement& b);
  friend ExtElement operator/(const ExtElement& a, const ExtElement& b);
  ExtElement& operator+=(const ExtElement& b) { return *this = *this + b; }
  ExtElement& operator*=(const ExtElement& b) { return *this = *this * b; }
  /// Equality modulo the precision both operands know.
  friend bool operator==(const ExtElement& a, const ExtElement& b);

 private:
  ExtElement(FieldPtr field, long valuation, std::vector<Int> unit, int precision)
      : field_(std::move(field)), valuation_(valuation), precision_(precision), unit_(std::move(unit)) {}

  FieldPtr field_;
  long valuation_ = kZeroValuation;
  int precision_ = 0;
  std::vector<Int> unit_;
};

/// The unramified extension of degree n of Q_p at working precision N.
/// Immutable once built; share it by pointer across threads.
class FieldContext : public std::enable_shared_from_this<FieldContext> {
 public:
  /// Builds K. Without `modulus` (monic, low-to-high coefficients c_0..c_{n-1}
  /// of t^n + ... + c_0) the lexicographically smallest monic polynomial that
  /// is irreducible mod p is used, ordering by c_{n-1} first.
  static FieldPtr create(long p, int n, int precision,
                         std::optional<std::vector<long>> modulus = std::nullopt);

  long p() const { return p_; }
  int n() const { return n_; }
  int precision() const { return precision_; }
  const Int& q() const { return q_; }
  /// m(t) low-to-high without the leading 1.
  const std::vector<Int>& modulus() const { return modulus_; }
  /// m(t) low-to-high including the leading 1.
  std::vector<long> modulus_coefficients() const;
  /// The root of m congruent to t^p, Hensel-lifted to p^N.
  ExtElement frobenius_image() const;

  ExtElement zero() const;
  ExtElement one() const;
  /// The generator t.
  ExtElement generator() const;
  /// theta_j in the canonical basis, j = 1..n.
  ExtElement basis_element(int j) const;
  ExtElement uniformizer() const;

  // Arithmetic on power-basis coefficient vectors modulo m.
  std::vector<Int> mul(const std::vector<Int>& a, const std::vector<Int>& b, const Int& m) const;
  std::vector<Int> unit_inverse(const std::vector<Int>& u, int precision) const;
  std::vector<Int> unit_pow(const std::vector<Int>& u, const Int& e, int precision) const;
  std::vector<Int> frobenius_coefficients(const std::vector<Int>& u, int precision) const;
  /// Teichmuller lift (at full precision) of the residue class with the given index.
  std::vector<Int> teichmuller_of_residue(std::uint64_t index) const;
  std::uint64_t residue_index(const std::vector<Int>& u) const;

 private:
  FieldContext(long p, int n, int precision, std::vector<Int> modulus);
  void init();

  long p_;
  int n_;
  int precision_;
  Int q_;
  std::vector<Int> modulus_;
  std::vector<std::vector<Int>> frobenius_powers_;  // f^j, j < n, mod p^N
  std::vector<std::vector<Int>> teichmuller_table_;  // indexed by residue index
};

/// Deterministic irreducibility test over F_p (Ben-Or); `poly` is
/// low-to-high and monic.
bool is_irreducible_mod_p(const std::vector<long>& poly, long p);
/// Lexicographically first monic irreducible polynomial of degree n mod p.
std::vector<long> select_modulus(long p, int n);

ExtElement frobenius(const ExtElement& x);
/// Product of the n Galois conjugates.
PadicScalar norm(const ExtElement& x);
/// det of the multiplication matrix L_x, by fraction-free elimination over Z.
PadicScalar norm_by_determinant(const ExtElement& x);
/// ||x|| = |N(x)|_p.
Rational normalized_abs(const ExtElement& x);
/// ||x|| = (max_j |x_j|_p)^n over the canonical coordinates.
Rational abs_from_coefficients(const ExtElement& x);

/// omega(x) in mu_{q-1}: the limit of u^(q^k) for the unit part u of x.
ExtElement teichmuller_K(const ExtElement& x);

/// x = p^valuation * omega * (1 + x_1 p + x_2 p^2 + ...), digits in mu_{q-1} or 0.
struct TeichDigitsK {
  long valuation = 0;
  ExtElement omega;
  std::vector<ExtElement> tail;  // x_1, ..., x_{precision-1}; zero digits are zero elements

  ExtElement recompose() const;
};

TeichDigitsK digit_expansion_K(const ExtElement& x);

/// log(1+z) on principal units of K.
ExtElement log_principal_K(const ExtElement& u);
/// exp(z) for z in pO.
ExtElement exp_principal_K(const ExtElement& z);
/// (1+z)^beta for z in pO and beta in Z_p, by the binomial series.
ExtElement pow_zp_exponent_K(const ExtElement& z, const PadicScalar& beta);

}  // namespace padsph
