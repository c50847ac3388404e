#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "padsph/errors.hpp"
#include "padsph/field.hpp"
#include "padsph/levels.hpp"

namespace padsph {

/// The ball {y : ||y - center|| <= q^(-k)} = center + p^k O with a value.
struct Ball {
  ExtElement center;
  long k = 0;
  Rational value;
};

/// A locally constant, compactly supported function on K: a finite sum of
/// ball indicators times rationals. Overlapping balls add; normalized()
/// rewrites the function on pairwise disjoint balls.
class CylinderFunction {
 public:
  explicit CylinderFunction(FieldPtr field) : field_(std::move(field)) {}

  static CylinderFunction indicator(FieldPtr field, const ExtElement& center, long k,
                                    const Rational& value = 1);
  /// 1_U = 1_O - 1_{pO}.
  static CylinderFunction unit_indicator(FieldPtr field);

  const FieldPtr& field_ptr() const { return field_; }
  const std::vector<Ball>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  void add(const ExtElement& center, long k, const Rational& value);
  CylinderFunction& operator+=(const CylinderFunction& other);
  CylinderFunction operator*(const Rational& c) const;

  Rational operator()(const ExtElement& x) const;
  Rational at_zero() const;

  /// Finest ball exponent: f is constant on cosets of p^level() O.
  long level() const;
  /// Coarsest exponent j with supp f inside p^j O.
  long support_exponent() const;

  CylinderFunction normalized() const;
  bool is_normalized() const;
  /// x -> f(x + a).
  CylinderFunction translated(const ExtElement& a) const;
  /// x -> f(lambda x).
  CylinderFunction scaled(const ExtElement& lambda) const;

 private:
  FieldPtr field_;
  std::vector<Ball> terms_;
};

/// A table on mu_{q-1} x (Sigma_n mod level m), indexed by
/// omega index * coset_count + coset index of the level-m quotient.
template <class V>
class FiniteLevelAngular {
 public:
  FiniteLevelAngular() = default;
  FiniteLevelAngular(std::shared_ptr<const UnitQuotient> quotient, V fill)
      : quotient_(std::move(quotient)), values_(quotient_->omega_count() * quotient_->coset_count(), fill) {}

  const std::shared_ptr<const UnitQuotient>& quotient() const { return quotient_; }
  int level() const { return quotient_->level(); }
  std::size_t size() const { return values_.size(); }
  std::size_t index(std::size_t omega, std::size_t coset) const {
    return omega * quotient_->coset_count() + coset;
  }
  const V& at(std::size_t omega, std::size_t coset) const { return values_.at(index(omega, coset)); }
  V& at(std::size_t omega, std::size_t coset) { return values_.at(index(omega, coset)); }
  const V& operator[](std::size_t i) const { return values_[i]; }
  V& operator[](std::size_t i) { return values_[i]; }
  const std::vector<V>& values() const { return values_; }

  /// Value at the angular part of a unit (or of any nonzero element).
  const V& of(const ExtElement& x) const {
    const ExtElement u = ExtElement::from_power_coefficients(x.field_ptr(), 0, x.unit(), x.precision());
    const UnitRecord r = quotient_->classify(u);
    return at(r.omega, r.coset);
  }

 private:
  std::shared_ptr<const UnitQuotient> quotient_;
  std::vector<V> values_;
};

/// Sum of value * q^(-k) over the disjoint balls of f.
Rational integrate_K(const CylinderFunction& f);

/// Integral over Sigma_n of a function given per coset at level m, computed as
/// the pushforward of Haar measure on the units mod p^(m+1).
Rational sigma_haar_integrate(const FieldPtr& field, const std::vector<Rational>& g_by_coset, int level);

/// p^(1-n) sum_omega int_Sigma dxi int_{Q_p^(1)} f(omega xi r) |r|^(n-1) dr, exactly.
Rational spherical_integrate(const CylinderFunction& f);

/// Recovers c in  int_K f = c sum_omega int_Sigma int f(omega xi r)|r|^(n-1) dr
/// for f = 1_U by enumerating the units mod p^m.
Rational multiplicative_constant_check(const FieldPtr& field, int level);

/// Measure of {r in p^Z(1 + pZ_p) : |r|_p = p^j}, by counting digits mod p^(digits).
Rational q1_shell_measure(long p, long j, int digits = 2);

}  // namespace padsph
