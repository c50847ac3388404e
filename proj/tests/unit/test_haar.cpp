#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "padsph/distributions.hpp"
#include "padsph/haar.hpp"

using namespace padsph;

namespace {

// Riemann sum over the cosets of p^high O inside p^low O; exact for a
// function supported in p^low O and constant on cosets of p^high O.
Rational brute_integral(const CylinderFunction& f, long low, long high) {
  const FieldPtr& K = f.field_ptr();
  const int n = K->n();
  const long digits = high - low;
  const std::uint64_t per = to_u64(prime_power(K->p(), static_cast<int>(digits)));
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= per;
  Rational sum = 0;
  for (std::uint64_t code = 0; code < total; ++code) {
    std::vector<Int> c(static_cast<std::size_t>(n));
    std::uint64_t r = code;
    for (auto& x : c) {
      x = static_cast<unsigned long>(r % per);
      r /= per;
    }
    const ExtElement x = code == 0 ? K->zero()
                                   : ExtElement::from_power_coefficients(K, low, c, static_cast<int>(digits));
    sum += f(x);
  }
  // each coset has measure q^(-high)
  return sum * rational_power(K->p(), -high * n);
}

CylinderFunction random_function(const FieldPtr& K, std::mt19937_64& rng) {
  return random_cylinder_function(K, rng(), 1 + static_cast<int>(rng() % 4), -1, 2, -1);
}

}  // namespace

TEST(Haar, NormalizationConstant) {
  // c = 1 / p^(n-1)
  EXPECT_EQ(multiplicative_constant_check(FieldContext::create(3, 2, 6), 2), Rational(1, 3));
  EXPECT_EQ(multiplicative_constant_check(FieldContext::create(5, 2, 6), 2), Rational(1, 5));
  EXPECT_EQ(multiplicative_constant_check(FieldContext::create(5, 3, 6), 2), Rational(1, 25));
  EXPECT_EQ(multiplicative_constant_check(FieldContext::create(3, 2, 6), 3), Rational(1, 3));
}

TEST(Haar, Volumes) {
  EXPECT_EQ(integrate_K(CylinderFunction::unit_indicator(FieldContext::create(3, 2, 6))), Rational(8, 9));
  EXPECT_EQ(integrate_K(CylinderFunction::unit_indicator(FieldContext::create(5, 2, 6))), Rational(24, 25));
  EXPECT_EQ(integrate_K(CylinderFunction::unit_indicator(FieldContext::create(5, 3, 6))), Rational(124, 125));
  auto K = FieldContext::create(3, 2, 6);
  EXPECT_EQ(integrate_K(CylinderFunction::indicator(K, K->zero(), -2)), Rational(81));
  for (long p : {3L, 5L, 7L}) {
    EXPECT_EQ(q1_shell_measure(p, 0), Rational(1, p));
    EXPECT_EQ(q1_shell_measure(p, 2), Rational(p));
    EXPECT_EQ(q1_shell_measure(p, 0, 4), Rational(1, p));
  }
}

TEST(Haar, IntegralAgreesWithRiemannSum) {
  auto K = FieldContext::create(3, 2, 6);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 25; ++t) {
    const CylinderFunction f = random_function(K, rng);
    EXPECT_EQ(integrate_K(f), brute_integral(f, -1, 2));
  }
}

TEST(Haar, SphericalFormulaIsExact) {
  for (auto [p, n] : std::vector<std::pair<long, int>>{{3, 2}, {5, 2}, {7, 2}, {5, 3}}) {
    auto K = FieldContext::create(p, n, 6);
    std::mt19937_64 rng(static_cast<std::uint64_t>(p + n));
    // the spherical side is a direct sum over (omega, xi coset, rho); keep levels small for q = 125
    const bool big = to_u64(K->q()) > 50;
    for (int t = 0; t < (big ? 5 : 25); ++t) {
      const CylinderFunction f =
          big ? random_cylinder_function(K, rng(), 3, 0, 1, 0) : random_function(K, rng);
      EXPECT_EQ(spherical_integrate(f), integrate_K(f)) << p << "," << n;
    }
    EXPECT_EQ(spherical_integrate(CylinderFunction::unit_indicator(K)), 1 - Rational(1) / Rational(K->q()));
  }
}

TEST(Haar, NormalizationPreservesValues) {
  auto K = FieldContext::create(3, 2, 6);
  std::mt19937_64 rng(12);
  for (int t = 0; t < 10; ++t) {
    const CylinderFunction f = random_function(K, rng);
    const CylinderFunction g = f.normalized();
    EXPECT_TRUE(g.is_normalized());
    EXPECT_EQ(integrate_K(g), integrate_K(f));
    EXPECT_EQ(brute_integral(g, -1, 2), brute_integral(f, -1, 2));
    for (int s = 0; s < 40; ++s) {
      std::vector<Int> c{Int(static_cast<unsigned long>(rng() % 27)), Int(static_cast<unsigned long>(rng() % 27))};
      const ExtElement x = ExtElement::from_power_coefficients(K, -1, c, 6);
      EXPECT_EQ(g(x), f(x));
    }
  }
}

TEST(Haar, TranslationInvarianceAndScaling) {
  auto K = FieldContext::create(5, 2, 6);
  std::mt19937_64 rng(13);
  for (int t = 0; t < 10; ++t) {
    const CylinderFunction f = random_function(K, rng);
    const ExtElement a = ExtElement::from_power_coefficients(K, -1, {Int(3), Int(7)}, 6);
    EXPECT_EQ(integrate_K(f.translated(a)), integrate_K(f));
    // int f(lambda x) dx = ||lambda||^(-1) int f
    const ExtElement lambda = ExtElement::from_integer(K, 5);
    EXPECT_EQ(integrate_K(f.scaled(lambda)), integrate_K(f) * Rational(K->q()));
    const ExtElement unit = ExtElement::from_power_coefficients(K, 0, {Int(2), Int(1)}, 6);
    EXPECT_EQ(integrate_K(f.scaled(unit)), integrate_K(f));
  }
}

TEST(Haar, SigmaHaarIsAProbability) {
  for (auto [p, n, level] : std::vector<std::tuple<long, int, int>>{{3, 2, 2}, {5, 2, 2}, {5, 3, 1}}) {
    auto K = FieldContext::create(p, n, 6);
    const auto Q = UnitQuotient::get(K, level);
    std::vector<Rational> ones(Q->coset_count(), 1);
    EXPECT_EQ(sigma_haar_integrate(K, ones, level), 1);
    // an indicator of one coset has mass 1 / #cosets
    std::vector<Rational> one_cell(Q->coset_count(), 0);
    one_cell[0] = 1;
    EXPECT_EQ(sigma_haar_integrate(K, one_cell, level), Rational(1) / Rational(static_cast<long>(Q->coset_count())));
  }
}

TEST(Haar, LevelAndSupport) {
  auto K = FieldContext::create(3, 2, 6);
  CylinderFunction f(K);
  f.add(K->zero(), 2, 1);
  f.add(ExtElement::from_integer(K, 1), 1, Rational(-1, 2));
  EXPECT_EQ(f.level(), 2);
  EXPECT_EQ(f.support_exponent(), 0);
  EXPECT_EQ(f.at_zero(), 1);
  f.add(K->zero(), 2, -1);
  EXPECT_EQ(f.at_zero(), 0);
}
