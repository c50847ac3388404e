#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles.hpp"
#include "padsph/errors.hpp"
#include "padsph/field.hpp"

using namespace padsph;

namespace {

ExtElement random_element(const FieldPtr& K, std::mt19937_64& rng, long vlo, long vhi) {
  std::uniform_int_distribution<long> v(vlo, vhi);
  std::vector<Int> c(static_cast<std::size_t>(K->n()));
  const std::uint64_t m = to_u64(prime_power(K->p(), std::min(K->precision(), 18)));
  do {
    for (auto& x : c) x = static_cast<unsigned long>(rng() % m);
  } while (std::all_of(c.begin(), c.end(), [&](const Int& x) { return x % K->p() == 0; }));
  return ExtElement::from_power_coefficients(K, v(rng), c, K->precision());
}

oracle::Poly modulus_poly(const FieldContext& K) {
  oracle::Poly m;
  for (const auto& c : K.modulus()) m.push_back(c);
  return m;
}

}  // namespace

TEST(Modulus, LexicographicallyFirstIrreducible) {
  // expected moduli, low-to-high including the leading coefficient
  EXPECT_EQ(select_modulus(3, 2), (std::vector<long>{1, 0, 1}));
  EXPECT_EQ(select_modulus(5, 2), (std::vector<long>{2, 0, 1}));
  EXPECT_EQ(select_modulus(3, 3), (std::vector<long>{1, 2, 0, 1}));
  EXPECT_EQ(select_modulus(5, 3), (std::vector<long>{1, 1, 0, 1}));
}

TEST(Modulus, AgreesWithTrialDivisionSearch) {
  for (auto [p, n] : std::vector<std::pair<long, int>>{{3, 2}, {5, 2}, {7, 2}, {3, 3}, {5, 3}, {3, 4}}) {
    // code = sum c_i p^i walks the monic polynomials ordered by c_(n-1), then c_(n-2), ..., then c_0
    long count = 1;
    for (int i = 0; i < n; ++i) count *= p;
    std::vector<long> first;
    for (long code = 0; code < count && first.empty(); ++code) {
      std::vector<long> poly(n + 1, 0);
      long c = code;
      for (int i = 0; i < n; ++i) {
        poly[i] = c % p;
        c /= p;
      }
      poly[n] = 1;
      if (oracle::irreducible_by_trial_division(poly, p)) first = poly;
    }
    EXPECT_EQ(select_modulus(p, n), first) << p << "," << n;
    for (long code = 0; code < count; ++code) {
      std::vector<long> poly(n + 1, 0);
      long c = code;
      for (int i = 0; i < n; ++i) {
        poly[i] = c % p;
        c /= p;
      }
      poly[n] = 1;
      EXPECT_EQ(is_irreducible_mod_p(poly, p), oracle::irreducible_by_trial_division(poly, p));
    }
  }
}

TEST(Field, RejectsBadInput) {
  EXPECT_THROW(FieldContext::create(2, 3, 8), DomainError);
  EXPECT_THROW(FieldContext::create(9, 2, 8), DomainError);
  EXPECT_THROW(FieldContext::create(3, 2, 8, std::vector<long>{0, 0}), DomainError);  // t^2 is reducible
  EXPECT_NO_THROW(FieldContext::create(3, 3, 8));  // p | n is fine for the field itself
}

TEST(Field, MultiplicationMatchesSchoolbook) {
  auto K = FieldContext::create(5, 3, 7);
  std::mt19937_64 rng(1);
  const oracle::Poly m = modulus_poly(*K);
  const Int pN = prime_power(5, 7);
  for (int t = 0; t < 200; ++t) {
    const ExtElement x = random_element(K, rng, 0, 0), y = random_element(K, rng, 0, 0);
    const auto want = oracle::mul_mod(x.unit(), y.unit(), m, pN);
    EXPECT_EQ((x * y).integral_coefficients(7), want);
  }
}

TEST(Field, InverseAndDivision) {
  auto K = FieldContext::create(3, 2, 10);
  std::mt19937_64 rng(2);
  for (int t = 0; t < 200; ++t) {
    const ExtElement x = random_element(K, rng, -3, 3), y = random_element(K, rng, -3, 3);
    EXPECT_EQ(x * x.inverse(), K->one());
    EXPECT_EQ((x / y) * y, x);
    EXPECT_EQ((x * y).valuation(), x.valuation() + y.valuation());
  }
}

TEST(Frobenius, IsTheLiftOfTheFrobeniusAndHasOrderN) {
  for (auto [p, n] : std::vector<std::pair<long, int>>{{3, 2}, {5, 2}, {3, 3}, {5, 3}, {7, 2}}) {
    auto K = FieldContext::create(p, n, 8);
    std::mt19937_64 rng(static_cast<std::uint64_t>(p * 10 + n));
    const oracle::Poly m = modulus_poly(*K);
    for (int t = 0; t < 50; ++t) {
      const ExtElement x = random_element(K, rng, 0, 0), y = random_element(K, rng, 0, 0);
      // g(x) = x^p mod p
      const auto xp = oracle::pow_mod(x.unit(), p, m, Int(p));
      EXPECT_EQ(frobenius(x).integral_coefficients(1), xp);
      EXPECT_EQ(frobenius(x * y), frobenius(x) * frobenius(y));
      EXPECT_EQ(frobenius(x + y), frobenius(x) + frobenius(y));
      ExtElement z = x;
      for (int j = 0; j < n; ++j) z = frobenius(z);
      EXPECT_EQ(z, x);
    }
    // the image of t is a root of the modulus
    const ExtElement f = K->frobenius_image();
    ExtElement value = K->zero(), power = K->one();
    for (long c : K->modulus_coefficients()) {
      value += power * ExtElement::from_integer(K, c);
      power *= f;
    }
    EXPECT_TRUE(value.is_zero() || value.valuation() >= 8);
  }
}

TEST(Norm, ProductOfConjugatesEqualsDeterminant) {
  for (auto [p, n] : std::vector<std::pair<long, int>>{{3, 2}, {5, 3}, {3, 3}}) {
    auto K = FieldContext::create(p, n, 9);
    std::mt19937_64 rng(3);
    for (int t = 0; t < 60; ++t) {
      const ExtElement x = random_element(K, rng, -2, 2), y = random_element(K, rng, -2, 2);
      EXPECT_EQ(norm(x), norm_by_determinant(x));
      EXPECT_EQ(norm(x * y), norm(x) * norm(y));
      EXPECT_EQ(normalized_abs(x), abs_from_coefficients(x));
    }
    const auto lambda = PadicScalar::from_rational(p, 9, Rational(7, 3));
    EXPECT_EQ(norm(ExtElement::from_scalar(K, lambda)), lambda.pow(n));
    EXPECT_EQ(normalized_abs(K->uniformizer()), Rational(1) / Rational(K->q()));
  }
}

TEST(Teichmuller, RootsOfUnityInK) {
  auto K = FieldContext::create(3, 2, 8);
  std::mt19937_64 rng(5);
  std::set<std::vector<std::string>> seen;
  for (int t = 0; t < 300; ++t) {
    const ExtElement x = random_element(K, rng, 0, 0);
    const ExtElement w = teichmuller_K(x);
    EXPECT_EQ(w.pow(8), K->one());
    EXPECT_EQ(w.integral_coefficients(1), x.integral_coefficients(1));
    EXPECT_EQ(teichmuller_K(w), w);
    std::vector<std::string> key;
    for (const auto& c : w.unit()) key.push_back(c.get_str());
    seen.insert(key);
  }
  EXPECT_EQ(seen.size(), 8u);
}

TEST(Teichmuller, DigitExpansionInK) {
  auto K = FieldContext::create(5, 2, 7);
  std::mt19937_64 rng(6);
  for (int t = 0; t < 100; ++t) {
    const ExtElement x = random_element(K, rng, -2, 2);
    const TeichDigitsK d = digit_expansion_K(x);
    EXPECT_EQ(d.recompose(), x);
    EXPECT_EQ(d.valuation, x.valuation());
    for (const auto& digit : d.tail)
      if (!digit.is_zero()) EXPECT_EQ(teichmuller_K(digit), digit);
  }
}

TEST(PrincipalUnitsK, ExpLogAndPowers) {
  auto K = FieldContext::create(3, 2, 8);
  std::mt19937_64 rng(7);
  for (int t = 0; t < 50; ++t) {
    ExtElement z = random_element(K, rng, 1, 3);
    const ExtElement u = K->one() + z;
    const ExtElement v = K->one() + random_element(K, rng, 1, 2);
    EXPECT_EQ(exp_principal_K(log_principal_K(u)), u);
    EXPECT_EQ(log_principal_K(u * v), log_principal_K(u) + log_principal_K(v));
    EXPECT_EQ(pow_zp_exponent_K(z, PadicScalar::from_integer(3, 8, 5)), u.pow(5));
  }
}

TEST(Canonical, BasisOrderAndRoundtrip) {
  auto K = FieldContext::create(5, 3, 6);
  // theta_n = 1 is the last canonical coordinate
  const auto one = K->one().canonical_coefficients();
  ASSERT_EQ(one.size(), 3u);
  EXPECT_TRUE(one[0].is_zero());
  EXPECT_TRUE(one[1].is_zero());
  EXPECT_EQ(one[2], PadicScalar::from_integer(5, 6, 1));
  EXPECT_EQ(K->basis_element(1), K->generator());
  std::mt19937_64 rng(8);
  for (int t = 0; t < 50; ++t) {
    const ExtElement x = random_element(K, rng, -2, 2);
    const auto c = x.canonical_coefficients();
    EXPECT_EQ(ExtElement::from_canonical(K, c), x);
  }
}
