#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "padsph/distributions.hpp"
#include "padsph/spherical.hpp"

using namespace padsph;

namespace {

Complex cpow(long p, Complex e) { return std::pow(Complex(static_cast<double>(p)), e); }

// Enumerates nonzero x mod p^high inside p^low O.
template <class Body>
void for_cells(const FieldPtr& K, long low, long high, Body body) {
  const int n = K->n();
  const std::uint64_t per = to_u64(prime_power(K->p(), static_cast<int>(high - low)));
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) total *= per;
  for (std::uint64_t code = 1; code < total; ++code) {
    std::vector<Int> c(static_cast<std::size_t>(n));
    std::uint64_t r = code;
    for (auto& x : c) {
      x = static_cast<unsigned long>(r % per);
      r /= per;
    }
    body(ExtElement::from_power_coefficients(K, low, c, static_cast<int>(high - low)));
  }
}

// int phi(x) ||x||^(s/n) dx, with the cell p^high O summed in closed form.
Complex radial_oracle(const CylinderFunction& phi, Complex s, long low, long high) {
  const FieldPtr& K = phi.field_ptr();
  const long p = K->p();
  const double q = Rational(K->q()).get_d();
  Complex sum = 0;
  for_cells(K, low, high, [&](const ExtElement& x) {
    sum += phi(x).get_d() * cpow(p, -static_cast<double>(x.valuation()) * s);
  });
  sum *= std::pow(q, -static_cast<double>(high));
  const Complex zero_cell = (1.0 - 1.0 / q) * std::pow(q, -static_cast<double>(high)) *
                            cpow(p, -static_cast<double>(high) * s) / (1.0 - cpow(p, -s) / q);
  return sum + phi.at_zero().get_d() * zero_cell;
}

// int phi(x) F(omega, xi) pi(r) dx for phi(0) = 0, by midpoints of cells fine
// enough that the integrand is constant on each of them.
Complex midpoint_oracle(const CylinderFunction& phi, const FiniteLevelAngular<Complex>& F, const Quasicharacter& pi,
                        long low, long high) {
  const FieldPtr& K = phi.field_ptr();
  Complex sum = 0;
  for_cells(K, low, high, [&](const ExtElement& x) {
    const Rational v = phi(x);
    if (v == 0) return;
    const SphericalCoords c = decompose(x);
    sum += v.get_d() * F.of(c.omega * c.xi) * quasicharacter_eval(pi, c.r);
  });
  return sum * std::pow(Rational(K->q()).get_d(), -static_cast<double>(high));
}

FiniteLevelAngular<Complex> random_table(const FieldPtr& K, std::mt19937_64& rng, int level) {
  std::uniform_real_distribution<double> u(-2, 2);
  FiniteLevelAngular<Complex> F(UnitQuotient::get(K, level), 0);
  for (std::size_t i = 0; i < F.size(); ++i) F[i] = Complex(u(rng), u(rng));
  return F;
}

CylinderFunction vanishing_at_zero(const FieldPtr& K, std::uint64_t seed) {
  CylinderFunction phi = random_cylinder_function(K, seed, 3, 0, 2, -1);
  phi.add(K->zero(), phi.level(), -phi.at_zero());
  return phi;
}

}  // namespace

TEST(Pairing, ConstantTableIsIntegrationAgainstAPowerOfTheNorm) {
  auto K = FieldContext::create(3, 2, 8);
  std::mt19937_64 rng(1);
  FiniteLevelAngular<Complex> one(UnitQuotient::get(K, 1), 1.0);
  for (int t = 0; t < 8; ++t) {
    const CylinderFunction phi = random_cylinder_function(K, rng(), 3, -1, 2, -1);
    for (Complex s : {Complex(0, 0), Complex(-1.3, 0.4), Complex(0.7, -2.0), Complex(2.5, 0)}) {
      HomogeneousDistribution<Complex> h{Quasicharacter::complex(s), one};
      const Complex got = pair(h, phi).total;
      const Complex want = radial_oracle(phi, s, -1, 2);
      EXPECT_LT(std::abs(got - want), 1e-12 * std::max(1.0, std::abs(want))) << s;
    }
  }
}

TEST(Pairing, ExactPathForIntegerExponents) {
  auto K = FieldContext::create(3, 2, 8);
  FiniteLevelAngular<Rational> one(UnitQuotient::get(K, 1), 1);
  const CylinderFunction O = CylinderFunction::indicator(K, K->zero(), 0);
  // int_O ||x||^(s/2) dx = (1 - 1/9) / (1 - 3^(-s) / 9)
  EXPECT_EQ(pair(HomogeneousDistribution<Rational>{Quasicharacter::real(0), one}, O).total, 1);
  EXPECT_EQ(pair(HomogeneousDistribution<Rational>{Quasicharacter::real(1), one}, O).total, Rational(12, 13));
  EXPECT_EQ(pair(HomogeneousDistribution<Rational>{Quasicharacter::real(-1), one}, O).total, Rational(4, 3));
  std::mt19937_64 rng(2);
  for (int t = 0; t < 5; ++t) {
    const CylinderFunction phi = random_cylinder_function(K, rng(), 3, -1, 2, -1);
    for (long s : {-1L, 0L, 2L}) {
      const Rational exact = pair(HomogeneousDistribution<Rational>{Quasicharacter::real(s), one}, phi).total;
      EXPECT_NEAR(exact.get_d(), radial_oracle(phi, Complex(static_cast<double>(s)), -1, 2).real(), 1e-12);
    }
  }
}

TEST(Pairing, MatchesMidpointIntegration) {
  for (auto [p, n] : std::vector<std::pair<long, int>>{{3, 2}, {5, 2}}) {
    auto K = FieldContext::create(p, n, 8);
    std::mt19937_64 rng(static_cast<std::uint64_t>(p));
    for (int t = 0; t < 4; ++t) {
      const auto F = random_table(K, rng, 2);
      const CylinderFunction phi = vanishing_at_zero(K, rng());
      const int level = static_cast<int>(rng() % 2);
      UnitCharacter theta{level, Int(static_cast<unsigned long>(rng() % 25)), 0};
      const Quasicharacter pi = Quasicharacter::complex(Complex(-0.8 + 0.5 * t, 1.0 - 0.3 * t), theta);
      const Complex got = pair(HomogeneousDistribution<Complex>{pi, F}, phi).total;
      const long high = p == 3 ? 4 : 3;
      const Complex want = midpoint_oracle(phi, F, pi, -1, high);
      EXPECT_LT(std::abs(got - want), 1e-10 * std::max(1.0, std::abs(want))) << p << " " << t;
    }
  }
}

TEST(Pairing, AgreesWithDirectShellSummation) {
  auto K = FieldContext::create(3, 2, 8);
  std::mt19937_64 rng(3);
  const auto F = random_table(K, rng, 2);
  for (int t = 0; t < 6; ++t) {
    const auto phi = random_cylinder_function(K, rng(), 3, -1, 2, -1);
    UnitCharacter theta{static_cast<int>(rng() % 3), Int(static_cast<unsigned long>(rng() % 9)), 0};
    HomogeneousDistribution<Complex> h{Quasicharacter::complex(Complex(-1.3 + 0.4 * t, 0.7), theta), F};
    const Complex a = pair(h, phi).total, b = pair_direct(h, phi);
    EXPECT_LT(std::abs(a - b), 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST(Pairing, HomogeneityUnderScaling) {
  // <f, phi(lambda^(-1) .)> = pi(lambda) ||lambda|| <f, phi>
  auto K = FieldContext::create(5, 2, 8);
  std::mt19937_64 rng(4);
  const auto F = random_table(K, rng, 1);
  // a ball away from 0, fine enough to see theta
  CylinderFunction phi = CylinderFunction::indicator(K, K->one() + K->generator(), 2);
  phi += random_cylinder_function(K, rng(), 3, 0, 2, 0);
  for (const UnitCharacter& theta : {UnitCharacter{}, UnitCharacter{1, Int(2), 0}}) {
    const Quasicharacter pi = Quasicharacter::complex(Complex(-0.6, 0.9), theta);
    HomogeneousDistribution<Complex> h{pi, F};
    const Complex base = pair(h, phi).total;
    ASSERT_GT(std::abs(base), 1e-6);
    for (long a : {5L, 6L, 31L}) {
      const auto lambda = PadicScalar::from_integer(5, 8, a);
      const ExtElement inv = ExtElement::from_scalar(K, lambda.inverse());
      const Complex lhs = pair(h, phi.scaled(inv)).total;
      const Complex rhs =
          quasicharacter_eval(pi, lambda) * normalized_abs(ExtElement::from_scalar(K, lambda)).get_d() * base;
      EXPECT_LT(std::abs(lhs - rhs), 1e-10 * std::abs(rhs)) << a;
    }
  }
}

TEST(Characters, ThetaValuesOnPowersOfOnePlusP) {
  const UnitCharacter theta{2, Int(4), 0};
  for (long b = 0; b < 30; ++b) {
    const auto rho = PadicScalar::from_integer(3, 8, 4).pow(b);
    const Complex want = std::polar(1.0, 2 * std::numbers::pi * 4.0 * static_cast<double>(b) / 9.0);
    EXPECT_LT(std::abs(theta_eval(theta, rho) - want), 1e-12);
  }
  EXPECT_TRUE((UnitCharacter{2, Int(9), 0}.is_trivial(3)));
  EXPECT_FALSE((UnitCharacter{2, Int(3), 0}.is_trivial(3)));
}

TEST(Dichotomy, NontrivialCharactersIntegrateToZero) {
  for (long p : {3L, 5L})
    for (int level = 1; level <= 3; ++level)
      for (long e = 1; e < 40; ++e) {
        const UnitCharacter theta{level, Int(e), 0};
        if (theta.is_trivial(p)) continue;
        const ShellCharacterSum s = shell_character_sum(theta, p);
        EXPECT_TRUE(s.exactly_zero) << p << " " << level << " " << e;
        EXPECT_LT(std::abs(s.value), 1e-14);
        EXPECT_EQ(radial_character_sum(Quasicharacter::complex(Complex(0.3, 1), theta), p, 2, 1), Complex(0));
      }
  EXPECT_FALSE(shell_character_sum(UnitCharacter{}, 3).exactly_zero);
}

TEST(Dichotomy, TrivialCharacterClosedForm) {
  for (long p : {3L, 5L})
    for (int n : {2, 3})
      for (Complex s : {Complex(-n + 0.5, 0), Complex(-1.0, 2.0), Complex(1.5, -0.5)})
        for (long nu : {-2L, 0L, 3L}) {
          const Quasicharacter pi = Quasicharacter::complex(s);
          // shells |r| = p^j of p^Z(1+pZ_p) have measure p^(j-1)
          Complex partial = 0;
          for (long j = nu; j > nu - 3000; --j) partial += cpow(p, static_cast<double>(j) * (s + Complex(n)) - 1.0);
          const Complex closed = radial_character_sum(pi, p, n, nu);
          EXPECT_LT(std::abs(closed - partial), 1e-12 * std::abs(closed));
          EXPECT_LT(std::abs(closed - cpow(p, static_cast<double>(nu) * (s + Complex(n)) - 1.0) /
                                          (1.0 - cpow(p, -s - Complex(n)))),
                    1e-12 * std::abs(closed));
        }
  EXPECT_EQ(radial_character_sum_exact(Quasicharacter::real(0), 3, 2, 0), Rational(3, 8));
}

TEST(Residue, PoleAtTheExceptionalQuasicharacter) {
  auto K = FieldContext::create(3, 2, 8);
  EXPECT_TRUE(is_exceptional(Quasicharacter::real(-2), 3, 2));
  EXPECT_FALSE(is_exceptional(Quasicharacter::real(-2, UnitCharacter{1, Int(1), 0}), 3, 2));
  EXPECT_THROW(radial_character_sum(Quasicharacter::real(-2), 3, 2, 0), PoleError);
  FiniteLevelAngular<Complex> one(UnitQuotient::get(K, 1), 1.0);
  const auto O = CylinderFunction::indicator(K, K->zero(), 0);
  EXPECT_THROW(pair(HomogeneousDistribution<Complex>{Quasicharacter::complex(Complex(-2, 0)), one}, O), PoleError);
  // phi(0) = 0: no pole
  CylinderFunction U = CylinderFunction::unit_indicator(K);
  EXPECT_NO_THROW(pair(HomogeneousDistribution<Complex>{Quasicharacter::complex(Complex(-2, 0)), one}, U));
}

TEST(Residue, LimitOfScaledPairing) {
  for (auto [p, n] : std::vector<std::pair<long, int>>{{3, 2}, {5, 2}}) {
    auto K = FieldContext::create(p, n, 8);
    std::mt19937_64 rng(static_cast<std::uint64_t>(5 + p));
    const double q = Rational(K->q()).get_d();
    for (int t = 0; t < 3; ++t) {
      const auto F = random_table(K, rng, 1);
      CylinderFunction phi = random_cylinder_function(K, rng(), 3, 0, 2, 0);
      phi.add(K->zero(), 1, 2 - phi.at_zero());
      auto scaled = [&](double eps) {
        return eps * pair(HomogeneousDistribution<Complex>{Quasicharacter::complex(Complex(-n + eps, 0)), F}, phi).total;
      };
      const Complex limit = 2.0 * scaled(1e-7) - scaled(2e-7);
      const Complex residue = residue_at_exceptional(F, phi);
      EXPECT_LT(std::abs(limit - residue), 1e-6 * std::abs(residue));
      EXPECT_LT(std::abs(residue / residue_formula_without_orbit_factor(F, phi) - (q - 1)), 1e-12);
    }
    // constant table: the residue of int phi ||x||^(s/n) dx is phi(0) (1 - 1/q) / log p
    FiniteLevelAngular<Complex> one(UnitQuotient::get(K, 1), 1.0);
    const auto O = CylinderFunction::indicator(K, K->zero(), 0);
    EXPECT_LT(std::abs(residue_at_exceptional(one, O) - (1 - 1 / q) / std::log(static_cast<double>(p))), 1e-14);
  }
}

TEST(Reconstruction, ExactReconstruction) {
  auto K = FieldContext::create(3, 2, 8);
  std::mt19937_64 rng(6);
  FiniteLevelAngular<Rational> F(UnitQuotient::get(K, 2), 0);
  for (std::size_t i = 0; i < F.size(); ++i) {
    F[i] = Rational(static_cast<long>(rng() % 21) - 10, 1 + rng() % 4);
    F[i].canonicalize();
  }
  for (long s : {-1L, 0L, 3L}) {
    const Quasicharacter pi = Quasicharacter::real(s);
    HomogeneousDistribution<Rational> h{pi, F};
    const auto result = theorem2_reconstruct(
        K, [&](const CylinderFunction& phi) { return pair(h, phi).total; }, pi, 2, 4, rng());
    for (std::size_t i = 0; i < F.size(); ++i) EXPECT_EQ(result.F[i], F[i]);
    EXPECT_TRUE(result.homogeneity.ok);
    EXPECT_EQ(result.battery_error, 0);
  }
}

TEST(Reconstruction, ComplexReconstruction) {
  for (auto [p, n] : std::vector<std::pair<long, int>>{{3, 2}, {5, 2}}) {
    auto K = FieldContext::create(p, n, 8);
    std::mt19937_64 rng(7);
    // every pairing at q = 25 sums over the units mod p^3; one case there is enough
    for (int t = 0; t < (p == 3 ? 3 : 1); ++t) {
      const auto F = random_table(K, rng, 2);
      UnitCharacter theta{static_cast<int>(rng() % 3), Int(static_cast<unsigned long>(rng() % 25)), 0};
      const Quasicharacter pi = Quasicharacter::complex(Complex(-1.1 + 0.6 * t, 0.8), theta);
      HomogeneousDistribution<Complex> h{pi, F};
      const auto result = theorem2_reconstruct(
          K, [&](const CylinderFunction& phi) { return pair(h, phi).total; }, pi, 2, 4, rng());
      for (std::size_t i = 0; i < F.size(); ++i) EXPECT_LT(std::abs(result.F[i] - F[i]), 1e-10);
      // calibration of the radial gauge: <pi_1, phi> = p^(n-1) / (p^n - 1)
      const Complex g = gauge_pairing(pi, p, n, result.gauge_constant, result.gauge_level);
      EXPECT_LT(std::abs(g - static_cast<double>(p) / (static_cast<double>(p * p) - 1)), 1e-12);
    }
  }
}

TEST(Reconstruction, RejectsTheExceptionalQuasicharacter) {
  auto K = FieldContext::create(3, 2, 8);
  FiniteLevelAngular<Complex> one(UnitQuotient::get(K, 1), 1.0);
  const Quasicharacter pi = Quasicharacter::complex(Complex(-2, 0));
  EXPECT_THROW(theorem2_reconstruct(K, [](const CylinderFunction&) { return Complex(0); }, pi, 2, 1, 1),
               DomainError);
}

TEST(RadialDecomposition, DecompositionReproducesPhi) {
  for (auto [p, n] : std::vector<std::pair<long, int>>{{3, 2}, {5, 2}}) {
    auto K = FieldContext::create(p, n, 8);
    std::mt19937_64 rng(8);
    for (int t = 0; t < 4; ++t) {
      const auto phi = random_cylinder_function(K, rng(), 3, 0, 2, 0);
      const auto d = lemma2_decompose(phi);
      EXPECT_EQ(d.phi0, phi.at_zero());
      const auto r = lemma2_verify(phi, d, -1, p == 3 ? 3 : 2);
      EXPECT_TRUE(r.ok()) << r.mismatches << " of " << r.points;
      EXPECT_GT(r.points, 0u);
    }
  }
}
