#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "padsph/haar.hpp"
#include "padsph/padic.hpp"

namespace padsph {

using Complex = std::complex<double>;

/// A unitary character of the principal units of Q_p of finite level k:
/// theta((1+p)^b) = exp(2 pi i * exponent * b / p^k). Values on mu_{p-1}
/// (mu_exponent) never enter on the positive group p^Z (1 + pZ_p).
struct UnitCharacter {
  int level = 0;
  Int exponent = 0;
  long mu_exponent = 0;

  bool is_trivial(long p) const;
};

/// pi(z) = |z|_p^s theta(z) with theta(p) = 1.
struct Quasicharacter {
  Complex s;
  UnitCharacter theta;
  /// Present when s is a known rational real number.
  std::optional<Rational> s_exact;

  static Quasicharacter real(const Rational& s, UnitCharacter theta = {});
  static Quasicharacter complex(Complex s, UnitCharacter theta = {});
  /// theta trivial and s an integer: every value involved is rational.
  bool is_exact(long p) const;
};

template <class V>
struct HomogeneousDistribution {
  Quasicharacter pi;
  FiniteLevelAngular<V> F;
};

/// b in Z/p^k with rho = (1+p)^b mod p^(k+1), from log(rho)/log(1+p).
Int principal_log_ratio(const PadicScalar& rho, int k);

Complex theta_eval(const UnitCharacter& theta, const PadicScalar& rho);
Complex quasicharacter_eval(const Quasicharacter& pi, const PadicScalar& r);
Rational quasicharacter_eval_exact(const Quasicharacter& pi, const PadicScalar& r);

struct HomogeneityReport {
  bool ok = true;
  double max_error = 0;
  std::string witness;
};

/// Checks f(lambda x) = pi(lambda) f(x) and f(omega xi r) = pi(r) f(omega xi)
/// on all sample pairs.
HomogeneityReport homogeneity_check_function(const std::function<Complex(const ExtElement&)>& f,
                                             const Quasicharacter& pi, const std::vector<ExtElement>& xs,
                                             const std::vector<PadicScalar>& lambdas, double tolerance = 1e-12);

template <class V>
struct PairResult {
  /// p^(1-n) sum_omega int_{|r| <= p^nu} <F, phi(r.) - phi(0)> pi(r)|r|^(n-1) dr, a finite sum.
  V finite_part{};
  /// p^(1-n) (q-1) phi(0) <F,1> int_{|r| <= p^nu} pi(r)|r|^(n-1) dr, continued analytically.
  V singular_part{};
  V total{};
};

/// <pi(r)F, phi>. Rational values need an exact quasicharacter. Throws
/// PoleError at an exceptional pi when phi(0)<F,1> != 0.
PairResult<Rational> pair(const HomogeneousDistribution<Rational>& h, const CylinderFunction& phi);
PairResult<Complex> pair(const HomogeneousDistribution<Complex>& h, const CylinderFunction& phi);

/// The convergent integral for Re s > -n, summing shells directly until the
/// geometric tail drops below `tail_tolerance`.
Complex pair_direct(const HomogeneousDistribution<Complex>& h, const CylinderFunction& phi,
                    double tail_tolerance = 1e-18);

/// <F, 1> = 1/(q-1) sum_omega int_Sigma F dxi.
Rational angular_mean(const FiniteLevelAngular<Rational>& F);
Complex angular_mean(const FiniteLevelAngular<Complex>& F);

FiniteLevelAngular<Complex> to_complex(const FiniteLevelAngular<Rational>& F);

bool is_exceptional(const Quasicharacter& pi, long p, int n);

/// int over {r in p^Z(1+pZ_p) : |r|_p <= p^nu} of |r|^(s+n-1) theta(r) dr.
Complex radial_character_sum(const Quasicharacter& pi, long p, int n, long nu);
Rational radial_character_sum_exact(const Quasicharacter& pi, long p, int n, long nu);

/// The shell integral of theta over {|r|_p = p^j} as an exact element of
/// Z[zeta]: counts of theta-exponents over the classes of 1 + pZ_p mod p^(k+1).
struct ShellCharacterSum {
  long order = 1;  // theta takes values in the order-th roots of unity
  std::vector<Int> counts;
  bool exactly_zero = false;
  Complex value;  // (measure of one class) * sum counts * zeta^e, for j = 0
};
ShellCharacterSum shell_character_sum(const UnitCharacter& theta, long p);

/// Residue of <pi(r)F, phi> at the exceptional point s = -n:
/// (q-1) phi(0) <F,1> / (p^n log p).
Complex residue_at_exceptional(const FiniteLevelAngular<Complex>& F, const CylinderFunction& phi);
/// The value phi(0) <F,1> / (p^n log p), which omits the factor q - 1.
Complex residue_formula_without_orbit_factor(const FiniteLevelAngular<Complex>& F, const CylinderFunction& phi);

struct Lemma2Term {
  PadicScalar center;                   // r_m
  FiniteLevelAngular<Rational> slice;   // (omega, xi) -> phi(omega xi r_m)
};

/// phi(omega xi r) = phi(0) Delta_l(r) + sum_m phi(omega xi r_m) Delta_l(r - r_m).
struct Lemma2Decomposition {
  FieldPtr field;
  Rational phi0;
  long constancy = 0;  // L: phi is constant on cosets of p^L O; Delta_l is 1_{p^L Z_p}, l = -L
  long support = 0;    // phi vanishes outside p^support O
  std::vector<Lemma2Term> terms;

  long l() const { return -constancy; }
  Rational evaluate(const ExtElement& x) const;
};

Lemma2Decomposition lemma2_decompose(const CylinderFunction& phi);

struct Lemma2Report {
  std::size_t points = 0;
  std::size_t mismatches = 0;
  bool disjoint = true;
  bool ok() const { return disjoint && mismatches == 0; }
};

/// Compares the decomposition with phi at every point of p^low O / p^high O.
Lemma2Report lemma2_verify(const CylinderFunction& phi, const Lemma2Decomposition& d, long low, long high);

/// phi (x) 1_{omega, coset}: c * 1_{1 + p^(k+1) Z_p}(r) times the angular cell.
CylinderFunction radial_angular_product(const std::shared_ptr<const UnitQuotient>& quotient, long radial_level,
                                        const Rational& radial_value, std::size_t omega, std::size_t coset);

template <class V>
struct Theorem2Result {
  FiniteLevelAngular<V> F;
  Rational gauge_constant;  // phi = gauge_constant * 1_{1 + p^(gauge_level) Z_p}
  long gauge_level = 0;
  HomogeneityReport homogeneity;
  double battery_error = 0;
  std::size_t battery_size = 0;
};

Theorem2Result<Rational> theorem2_reconstruct(const FieldPtr& field,
                                              const std::function<Rational(const CylinderFunction&)>& f,
                                              const Quasicharacter& pi, int level, std::size_t battery,
                                              std::uint64_t seed);
Theorem2Result<Complex> theorem2_reconstruct(const FieldPtr& field,
                                             const std::function<Complex(const CylinderFunction&)>& f,
                                             const Quasicharacter& pi, int level, std::size_t battery,
                                             std::uint64_t seed);

/// <pi_1, phi> for the gauge phi = c 1_{1+p^k Z_p}, with pi_1(r) = pi(r)|r|^(n-1).
Complex gauge_pairing(const Quasicharacter& pi, long p, int n, const Rational& c, long k);

/// A random cylinder function whose balls have exponents in [k_low, k_high]
/// and centers in p^center_val O, with small rational values.
CylinderFunction random_cylinder_function(const FieldPtr& field, std::uint64_t seed, int terms, long k_low,
                                          long k_high, long center_val);

}  // namespace padsph
