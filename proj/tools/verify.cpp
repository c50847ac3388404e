#include "verify.hpp"

#include <cmath>
#include <map>

#include "padsph/distributions.hpp"
#include "padsph/haar.hpp"
#include "padsph/json_io.hpp"
#include "padsph/levels.hpp"
#include "padsph/levy.hpp"
#include "padsph/spherical.hpp"

namespace padsph::cli {

using nlohmann::json;

ExtElement random_element(const FieldPtr& field, std::mt19937_64& rng, long v_low, long v_high) {
  std::uniform_int_distribution<long> v(v_low, v_high);
  return sample_sphere_uniform(field, -v(rng), rng);
}

namespace {

SuiteResult field_suite(const FieldPtr& K, std::mt19937_64& rng, std::size_t count) {
  std::size_t frob_bad = 0, norm_bad = 0, abs_bad = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const ExtElement x = random_element(K, rng, -2, 2);
    ExtElement y = x;
    for (int j = 0; j < K->n(); ++j) y = frobenius(y);
    frob_bad += !(y == x);
    norm_bad += !(norm(x) == norm_by_determinant(x));
    abs_bad += normalized_abs(x) != abs_from_coefficients(x);
  }
  return {"field",
          frob_bad + norm_bad + abs_bad == 0,
          json{{"samples", count},
               {"frobenius_order_failures", frob_bad},
               {"norm_vs_determinant_failures", norm_bad},
               {"abs_failures", abs_bad}}};
}

SuiteResult coordinates_suite(const FieldPtr& K, std::mt19937_64& rng, std::size_t count) {
  std::size_t roundtrip_bad = 0, mult_bad = 0, member_bad = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const ExtElement x = random_element(K, rng, -3, 3);
    const ExtElement y = random_element(K, rng, -3, 3);
    const SphericalCoords cx = decompose(x), cy = decompose(y), cxy = decompose(x * y);
    roundtrip_bad += !(compose(cx) == x);
    member_bad += !(teichmuller_K(cx.omega) == cx.omega) || !sigma_membership(cx.xi) || !is_positive(cx.r);
    mult_bad += !(cxy.omega == cx.omega * cy.omega) || !(cxy.xi == cx.xi * cy.xi) || !(cxy.r == cx.r * cy.r);
  }
  // Pushforward of the units mod p^2: every (omega, coset, rho) triple exactly once.
  const auto Q = UnitQuotient::get(K, 2);
  std::map<std::uint64_t, std::size_t> hits;
  for (auto key : Q->unit_keys()) {
    const UnitRecord& r = Q->record(key);
    ++hits[(static_cast<std::uint64_t>(r.omega) * Q->coset_count() + r.coset) * Q->rho_count() + r.rho];
  }
  bool uniform = hits.size() == Q->omega_count() * Q->coset_count() * Q->rho_count();
  for (const auto& [k, c] : hits) uniform = uniform && c == 1;
  return {"spherical_coordinates",
          roundtrip_bad + mult_bad + member_bad == 0 && uniform,
          json{{"samples", count},
               {"roundtrip_failures", roundtrip_bad},
               {"multiplicativity_failures", mult_bad},
               {"membership_failures", member_bad},
               {"units_mod_p2", Q->unit_count()},
               {"cells", hits.size()},
               {"uniform_pushforward", uniform}}};
}

SuiteResult volume_suite(const FieldPtr& K) {
  const Rational c = multiplicative_constant_check(K, 2);
  const Rational want_c = Rational(1) / Rational(prime_power(K->p(), K->n() - 1));
  const Rational vol_U = integrate_K(CylinderFunction::unit_indicator(K));
  const Rational want_U = 1 - Rational(1) / Rational(K->q());
  const Rational shell = q1_shell_measure(K->p(), 0);
  const Rational want_shell(1, K->p());
  return {"constants",
          c == want_c && vol_U == want_U && shell == want_shell,
          json{{"c", to_string(c)},
               {"c_expected", to_string(want_c)},
               {"vol_U", to_string(vol_U)},
               {"vol_U_expected", to_string(want_U)},
               {"q1_unit_shell", to_string(shell)},
               {"q1_unit_shell_expected", to_string(want_shell)}}};
}

SuiteResult integration_suite(const FieldPtr& K, std::mt19937_64& rng, std::size_t count) {
  std::size_t bad = 0;
  json witness;
  for (std::size_t i = 0; i < count; ++i) {
    const CylinderFunction f = random_cylinder_function(K, rng(), 1 + static_cast<int>(rng() % 4), -1, 2, -1);
    const Rational lhs = integrate_K(f), rhs = spherical_integrate(f);
    if (lhs != rhs) {
      ++bad;
      if (witness.is_null()) witness = json{{"function", json_io::to_json(f)}, {"lhs", to_string(lhs)}, {"rhs", to_string(rhs)}};
    }
  }
  json d{{"functions", count}, {"mismatches", bad}};
  if (!witness.is_null()) d["witness"] = witness;
  return {"integration_formula", bad == 0, d};
}

SuiteResult dichotomy_suite(const FieldPtr& K) {
  const long p = K->p();
  const int n = K->n();
  std::size_t nonzero = 0, checked = 0;
  for (int level = 1; level <= 3; ++level)
    for (long e = 1; e < p * p * p; ++e) {
      UnitCharacter theta{level, Int(e), 0};
      if (theta.is_trivial(p)) continue;
      ++checked;
      nonzero += !shell_character_sum(theta, p).exactly_zero;
    }
  // Trivial theta: closed form against partial sums of the shells.
  double max_err = 0;
  for (double re : {-1.5, -0.5, 0.0, 1.25}) {
    const Quasicharacter pi = Quasicharacter::complex(Complex(re, 0.3));
    for (long nu : {-1L, 0L, 2L}) {
      const Complex closed = radial_character_sum(pi, p, n, nu);
      Complex partial = 0;
      // shell |r| = p^j inside p^Z(1 + pZ_p) has measure p^(j-1); integrand p^(j(s+n-1))
      for (long j = nu; j > nu - 4000; --j) {
        const Complex term =
            std::pow(Complex(static_cast<double>(p)), Complex(static_cast<double>(j)) * (pi.s + Complex(n)) - 1.0);
        partial += term;
        if (std::abs(term) < 1e-18 * std::abs(partial)) break;
      }
      max_err = std::max(max_err, std::abs(closed - partial) / std::abs(closed));
    }
  }
  return {"shell_dichotomy",
          nonzero == 0 && max_err < 1e-12,
          json{{"nontrivial_characters", checked}, {"nonzero_sums", nonzero}, {"trivial_max_rel_error", max_err}}};
}

FiniteLevelAngular<Complex> random_table(const FieldPtr& K, std::mt19937_64& rng, int level) {
  std::uniform_real_distribution<double> u(-2, 2);
  FiniteLevelAngular<Complex> F(UnitQuotient::get(K, level), 0);
  for (std::size_t i = 0; i < F.size(); ++i) F[i] = Complex(u(rng), u(rng));
  return F;
}

SuiteResult residue_suite(const FieldPtr& K, std::mt19937_64& rng) {
  const int n = K->n();
  double worst = 0, worst_literal_ratio = 0;
  for (int t = 0; t < 3; ++t) {
    const auto F = random_table(K, rng, 1);
    CylinderFunction phi = random_cylinder_function(K, rng(), 3, 0, 2, 0);
    phi.add(K->zero(), 1, 1);
    const Complex want = residue_at_exceptional(F, phi);
    auto limit = [&](double eps) {
      HomogeneousDistribution<Complex> h{Quasicharacter::complex(Complex(-n + eps, 0)), F};
      return eps * pair(h, phi).total;
    };
    // first-order Richardson step on eps -> 0
    const Complex got = 2.0 * limit(1e-7) - limit(2e-7);
    worst = std::max(worst, std::abs(got - want) / std::abs(want));
    worst_literal_ratio = std::abs(got / residue_formula_without_orbit_factor(F, phi));
  }
  return {"residue",
          worst < 1e-6,
          json{{"max_rel_error", worst},
               {"formula", "(q-1) phi(0) <F,1> / (p^n log p)"},
               {"ratio_to_formula_without_q_minus_1", worst_literal_ratio}}};
}

SuiteResult reconstruction_suite(const FieldPtr& K, std::mt19937_64& rng) {
  const int n = K->n();
  std::uniform_real_distribution<double> re(-n + 0.3, 1.0), im(-2, 2);
  double worst = 0;
  bool homogeneous = true;
  for (int t = 0; t < 3; ++t) {
    const auto F = random_table(K, rng, 2);
    UnitCharacter theta{static_cast<int>(rng() % 3), Int(static_cast<unsigned long>(rng() % 9)), 0};
    const Quasicharacter pi = Quasicharacter::complex(Complex(re(rng), im(rng)), theta);
    HomogeneousDistribution<Complex> h{pi, F};
    const auto result = theorem2_reconstruct(
        K, [&](const CylinderFunction& f) { return pair(h, f).total; }, pi, 2, 5, rng());
    for (std::size_t i = 0; i < F.size(); ++i) worst = std::max(worst, std::abs(result.F[i] - F[i]));
    homogeneous = homogeneous && result.homogeneity.ok;
  }
  return {"reconstruction", worst < 1e-10 && homogeneous,
          json{{"max_abs_error", worst}, {"homogeneity_ok", homogeneous}}};
}

SuiteResult radial_decomposition_suite(const FieldPtr& K, std::mt19937_64& rng) {
  std::size_t points = 0, mismatches = 0;
  bool disjoint = true;
  for (int t = 0; t < 5; ++t) {
    const CylinderFunction phi = random_cylinder_function(K, rng(), 3, 0, 2, 0);
    const auto d = lemma2_decompose(phi);
    const auto r = lemma2_verify(phi, d, -1, 3);
    points += r.points;
    mismatches += r.mismatches;
    disjoint = disjoint && r.disjoint;
  }
  return {"radial_decomposition", mismatches == 0 && disjoint,
          json{{"functions", 5}, {"grid_points", points}, {"mismatches", mismatches}, {"disjoint", disjoint}}};
}

SuiteResult radial_law_suite(const FieldPtr& K, std::uint64_t seed, std::size_t paths) {
  LevyModel model;
  const ExtElement x = ExtElement::from_integer(K, prime_power(K->p(), 3));
  std::mt19937_64 rng(seed);
  const SphericalCoords c = decompose(sample_sphere_uniform(K, 0, rng));
  const ExtElement omega0 = teichmuller_K(K->generator() + K->one());
  const auto a = radial_kernel_check_eq21(model, K, x, omega0 * x, 1.0, paths, seed);
  const auto b = radial_kernel_check_eq21(model, K, x, c.xi * x, 1.0, paths, seed + 1);
  LevyModel adversarial = model;
  adversarial.rotation_invariant = false;
  const auto neg = radial_kernel_check_eq21(adversarial, K, x, omega0 * x, 1.0, paths, seed + 2);
  return {"radial_law",
          a.passed && b.passed && !neg.passed,
          json{{"paths", paths},
               {"omega_start_p_value", a.chi.p_value},
               {"xi_start_p_value", b.chi.p_value},
               {"negative_control_p_value", neg.chi.p_value},
               {"negative_control_detected", !neg.passed}}};
}

}  // namespace

std::vector<SuiteResult> run_verify(const VerifyConfig& config) {
  const FieldPtr K = FieldContext::create(config.p, config.n, config.precision, config.modulus);
  require_spherical(*K);
  std::mt19937_64 rng(config.seed);
  std::vector<SuiteResult> out;
  out.push_back(field_suite(K, rng, std::min<std::size_t>(config.elements, 200)));
  out.push_back(coordinates_suite(K, rng, config.elements));
  out.push_back(volume_suite(K));
  out.push_back(integration_suite(K, rng, config.functions));
  out.push_back(dichotomy_suite(K));
  out.push_back(residue_suite(K, rng));
  out.push_back(reconstruction_suite(K, rng));
  out.push_back(radial_decomposition_suite(K, rng));
  out.push_back(radial_law_suite(K, config.seed, config.paths));
  return out;
}

}  // namespace padsph::cli
