#include "padsph/distributions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <sstream>

#include "padsph/parallel.hpp"
#include "padsph/spherical.hpp"

namespace padsph {

namespace {

double log_p(long p) { return std::log(static_cast<double>(p)); }

Complex p_power(long p, Complex e) { return std::exp(e * log_p(p)); }

Int reduced_exponent(const UnitCharacter& theta, long p) {
  if (theta.level <= 0) return 0;
  return mod(theta.exponent, prime_power(p, theta.level));
}

// theta class of 1 + p a for a in [0, p^k): exponent * b mod p^k.
std::vector<Int> theta_classes(const UnitCharacter& theta, long p) {
  const int k = std::max(theta.level, 0);
  const Int e = reduced_exponent(theta, p);
  const Int& pk = prime_power(p, k);
  const std::uint64_t count = to_u64(pk);
  std::vector<Int> out(count, 0);
  if (e == 0) return out;
  for (std::uint64_t a = 0; a < count; ++a) {
    const PadicScalar rho = PadicScalar::from_integer(p, k + 1, 1 + Int(p) * static_cast<unsigned long>(a));
    out[a] = mod(e * principal_log_ratio(rho, k), pk);
  }
  return out;
}

Complex root_of_unity(const Int& cls, const Int& order) {
  const double angle = 2 * std::numbers::pi * (Rational(cls, order).get_d());
  return {std::cos(angle), std::sin(angle)};
}

struct ExactOps {
  using V = Rational;
  static V from(const Rational& r) { return r; }
  static V theta(const Int&, const Int&) { return 1; }
  static V radial(const Quasicharacter& pi, long p, int n, long v) {
    const long s = pi.s_exact->get_num().get_si();
    return rational_power(p, -v * (s + n - 1));
  }
  static V singular(const Quasicharacter& pi, long p, int n, long nu) {
    return radial_character_sum_exact(pi, p, n, nu);
  }
  static Complex to_complex(const V& v) { return {v.get_d(), 0}; }
};

struct ComplexOps {
  using V = Complex;
  static V from(const Rational& r) { return {r.get_d(), 0}; }
  static V theta(const Int& cls, const Int& order) { return root_of_unity(cls, order); }
  static V radial(const Quasicharacter& pi, long p, int n, long v) {
    return p_power(p, -static_cast<double>(v) * (pi.s + static_cast<double>(n - 1)));
  }
  static V singular(const Quasicharacter& pi, long p, int n, long nu) { return radial_character_sum(pi, p, n, nu); }
  static Complex to_complex(const V& v) { return v; }
};

// Maps the cosets of a finer quotient to those of a coarser one.
std::vector<std::size_t> coset_down_map(const UnitQuotient& fine, const UnitQuotient& coarse) {
  std::vector<std::size_t> down(fine.coset_count());
  for (std::size_t c = 0; c < fine.coset_count(); ++c) {
    down[c] = coarse.coset_index(fine.coset_representative(c).with_precision(coarse.level()));
  }
  return down;
}

ExtElement p_power_element(const FieldPtr& field, long e, int precision) {
  return ExtElement::from_scalar(field, PadicScalar::from_unit(field->p(), precision, e, 1));
}

// sum over units u mod p^M of theta(rho_u) F(omega_u, xi_u) g(u), times the
// Haar weight of one cell 1 / ((q-1) #cosets p^M) (the radial shell factor p^(-v) is left out).
template <class Ops, class V = typename Ops::V, class G>
V shell_sum(const FiniteLevelAngular<V>& F, const std::vector<Int>& classes, const Int& order, int M, G&& g) {
  const FieldPtr& field = F.quotient()->field();
  const auto quotient = UnitQuotient::get(field, M);
  const auto down = coset_down_map(*quotient, *F.quotient());
  const long p = field->p();
  const std::uint64_t period = classes.size();
  std::vector<V> theta(period);
  for (std::uint64_t a = 0; a < period; ++a) theta[a] = Ops::theta(classes[a], order);
  V sum{};
  for (std::uint64_t key : quotient->unit_keys()) {
    const UnitRecord& rec = quotient->record(key);
    const Rational value = g(ExtElement::from_power_coefficients(field, 0, quotient->coefficients(key), M));
    if (value == 0) continue;
    sum += theta[rec.rho % period] * F.at(rec.omega, down[rec.coset]) * Ops::from(value);
  }
  const Rational cell = Rational(1) /
                        (Rational(field->q() - 1) * Rational(Int(static_cast<unsigned long>(quotient->coset_count())))) *
                        rational_power(p, -M);
  return sum * Ops::from(cell);
}

template <class Ops, class V = typename Ops::V>
PairResult<V> pair_impl(const HomogeneousDistribution<V>& h, const CylinderFunction& phi) {
  const FieldPtr& field = phi.field_ptr();
  if (h.F.quotient()->field() != field) throw DomainError("pair: F and phi live over different fields");
  require_spherical(*field);
  const long p = field->p();
  const int n = field->n();
  PairResult<V> out;
  if (phi.empty()) return out;

  const int k = h.pi.theta.is_trivial(p) ? 0 : h.pi.theta.level;
  const UnitCharacter theta = k == 0 ? UnitCharacter{} : h.pi.theta;
  const std::vector<Int> classes = theta_classes(theta, p);
  const Int order = prime_power(p, k);
  const Rational phi0 = phi.at_zero();
  const long top = phi.level();
  const long bottom = phi.support_exponent();
  const Rational prefactor = rational_power(p, 1 - n) * Rational(field->q() - 1);

  V finite{};
  for (long v = bottom; v < top; ++v) {
    const int M = static_cast<int>(std::max<long>({top - v, h.F.level(), k + 1}));
    const ExtElement scale = p_power_element(field, v, M);
    const V c = shell_sum<Ops>(h.F, classes, order, M,
                               [&](const ExtElement& u) -> Rational { return phi(u * scale) - phi0; });
    finite += Ops::radial(h.pi, p, n, v) * Ops::from(rational_power(p, -v)) * c;
  }
  out.finite_part = Ops::from(prefactor) * finite;

  const V mean = angular_mean(h.F);
  if (phi0 != 0 && mean != V{} && k == 0) {
    if (is_exceptional(h.pi, p, n)) {
      throw PoleError("pair: exceptional quasicharacter with phi(0)<F,1> != 0",
                      Complex(Rational(field->q() - 1).get_d() / std::pow(static_cast<double>(p), n) / log_p(p)) *
                          Ops::to_complex(mean) * phi0.get_d());
    }
    out.singular_part = Ops::from(prefactor * phi0) * mean * Ops::singular(h.pi, p, n, -bottom);
  }
  out.total = out.finite_part + out.singular_part;
  return out;
}

template <class V>
V angular_mean_impl(const FiniteLevelAngular<V>& F) {
  V sum{};
  for (const auto& v : F.values()) sum += v;
  return sum / V(static_cast<double>(F.size()));
}

template <class V>
bool close(const V& a, const V& b, double tol) {
  if constexpr (std::is_same_v<V, Rational>) {
    (void)tol;
    return a == b;
  } else {
    return std::abs(a - b) <= tol * std::max(1.0, std::abs(b));
  }
}

template <class V>
double distance(const V& a, const V& b) {
  if constexpr (std::is_same_v<V, Rational>) {
    return std::abs(Rational(a - b).get_d());
  } else {
    return std::abs(a - b) / std::max(1.0, std::abs(b));
  }
}

template <class V>
V scale_factor(const Quasicharacter& pi, const PadicScalar& lambda, int n) {
  const long p = lambda.prime();
  const Rational norm = rational_power(p, -lambda.valuation() * n);
  if constexpr (std::is_same_v<V, Rational>) {
    return quasicharacter_eval_exact(pi, lambda) * norm;
  } else {
    return quasicharacter_eval(pi, lambda) * norm.get_d();
  }
}

template <class V>
Theorem2Result<V> reconstruct_impl(const FieldPtr& field, const std::function<V(const CylinderFunction&)>& f,
                                const Quasicharacter& pi, int level, std::size_t battery, std::uint64_t seed) {
  require_spherical(*field);
  const long p = field->p();
  const int n = field->n();
  if (is_exceptional(pi, p, n)) throw DomainError("theorem2_reconstruct: exceptional quasicharacter");
  if constexpr (std::is_same_v<V, Rational>) {
    if (!pi.is_exact(p)) throw DomainError("theorem2_reconstruct: exact reconstruction needs an exact quasicharacter");
  }
  const auto quotient = UnitQuotient::get(field, level);
  Theorem2Result<V> out;
  const int k = pi.theta.is_trivial(p) ? 0 : pi.theta.level;
  out.gauge_level = k + 1;
  // <pi_1, c 1_{1 + p^K Z_p}> = c p^(-K) since pi_1 = 1 on that ball.
  out.gauge_constant = rational_power(p, out.gauge_level) * rational_power(p, n - 1) / Rational(field->q() - 1);

  // Homogeneity on the generators p, 1/p, 1+p of the positive group.
  {
    std::vector<CylinderFunction> tests;
    tests.push_back(radial_angular_product(quotient, out.gauge_level, 1, 0, 0));
    tests.push_back(random_cylinder_function(field, seed ^ 0x5eedULL, 3, 0, level, 0));
    const std::vector<PadicScalar> lambdas = {
        PadicScalar::from_integer(p, field->precision(), p),
        PadicScalar::from_integer(p, field->precision(), p).inverse(),
        PadicScalar::from_integer(p, field->precision(), 1 + p),
    };
    for (const auto& phi : tests) {
      const V base = f(phi);
      for (const auto& lambda : lambdas) {
        const CylinderFunction moved = phi.scaled(ExtElement::from_scalar(field, lambda.inverse()));
        const V lhs = f(moved);
        const V rhs = scale_factor<V>(pi, lambda, n) * base;
        const double err = distance(lhs, rhs);
        out.homogeneity.max_error = std::max(out.homogeneity.max_error, err);
        if (!close(lhs, rhs, 1e-10)) {
          out.homogeneity.ok = false;
          std::ostringstream w;
          w << "lambda with valuation " << lambda.valuation() << " and unit " << lambda.unit();
          out.homogeneity.witness = w.str();
        }
      }
    }
    if (!out.homogeneity.ok) {
      throw DomainError("theorem2_reconstruct: the functional is not homogeneous (" + out.homogeneity.witness + ")");
    }
  }

  out.F = FiniteLevelAngular<V>(quotient, V{});
  const Rational cells = Rational(field->q() - 1) * Rational(Int(static_cast<unsigned long>(quotient->coset_count())));
  for (std::size_t w = 0; w < quotient->omega_count(); ++w) {
    for (std::size_t c = 0; c < quotient->coset_count(); ++c) {
      const V value = f(radial_angular_product(quotient, out.gauge_level, out.gauge_constant, w, c));
      if constexpr (std::is_same_v<V, Rational>) {
        out.F.at(w, c) = value * cells;
      } else {
        out.F.at(w, c) = value * cells.get_d();
      }
    }
  }

  const HomogeneousDistribution<V> h{pi, out.F};
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < battery; ++i) {
    const CylinderFunction phi =
        random_cylinder_function(field, rng(), 1 + static_cast<int>(rng() % 3), 0, level, 0);
    const double err = distance(pair(h, phi).total, f(phi));
    out.battery_error = std::max(out.battery_error, err);
  }
  out.battery_size = battery;
  return out;
}

}  // namespace

bool UnitCharacter::is_trivial(long p) const { return reduced_exponent(*this, p) == 0; }

Quasicharacter Quasicharacter::real(const Rational& s, UnitCharacter theta) {
  Rational c = s;
  c.canonicalize();
  return Quasicharacter{Complex(c.get_d(), 0), std::move(theta), c};
}

Quasicharacter Quasicharacter::complex(Complex s, UnitCharacter theta) {
  return Quasicharacter{s, std::move(theta), std::nullopt};
}

bool Quasicharacter::is_exact(long p) const {
  return s_exact && s_exact->get_den() == 1 && theta.is_trivial(p);
}

Int principal_log_ratio(const PadicScalar& rho, int k) {
  if (k <= 0) return 0;
  const long p = rho.prime();
  if (rho.is_zero() || rho.valuation() != 0 || rho.unit() % p != 1) {
    throw DomainError("principal_log_ratio: not a principal unit");
  }
  if (rho.precision() < k + 1) throw PrecisionError("principal_log_ratio: need k+1 digits");
  const PadicScalar r = PadicScalar::from_integer(p, k + 1, rho.residue(k + 1));
  const PadicScalar lr = log_principal(r);
  if (lr.is_zero()) return 0;
  const PadicScalar l1 = log_principal(PadicScalar::from_integer(p, k + 1, 1 + p));
  return (lr / l1).residue(k);
}

Complex theta_eval(const UnitCharacter& theta, const PadicScalar& rho) {
  const long p = rho.prime();
  if (theta.is_trivial(p)) return 1;
  const Int& order = prime_power(p, theta.level);
  return root_of_unity(mod(reduced_exponent(theta, p) * principal_log_ratio(rho, theta.level), order), order);
}

Complex quasicharacter_eval(const Quasicharacter& pi, const PadicScalar& r) {
  if (r.is_zero() || !is_positive(r)) throw DomainError("quasicharacter_eval: r is not in the positive group");
  const long p = r.prime();
  const PadicScalar rho = PadicScalar::from_unit(p, r.precision(), 0, r.unit());
  return p_power(p, -static_cast<double>(r.valuation()) * pi.s) * theta_eval(pi.theta, rho);
}

Rational quasicharacter_eval_exact(const Quasicharacter& pi, const PadicScalar& r) {
  if (r.is_zero() || !is_positive(r)) throw DomainError("quasicharacter_eval: r is not in the positive group");
  if (!pi.is_exact(r.prime())) throw DomainError("quasicharacter_eval_exact: pi takes irrational values");
  return rational_power(r.prime(), -r.valuation() * pi.s_exact->get_num().get_si());
}

HomogeneityReport homogeneity_check_function(const std::function<Complex(const ExtElement&)>& f,
                                             const Quasicharacter& pi, const std::vector<ExtElement>& xs,
                                             const std::vector<PadicScalar>& lambdas, double tolerance) {
  HomogeneityReport report;
  auto note = [&](double err, const std::string& what) {
    report.max_error = std::max(report.max_error, err);
    if (err > tolerance && report.ok) {
      report.ok = false;
      report.witness = what;
    }
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const ExtElement& x = xs[i];
    const Complex fx = f(x);
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      const Complex lhs = f(x.scale(lambdas[j]));
      const Complex rhs = quasicharacter_eval(pi, lambdas[j]) * fx;
      note(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)),
           "f(lambda x) != pi(lambda) f(x) at sample " + std::to_string(i) + ", lambda with valuation " +
               std::to_string(lambdas[j].valuation()));
    }
    if (!x.is_zero()) {
      const SphericalCoords c = decompose(x);
      const Complex rhs = quasicharacter_eval(pi, c.r) * f(c.omega * c.xi);
      note(std::abs(fx - rhs) / std::max(1.0, std::abs(rhs)),
           "f(omega xi r) != pi(r) f(omega xi) at sample " + std::to_string(i));
    }
  }
  return report;
}

PairResult<Rational> pair(const HomogeneousDistribution<Rational>& h, const CylinderFunction& phi) {
  if (!h.pi.is_exact(phi.field_ptr()->p())) {
    throw DomainError("pair: exact evaluation needs trivial theta and integer s");
  }
  return pair_impl<ExactOps>(h, phi);
}

PairResult<Complex> pair(const HomogeneousDistribution<Complex>& h, const CylinderFunction& phi) {
  return pair_impl<ComplexOps>(h, phi);
}

Complex pair_direct(const HomogeneousDistribution<Complex>& h, const CylinderFunction& phi, double tail_tolerance) {
  const FieldPtr& field = phi.field_ptr();
  require_spherical(*field);
  const long p = field->p();
  const int n = field->n();
  if (h.pi.s.real() <= -n) throw DomainError("pair_direct: the integral converges only for Re s > -n");
  if (phi.empty()) return 0;
  const int k = h.pi.theta.is_trivial(p) ? 0 : h.pi.theta.level;
  const UnitCharacter theta = k == 0 ? UnitCharacter{} : h.pi.theta;
  const std::vector<Int> classes = theta_classes(theta, p);
  const Int order = prime_power(p, k);
  const long top = phi.level();
  const long bottom = phi.support_exponent();
  Complex sum = 0;
  for (long v = bottom; v < top; ++v) {
    const int M = static_cast<int>(std::max<long>({top - v, h.F.level(), k + 1}));
    const ExtElement scale = p_power_element(field, v, M);
    const Complex c =
        shell_sum<ComplexOps>(h.F, classes, order, M, [&](const ExtElement& u) { return phi(u * scale); });
    sum += ComplexOps::radial(h.pi, p, n, v) * std::pow(static_cast<double>(p), -static_cast<double>(v)) * c;
  }
  const Rational phi0 = phi.at_zero();
  if (phi0 != 0) {
    const int M = std::max(h.F.level(), k + 1);
    const Complex c =
        shell_sum<ComplexOps>(h.F, classes, order, M, [&](const ExtElement&) { return phi0; });
    for (long v = std::max(top, bottom);; ++v) {
      const Complex term =
          ComplexOps::radial(h.pi, p, n, v) * std::pow(static_cast<double>(p), -static_cast<double>(v)) * c;
      sum += term;
      if (std::abs(term) <= tail_tolerance * std::max(1.0, std::abs(sum))) break;
      if (v > top + 100000) throw InternalError("pair_direct: tail did not converge");
    }
  }
  return sum * Rational(Rational(field->q() - 1) * rational_power(p, 1 - n)).get_d();
}

Rational angular_mean(const FiniteLevelAngular<Rational>& F) {
  Rational sum = 0;
  for (const auto& v : F.values()) sum += v;
  return sum / Rational(Int(static_cast<unsigned long>(F.size())));
}

Complex angular_mean(const FiniteLevelAngular<Complex>& F) { return angular_mean_impl(F); }

FiniteLevelAngular<Complex> to_complex(const FiniteLevelAngular<Rational>& F) {
  FiniteLevelAngular<Complex> out(F.quotient(), 0);
  for (std::size_t i = 0; i < F.size(); ++i) out[i] = F[i].get_d();
  return out;
}

bool is_exceptional(const Quasicharacter& pi, long p, int n) {
  if (!pi.theta.is_trivial(p)) return false;
  if (pi.s_exact) return *pi.s_exact == -n;
  if (std::abs(pi.s.real() + n) > 1e-12) return false;
  const double turns = pi.s.imag() * log_p(p) / (2 * std::numbers::pi);
  return std::abs(turns - std::round(turns)) < 1e-12;
}

Complex radial_character_sum(const Quasicharacter& pi, long p, int n, long nu) {
  if (!pi.theta.is_trivial(p)) {
    const ShellCharacterSum shell = shell_character_sum(pi.theta, p);
    if (!shell.exactly_zero) throw InternalError("radial_character_sum: shell integral of theta is not zero");
    return 0;
  }
  if (is_exceptional(pi, p, n)) {
    throw PoleError("radial_character_sum: pole at the exceptional quasicharacter", 1.0 / (p * log_p(p)));
  }
  const Complex a = pi.s + static_cast<double>(n);
  return p_power(p, static_cast<double>(nu) * a - 1.0) / (1.0 - p_power(p, -a));
}

Rational radial_character_sum_exact(const Quasicharacter& pi, long p, int n, long nu) {
  if (!pi.is_exact(p)) throw DomainError("radial_character_sum_exact: needs trivial theta and integer s");
  const long a = pi.s_exact->get_num().get_si() + n;
  if (a == 0) throw PoleError("radial_character_sum: pole at the exceptional quasicharacter", 1.0 / (p * log_p(p)));
  return rational_power(p, nu * a - 1) / (1 - rational_power(p, -a));
}

ShellCharacterSum shell_character_sum(const UnitCharacter& theta, long p) {
  ShellCharacterSum out;
  const Rational shell = rational_power(p, -1);
  if (theta.is_trivial(p)) {
    out.counts = {Int(1)};
    out.value = shell.get_d();
    return out;
  }
  const int k = theta.level;
  const Int e = reduced_exponent(theta, p);
  Int unit = e;
  const long t = remove_factor(unit, p);
  const Int& order = prime_power(p, k - static_cast<int>(t));
  out.order = order.get_si();
  out.counts.assign(to_u64(order), 0);
  const std::vector<Int> classes = theta_classes(theta, p);
  const Int& shift = prime_power(p, static_cast<int>(t));
  for (const auto& c : classes) out.counts[to_u64(c / shift)] += 1;
  // sum c_e zeta^e = 0 in Z[zeta] iff c is constant on each coset of the order-p subgroup.
  const std::size_t stride = out.counts.size() / static_cast<std::size_t>(p);
  out.exactly_zero = true;
  for (std::size_t r = 0; r < stride; ++r) {
    for (long i = 1; i < p; ++i) {
      if (out.counts[r + static_cast<std::size_t>(i) * stride] != out.counts[r]) out.exactly_zero = false;
    }
  }
  Complex sum = 0;
  for (std::size_t c = 0; c < out.counts.size(); ++c) {
    sum += root_of_unity(Int(static_cast<unsigned long>(c)), order) * out.counts[c].get_d();
  }
  out.value = sum * Rational(shell / Rational(prime_power(p, k))).get_d();
  return out;
}

Complex residue_at_exceptional(const FiniteLevelAngular<Complex>& F, const CylinderFunction& phi) {
  const FieldContext& field = *phi.field_ptr();
  const long p = field.p();
  return Rational(field.q() - 1).get_d() * phi.at_zero().get_d() * angular_mean(F) /
         (std::pow(static_cast<double>(p), field.n()) * log_p(p));
}

Complex residue_formula_without_orbit_factor(const FiniteLevelAngular<Complex>& F, const CylinderFunction& phi) {
  const FieldContext& field = *phi.field_ptr();
  const long p = field.p();
  return phi.at_zero().get_d() * angular_mean(F) / (std::pow(static_cast<double>(p), field.n()) * log_p(p));
}

Rational Lemma2Decomposition::evaluate(const ExtElement& x) const {
  if (x.is_zero()) return phi0;
  const SphericalCoords c = decompose(x);
  Rational out = c.r.valuation() >= constancy ? phi0 : Rational(0);
  const ExtElement angular = c.omega * c.xi;
  for (const auto& term : terms) {
    const PadicScalar d = c.r - term.center;
    if (d.is_zero() || d.valuation() >= constancy) out += term.slice.of(angular);
  }
  return out;
}

Lemma2Decomposition lemma2_decompose(const CylinderFunction& phi) {
  Lemma2Decomposition d;
  d.field = phi.field_ptr();
  require_spherical(*d.field);
  d.phi0 = phi.at_zero();
  if (phi.empty()) return d;
  const long p = d.field->p();
  d.support = phi.support_exponent();
  d.constancy = std::max(phi.level(), d.support + 1);
  std::vector<std::vector<Lemma2Term>> shells;
  long last_nonzero = d.support - 1;
  for (long v = d.support; v < d.constancy; ++v) {
    const int m = static_cast<int>(d.constancy - v);
    const auto quotient = UnitQuotient::get(d.field, m);
    std::vector<Lemma2Term> shell;
    for (std::size_t a = 0; a < quotient->rho_count(); ++a) {
      Lemma2Term term{PadicScalar::from_unit(p, m, v, quotient->rho(a)), FiniteLevelAngular<Rational>(quotient, 0)};
      const ExtElement r = ExtElement::from_scalar(d.field, term.center);
      bool nonzero = false;
      for (std::size_t w = 0; w < quotient->omega_count(); ++w) {
        for (std::size_t c = 0; c < quotient->coset_count(); ++c) {
          // On these shells phi_1 = phi - phi(0) Delta_l(r) equals phi.
          const Rational value = phi(quotient->omega(w) * quotient->coset_representative(c) * r);
          term.slice.at(w, c) = value;
          nonzero = nonzero || value != 0;
        }
      }
      if (nonzero) last_nonzero = v;
      shell.push_back(std::move(term));
    }
    shells.push_back(std::move(shell));
  }
  // Cover the annulus between the outer support radius and the innermost shell that carries phi_1.
  for (long v = d.support; v <= last_nonzero; ++v) {
    for (auto& term : shells[static_cast<std::size_t>(v - d.support)]) d.terms.push_back(std::move(term));
  }
  return d;
}

Lemma2Report lemma2_verify(const CylinderFunction& phi, const Lemma2Decomposition& d, long low, long high) {
  const FieldPtr& field = phi.field_ptr();
  Lemma2Report report;
  for (std::size_t i = 0; i < d.terms.size(); ++i) {
    if (d.terms[i].center.valuation() >= d.constancy) report.disjoint = false;
    for (std::size_t j = i + 1; j < d.terms.size(); ++j) {
      const PadicScalar diff = d.terms[i].center - d.terms[j].center;
      if (diff.is_zero() || diff.valuation() >= d.constancy) report.disjoint = false;
    }
  }
  if (high <= low) return report;
  if (high < d.constancy) throw DomainError("lemma2_verify: grid is coarser than the constancy level");
  Int count;
  mpz_pow_ui(count.get_mpz_t(), field->q().get_mpz_t(), static_cast<unsigned long>(high - low));
  if (count > kEnumerationBudget) throw BudgetError("lemma2_verify: grid exceeds the enumeration budget");
  const std::uint64_t points = to_u64(count);
  const std::uint64_t base = to_u64(prime_power(field->p(), static_cast<int>(high - low)));
  std::atomic<std::size_t> mismatches{0};
  parallel_for(points, [&](std::size_t begin, std::size_t end) {
    std::size_t local = 0;
    for (std::size_t key = begin; key < end; ++key) {
      std::vector<Int> coeffs(static_cast<std::size_t>(field->n()));
      std::uint64_t rest = key;
      for (auto& c : coeffs) {
        c = static_cast<unsigned long>(rest % base);
        rest /= base;
      }
      const ExtElement x =
          ExtElement::from_power_coefficients(field, low, std::move(coeffs), static_cast<int>(high - low));
      if (d.evaluate(x) != phi(x)) ++local;
    }
    mismatches += local;
  });
  report.points = points;
  report.mismatches = mismatches;
  return report;
}

CylinderFunction radial_angular_product(const std::shared_ptr<const UnitQuotient>& quotient, long radial_level,
                                        const Rational& radial_value, std::size_t omega, std::size_t coset) {
  const FieldPtr& field = quotient->field();
  const long p = field->p();
  const int M = static_cast<int>(std::max<long>(quotient->level(), radial_level));
  const auto fine = UnitQuotient::get(field, M);
  const auto down = coset_down_map(*fine, *quotient);
  const std::uint64_t step = to_u64(prime_power(p, static_cast<int>(std::max<long>(radial_level - 1, 0))));
  CylinderFunction out(field);
  for (std::uint64_t key : fine->unit_keys()) {
    const UnitRecord& rec = fine->record(key);
    if (rec.omega != omega || down[rec.coset] != coset || rec.rho % step != 0) continue;
    out.add(ExtElement::from_power_coefficients(field, 0, fine->coefficients(key), M), M, radial_value);
  }
  return out;
}

Theorem2Result<Rational> theorem2_reconstruct(const FieldPtr& field,
                                              const std::function<Rational(const CylinderFunction&)>& f,
                                              const Quasicharacter& pi, int level, std::size_t battery,
                                              std::uint64_t seed) {
  return reconstruct_impl<Rational>(field, f, pi, level, battery, seed);
}

Theorem2Result<Complex> theorem2_reconstruct(const FieldPtr& field,
                                             const std::function<Complex(const CylinderFunction&)>& f,
                                             const Quasicharacter& pi, int level, std::size_t battery,
                                             std::uint64_t seed) {
  return reconstruct_impl<Complex>(field, f, pi, level, battery, seed);
}

Complex gauge_pairing(const Quasicharacter& pi, long p, int n, const Rational& c, long k) {
  // Sum pi_1 over the classes of 1 + p^k Z_p modulo p^K, K >= k, fine enough for theta.
  const int theta_level = pi.theta.is_trivial(p) ? 0 : pi.theta.level;
  const int K = static_cast<int>(std::max<long>(k, theta_level + 1));
  const Int& modulus = prime_power(p, K);
  const Int& step = prime_power(p, static_cast<int>(k));
  Complex sum = 0;
  for (Int rho = 1; rho < modulus; rho += step) {
    const PadicScalar r = PadicScalar::from_integer(p, K, rho);
    sum += quasicharacter_eval(pi, r);  // |r|^(n-1) = 1 on the unit shell
  }
  (void)n;
  return sum * Rational(c * rational_power(p, -K)).get_d();
}

CylinderFunction random_cylinder_function(const FieldPtr& field, std::uint64_t seed, int terms, long k_low,
                                          long k_high, long center_val) {
  std::mt19937_64 rng(seed);
  CylinderFunction out(field);
  const long p = field->p();
  for (int i = 0; i < terms; ++i) {
    const long k = k_low + static_cast<long>(rng() % static_cast<std::uint64_t>(k_high - k_low + 1));
    const int digits = static_cast<int>(std::max<long>(1, k - center_val));
    const std::uint64_t bound = to_u64(prime_power(p, digits));
    std::vector<Int> coeffs(static_cast<std::size_t>(field->n()));
    for (auto& c : coeffs) c = static_cast<unsigned long>(rng() % bound);
    const ExtElement center = ExtElement::from_power_coefficients(field, center_val, coeffs, digits);
    long num = static_cast<long>(rng() % 11) - 5;
    if (num == 0) num = 1;
    const long den = 1 + static_cast<long>(rng() % 6);
    out.add(center, k, Rational(num, den));
  }
  return out;
}

}  // namespace padsph
