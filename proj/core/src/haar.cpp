#include "padsph/haar.hpp"

#include <algorithm>
#include <set>

#include "padsph/spherical.hpp"

namespace padsph {

namespace {

bool ball_contains(const ExtElement& center, long k, const ExtElement& x) {
  const long known = std::min(center.absolute_precision(), x.absolute_precision());
  if (known < k) throw PrecisionError("ball membership needs more digits than are known");
  const ExtElement d = x - center;
  return d.is_zero() || d.valuation() >= k;
}

ExtElement p_power(const FieldPtr& field, long e, int precision) {
  return ExtElement::from_scalar(field, PadicScalar::from_unit(field->p(), precision, e, 1));
}

// Residue representatives of O / pO: all vectors with entries in [0, p).
std::vector<std::vector<Int>> residue_vectors(const FieldContext& field) {
  const std::uint64_t q = to_u64(field.q());
  std::vector<std::vector<Int>> out;
  for (std::uint64_t i = 0; i < q; ++i) {
    std::vector<Int> v(static_cast<std::size_t>(field.n()));
    std::uint64_t rest = i;
    for (auto& c : v) {
      c = static_cast<unsigned long>(rest % static_cast<std::uint64_t>(field.p()));
      rest /= static_cast<std::uint64_t>(field.p());
    }
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace

CylinderFunction CylinderFunction::indicator(FieldPtr field, const ExtElement& center, long k, const Rational& value) {
  CylinderFunction f(std::move(field));
  f.add(center, k, value);
  return f;
}

CylinderFunction CylinderFunction::unit_indicator(FieldPtr field) {
  CylinderFunction f(field);
  f.add(field->zero(), 0, 1);
  f.add(field->zero(), 1, -1);
  return f;
}

void CylinderFunction::add(const ExtElement& center, long k, const Rational& value) {
  if (!center.is_zero() && center.field_ptr() != field_) throw DomainError("ball center lives in another field");
  Rational v = value;
  v.canonicalize();
  if (v == 0) return;
  terms_.push_back(Ball{center.is_zero() ? field_->zero() : center, k, v});
}

CylinderFunction& CylinderFunction::operator+=(const CylinderFunction& other) {
  for (const auto& b : other.terms_) add(b.center, b.k, b.value);
  return *this;
}

CylinderFunction CylinderFunction::operator*(const Rational& c) const {
  CylinderFunction out(field_);
  for (const auto& b : terms_) out.add(b.center, b.k, b.value * c);
  return out;
}

Rational CylinderFunction::operator()(const ExtElement& x) const {
  Rational sum = 0;
  for (const auto& b : terms_) {
    if (ball_contains(b.center, b.k, x)) sum += b.value;
  }
  return sum;
}

Rational CylinderFunction::at_zero() const { return (*this)(field_->zero()); }

long CylinderFunction::level() const {
  long best = terms_.empty() ? 0 : terms_.front().k;
  for (const auto& b : terms_) best = std::max(best, b.k);
  return best;
}

long CylinderFunction::support_exponent() const {
  long best = terms_.empty() ? 0 : terms_.front().k;
  for (const auto& b : terms_) {
    best = std::min(best, b.center.is_zero() ? b.k : std::min(b.k, b.center.valuation()));
  }
  return best;
}

CylinderFunction CylinderFunction::normalized() const {
  std::vector<Ball> sorted = terms_;
  std::stable_sort(sorted.begin(), sorted.end(), [](const Ball& a, const Ball& b) { return a.k < b.k; });
  const auto residues = residue_vectors(*field_);
  std::vector<Ball> pieces;
  for (const auto& ball : sorted) {
    auto host = std::find_if(pieces.begin(), pieces.end(),
                             [&](const Ball& piece) { return ball_contains(piece.center, piece.k, ball.center); });
    if (host == pieces.end()) {
      pieces.push_back(ball);
      continue;
    }
    if (host->k == ball.k) {
      host->value += ball.value;
      continue;
    }
    // Split the host into the new ball and the siblings along the path to it.
    const Ball outer = *host;
    pieces.erase(host);
    for (long j = outer.k; j < ball.k; ++j) {
      const int prec = static_cast<int>(std::max<long>(1, ball.k + 1 - j));
      for (std::size_t r = 1; r < residues.size(); ++r) {
        const ExtElement delta = ExtElement::from_power_coefficients(field_, 0, residues[r], prec);
        const ExtElement step = delta * p_power(field_, j, prec);
        pieces.push_back(Ball{ball.center + step, j + 1, outer.value});
      }
    }
    pieces.push_back(Ball{ball.center, ball.k, outer.value + ball.value});
  }
  CylinderFunction out(field_);
  for (const auto& piece : pieces) out.add(piece.center, piece.k, piece.value);
  return out;
}

bool CylinderFunction::is_normalized() const {
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    for (std::size_t j = i + 1; j < terms_.size(); ++j) {
      const Ball& a = terms_[i].k <= terms_[j].k ? terms_[i] : terms_[j];
      const Ball& b = terms_[i].k <= terms_[j].k ? terms_[j] : terms_[i];
      if (ball_contains(a.center, a.k, b.center)) return false;
    }
  }
  return true;
}

CylinderFunction CylinderFunction::translated(const ExtElement& a) const {
  CylinderFunction out(field_);
  for (const auto& b : terms_) out.add(b.center - a, b.k, b.value);
  return out;
}

CylinderFunction CylinderFunction::scaled(const ExtElement& lambda) const {
  if (lambda.is_zero()) throw DomainError("scaled: lambda = 0");
  const ExtElement inv = lambda.inverse();
  CylinderFunction out(field_);
  for (const auto& b : terms_) out.add(b.center * inv, b.k - lambda.valuation(), b.value);
  return out;
}

Rational integrate_K(const CylinderFunction& f) {
  const CylinderFunction g = f.is_normalized() ? f : f.normalized();
  const FieldContext& field = *f.field_ptr();
  Rational sum = 0;
  for (const auto& b : g.terms()) sum += b.value * rational_power(field.p(), -b.k * field.n());
  return sum;
}

Rational sigma_haar_integrate(const FieldPtr& field, const std::vector<Rational>& g_by_coset, int level) {
  const auto coarse = UnitQuotient::get(field, level);
  if (g_by_coset.size() != coarse->coset_count()) throw DomainError("expected one value per coset");
  const auto fine = UnitQuotient::get(field, level + 1);
  std::vector<std::size_t> down(fine->coset_count());
  for (std::size_t c = 0; c < fine->coset_count(); ++c) {
    down[c] = coarse->coset_index(fine->coset_representative(c).with_precision(level));
  }
  Rational sum = 0;
  for (std::uint64_t key : fine->unit_keys()) sum += g_by_coset[down[fine->record(key).coset]];
  return sum / Rational(Int(static_cast<unsigned long>(fine->unit_count())));
}

Rational spherical_integrate(const CylinderFunction& f) {
  const FieldPtr& field = f.field_ptr();
  require_spherical(*field);
  if (f.empty()) return 0;
  const long p = field->p();
  const int n = field->n();
  const long top = f.level();
  const long bottom = f.support_exponent();
  const Rational q(field->q());
  const Rational prefactor = rational_power(p, 1 - n);

  Rational sum = 0;
  for (long v = bottom; v < top; ++v) {
    const auto m = static_cast<int>(top - v);
    const auto quotient = UnitQuotient::get(field, m);
    const ExtElement scale = p_power(field, v, m);
    // Haar weights: 1/#cosets for xi, p^(-v-m) for the class of rho mod p^m, |r|^(n-1) = p^(-v(n-1)).
    const Rational weight = prefactor / Rational(Int(static_cast<unsigned long>(quotient->coset_count()))) *
                            rational_power(p, -v - m) * rational_power(p, -v * (n - 1));
    Rational shell = 0;
    for (std::size_t w = 0; w < quotient->omega_count(); ++w) {
      for (std::size_t c = 0; c < quotient->coset_count(); ++c) {
        const ExtElement angular = quotient->omega(w) * quotient->coset_representative(c) * scale;
        for (std::size_t a = 0; a < quotient->rho_count(); ++a) {
          const PadicScalar rho = PadicScalar::from_integer(p, m, quotient->rho(a));
          shell += f(angular.scale(rho));
        }
      }
    }
    sum += weight * shell;
  }
  // Shells with v >= top sit inside p^top O where f = f(0): a geometric tail.
  const Rational f0 = f.at_zero();
  if (f0 != 0) {
    const Rational per_shell_at_top = prefactor * Rational(Int(field->q()) - 1) * rational_power(p, -1) *
                                      rational_power(p, -top * n);
    sum += f0 * per_shell_at_top / (1 - 1 / q);
  }
  return sum;
}

Rational multiplicative_constant_check(const FieldPtr& field, int level) {
  const auto quotient = UnitQuotient::get(field, level);
  const long p = field->p();
  const Rational lhs = Rational(Int(static_cast<unsigned long>(quotient->unit_count()))) *
                       rational_power(p, -static_cast<long>(level) * field->n());
  std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> seen;
  for (std::uint64_t key : quotient->unit_keys()) {
    const UnitRecord& r = quotient->record(key);
    seen.emplace(r.omega, r.coset, r.rho);
  }
  const Rational cell = rational_power(p, -level) / Rational(Int(static_cast<unsigned long>(quotient->coset_count())));
  const Rational rhs = cell * Rational(Int(static_cast<unsigned long>(seen.size())));
  return lhs / rhs;
}

Rational q1_shell_measure(long p, long j, int digits) {
  if (digits < 1) throw DomainError("digits must be positive");
  // r = p^(-j) rho with rho mod p^digits; each class is a ball of measure p^(j - digits).
  const Int& m = prime_power(p, digits);
  Int count = 0;
  for (Int rho = 0; rho < m; ++rho) {
    if (rho % p == 1) ++count;
  }
  return Rational(count) * rational_power(p, j - digits);
}

}  // namespace padsph
