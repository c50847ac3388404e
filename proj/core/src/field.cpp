#include "padsph/field.hpp"

#include <algorithm>
#include <string>

#include "padsph/errors.hpp"

namespace padsph {

namespace {

constexpr std::uint64_t kTeichmullerTableLimit = 4096;

// --- polynomials over F_p (low-to-high, small coefficients) ---------------

using SmallPoly = std::vector<long>;

void trim(SmallPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

long inv_mod_small(long a, long p) {
  long result = 1;
  long base = ((a % p) + p) % p;
  for (long e = p - 2; e > 0; e >>= 1) {
    if (e & 1) result = result * base % p;
    base = base * base % p;
  }
  return result;
}

SmallPoly poly_mod(SmallPoly a, const SmallPoly& m, long p) {
  trim(a);
  const long lead_inv = inv_mod_small(m.back(), p);
  while (a.size() >= m.size()) {
    const long c = a.back() * lead_inv % p;
    const std::size_t shift = a.size() - m.size();
    for (std::size_t j = 0; j < m.size(); ++j) {
      a[shift + j] = ((a[shift + j] - c * m[j]) % p + p) % p;
    }
    trim(a);
  }
  return a;
}

SmallPoly poly_mulmod(const SmallPoly& a, const SmallPoly& b, const SmallPoly& m, long p) {
  if (a.empty() || b.empty()) return {};
  SmallPoly prod(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) prod[i + j] = (prod[i + j] + a[i] * b[j]) % p;
  }
  return poly_mod(std::move(prod), m, p);
}

SmallPoly poly_gcd(SmallPoly a, SmallPoly b, long p) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    SmallPoly r = poly_mod(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a;
}

// --- normalization of (valuation, coefficient vector, precision) ------------

ExtElement make_element(const FieldPtr& field, long valuation, std::vector<Int> coeffs, int precision) {
  return ExtElement::from_power_coefficients(field, valuation, std::move(coeffs), precision);
}

void reduce_all(std::vector<Int>& v, const Int& m) {
  for (auto& c : v) mpz_mod(c.get_mpz_t(), c.get_mpz_t(), m.get_mpz_t());
}

long floor_log(long i, long p) {
  long k = 0;
  for (long v = p; v <= i; v *= p) ++k;
  return k;
}

}  // namespace

bool is_irreducible_mod_p(const std::vector<long>& poly, long p) {
  SmallPoly m = poly;
  for (auto& c : m) c = ((c % p) + p) % p;
  trim(m);
  if (m.size() < 2) return false;
  const int n = static_cast<int>(m.size()) - 1;
  if (n == 1) return true;
  // Ben-Or: m is irreducible iff gcd(m, t^(p^i) - t) = 1 for i <= n/2.
  SmallPoly t_pow = {0, 1};
  for (int i = 1; i <= n / 2; ++i) {
    SmallPoly base = t_pow;
    SmallPoly acc = {1};
    for (long e = p; e > 0; e >>= 1) {
      if (e & 1) acc = poly_mulmod(acc, base, m, p);
      base = poly_mulmod(base, base, m, p);
    }
    t_pow = acc;
    SmallPoly diff = t_pow;
    if (diff.size() < 2) diff.resize(2, 0);
    diff[1] = ((diff[1] - 1) % p + p) % p;
    trim(diff);
    if (diff.empty()) return false;
    if (poly_gcd(m, diff, p).size() > 1) return false;
  }
  return true;
}

std::vector<long> select_modulus(long p, int n) {
  if (n < 1) throw DomainError("degree must be positive");
  // Enumerate c_{n-1} ... c_0 as base-p digits with c_{n-1} most significant.
  std::vector<long> coeffs(static_cast<std::size_t>(n) + 1, 0);
  coeffs[static_cast<std::size_t>(n)] = 1;
  while (true) {
    if (is_irreducible_mod_p(coeffs, p)) return coeffs;
    int j = 0;
    while (j < n && ++coeffs[static_cast<std::size_t>(j)] == p) coeffs[static_cast<std::size_t>(j++)] = 0;
    if (j == n) throw InternalError("no irreducible polynomial found");
  }
}

// --- FieldContext -------------------------------------------------------------

FieldContext::FieldContext(long p, int n, int precision, std::vector<Int> modulus)
    : p_(p), n_(n), precision_(precision), modulus_(std::move(modulus)) {}

FieldPtr FieldContext::create(long p, int n, int precision, std::optional<std::vector<long>> modulus) {
  require_odd_prime(p);
  if (p >= (1L << 31)) throw DomainError("p must be below 2^31");
  if (n < 1) throw DomainError("degree n must be at least 1");
  if (precision < 1) throw DomainError("precision must be at least 1");
  std::vector<long> m;
  if (modulus) {
    m = *modulus;
    if (static_cast<int>(m.size()) == n) m.push_back(1);
    if (static_cast<int>(m.size()) != n + 1 || m.back() != 1) {
      throw DomainError("modulus must be monic of degree n (low-to-high coefficients)");
    }
    if (!is_irreducible_mod_p(m, p)) throw DomainError("supplied modulus is reducible mod p");
  } else {
    m = select_modulus(p, n);
  }
  std::vector<Int> lower(m.begin(), m.end() - 1);
  std::shared_ptr<FieldContext> field(new FieldContext(p, n, precision, std::move(lower)));
  field->init();
  return field;
}

void FieldContext::init() {
  mpz_ui_pow_ui(q_.get_mpz_t(), static_cast<unsigned long>(p_), static_cast<unsigned long>(n_));
  const Int& big = prime_power(p_, precision_);
  const auto nn = static_cast<std::size_t>(n_);

  // Frobenius image: lift the root t^p mod p of m by Newton's method.
  std::vector<Int> t(nn, 0);
  if (n_ > 1) {
    t[1] = 1;
  } else {
    t[0] = mod(-modulus_[0], Int(p_));
  }
  std::vector<Int> f = unit_pow(t, Int(p_), 1);
  auto eval = [&](const std::vector<Int>& x, bool derivative) {
    std::vector<Int> acc(nn, 0);
    acc[0] = derivative ? Int(n_) : Int(1);
    for (int j = n_ - 1; j >= (derivative ? 1 : 0); --j) {
      acc = mul(acc, x, big);
      acc[0] += derivative ? modulus_[static_cast<std::size_t>(j)] * j : modulus_[static_cast<std::size_t>(j)];
      acc[0] = mod(acc[0], big);
    }
    return acc;
  };
  for (int iter = 0; iter < 2 * precision_ + 4; ++iter) {
    std::vector<Int> value = eval(f, false);
    if (std::all_of(value.begin(), value.end(), [](const Int& c) { return c == 0; })) break;
    std::vector<Int> step = mul(value, unit_inverse(eval(f, true), precision_), big);
    for (std::size_t j = 0; j < nn; ++j) f[j] = mod(f[j] - step[j], big);
  }
  {
    std::vector<Int> value = eval(f, false);
    if (!std::all_of(value.begin(), value.end(), [](const Int& c) { return c == 0; })) {
      throw InternalError("Frobenius image did not converge");
    }
  }
  frobenius_powers_.clear();
  std::vector<Int> power(nn, 0);
  power[0] = 1;
  for (int j = 0; j < n_; ++j) {
    frobenius_powers_.push_back(power);
    power = mul(power, f, big);
  }

  teichmuller_table_.clear();
  if (q_ <= kTeichmullerTableLimit) {
    const std::uint64_t q = to_u64(q_);
    teichmuller_table_.resize(q);
    for (std::uint64_t index = 1; index < q; ++index) {
      std::vector<Int> u(nn, 0);
      std::uint64_t rest = index;
      for (std::size_t j = 0; j < nn; ++j) {
        u[j] = static_cast<unsigned long>(rest % static_cast<std::uint64_t>(p_));
        rest /= static_cast<std::uint64_t>(p_);
      }
      for (int k = 0; k < precision_; ++k) u = unit_pow(u, q_, precision_);
      teichmuller_table_[index] = std::move(u);
    }
  }
}

std::vector<long> FieldContext::modulus_coefficients() const {
  std::vector<long> out;
  for (const auto& c : modulus_) out.push_back(c.get_si());
  out.push_back(1);
  return out;
}

std::vector<Int> FieldContext::mul(const std::vector<Int>& a, const std::vector<Int>& b, const Int& m) const {
  const auto nn = static_cast<std::size_t>(n_);
  std::vector<Int> prod(2 * nn - 1, 0);
  for (std::size_t i = 0; i < nn; ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < nn; ++j) {
      mpz_addmul(prod[i + j].get_mpz_t(), a[i].get_mpz_t(), b[j].get_mpz_t());
    }
  }
  for (std::size_t i = 2 * nn - 2; i >= nn; --i) {
    if (prod[i] == 0) continue;
    mpz_mod(prod[i].get_mpz_t(), prod[i].get_mpz_t(), m.get_mpz_t());
    for (std::size_t j = 0; j < nn; ++j) {
      mpz_submul(prod[i - nn + j].get_mpz_t(), prod[i].get_mpz_t(), modulus_[j].get_mpz_t());
    }
  }
  prod.resize(nn);
  reduce_all(prod, m);
  return prod;
}

std::vector<Int> FieldContext::unit_pow(const std::vector<Int>& u, const Int& e, int precision) const {
  const Int& m = prime_power(p_, precision);
  std::vector<Int> acc(static_cast<std::size_t>(n_), 0);
  acc[0] = 1;
  if (e == 0) return acc;
  const auto bits = static_cast<long>(mpz_sizeinbase(e.get_mpz_t(), 2));
  for (long b = bits - 1; b >= 0; --b) {
    acc = mul(acc, acc, m);
    if (mpz_tstbit(e.get_mpz_t(), static_cast<mp_bitcnt_t>(b))) acc = mul(acc, u, m);
  }
  return acc;
}

std::vector<Int> FieldContext::unit_inverse(const std::vector<Int>& u, int precision) const {
  // Inverse of the residue in F_q, then Newton y <- y(2 - uy) doubling precision.
  std::vector<Int> y = unit_pow(u, q_ - 2, 1);
  int known = 1;
  while (known < precision) {
    known = std::min(2 * known, precision);
    const Int& m = prime_power(p_, known);
    std::vector<Int> uy = mul(u, y, m);
    for (auto& c : uy) c = -c;
    uy[0] += 2;
    reduce_all(uy, m);
    y = mul(y, uy, m);
  }
  const Int& m = prime_power(p_, precision);
  reduce_all(y, m);
  std::vector<Int> check = mul(u, y, m);
  if (check[0] != 1 % m || std::any_of(check.begin() + 1, check.end(), [](const Int& c) { return c != 0; })) {
    throw DomainError("unit_inverse: argument is not a unit");
  }
  return y;
}

std::vector<Int> FieldContext::frobenius_coefficients(const std::vector<Int>& u, int precision) const {
  const Int& m = prime_power(p_, precision);
  const auto nn = static_cast<std::size_t>(n_);
  std::vector<Int> out(nn, 0);
  for (std::size_t j = 0; j < nn; ++j) {
    if (u[j] == 0) continue;
    for (std::size_t i = 0; i < nn; ++i) {
      mpz_addmul(out[i].get_mpz_t(), u[j].get_mpz_t(), frobenius_powers_[j][i].get_mpz_t());
    }
  }
  reduce_all(out, m);
  return out;
}

std::uint64_t FieldContext::residue_index(const std::vector<Int>& u) const {
  std::uint64_t index = 0;
  std::uint64_t scale = 1;
  for (const auto& c : u) {
    index += static_cast<std::uint64_t>(mpz_fdiv_ui(c.get_mpz_t(), static_cast<unsigned long>(p_))) * scale;
    scale *= static_cast<std::uint64_t>(p_);
  }
  return index;
}

std::vector<Int> FieldContext::teichmuller_of_residue(std::uint64_t index) const {
  if (index == 0) throw DomainError("teichmuller: the zero residue has no lift in mu_{q-1}");
  if (!teichmuller_table_.empty()) return teichmuller_table_.at(index);
  std::vector<Int> u(static_cast<std::size_t>(n_), 0);
  for (auto& c : u) {
    c = static_cast<unsigned long>(index % static_cast<std::uint64_t>(p_));
    index /= static_cast<std::uint64_t>(p_);
  }
  for (int k = 0; k < precision_; ++k) u = unit_pow(u, q_, precision_);
  return u;
}

ExtElement FieldContext::frobenius_image() const {
  return ExtElement::from_power_coefficients(shared_from_this(), 0,
                                             n_ > 1 ? frobenius_powers_[1] : frobenius_powers_[0],
                                             precision_);
}

ExtElement FieldContext::zero() const { return ExtElement::zero(shared_from_this()); }
ExtElement FieldContext::one() const { return ExtElement::from_integer(shared_from_this(), 1); }
ExtElement FieldContext::uniformizer() const { return ExtElement::from_integer(shared_from_this(), p_); }

ExtElement FieldContext::generator() const {
  std::vector<Int> t(static_cast<std::size_t>(n_), 0);
  if (n_ > 1) {
    t[1] = 1;
  } else {
    t[0] = -modulus_[0];
  }
  return ExtElement::from_power_coefficients(shared_from_this(), 0, std::move(t), precision_);
}

ExtElement FieldContext::basis_element(int j) const {
  if (j < 1 || j > n_) throw DomainError("basis index out of range");
  if (j == n_) return one();
  std::vector<Int> t(static_cast<std::size_t>(n_), 0);
  t[static_cast<std::size_t>(j)] = 1;
  return ExtElement::from_power_coefficients(shared_from_this(), 0, std::move(t), precision_);
}

// --- ExtElement --------------------------------------------------------------

ExtElement ExtElement::zero(FieldPtr field) {
  return ExtElement(std::move(field), kZeroValuation, {}, 0);
}

ExtElement ExtElement::from_power_coefficients(FieldPtr field, long valuation, std::vector<Int> coeffs,
                                               int precision) {
  const long p = field->p();
  if (static_cast<int>(coeffs.size()) != field->n()) throw DomainError("coefficient vector has wrong length");
  if (precision < 1) throw PrecisionError("element would be known to fewer than one digit");
  reduce_all(coeffs, prime_power(p, precision));
  long shift = kZeroValuation;
  for (const auto& c : coeffs) {
    if (c == 0) continue;
    Int tmp = c;
    shift = std::min(shift, remove_factor(tmp, p));
    if (shift == 0) break;
  }
  if (shift == kZeroValuation) return zero(std::move(field));
  if (shift > 0) {
    const Int& d = prime_power(p, static_cast<int>(shift));
    for (auto& c : coeffs) mpz_divexact(c.get_mpz_t(), c.get_mpz_t(), d.get_mpz_t());
    precision -= static_cast<int>(shift);
    reduce_all(coeffs, prime_power(p, precision));
  }
  return ExtElement(std::move(field), valuation + shift, std::move(coeffs), precision);
}

ExtElement ExtElement::from_scalar(FieldPtr field, const PadicScalar& lambda) {
  if (lambda.is_zero()) return zero(std::move(field));
  if (lambda.prime() != field->p()) throw DomainError("scalar lives over a different prime");
  std::vector<Int> coeffs(static_cast<std::size_t>(field->n()), 0);
  coeffs[0] = lambda.unit();
  return ExtElement(std::move(field), lambda.valuation(), std::move(coeffs), lambda.precision());
}

ExtElement ExtElement::from_integer(FieldPtr field, const Int& value) {
  const int prec = field->precision();
  const long p = field->p();
  return from_scalar(std::move(field), PadicScalar::from_integer(p, prec, value));
}

ExtElement ExtElement::from_rational(FieldPtr field, const Rational& value) {
  const int prec = field->precision();
  const long p = field->p();
  return from_scalar(std::move(field), PadicScalar::from_rational(p, prec, value));
}

ExtElement ExtElement::from_canonical(FieldPtr field, std::span<const PadicScalar> coeffs) {
  const int n = field->n();
  if (static_cast<int>(coeffs.size()) != n) throw DomainError("expected n canonical coordinates");
  long v = kZeroValuation;
  long abs_prec = kZeroValuation;
  for (const auto& c : coeffs) {
    if (c.is_zero()) continue;
    if (c.prime() != field->p()) throw DomainError("coordinate lives over a different prime");
    v = std::min(v, c.valuation());
    abs_prec = std::min(abs_prec, c.absolute_precision());
  }
  if (v == kZeroValuation) return zero(std::move(field));
  const long rel = abs_prec - v;
  if (rel < 1) throw PrecisionError("coordinates leave no known digit");
  const auto prec = static_cast<int>(rel);
  std::vector<Int> power(static_cast<std::size_t>(n), 0);
  for (int i = 0; i < n; ++i) {
    const auto& c = coeffs[static_cast<std::size_t>(i)];
    if (c.is_zero()) continue;
    const long shift = c.valuation() - v;
    const int power_index = (i + 1) % n;
    if (shift < rel) power[static_cast<std::size_t>(power_index)] = c.unit() * prime_power(field->p(), static_cast<int>(shift));
  }
  return from_power_coefficients(std::move(field), v, std::move(power), prec);
}

long ExtElement::absolute_precision() const {
  return is_zero() ? kZeroValuation : valuation_ + precision_;
}

std::vector<PadicScalar> ExtElement::power_coefficients() const {
  const long p = field_->p();
  std::vector<PadicScalar> out;
  for (int j = 0; j < field_->n(); ++j) {
    if (is_zero()) {
      out.push_back(PadicScalar::zero(p, field_->precision()));
      continue;
    }
    const Int& c = unit_[static_cast<std::size_t>(j)];
    if (c == 0) {
      out.push_back(PadicScalar::zero(p, precision_));
      continue;
    }
    Int u = c;
    const long w = remove_factor(u, p);
    out.push_back(PadicScalar::from_unit(p, precision_ - static_cast<int>(w), valuation_ + w, u));
  }
  return out;
}

std::vector<PadicScalar> ExtElement::canonical_coefficients() const {
  std::vector<PadicScalar> power = power_coefficients();
  const int n = field_->n();
  std::vector<PadicScalar> out;
  out.reserve(power.size());
  for (int i = 0; i < n; ++i) out.push_back(power[static_cast<std::size_t>((i + 1) % n)]);
  return out;
}

std::vector<Int> ExtElement::integral_coefficients(long abs_precision) const {
  const long p = field_->p();
  std::vector<Int> out(static_cast<std::size_t>(field_->n()), 0);
  if (is_zero() || abs_precision <= 0) return out;
  if (valuation_ < 0) throw DomainError("integral_coefficients: element is not integral");
  if (abs_precision > absolute_precision()) {
    throw PrecisionError("integral_coefficients: not enough known digits");
  }
  if (valuation_ >= abs_precision) return out;
  const Int& m = prime_power(p, static_cast<int>(abs_precision));
  const Int& shift = prime_power(p, static_cast<int>(valuation_));
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = mod(unit_[j] * shift, m);
  return out;
}

std::uint64_t ExtElement::residue_index() const {
  if (is_zero()) return 0;
  return field_->residue_index(unit_);
}

bool ExtElement::is_principal_unit() const {
  if (!is_unit()) return false;
  const long p = field_->p();
  if (mpz_fdiv_ui(unit_[0].get_mpz_t(), static_cast<unsigned long>(p)) != 1) return false;
  for (std::size_t j = 1; j < unit_.size(); ++j) {
    if (mpz_fdiv_ui(unit_[j].get_mpz_t(), static_cast<unsigned long>(p)) != 0) return false;
  }
  return true;
}

ExtElement ExtElement::with_precision(int precision) const {
  if (is_zero()) return *this;
  if (precision > precision_) throw PrecisionError("with_precision cannot invent digits");
  return make_element(field_, valuation_, unit_, precision);
}

ExtElement ExtElement::inverse() const {
  if (is_zero()) throw DomainError("division by zero");
  return ExtElement(field_, -valuation_, field_->unit_inverse(unit_, precision_), precision_);
}

ExtElement ExtElement::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  if (is_zero()) {
    if (e == 0) return field_->one();
    return *this;
  }
  return ExtElement(field_, valuation_ * e, field_->unit_pow(unit_, Int(e), precision_), precision_);
}

ExtElement ExtElement::scale(const PadicScalar& lambda) const {
  if (is_zero() || lambda.is_zero()) return zero(field_);
  const int prec = std::min(precision_, lambda.precision());
  const Int& m = prime_power(field_->p(), prec);
  std::vector<Int> out = unit_;
  for (auto& c : out) c = mod(c * lambda.unit(), m);
  return ExtElement(field_, valuation_ + lambda.valuation(), std::move(out), prec);
}

ExtElement ExtElement::operator-() const {
  if (is_zero()) return *this;
  const Int& m = prime_power(field_->p(), precision_);
  std::vector<Int> out = unit_;
  for (auto& c : out) c = mod(-c, m);
  return ExtElement(field_, valuation_, std::move(out), precision_);
}

ExtElement operator+(const ExtElement& a, const ExtElement& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.field_ != b.field_) throw DomainError("operands live in different fields");
  const long p = a.field_->p();
  const long v = std::min(a.valuation_, b.valuation_);
  const long abs_prec = std::min(a.absolute_precision(), b.absolute_precision());
  const auto rel = static_cast<int>(abs_prec - v);
  std::vector<Int> sum(a.unit_.size(), 0);
  for (const ExtElement* x : {&a, &b}) {
    const long shift = x->valuation_ - v;
    if (shift >= rel) continue;
    const Int& s = prime_power(p, static_cast<int>(shift));
    for (std::size_t j = 0; j < sum.size(); ++j) mpz_addmul(sum[j].get_mpz_t(), x->unit_[j].get_mpz_t(), s.get_mpz_t());
  }
  return make_element(a.field_, v, std::move(sum), rel);
}

ExtElement operator-(const ExtElement& a, const ExtElement& b) { return a + (-b); }

ExtElement operator*(const ExtElement& a, const ExtElement& b) {
  if (a.is_zero()) return a;
  if (b.is_zero()) return b;
  if (a.field_ != b.field_) throw DomainError("operands live in different fields");
  const int prec = std::min(a.precision_, b.precision_);
  return ExtElement(a.field_, a.valuation_ + b.valuation_,
                    a.field_->mul(a.unit_, b.unit_, prime_power(a.field_->p(), prec)), prec);
}

ExtElement operator/(const ExtElement& a, const ExtElement& b) { return a * b.inverse(); }

bool operator==(const ExtElement& a, const ExtElement& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  if (a.field_ != b.field_ || a.valuation_ != b.valuation_) return false;
  const Int& m = prime_power(a.field_->p(), std::min(a.precision_, b.precision_));
  for (std::size_t j = 0; j < a.unit_.size(); ++j) {
    if (mod(a.unit_[j] - b.unit_[j], m) != 0) return false;
  }
  return true;
}

// --- Galois theory -------------------------------------------------------------

ExtElement frobenius(const ExtElement& x) {
  if (x.is_zero()) return x;
  return ExtElement::from_power_coefficients(x.field_ptr(), x.valuation(),
                                             x.field().frobenius_coefficients(x.unit(), x.precision()),
                                             x.precision());
}

PadicScalar norm(const ExtElement& x) {
  const FieldContext& field = x.field();
  if (x.is_zero()) return PadicScalar::zero(field.p(), field.precision());
  const Int& m = prime_power(field.p(), x.precision());
  std::vector<Int> acc = x.unit();
  std::vector<Int> conjugate = x.unit();
  for (int i = 1; i < field.n(); ++i) {
    conjugate = field.frobenius_coefficients(conjugate, x.precision());
    acc = field.mul(acc, conjugate, m);
  }
  for (std::size_t j = 1; j < acc.size(); ++j) {
    if (acc[j] != 0) throw InternalError("norm: product of conjugates is not in Q_p");
  }
  return PadicScalar::from_unit(field.p(), x.precision(), x.valuation() * field.n(), acc[0]);
}

PadicScalar norm_by_determinant(const ExtElement& x) {
  const FieldContext& field = x.field();
  if (x.is_zero()) return PadicScalar::zero(field.p(), field.precision());
  const auto n = static_cast<std::size_t>(field.n());
  // Column j holds u * t^j reduced modulo m(t) over Z.
  std::vector<std::vector<Int>> a(n, std::vector<Int>(n));
  std::vector<Int> column = x.unit();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) a[i][j] = column[i];
    Int top = column[n - 1];
    for (std::size_t i = n - 1; i > 0; --i) column[i] = column[i - 1];
    column[0] = 0;
    for (std::size_t i = 0; i < n; ++i) column[i] -= top * field.modulus()[i];
  }
  // Bareiss fraction-free elimination.
  Int previous = 1;
  int sign = 1;
  Int det;
  bool singular = false;
  for (std::size_t k = 0; k + 1 < n && !singular; ++k) {
    if (a[k][k] == 0) {
      std::size_t swap = k + 1;
      while (swap < n && a[swap][k] == 0) ++swap;
      if (swap == n) {
        singular = true;
        break;
      }
      std::swap(a[k], a[swap]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        Int t = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        mpz_divexact(a[i][j].get_mpz_t(), t.get_mpz_t(), previous.get_mpz_t());
      }
    }
    previous = a[k][k];
  }
  det = singular ? Int(0) : Int(sign * a[n - 1][n - 1]);
  Int r = mod(det, prime_power(field.p(), x.precision()));
  if (r % field.p() == 0) throw InternalError("norm_by_determinant: determinant of a unit is not a unit");
  return PadicScalar::from_unit(field.p(), x.precision(), x.valuation() * field.n(), r);
}

Rational normalized_abs(const ExtElement& x) { return norm(x).abs(); }

Rational abs_from_coefficients(const ExtElement& x) {
  Rational best = 0;
  for (const auto& c : x.canonical_coefficients()) best = std::max(best, c.abs());
  Rational out = 1;
  for (int i = 0; i < x.field().n(); ++i) out *= best;
  return out;
}

ExtElement teichmuller_K(const ExtElement& x) {
  if (x.is_zero()) throw DomainError("teichmuller_K: zero has no Teichmuller part");
  return ExtElement::from_power_coefficients(x.field_ptr(), 0, x.field().teichmuller_of_residue(x.residue_index()),
                                             x.precision());
}

ExtElement TeichDigitsK::recompose() const {
  const FieldPtr& field = omega.field_ptr();
  ExtElement series = field->one().with_precision(omega.precision());
  const PadicScalar p = PadicScalar::from_integer(field->p(), omega.precision(), field->p());
  PadicScalar pi = p;
  for (const auto& digit : tail) {
    series += digit.scale(pi);
    pi *= p;
  }
  return (omega * series).scale(PadicScalar::from_unit(field->p(), omega.precision(), valuation, 1));
}

TeichDigitsK digit_expansion_K(const ExtElement& x) {
  if (x.is_zero()) throw DomainError("digit_expansion_K: zero has no digit expansion");
  const FieldContext& field = x.field();
  const int prec = x.precision();
  const long p = field.p();
  const Int& m = prime_power(p, prec);
  TeichDigitsK out;
  out.valuation = x.valuation();
  out.omega = teichmuller_K(x);
  std::vector<Int> rest = field.mul(field.unit_inverse(out.omega.unit(), prec), x.unit(), m);
  rest[0] = mod(rest[0] - 1, m);
  for (int i = 1; i < prec; ++i) {
    const Int& pi = prime_power(p, i);
    std::vector<Int> digit_residue(rest.size());
    for (std::size_t j = 0; j < rest.size(); ++j) digit_residue[j] = rest[j] / pi;
    const std::uint64_t index = field.residue_index(digit_residue);
    if (index == 0) {
      out.tail.push_back(ExtElement::zero(x.field_ptr()));
      continue;
    }
    std::vector<Int> digit = field.teichmuller_of_residue(index);
    reduce_all(digit, m);
    for (std::size_t j = 0; j < rest.size(); ++j) rest[j] = mod(rest[j] - digit[j] * pi, m);
    out.tail.push_back(ExtElement::from_power_coefficients(x.field_ptr(), 0, std::move(digit), prec));
  }
  if (std::any_of(rest.begin(), rest.end(), [](const Int& c) { return c != 0; })) {
    throw InternalError("digit_expansion_K: residual after last digit");
  }
  return out;
}

// --- series on principal units ---------------------------------------------------

ExtElement log_principal_K(const ExtElement& u) {
  if (!u.is_principal_unit()) throw DomainError("log_principal_K: argument is not a principal unit");
  const FieldContext& field = u.field();
  const long p = field.p();
  const int prec = u.precision();
  std::vector<Int> z = u.unit();
  z[0] = mod(z[0] - 1, prime_power(p, prec));
  long nu = ExtElement::kZeroValuation;
  for (const auto& c : z) {
    if (c == 0) continue;
    Int t = c;
    nu = std::min(nu, remove_factor(t, p));
  }
  if (nu == ExtElement::kZeroValuation) return ExtElement::zero(u.field_ptr());

  long terms = 1;
  while (terms * nu - floor_log(terms, p) < prec) ++terms;
  const int guard = static_cast<int>(floor_log(terms, p)) + 1;
  const Int& work = prime_power(p, prec + guard);
  const Int& m = prime_power(p, prec);

  std::vector<Int> sum(z.size(), 0);
  std::vector<Int> zpow(z.size(), 0);
  zpow[0] = 1;
  for (long i = 1; i < terms; ++i) {
    zpow = field.mul(zpow, z, work);
    Int ip = i;
    const long loss = remove_factor(ip, p);
    if ((i - 1) * nu < loss) throw PrecisionError("log_principal_K: series lost too many digits");
    const Int& d = prime_power(p, static_cast<int>(loss));
    const Int inv = inverse_mod(ip, m);
    for (std::size_t j = 0; j < z.size(); ++j) {
      Int term;
      mpz_divexact(term.get_mpz_t(), zpow[j].get_mpz_t(), d.get_mpz_t());
      term = mod(term * inv, m);
      if (i % 2 == 0) term = -term;
      sum[j] += term;
    }
  }
  return ExtElement::from_power_coefficients(u.field_ptr(), 0, std::move(sum), prec);
}

ExtElement exp_principal_K(const ExtElement& z) {
  const FieldPtr& fp = z.field_ptr();
  if (z.is_zero()) return fp->one();
  if (z.valuation() < 1) throw DomainError("exp_principal_K: argument must lie in pO");
  const FieldContext& field = *fp;
  const long p = field.p();
  const auto prec = static_cast<int>(z.absolute_precision());
  const long nu = z.valuation();
  long terms = 1;
  while (terms * nu * (p - 1) - (terms - 1) < static_cast<long>(prec) * (p - 1)) ++terms;
  const int guard = static_cast<int>(factorial_valuation(terms, p)) + 1;
  const Int& work = prime_power(p, prec + guard);
  const Int& m = prime_power(p, prec);
  const std::vector<Int> zz = z.integral_coefficients(prec);

  std::vector<Int> sum(zz.size(), 0);
  sum[0] = 1;
  std::vector<Int> zpow(zz.size(), 0);
  zpow[0] = 1;
  Int fact_unit = 1;
  long fact_val = 0;
  for (long i = 1; i < terms; ++i) {
    zpow = field.mul(zpow, zz, work);
    Int ip = i;
    fact_val += remove_factor(ip, p);
    fact_unit = mod(fact_unit * ip, work);
    const Int& d = prime_power(p, static_cast<int>(fact_val));
    const Int inv = inverse_mod(fact_unit, m);
    for (std::size_t j = 0; j < zz.size(); ++j) {
      Int term;
      mpz_divexact(term.get_mpz_t(), zpow[j].get_mpz_t(), d.get_mpz_t());
      sum[j] += mod(term * inv, m);
    }
  }
  return ExtElement::from_power_coefficients(fp, 0, std::move(sum), prec);
}

ExtElement pow_zp_exponent_K(const ExtElement& z, const PadicScalar& beta) {
  const FieldPtr& fp = z.field_ptr();
  const FieldContext& field = *fp;
  const long p = field.p();
  if (!z.is_zero() && z.valuation() < 1) throw DomainError("pow_zp_exponent_K: (1+z)^beta needs z in pO");
  if (!beta.is_zero() && beta.valuation() < 0) throw DomainError("pow_zp_exponent_K: exponent must lie in Z_p");
  if (z.is_zero() || beta.is_zero()) {
    const int prec = z.is_zero() ? field.precision() : static_cast<int>(z.absolute_precision());
    return fp->one().with_precision(std::min(prec, field.precision()));
  }
  long out_prec = std::min(z.absolute_precision(), beta.absolute_precision() + z.valuation());
  const auto prec = static_cast<int>(out_prec);
  const Int& m = prime_power(p, prec);
  const std::vector<Int> zz = z.integral_coefficients(prec);
  const Int b = beta.residue(beta.absolute_precision());
  const long terms = mahler_truncation_index(p, z.valuation(), prec);

  std::vector<Int> sum(zz.size(), 0);
  sum[0] = 1;
  std::vector<Int> zpow(zz.size(), 0);
  zpow[0] = 1;
  Int binom = 1;
  for (long i = 1; i < terms; ++i) {
    binom *= b - (i - 1);
    mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), static_cast<unsigned long>(i));
    zpow = field.mul(zpow, zz, m);
    const Int c = mod(binom, m);
    for (std::size_t j = 0; j < zz.size(); ++j) sum[j] += c * zpow[j];
  }
  return ExtElement::from_power_coefficients(fp, 0, std::move(sum), prec);
}

}  // namespace padsph
