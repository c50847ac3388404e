#include "padsph/padic.hpp"

#include <algorithm>
#include <string>

#include "padsph/errors.hpp"

namespace padsph {

void require_odd_prime(long p) {
  thread_local long last_checked = 0;
  if (p == last_checked) return;
  if (p == 2) throw DomainError("p = 2 excluded: the construction requires an odd prime");
  if (!is_prime(p)) throw DomainError("p = " + std::to_string(p) + " is not prime");
  last_checked = p;
}

namespace {

void require_same_prime(const PadicScalar& a, const PadicScalar& b) {
  if (a.prime() != b.prime()) throw DomainError("operands live over different primes");
}

// floor(log_p(i)) for i >= 1.
long floor_log(long i, long p) {
  long k = 0;
  for (long v = p; v <= i; v *= p) ++k;
  return k;
}

}  // namespace

PadicScalar PadicScalar::zero(long p, int precision) {
  require_odd_prime(p);
  return PadicScalar(p, std::max(precision, 1), kZeroValuation, Int(0));
}

PadicScalar PadicScalar::from_unit(long p, int precision, long valuation, const Int& unit) {
  require_odd_prime(p);
  if (precision < 1) throw PrecisionError("a p-adic unit needs at least one known digit");
  Int u = mod(unit, prime_power(p, precision));
  if (u % p == 0) throw DomainError("from_unit: mantissa is divisible by p");
  return PadicScalar(p, precision, valuation, std::move(u));
}

PadicScalar PadicScalar::from_integer(long p, int precision, const Int& value) {
  require_odd_prime(p);
  if (value == 0) return zero(p, precision);
  Int u = value;
  long v = remove_factor(u, p);
  return from_unit(p, precision, v, u);
}

PadicScalar PadicScalar::from_integer_abs(long p, int abs_precision, const Int& value) {
  require_odd_prime(p);
  Int r = mod(value, prime_power(p, abs_precision));
  if (r == 0) return zero(p, abs_precision);
  long v = remove_factor(r, p);
  return from_unit(p, abs_precision - static_cast<int>(v), v, r);
}

PadicScalar PadicScalar::from_rational(long p, int precision, const Rational& value) {
  require_odd_prime(p);
  if (value == 0) return zero(p, precision);
  Int num = value.get_num();
  Int den = value.get_den();
  long v = remove_factor(num, p) - remove_factor(den, p);
  const Int& m = prime_power(p, precision);
  return from_unit(p, precision, v, mod(num * inverse_mod(den, m), m));
}

long PadicScalar::absolute_precision() const {
  return is_zero() ? kZeroValuation : valuation_ + precision_;
}

Rational PadicScalar::abs() const {
  if (is_zero()) return Rational(0);
  return rational_power(p_, -valuation_);
}

Int PadicScalar::residue(long abs_precision) const {
  if (abs_precision <= 0) return Int(0);
  if (is_zero()) return Int(0);
  if (valuation_ < 0) throw DomainError("residue: element is not integral");
  if (abs_precision > absolute_precision()) {
    throw PrecisionError("residue: requested " + std::to_string(abs_precision) +
                         " digits, only " + std::to_string(absolute_precision()) + " known");
  }
  if (valuation_ >= abs_precision) return Int(0);
  const Int& m = prime_power(p_, static_cast<int>(abs_precision));
  return mod(unit_ * prime_power(p_, static_cast<int>(valuation_)), m);
}

Rational PadicScalar::to_rational() const {
  if (is_zero()) return Rational(0);
  return Rational(unit_) * rational_power(p_, valuation_);
}

PadicScalar PadicScalar::with_precision(int precision) const {
  if (is_zero()) return zero(p_, precision);
  if (precision > precision_) throw PrecisionError("with_precision cannot invent digits");
  return from_unit(p_, precision, valuation_, unit_);
}

PadicScalar PadicScalar::inverse() const {
  if (is_zero()) throw DomainError("division by zero");
  const Int& m = prime_power(p_, precision_);
  return PadicScalar(p_, precision_, -valuation_, inverse_mod(unit_, m));
}

PadicScalar PadicScalar::pow(long e) const {
  if (e < 0) return inverse().pow(-e);
  if (e == 0) return from_integer(p_, precision_, 1);
  if (is_zero()) return *this;
  const Int& m = prime_power(p_, precision_);
  return PadicScalar(p_, precision_, valuation_ * e, pow_mod(unit_, Int(e), m));
}

PadicScalar PadicScalar::operator-() const {
  if (is_zero()) return *this;
  const Int& m = prime_power(p_, precision_);
  return PadicScalar(p_, precision_, valuation_, mod(-unit_, m));
}

PadicScalar operator+(const PadicScalar& a, const PadicScalar& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  require_same_prime(a, b);
  const long p = a.p_;
  const long v = std::min(a.valuation_, b.valuation_);
  const long abs_prec = std::min(a.absolute_precision(), b.absolute_precision());
  const int rel = static_cast<int>(abs_prec - v);
  const Int& m = prime_power(p, rel);
  Int s = 0;
  for (const PadicScalar* x : {&a, &b}) {
    const long shift = x->valuation_ - v;
    if (shift < rel) s += x->unit_ * prime_power(p, static_cast<int>(shift));
  }
  s = mod(s, m);
  if (s == 0) return PadicScalar::zero(p, std::max(a.precision_, b.precision_));
  const long t = remove_factor(s, p);
  const int prec = rel - static_cast<int>(t);
  return PadicScalar(p, prec, v + t, mod(s, prime_power(p, prec)));
}

PadicScalar operator-(const PadicScalar& a, const PadicScalar& b) { return a + (-b); }

PadicScalar operator*(const PadicScalar& a, const PadicScalar& b) {
  if (a.is_zero() || b.is_zero()) {
    if (a.p_ != 0 && b.p_ != 0) require_same_prime(a, b);
    return PadicScalar::zero(a.is_zero() ? a.p_ : b.p_, std::max(a.precision_, b.precision_));
  }
  require_same_prime(a, b);
  const int prec = std::min(a.precision_, b.precision_);
  return PadicScalar(a.p_, prec, a.valuation_ + b.valuation_,
                     mod(a.unit_ * b.unit_, prime_power(a.p_, prec)));
}

PadicScalar operator/(const PadicScalar& a, const PadicScalar& b) { return a * b.inverse(); }

bool operator==(const PadicScalar& a, const PadicScalar& b) {
  if (a.is_zero() || b.is_zero()) return a.is_zero() && b.is_zero();
  if (a.p_ != b.p_ || a.valuation_ != b.valuation_) return false;
  const int prec = std::min(a.precision_, b.precision_);
  const Int& m = prime_power(a.p_, prec);
  return mod(a.unit_ - b.unit_, m) == 0;
}

Int teichmuller_lift_qp(long p, int precision, const Int& a) {
  const Int& m = prime_power(p, precision);
  Int x = mod(a, p);
  if (x == 0) return x;
  const Int exponent = p;
  // Each step fixes one more digit; `precision` steps reach the limit.
  for (int k = 0; k < precision; ++k) x = pow_mod(x, exponent, m);
  return x;
}

PadicScalar TeichmullerDigitsQp::recompose() const {
  const Int& m = prime_power(prime, precision);
  Int s = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    s += digits[i] * prime_power(prime, static_cast<int>(i));
  }
  return PadicScalar::from_unit(prime, precision, valuation, mod(s, m));
}

TeichmullerDigitsQp teichmuller_digits_qp(const PadicScalar& x) {
  if (x.is_zero()) throw DomainError("teichmuller_digits_qp: zero has no digit expansion");
  const long p = x.prime();
  const int prec = x.precision();
  const Int& m = prime_power(p, prec);
  TeichmullerDigitsQp out{p, prec, x.valuation(), {}};
  out.digits.reserve(static_cast<std::size_t>(prec));
  Int rest = x.unit();
  for (int i = 0; i < prec; ++i) {
    const Int& pi = prime_power(p, i);
    Int digit = teichmuller_lift_qp(p, prec, Int(rest / pi));
    rest = mod(rest - digit * pi, m);
    out.digits.push_back(std::move(digit));
  }
  if (rest != 0) throw InternalError("teichmuller_digits_qp: residual after last digit");
  return out;
}

bool is_positive(const PadicScalar& x) {
  if (x.is_zero()) throw DomainError("is_positive: zero is not in Q_p^(1)");
  // Teichmuller digit 0 equals 1 exactly when the unit is 1 mod p.
  return x.unit() % x.prime() == 1;
}

long mahler_truncation_index(long p, long nu, int precision) {
  if (nu < 1) throw DomainError("mahler_truncation_index: requires nu >= 1");
  // i*nu - (i-1)/(p-1) bounds i*nu - v_p(i!) from below and is increasing.
  long monotone = 1;
  while (monotone * nu * (p - 1) - (monotone - 1) < static_cast<long>(precision) * (p - 1)) {
    ++monotone;
  }
  long index = monotone;
  while (index > 1 && (index - 1) * nu - factorial_valuation(index - 1, p) >= precision) --index;
  return index;
}

PadicScalar pow_zp_exponent(const PadicScalar& z, const PadicScalar& beta) {
  const long p = z.prime() != 0 ? z.prime() : beta.prime();
  if (!z.is_zero() && z.valuation() < 1) {
    throw DomainError("pow_zp_exponent: (1+z)^beta needs |z|_p < 1");
  }
  if (!beta.is_zero() && beta.valuation() < 0) {
    throw DomainError("pow_zp_exponent: exponent must lie in Z_p");
  }
  if (!z.is_zero() && !beta.is_zero()) require_same_prime(z, beta);

  long out_prec = std::max(z.precision(), beta.precision());
  if (!z.is_zero()) out_prec = std::min(out_prec, z.absolute_precision());
  if (!beta.is_zero() && !z.is_zero()) {
    out_prec = std::min(out_prec, beta.absolute_precision() + z.valuation());
  }
  const int prec = static_cast<int>(out_prec);
  if (z.is_zero() || beta.is_zero()) return PadicScalar::from_integer(p, prec, 1);

  const Int& m = prime_power(p, prec);
  const Int zz = z.unit() * prime_power(p, static_cast<int>(z.valuation()));
  const Int b = beta.residue(beta.absolute_precision());
  const long terms = mahler_truncation_index(p, z.valuation(), prec);

  Int sum = 1;
  Int binom = 1;
  Int zpow = 1;
  for (long i = 1; i < terms; ++i) {
    binom *= b - (i - 1);
    mpz_divexact_ui(binom.get_mpz_t(), binom.get_mpz_t(), static_cast<unsigned long>(i));
    zpow = mod(zpow * zz, m);
    sum += mod(binom, m) * zpow;
  }
  return PadicScalar::from_unit(p, prec, 0, mod(sum, m));
}

PadicScalar nth_root_principal(const PadicScalar& zeta, long n) {
  if (zeta.is_zero() || zeta.valuation() != 0 || !is_positive(zeta)) {
    throw DomainError("nth_root_principal: argument is not a principal unit");
  }
  const long p = zeta.prime();
  if (n < 1) throw DomainError("nth_root_principal: n must be positive");
  if (n % p == 0) {
    throw DomainError("nth_root_principal: p divides n (the construction requires p not dividing n)");
  }
  if (n == 1) return zeta;
  const int prec = zeta.precision();
  const Int& m = prime_power(p, prec);
  const Int en = n;
  const Int en1 = n - 1;
  Int y = 1;
  // Newton converges quadratically from y = 1 since n is a unit mod p.
  for (int iter = 0; iter < 2 * prec + 4; ++iter) {
    Int yn1 = pow_mod(y, en1, m);
    Int f = mod(yn1 * y - zeta.unit(), m);
    if (f == 0) break;
    y = mod(y - f * inverse_mod(en * yn1, m), m);
  }
  if (mod(pow_mod(y, en, m) - zeta.unit(), m) != 0) {
    throw InternalError("nth_root_principal: Newton iteration did not converge");
  }
  return PadicScalar::from_unit(p, prec, 0, y);
}

PadicScalar log_principal(const PadicScalar& u) {
  if (u.is_zero() || u.valuation() != 0 || !is_positive(u)) {
    throw DomainError("log_principal: argument is not a principal unit");
  }
  const long p = u.prime();
  const int prec = u.precision();
  Int z = mod(u.unit() - 1, prime_power(p, prec));
  if (z == 0) return PadicScalar::zero(p, prec);
  Int zu = z;
  const long nu = remove_factor(zu, p);

  // Terms z^i / i have valuation >= i*nu - floor(log_p i), nondecreasing in i.
  long terms = 1;
  while (terms * nu - floor_log(terms, p) < prec) ++terms;
  // Dividing by i costs v_p(i) digits; keep that many guard digits.
  const int guard = static_cast<int>(floor_log(terms, p)) + 1;
  const Int& work = prime_power(p, prec + guard);
  const Int& m = prime_power(p, prec);

  Int sum = 0;
  Int zpow = 1;
  for (long i = 1; i < terms; ++i) {
    zpow = mod(zpow * z, work);
    Int ip = i;
    const long loss = remove_factor(ip, p);
    if ((i - 1) * nu < loss) throw PrecisionError("log_principal: series lost too many digits");
    Int term = zpow;
    mpz_divexact(term.get_mpz_t(), term.get_mpz_t(), prime_power(p, static_cast<int>(loss)).get_mpz_t());
    term = mod(term * inverse_mod(ip, m), m);
    if (i % 2 == 0) term = -term;
    sum += term;
  }
  return PadicScalar::from_integer_abs(p, prec, sum);
}

PadicScalar exp_principal(const PadicScalar& z) {
  const long p = z.prime();
  if (z.is_zero()) return PadicScalar::from_integer(p, z.precision(), 1);
  if (z.valuation() < 1) throw DomainError("exp_principal: argument must lie in pZ_p");
  const int prec = static_cast<int>(z.absolute_precision());
  const long nu = z.valuation();
  const Int zz = z.unit() * prime_power(p, static_cast<int>(nu));

  long terms = 1;
  while (terms * nu * (p - 1) - (terms - 1) < static_cast<long>(prec) * (p - 1)) ++terms;
  const int guard = static_cast<int>(factorial_valuation(terms, p)) + 1;
  const Int& work = prime_power(p, prec + guard);
  const Int& m = prime_power(p, prec);

  Int sum = 1;
  Int zpow = 1;
  Int fact_unit = 1;
  long fact_val = 0;
  for (long i = 1; i < terms; ++i) {
    zpow = mod(zpow * zz, work);
    Int ip = i;
    fact_val += remove_factor(ip, p);
    fact_unit = mod(fact_unit * ip, work);
    Int term = zpow;
    mpz_divexact(term.get_mpz_t(), term.get_mpz_t(), prime_power(p, static_cast<int>(fact_val)).get_mpz_t());
    sum += mod(term * inverse_mod(fact_unit, m), m);
  }
  return PadicScalar::from_unit(p, prec, 0, mod(sum, m));
}

}  // namespace padsph
