#include "padsph/integer.hpp"

#include <deque>
#include <unordered_map>

#include "padsph/errors.hpp"

namespace padsph {

const Int& prime_power(long p, int k) {
  thread_local std::unordered_map<long, std::deque<Int>> cache;
  auto& powers = cache[p];
  if (powers.empty()) powers.emplace_back(1);
  while (static_cast<int>(powers.size()) <= k) powers.emplace_back(powers.back() * p);
  return powers[static_cast<std::size_t>(k)];
}

long remove_factor(Int& a, long p) {
  if (a == 0) throw DomainError("remove_factor: zero has infinite valuation");
  Int prime = p;
  return static_cast<long>(mpz_remove(a.get_mpz_t(), a.get_mpz_t(), prime.get_mpz_t()));
}

Int mod(const Int& a, const Int& m) {
  Int r;
  mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Int inverse_mod(const Int& a, const Int& m) {
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) {
    throw DomainError("inverse_mod: argument is not a unit");
  }
  return r;
}

Int pow_mod(const Int& base, const Int& exponent, const Int& m) {
  Int r;
  mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), m.get_mpz_t());
  return r;
}

Rational rational_power(long p, long e) {
  Rational r(prime_power(p, static_cast<int>(e < 0 ? -e : e)));
  if (e < 0) r = 1 / r;
  return r;
}

Rational parse_rational(std::string_view text) {
  if (const auto dot = text.find('.'); dot != std::string_view::npos && text.find('/') == std::string_view::npos) {
    // exact decimal: "-1.25" -> -125/100
    std::string digits(text.substr(0, dot));
    const std::string_view frac = text.substr(dot + 1);
    if (frac.empty() || frac.find_first_not_of("0123456789") != std::string_view::npos)
      throw DomainError("cannot parse rational '" + std::string(text) + "'");
    digits += frac;
    if (digits.empty() || digits == "-" || digits == "+") digits += "0";
    Rational q = parse_rational(digits);
    q /= Rational(prime_power(10, static_cast<int>(frac.size())));
    q.canonicalize();
    return q;
  }
  Rational q;
  if (q.set_str(std::string(text), 10) != 0) {
    throw DomainError("cannot parse rational '" + std::string(text) + "'");
  }
  if (q.get_den() == 0) throw DomainError("zero denominator in '" + std::string(text) + "'");
  q.canonicalize();
  return q;
}

std::string to_string(const Rational& q) { return q.get_str(10); }
std::string to_string(const Int& a) { return a.get_str(10); }

bool is_prime(long p) {
  if (p < 2) return false;
  for (long d = 2; d * d <= p; ++d) {
    if (p % d == 0) return false;
  }
  return true;
}

long digit_sum(long i, long p) {
  long s = 0;
  for (; i > 0; i /= p) s += i % p;
  return s;
}

long factorial_valuation(long i, long p) { return (i - digit_sum(i, p)) / (p - 1); }

std::uint64_t to_u64(const Int& a) {
  if (a < 0 || mpz_sizeinbase(a.get_mpz_t(), 2) > 64) {
    throw DomainError("value does not fit in 64 bits");
  }
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, a.get_mpz_t());
  return out;
}

}  // namespace padsph
