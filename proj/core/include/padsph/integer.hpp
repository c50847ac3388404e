#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace padsph {

using Int = mpz_class;
using Rational = mpq_class;

/// p^k, cached per thread. The reference stays valid for the thread's lifetime.
const Int& prime_power(long p, int k);

/// Removes every factor p from a (a != 0) and returns how many were removed.
long remove_factor(Int& a, long p);

/// Non-negative remainder of a modulo m.
Int mod(const Int& a, const Int& m);

/// Inverse of a unit modulo m; the caller guarantees gcd(a, m) = 1.
Int inverse_mod(const Int& a, const Int& m);

Int pow_mod(const Int& base, const Int& exponent, const Int& m);

/// p^e as an exact rational (e may be negative).
Rational rational_power(long p, long e);

/// Parses "a", "-a", "a/b" or an exact decimal "-1.25" into a canonical rational.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);
std::string to_string(const Int& a);

bool is_prime(long p);

/// Base-p digit sum of i.
long digit_sum(long i, long p);

/// v_p(i!) via Legendre's formula.
long factorial_valuation(long i, long p);

/// Fits in 64 bits? Used for compact level keys.
std::uint64_t to_u64(const Int& a);

}  // namespace padsph
