#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace posmon {

using Integer = mpz_class;
/// Exact rational; GMP keeps it in lowest terms with a positive denominator
/// after every arithmetic operation.
using Rational = mpq_class;

/// Parses "p", "-p" or "p/q" (q != 0) into canonical form.
Rational parse_rational(std::string_view text);
/// Canonical text: "p/q" in lowest terms, or "p" when the denominator is 1.
std::string format_rational(const Rational& q);

inline Integer numerator(const Rational& q) { return q.get_num(); }
inline Integer denominator(const Rational& q) { return q.get_den(); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

Integer floor_of(const Rational& q);
Integer ceil_of(const Rational& q);
Rational pow(const Rational& q, unsigned n);

Integer lcm_of(const Integer& a, const Integer& b);
Integer gcd_of(const Integer& a, const Integer& b);

/// Smallest e >= 0 with `value` | base^e, or -1 if no such e exists.
long divides_power_exponent(const Integer& value, const Integer& base);

/// Distinct prime factors in increasing order (trial division; |n| >= 1).
std::vector<Integer> prime_factors(Integer n);
bool is_squarefree(const Integer& n);

/// First `count` primes.
std::vector<std::uint64_t> first_primes(std::size_t count);
/// All primes <= limit (sieve of Eratosthenes).
std::vector<std::uint64_t> primes_up_to(std::uint64_t limit);
/// Index (0-based) of prime p among all primes, or -1 if p is not prime.
long prime_index(std::uint64_t p);

}  // namespace posmon
