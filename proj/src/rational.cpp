#include "posmon/rational.hpp"

#include <algorithm>
#include <cctype>
#include <mutex>

#include "posmon/error.hpp"

namespace posmon {

namespace {

bool all_digits(std::string_view s) {
  return !s.empty() &&
         std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view body = text;
  bool negative = false;
  if (!body.empty() && (body.front() == '-' || body.front() == '+')) {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }
  const auto slash = body.find('/');
  const std::string_view num = body.substr(0, slash);
  const std::string_view den = slash == std::string_view::npos ? std::string_view{"1"} : body.substr(slash + 1);
  if (!all_digits(num) || !all_digits(den)) {
    throw ParseError("not a rational: '" + std::string(text) + "'");
  }
  Integer n(std::string(num), 10);
  Integer d(std::string(den), 10);
  if (d == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
  if (negative) n = -n;
  Rational q(n, d);
  q.canonicalize();
  return q;
}

std::string format_rational(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

Integer floor_of(const Rational& q) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Integer ceil_of(const Rational& q) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

Rational pow(const Rational& q, unsigned n) {
  Integer num, den;
  mpz_pow_ui(num.get_mpz_t(), q.get_num_mpz_t(), n);
  mpz_pow_ui(den.get_mpz_t(), q.get_den_mpz_t(), n);
  return Rational(num, den);  // already coprime
}

Integer lcm_of(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Integer gcd_of(const Integer& a, const Integer& b) {
  Integer r;
  mpz_gcd(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

long divides_power_exponent(const Integer& value, const Integer& base) {
  Integer rest = abs(value);
  if (rest == 0) return -1;
  long e = 0;
  for (const auto& p : prime_factors(base)) {
    long in_value = 0;
    while (rest % p == 0) {
      rest /= p;
      ++in_value;
    }
    long in_base = 0;
    for (Integer b = abs(base); b % p == 0; b /= p) ++in_base;
    e = std::max(e, (in_value + in_base - 1) / in_base);
  }
  return rest == 1 ? e : -1;
}

std::vector<Integer> prime_factors(Integer n) {
  n = abs(n);
  std::vector<Integer> out;
  if (n < 2) return out;
  for (Integer p = 2; p * p <= n; p += (p == 2 ? 1 : 2)) {
    if (n % p == 0) {
      out.push_back(p);
      while (n % p == 0) n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

bool is_squarefree(const Integer& n) {
  Integer m = abs(n);
  if (m == 0) return false;
  for (const auto& p : prime_factors(m)) {
    if ((m / p) % p == 0) return false;
  }
  return true;
}

std::vector<std::uint64_t> primes_up_to(std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  if (limit < 2) return out;
  std::vector<bool> composite(limit + 1, false);
  for (std::uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    out.push_back(i);
    for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = true;
  }
  return out;
}

namespace {

// Grows on demand; guarded so lookups are safe from concurrent callers.
class PrimeTable {
 public:
  std::vector<std::uint64_t> first(std::size_t count) {
    std::lock_guard lock(mutex_);
    while (primes_.size() < count) {
      limit_ = limit_ < 64 ? 64 : limit_ * 2;
      primes_ = primes_up_to(limit_);
    }
    return {primes_.begin(), primes_.begin() + static_cast<std::ptrdiff_t>(count)};
  }

  long index_of(std::uint64_t p) {
    std::lock_guard lock(mutex_);
    while (limit_ < p) {
      limit_ = std::max<std::uint64_t>(limit_ * 2, p);
      primes_ = primes_up_to(limit_);
    }
    auto it = std::lower_bound(primes_.begin(), primes_.end(), p);
    if (it == primes_.end() || *it != p) return -1;
    return static_cast<long>(it - primes_.begin());
  }

 private:
  std::mutex mutex_;
  std::uint64_t limit_ = 0;
  std::vector<std::uint64_t> primes_;
};

PrimeTable& prime_table() {
  static PrimeTable table;
  return table;
}

}  // namespace

std::vector<std::uint64_t> first_primes(std::size_t count) { return prime_table().first(count); }

long prime_index(std::uint64_t p) { return prime_table().index_of(p); }

}  // namespace posmon
