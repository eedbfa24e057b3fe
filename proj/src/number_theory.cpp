#include "epsbias/number_theory.hpp"

#include <stdexcept>

#include "epsbias/error.hpp"

namespace epsbias::nt {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t result = 1 % m;
  base %= m;
  while (exp > 0) {
    if (exp & 1U) result = mulmod(result, base, m);
    base = mulmod(base, base, m);
    exp >>= 1U;
  }
  return result;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t small : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    if (n % small == 0) return n == small;
  }
  std::uint64_t d = n - 1;
  unsigned r = 0;
  while ((d & 1U) == 0) {
    d >>= 1U;
    ++r;
  }
  // This witness set is exact below 3.3e24.
  for (std::uint64_t a : {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37}) {
    std::uint64_t x = powmod(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool composite = true;
    for (unsigned i = 1; i < r; ++i) {
      x = mulmod(x, x, n);
      if (x == n - 1) {
        composite = false;
        break;
      }
    }
    if (composite) return false;
  }
  return true;
}

std::uint64_t gcd(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n) {
  std::vector<std::pair<std::uint64_t, unsigned>> out;
  for (std::uint64_t p = 2; p * p <= n; ++p) {
    if (n % p != 0) continue;
    unsigned e = 0;
    while (n % p == 0) {
      n /= p;
      ++e;
    }
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::uint64_t totient(std::uint64_t n) {
  if (n == 0) return 0;
  std::uint64_t result = n;
  for (auto [p, e] : factorize(n)) result = result / p * (p - 1);
  return result;
}

int legendre(std::int64_t a, std::uint64_t p) {
  auto m = static_cast<std::int64_t>(p);
  std::uint64_t r = static_cast<std::uint64_t>(((a % m) + m) % m);
  if (r == 0) return 0;
  return powmod(r, (p - 1) / 2, p) == 1 ? 1 : -1;
}

namespace {

std::uint64_t tonelli_shanks(std::uint64_t n, std::uint64_t p) {
  std::uint64_t q = p - 1;
  unsigned s = 0;
  while ((q & 1U) == 0) {
    q >>= 1U;
    ++s;
  }
  std::uint64_t z = 2;
  while (legendre(static_cast<std::int64_t>(z), p) != -1) ++z;
  std::uint64_t m = s;
  std::uint64_t c = powmod(z, q, p);
  std::uint64_t t = powmod(n, q, p);
  std::uint64_t r = powmod(n, (q + 1) / 2, p);
  while (t != 1) {
    std::uint64_t i = 0;
    std::uint64_t t2 = t;
    while (t2 != 1) {
      t2 = mulmod(t2, t2, p);
      ++i;
    }
    std::uint64_t b = c;
    for (std::uint64_t j = 0; j + i + 1 < m; ++j) b = mulmod(b, b, p);
    m = i;
    c = mulmod(b, b, p);
    t = mulmod(t, c, p);
    r = mulmod(r, b, p);
  }
  return r;
}

}  // namespace

std::uint64_t sqrt_minus_one(std::uint64_t p) {
  if (p % 4 != 1 || !is_prime(p)) {
    throw StructuralError("sqrt_minus_one: modulus " + std::to_string(p) +
                          " is not a prime congruent to 1 mod 4");
  }
  if (p < 1000000) {
    for (std::uint64_t x = 2; x < p; ++x) {
      if (x * x % p == p - 1) return x;
    }
    throw std::logic_error("sqrt_minus_one: no root found for prime 1 mod 4");
  }
  std::uint64_t r = tonelli_shanks(p - 1, p);
  return r < p - r ? r : p - r;
}

std::uint64_t invmod(std::uint64_t a, std::uint64_t m) {
  std::int64_t t = 0, new_t = 1;
  auto r = static_cast<std::int64_t>(m), new_r = static_cast<std::int64_t>(a % m);
  while (new_r != 0) {
    std::int64_t quotient = r / new_r;
    std::int64_t tmp = t - quotient * new_t;
    t = new_t;
    new_t = tmp;
    tmp = r - quotient * new_r;
    r = new_r;
    new_r = tmp;
  }
  if (r != 1) throw StructuralError("invmod: arguments are not coprime");
  if (t < 0) t += static_cast<std::int64_t>(m);
  return static_cast<std::uint64_t>(t);
}

std::uint64_t crt(std::uint64_t a1, std::uint64_t m1, std::uint64_t a2, std::uint64_t m2) {
  // x = a1 + m1 * k with k = (a2 - a1) * m1^{-1} mod m2
  std::uint64_t inv = invmod(m1 % m2, m2);
  std::uint64_t diff = (a2 % m2 + m2 - a1 % m2) % m2;
  std::uint64_t k = mulmod(diff, inv, m2);
  return a1 % m1 + m1 * k;
}

std::uint64_t next_prime_1mod4(std::uint64_t from) {
  std::uint64_t n = from < 5 ? 5 : from;
  while (n % 4 != 1) ++n;
  while (!is_prime(n)) n += 4;
  return n;
}

}  // namespace epsbias::nt
