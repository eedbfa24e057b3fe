#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace epsbias::nt {

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m);
std::uint64_t powmod(std::uint64_t base, std::uint64_t exp, std::uint64_t m);

// Deterministic for all 64-bit inputs.
bool is_prime(std::uint64_t n);

std::uint64_t gcd(std::uint64_t a, std::uint64_t b);

/// Prime factorization as (prime, exponent) pairs in increasing prime order.
std::vector<std::pair<std::uint64_t, unsigned>> factorize(std::uint64_t n);

std::uint64_t totient(std::uint64_t n);

/// Legendre symbol (a|p) for an odd prime p, returned as -1, 0 or 1.
int legendre(std::int64_t a, std::uint64_t p);

/// A square root of -1 modulo a prime p = 1 (mod 4).
std::uint64_t sqrt_minus_one(std::uint64_t p);

/// Inverse of a modulo m; a and m must be coprime.
std::uint64_t invmod(std::uint64_t a, std::uint64_t m);

/// The unique x in [0, m1*m2) with x = a1 (mod m1) and x = a2 (mod m2).
std::uint64_t crt(std::uint64_t a1, std::uint64_t m1, std::uint64_t a2, std::uint64_t m2);

/// Smallest prime p >= from with p = 1 (mod 4).
std::uint64_t next_prime_1mod4(std::uint64_t from);

}  // namespace epsbias::nt
