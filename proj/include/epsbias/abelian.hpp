#pragma once

#include <cstdint>
#include <vector>

#include "epsbias/biased_set.hpp"

namespace epsbias {

inline constexpr std::uint64_t kDefaultFieldCap = 4096;
inline constexpr std::uint64_t kDefaultCharacterCap = std::uint64_t{1} << 20;

/// Powering construction over Z_p^n: entries indexed by (x, y) in F_q^2 with
/// coordinate i equal to Tr(x^i y), 0^0 = 1. q is the smallest power of p
/// with q >= n / delta. Claimed bias (n - 1) / q, size q^2.
BiasedSet aghp_construct(std::uint64_t p, unsigned n, double delta,
                         std::uint64_t field_cap = kDefaultFieldCap);
/// Same construction with an explicit field size q (a power of p).
BiasedSet aghp_construct_q(std::uint64_t p, unsigned n, std::uint64_t q,
                           std::uint64_t field_cap = kDefaultFieldCap);

/// Coordinatewise CRT of S1 over Z_m1^n (outer) and S2 over Z_m2^n (inner).
BiasedSet crt_product(const BiasedSet& s1, const BiasedSet& s2);

/// Coordinatewise reduction of a set over Z_m^n to Z_d^n.
BiasedSet quotient_mod(const BiasedSet& s, std::uint64_t d);

struct CharacterBias {
  double bias = 0.0;
  /// Coordinates of the worst nontrivial character (empty for the trivial group).
  std::vector<std::uint64_t> worst_character;
};

/// Maximum over nontrivial characters of |E_{x in S} chi(x)| for a set over a
/// product of cyclic groups; exact DFT with compensated summation.
CharacterBias char_bias_report(const BiasedSet& s, std::uint64_t character_cap = kDefaultCharacterCap);
double char_bias_exact(const BiasedSet& s, std::uint64_t character_cap = kDefaultCharacterCap);

struct SearchResult {
  BiasedSet best;
  double best_bias = 1.0;
  bool success = false;
  std::uint64_t attempts = 0;
  std::uint64_t sample_size = 0;
};

/// Samples multisets of size ceil(8 ln(m^n) / eps^2) until one has exact bias
/// <= eps. When the group is no larger than the sample size the whole group is
/// returned; eps >= 1 returns the singleton {0}.
SearchResult random_biased_search(std::uint64_t m, unsigned n, double eps, std::uint64_t budget,
                                  std::uint64_t seed);

/// Set over Z_m^n with bias <= delta: powering sets for the primes dividing m
/// exactly once, certified random search for prime powers, combined by CRT.
BiasedSet abelian_biased_set(std::uint64_t m, unsigned n, double delta, std::uint64_t seed = 1,
                             std::uint64_t budget = 200,
                             std::uint64_t field_cap = kDefaultFieldCap);

}  // namespace epsbias
