#pragma once

#include <cstdint>
#include <vector>

namespace epsbias {

/// The field with q = p^k elements. Elements are integers in [0, q) whose
/// base-p digits are polynomial coefficients (least significant digit is the
/// constant term). The modulus is the lexicographically first monic
/// primitive polynomial of degree k, so x generates the multiplicative group.
class GaloisField {
 public:
  GaloisField(std::uint64_t p, unsigned k);

  std::uint64_t characteristic() const { return p_; }
  unsigned degree() const { return k_; }
  std::uint64_t size() const { return q_; }
  /// Coefficients c_0..c_{k-1} of the modulus x^k - sum ... written as
  /// x^k + c_{k-1} x^{k-1} + ... + c_0.
  const std::vector<std::uint64_t>& modulus() const { return modulus_; }

  std::uint32_t add(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t mul(std::uint32_t a, std::uint32_t b) const;
  std::uint32_t pow(std::uint32_t a, std::uint64_t e) const;
  /// Absolute trace to the prime field, as a residue mod p.
  std::uint32_t trace(std::uint32_t a) const { return trace_[a]; }
  /// Discrete log base x; a must be nonzero.
  std::uint32_t log(std::uint32_t a) const { return log_[a]; }
  std::uint32_t exp(std::uint64_t e) const { return exp_[e % (q_ - 1)]; }

 private:
  std::uint64_t p_;
  unsigned k_;
  std::uint64_t q_;
  std::vector<std::uint64_t> modulus_;
  std::vector<std::uint32_t> exp_;
  std::vector<std::uint32_t> log_;
  std::vector<std::uint32_t> trace_;
};

}  // namespace epsbias
