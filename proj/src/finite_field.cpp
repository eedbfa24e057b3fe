#include "epsbias/finite_field.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "epsbias/error.hpp"
#include "epsbias/number_theory.hpp"

namespace epsbias {

namespace {

// Multiply a field element (digit vector) by x modulo the monic polynomial
// x^k + c_{k-1} x^{k-1} + ... + c_0.
std::uint64_t times_x(std::uint64_t a, std::uint64_t p, unsigned k, const std::vector<std::uint64_t>& c,
                      std::uint64_t q) {
  std::uint64_t top = a / (q / p);
  std::uint64_t shifted = (a % (q / p)) * p;
  if (top == 0) return shifted;
  // x^k = -(c_{k-1} x^{k-1} + ... + c_0)
  std::uint64_t result = 0;
  std::uint64_t place = 1;
  for (unsigned i = 0; i < k; ++i) {
    std::uint64_t digit = (shifted / place) % p;
    digit = (digit + (p - c[i]) * top) % p;
    result += digit * place;
    place *= p;
  }
  return result;
}

}  // namespace

GaloisField::GaloisField(std::uint64_t p, unsigned k) : p_(p), k_(k) {
  if (!nt::is_prime(p)) throw StructuralError("field characteristic " + std::to_string(p) + " is not prime");
  if (k == 0) throw StructuralError("field degree must be positive");
  long double q = std::pow(static_cast<long double>(p), k);
  if (q > 65536.0L) {
    throw ResourceError("field of size " + std::to_string(p) + "^" + std::to_string(k) +
                        " exceeds the 2^16 field table limit");
  }
  q_ = static_cast<std::uint64_t>(std::llround(q));
  exp_.resize(q_ - 1);
  log_.assign(q_, 0);

  // Lexicographic search over (c_0, ..., c_{k-1}) encoded as an integer with
  // c_{k-1} most significant; c_0 != 0 is required for x to be a unit.
  bool found = false;
  for (std::uint64_t code = 0; code < q_ && !found; ++code) {
    std::vector<std::uint64_t> c(k);
    std::uint64_t rest = code;
    for (unsigned i = k; i-- > 0;) {
      c[i] = rest % p;
      rest /= p;
    }
    if (c[0] == 0) continue;
    std::vector<char> seen(q_, 0);
    std::uint64_t cur = 1;
    bool ok = true;
    for (std::uint64_t e = 0; e < q_ - 1; ++e) {
      if (seen[cur] || cur == 0) {
        ok = false;
        break;
      }
      seen[cur] = 1;
      exp_[e] = static_cast<std::uint32_t>(cur);
      cur = times_x(cur, p, k, c, q_);
    }
    if (ok && cur == 1) {
      modulus_ = c;
      found = true;
    }
  }
  if (!found) throw std::logic_error("no primitive polynomial found");
  for (std::uint64_t e = 0; e < q_ - 1; ++e) log_[exp_[e]] = static_cast<std::uint32_t>(e);

  trace_.assign(q_, 0);
  for (std::uint64_t a = 1; a < q_; ++a) {
    std::uint32_t t = 0;
    auto cur = static_cast<std::uint32_t>(a);
    for (unsigned i = 0; i < k; ++i) {
      t = add(t, cur);
      cur = pow(cur, p);
    }
    // the trace lies in the prime field, i.e. is a constant polynomial
    if (t >= p) throw std::logic_error("trace left the prime field");
    trace_[a] = t;
  }
}

std::uint32_t GaloisField::add(std::uint32_t a, std::uint32_t b) const {
  std::uint64_t result = 0;
  std::uint64_t place = 1;
  std::uint64_t x = a, y = b;
  for (unsigned i = 0; i < k_; ++i) {
    result += ((x % p_ + y % p_) % p_) * place;
    x /= p_;
    y /= p_;
    place *= p_;
  }
  return static_cast<std::uint32_t>(result);
}

std::uint32_t GaloisField::mul(std::uint32_t a, std::uint32_t b) const {
  if (a == 0 || b == 0) return 0;
  return exp_[(static_cast<std::uint64_t>(log_[a]) + log_[b]) % (q_ - 1)];
}

std::uint32_t GaloisField::pow(std::uint32_t a, std::uint64_t e) const {
  if (e == 0) return 1;
  if (a == 0) return 0;
  return exp_[static_cast<std::uint64_t>(log_[a]) * (e % (q_ - 1)) % (q_ - 1)];
}

}  // namespace epsbias
