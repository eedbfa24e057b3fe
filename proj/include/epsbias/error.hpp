#pragma once

#include <stdexcept>
#include <string>

namespace epsbias {

/// Violated precondition on the shape of an input: mixed groups, non-normal
/// subgroups, non-coprime moduli, bad descriptors and similar.
class StructuralError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured cap (enumeration size, field size, search budget) was hit.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A certified value exceeded the claim it was meant to back.
class CertificationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Global tolerance used when comparing a certified bias against its claim.
inline constexpr double kCertificationTolerance = 1e-9;

}  // namespace epsbias
