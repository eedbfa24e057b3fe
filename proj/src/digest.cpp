#include "epsbias/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace epsbias {

std::string sha256_hex(const std::string& data) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[md[i] >> 4U];
    out += kHex[md[i] & 0xFU];
  }
  return out;
}

}  // namespace epsbias
