#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace wfforge {

/// SHA-256 of a byte buffer, rendered as lowercase hex.
inline std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, 32> md{};
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md.data(), &len, EVP_sha256(), nullptr);
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(64, '0');
  for (unsigned int i = 0; i < len; ++i) {
    out[2 * i] = digits[md[i] >> 4];
    out[2 * i + 1] = digits[md[i] & 0x0f];
  }
  return out;
}

/// Accumulates length-prefixed fields so that concatenated inputs cannot
/// collide across field boundaries. Lengths are little-endian uint64.
class HashInput {
 public:
  HashInput& field(std::string_view bytes) {
    const std::uint64_t n = bytes.size();
    for (int i = 0; i < 8; ++i) {
      buf_.push_back(static_cast<char>((n >> (8 * i)) & 0xff));
    }
    buf_.append(bytes);
    return *this;
  }

  std::string hex() const { return sha256_hex(buf_); }

 private:
  std::string buf_;
};

}  // namespace wfforge
