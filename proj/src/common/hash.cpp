#include "ptv/common/hash.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

#include "ptv/common/error.hpp"
#include "ptv/common/table_io.hpp"

namespace ptv {

std::string sha256_hex(std::string_view bytes) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest.data(), &len,
                 EVP_sha256(), nullptr) != 1) {
    throw DataError("sha256: digest computation failed");
  }
  std::string hex(2 * len, '0');
  static const char* kDigits = "0123456789abcdef";
  for (unsigned int i = 0; i < len; ++i) {
    hex[2 * i] = kDigits[digest[i] >> 4];
    hex[2 * i + 1] = kDigits[digest[i] & 0xF];
  }
  return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
  return sha256_hex(read_text_file(path));
}

}  // namespace ptv
