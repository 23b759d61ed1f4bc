#pragma once

#include <openssl/evp.h>

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace wotsplus::detail {

/// One-shot SHA-256 with a reused per-thread context (hot path: every chain
/// step goes through here).
inline std::array<std::uint8_t, 32> sha256(std::span<const std::uint8_t> data) {
  struct Ctx {
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    ~Ctx() { EVP_MD_CTX_free(ctx); }
  };
  thread_local Ctx md;

  std::array<std::uint8_t, 32> out{};
  unsigned int out_len = 0;
  if (md.ctx == nullptr ||
      EVP_DigestInit_ex(md.ctx, EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(md.ctx, data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(md.ctx, out.data(), &out_len) != 1 || out_len != 32) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  return out;
}

}  // namespace wotsplus::detail
