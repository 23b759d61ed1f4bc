#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <random>
#include <span>

#include "wotsplus/bitstring.hpp"
#include "wotsplus/detail/sha256.hpp"

namespace wotsplus {

/// Source of random bytes. Implementations must be usable from one thread
/// at a time; independent streams are cheap to create (see SeededRng).
class Rng {
 public:
  virtual ~Rng() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;
};

/// OS-backed randomness for the default key-generation path.
class SystemRng final : public Rng {
 public:
  void fill(std::span<std::uint8_t> out) override {
    std::size_t i = 0;
    while (i < out.size()) {
      const unsigned int word = device_();
      for (std::size_t b = 0; b < sizeof(word) && i < out.size(); ++b, ++i) {
        out[i] = static_cast<std::uint8_t>(word >> (8 * b));
      }
    }
  }

 private:
  std::random_device device_;
};

/// Deterministic byte stream: block_i = SHA-256(seed ‖ stream ‖ i), with
/// big-endian 64-bit stream and counter fields. Platform independent, so
/// seeded runs are bit-reproducible everywhere. Distinct `stream` values
/// give independent streams from one master seed; the trial runner keys
/// them by (trial index, component).
class SeededRng final : public Rng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0) : stream_(stream) {
    seed_.resize(8);
    store_be64(seed_.data(), seed);
  }

  SeededRng(std::span<const std::uint8_t> seed, std::uint64_t stream = 0)
      : seed_(seed.begin(), seed.end()), stream_(stream) {}

  void fill(std::span<std::uint8_t> out) override {
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (avail_ == 0) refill();
      out[i] = block_[32 - avail_];
      --avail_;
    }
  }

 private:
  static void store_be64(std::uint8_t* p, std::uint64_t v) {
    for (int i = 7; i >= 0; --i) {
      p[i] = static_cast<std::uint8_t>(v & 0xff);
      v >>= 8;
    }
  }

  void refill() {
    Bytes input(seed_.size() + 16);
    std::memcpy(input.data(), seed_.data(), seed_.size());
    store_be64(input.data() + seed_.size(), stream_);
    store_be64(input.data() + seed_.size() + 8, counter_++);
    block_ = detail::sha256(input);
    avail_ = 32;
  }

  Bytes seed_;
  std::uint64_t stream_ = 0;
  std::uint64_t counter_ = 0;
  std::array<std::uint8_t, 32> block_{};
  std::size_t avail_ = 0;
};

inline BitString random_bits(Rng& rng, std::uint32_t bits) {
  BitString out(bits);
  rng.fill({out.data(), out.size_bytes()});
  out.mask_padding();
  return out;
}

/// Unbiased uniform draw from [0, bound).
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
  if (bound == 0) throw OutOfRange("uniform_below: empty range");
  const std::uint64_t limit = bound * (~std::uint64_t{0} / bound);
  for (;;) {
    std::array<std::uint8_t, 8> raw{};
    rng.fill(raw);
    std::uint64_t v = 0;
    for (std::uint8_t b : raw) v = (v << 8) | b;
    if (v < limit) return v % bound;
  }
}

}  // namespace wotsplus
