#pragma once

#include <cstdint>
#include <span>

#include "wotsplus/errors.hpp"
#include "wotsplus/wots.hpp"

namespace wotsplus {

/// Canonical byte layout, version 1. All multi-byte integers big-endian.
///
///   offset 0   version (0x01)
///   offset 1   type tag: 0x01 secret key, 0x02 public key, 0x03 signature
///   offset 2   n in bits (u16)
///   offset 4   m in bits (u16)
///   offset 6   w (u16)
///   offset 8   payload, with nb = ceil(n/8):
///     secret key : key[32] ‖ masks[(w-1)*nb] ‖ used(u8) ‖ chains[l*nb]
///     public key : key[32] ‖ masks[(w-1)*nb] ‖ chains[l*nb]
///     signature  : nodes[l*nb]
///
/// Encodings are strict: padding bits above each n-bit value must be zero,
/// and the total length must match exactly.
inline constexpr std::uint8_t kEncodingVersion = 0x01;

enum class BlobType : std::uint8_t {
  secret_key = 0x01,
  public_key = 0x02,
  signature = 0x03,
};

namespace detail {

inline void put_u16(Bytes& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
}

inline void put_header(Bytes& out, BlobType type, const Params& p) {
  out.push_back(kEncodingVersion);
  out.push_back(static_cast<std::uint8_t>(type));
  put_u16(out, p.n);
  put_u16(out, p.m);
  put_u16(out, p.w);
}

inline void put_bits(Bytes& out, const BitString& v) {
  out.insert(out.end(), v.bytes().begin(), v.bytes().end());
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> data) : data_(data) {}

  std::size_t offset() const noexcept { return offset_; }

  std::uint8_t u8(const char* what) {
    need(1, what);
    return data_[offset_++];
  }

  std::uint32_t u16(const char* what) {
    need(2, what);
    const std::uint32_t v = (std::uint32_t{data_[offset_]} << 8) | data_[offset_ + 1];
    offset_ += 2;
    return v;
  }

  std::span<const std::uint8_t> raw(std::size_t count, const char* what) {
    need(count, what);
    auto out = data_.subspan(offset_, count);
    offset_ += count;
    return out;
  }

  BitString bits(std::uint32_t width, const char* what) {
    const std::size_t at = offset_;
    auto raw_bytes = raw(byte_length(width), what);
    try {
      return BitString::from_bytes(raw_bytes, width);
    } catch (const InvalidLength&) {
      throw MalformedEncoding(at, "nonzero padding bits");
    }
  }

  void finish() const {
    if (offset_ != data_.size()) {
      throw MalformedEncoding(offset_, "trailing bytes after encoding");
    }
  }

 private:
  void need(std::size_t count, const char* what) const {
    if (offset_ + count > data_.size()) {
      throw MalformedEncoding(data_.size(), std::string("truncated: expected ") + what);
    }
  }

  std::span<const std::uint8_t> data_;
  std::size_t offset_ = 0;
};

struct Opened {
  Params params;
  FamilySpec family;
  Reader reader;
};

inline Opened open(std::span<const std::uint8_t> data, BlobType expected) {
  Reader r(data);
  if (r.u8("version") != kEncodingVersion) {
    throw MalformedEncoding(0, "unsupported encoding version");
  }
  if (r.u8("type tag") != static_cast<std::uint8_t>(expected)) {
    throw MalformedEncoding(1, "wrong blob type");
  }
  const std::uint32_t n = r.u16("n");
  const std::uint32_t m = r.u16("m");
  const std::uint32_t w = r.u16("w");
  try {
    return Opened{derive_params(n, m, w), FamilySpec::for_bits(n), std::move(r)};
  } catch (const InvalidParameter& e) {
    throw MalformedEncoding(2, std::string("invalid parameters: ") + e.what());
  }
}

inline FamilyKey read_key(Reader& r, const FamilySpec& spec) {
  FamilyKey key{spec, {}};
  auto raw = r.raw(kFamilyKeyBytes, "family key");
  std::copy(raw.begin(), raw.end(), key.bytes.begin());
  return key;
}

inline BitmaskVector read_masks(Reader& r, const Params& p) {
  BitmaskVector masks;
  masks.masks.reserve(p.w - 1);
  for (std::uint32_t i = 0; i + 1 < p.w; ++i) masks.masks.push_back(r.bits(p.n, "mask"));
  return masks;
}

inline std::vector<BitString> read_chain_ends(Reader& r, const Params& p, const char* what) {
  std::vector<BitString> out;
  out.reserve(p.l);
  for (std::uint32_t i = 0; i < p.l; ++i) out.push_back(r.bits(p.n, what));
  return out;
}

}  // namespace detail

inline Bytes serialize(const SecretKey& sk) {
  Bytes out;
  detail::put_header(out, BlobType::secret_key, sk.params);
  out.insert(out.end(), sk.key.bytes.begin(), sk.key.bytes.end());
  for (const BitString& m : sk.masks.masks) detail::put_bits(out, m);
  out.push_back(sk.used ? 1 : 0);
  for (const BitString& c : sk.chains) detail::put_bits(out, c);
  return out;
}

inline Bytes serialize(const PublicKey& pk) {
  Bytes out;
  detail::put_header(out, BlobType::public_key, pk.params);
  out.insert(out.end(), pk.key.bytes.begin(), pk.key.bytes.end());
  for (const BitString& m : pk.masks.masks) detail::put_bits(out, m);
  for (const BitString& c : pk.chains) detail::put_bits(out, c);
  return out;
}

inline Bytes serialize(const Signature& sig) {
  Bytes out;
  detail::put_header(out, BlobType::signature, sig.params);
  for (const BitString& node : sig.nodes) detail::put_bits(out, node);
  return out;
}

inline SecretKey deserialize_secret_key(std::span<const std::uint8_t> data) {
  auto opened = detail::open(data, BlobType::secret_key);
  SecretKey sk;
  sk.params = opened.params;
  sk.key = detail::read_key(opened.reader, opened.family);
  sk.masks = detail::read_masks(opened.reader, sk.params);
  const std::size_t used_at = opened.reader.offset();
  const std::uint8_t used = opened.reader.u8("used flag");
  if (used > 1) throw MalformedEncoding(used_at, "used flag must be 0 or 1");
  sk.used = used == 1;
  sk.chains = detail::read_chain_ends(opened.reader, sk.params, "secret chain");
  opened.reader.finish();
  return sk;
}

inline PublicKey deserialize_public_key(std::span<const std::uint8_t> data) {
  auto opened = detail::open(data, BlobType::public_key);
  PublicKey pk;
  pk.params = opened.params;
  pk.key = detail::read_key(opened.reader, opened.family);
  pk.masks = detail::read_masks(opened.reader, pk.params);
  pk.chains = detail::read_chain_ends(opened.reader, pk.params, "public chain");
  opened.reader.finish();
  return pk;
}

inline Signature deserialize_signature(std::span<const std::uint8_t> data) {
  auto opened = detail::open(data, BlobType::signature);
  Signature sig;
  sig.params = opened.params;
  sig.nodes = detail::read_chain_ends(opened.reader, sig.params, "signature node");
  opened.reader.finish();
  return sig;
}

}  // namespace wotsplus
