#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wotsplus {

/// Base class for all library errors.
class Error : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Scheme parameters violate a validity rule (w not a power of two, ...).
class InvalidParameter : public Error {
  using Error::Error;
};

/// A bit string has the wrong width for the operation.
class InvalidLength : public Error {
  using Error::Error;
};

/// A chain call asked for mask levels outside the supplied mask vector.
class MaskRangeError : public Error {
  using Error::Error;
};

/// Second sign attempt on a one-time key.
class KeyAlreadyUsed : public Error {
  using Error::Error;
};

/// Canonical decoding failed; `offset` is the byte position of the defect.
class MalformedEncoding : public Error {
 public:
  MalformedEncoding(std::size_t offset, const std::string& what)
      : Error(what + " (at byte " + std::to_string(offset) + ")"), offset_(offset) {}

  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Exhaustive search requested over a domain beyond the toy limit.
class DomainTooLarge : public Error {
  using Error::Error;
};

/// Numeric argument outside its admissible range.
class OutOfRange : public Error {
  using Error::Error;
};

/// Hybrid indices out of order (requires 0 <= i* < beta* <= w-1).
class IndexRange : public Error {
  using Error::Error;
};

/// A claimed preimage or second preimage failed re-verification.
/// This must never fire; tests assert zero occurrences.
class InternalInconsistency : public Error {
  using Error::Error;
};

class IoError : public Error {
  using Error::Error;
};

}  // namespace wotsplus
