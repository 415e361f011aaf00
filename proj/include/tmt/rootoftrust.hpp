// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>

#include "tmt/bitvec.hpp"
#include "tmt/digest.hpp"

namespace tmt::rot {

/// Message rejected: bad redundancy, undecodable payload, inconsistent counts.
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Field layout, in bits from the start of the message (MSB-first):
//   0    T            256  root of the truncated tree
//   256  n - 1         12
//   268  m - 1         12  (0 in empty mode, where m == 0)
//   280  flags          8  bits 0-1 mode, bit 2 width, bits 3-7 extra rounds
//   288  payload        L
//   L+288 redundancy   32  all zero
// then zero padding to a whole byte.
inline constexpr std::size_t kHeaderBits = 288;
inline constexpr std::size_t kRedundancyBits = 32;
inline constexpr std::size_t kOverheadBits = kHeaderBits + kRedundancyBits;
inline constexpr std::size_t kMaxPayloadBits = 1024;
inline constexpr std::uint32_t kMaxUsers = 4096;

enum class BitmapMode : std::uint8_t { plain = 0, compressed = 1, list = 2, empty = 3 };

const char* to_string(BitmapMode mode);

struct Flags {
    BitmapMode mode = BitmapMode::empty;
    bool wide = false;           // codeword width 8 instead of 4
    unsigned extra_rounds = 0;   // 0 = no permutation

    [[nodiscard]] unsigned width() const { return wide ? 8U : 4U; }
    [[nodiscard]] std::uint8_t pack() const;
    static Flags unpack(std::uint8_t phi);

    friend bool operator==(const Flags&, const Flags&) = default;
};

struct RootOfTrust {
    Hash tree_root{};
    std::uint32_t n = 1;
    std::uint32_t m = 0;
    Flags flags;
    BitVector payload;

    friend bool operator==(const RootOfTrust&, const RootOfTrust&) = default;
};

/// Bits per list entry: ceil(log2 n).
[[nodiscard]] unsigned list_entry_bits(std::uint32_t n);

/// Serializes; throws std::invalid_argument if the fields violate the
/// invariants (n outside [1, 4096], m > n, L > 1024, payload length not
/// matching the mode, mode/m mismatch).
[[nodiscard]] Bytes encode_rot(const RootOfTrust& rot);

struct PrefixDecode {
    RootOfTrust rot;
    std::size_t bytes_used = 0;
};

/// Parses a root of trust from the front of `bytes`, tolerating trailing
/// data. Throws FormatError on any inconsistency, including a payload whose
/// reconstructed bitmap does not hold exactly m ones.
[[nodiscard]] PrefixDecode decode_rot_prefix(ByteView bytes);

/// As decode_rot_prefix, but the message must span `bytes` exactly.
[[nodiscard]] RootOfTrust decode_rot(ByteView bytes);

/// Reconstructs the n-bit bitmap carried by the payload. Throws FormatError.
[[nodiscard]] BitVector logical_bitmap(const RootOfTrust& rot);

/// Payload builders for each mode. `bitmap` is the processed (permuted)
/// bitmap of length n.
[[nodiscard]] BitVector plain_payload(const BitVector& bitmap);
[[nodiscard]] BitVector list_payload(const BitVector& bitmap);
/// Requires 0 < popcount < size; codebook probability is popcount / size.
[[nodiscard]] BitVector compressed_payload(const BitVector& bitmap, unsigned w);

struct ModeChoice {
    Flags flags;  // extra_rounds is 0 from choose_mode, set by search_extra_rounds
    BitVector payload;
};

/// Shortest encoding among plain, list and compressed (w = 4 and 8) that fits
/// in 1024 bits; empty when the bitmap has no ones. Ties prefer plain, then
/// list, then w = 4, then w = 8. Throws std::invalid_argument if nothing fits.
[[nodiscard]] ModeChoice choose_mode(const BitVector& bitmap);

struct RoundsChoice {
    unsigned extra_rounds = 0;
    ModeChoice mode;
    BitVector processed_bitmap;
};

/// Tries the unpermuted bitmap (extra 0) and base_t + e rounds for e in
/// 1..31, returning the shortest payload (smallest extra on ties). Bitmaps
/// whose length is not a power of two >= 2 are never permuted.
[[nodiscard]] RoundsChoice search_extra_rounds(const BitVector& raw_bitmap, std::uint64_t block_number,
                                               unsigned base_t);

}  // namespace tmt::rot
