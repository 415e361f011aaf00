// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tmt {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

inline constexpr std::size_t kHashBits = 256;
inline constexpr std::size_t kHashBytes = kHashBits / 8;

/// Raw output of the tree hash (SHA-256).
using Hash = std::array<std::uint8_t, kHashBytes>;

[[nodiscard]] Hash sha256(ByteView data);
[[nodiscard]] Hash sha256(ByteView a, ByteView b);

/// Bitwise complement, written x' in the NULL-extension rule.
[[nodiscard]] Hash flip(const Hash& x);

[[nodiscard]] Hash xor_hash(const Hash& a, const Hash& b);

/// A node or leaf label: either a hash value or the distinguished NULL label.
/// NULL is a tag, not a byte pattern, so no hash output can collide with it.
class Digest {
  public:
    Digest() = default;  // NULL
    explicit Digest(const Hash& h) : value_(h) {}

    static Digest null() { return Digest{}; }

    [[nodiscard]] bool is_null() const { return !value_.has_value(); }
    [[nodiscard]] explicit operator bool() const { return value_.has_value(); }

    // Precondition: !is_null().
    [[nodiscard]] const Hash& hash() const { return *value_; }

    friend bool operator==(const Digest&, const Digest&) = default;

  private:
    std::optional<Hash> value_;
};

std::string to_hex(ByteView bytes);
inline std::string to_hex(const Hash& h) { return to_hex(ByteView{h}); }
std::string to_hex(const Digest& d);  // "NULL" for the null label

/// Throws std::invalid_argument on odd length or a non-hex character.
Bytes from_hex(std::string_view hex);
Hash hash_from_hex(std::string_view hex);

}  // namespace tmt
