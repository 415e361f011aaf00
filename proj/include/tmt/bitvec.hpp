// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "tmt/digest.hpp"

namespace tmt {

/// Growable bit string with rank support. Bit i of the logical string is
/// stored in word i/64 at position i%64.
class BitVector {
  public:
    BitVector() = default;
    explicit BitVector(std::size_t size, bool value = false);

    /// Parses a string of '0'/'1' characters (first character is bit 0).
    static BitVector from_string(std::string_view bits);

    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] bool empty() const { return size_ == 0; }

    [[nodiscard]] bool get(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
    [[nodiscard]] bool operator[](std::size_t i) const { return get(i); }
    void set(std::size_t i, bool value = true);

    void push_back(bool bit);
    void append(const BitVector& other);
    void resize(std::size_t size);

    [[nodiscard]] std::size_t popcount() const;
    /// Number of set bits strictly before position i (i <= size()).
    [[nodiscard]] std::size_t rank(std::size_t i) const;
    /// Positions of set bits in increasing order.
    [[nodiscard]] std::vector<std::uint32_t> ones() const;

    [[nodiscard]] std::string to_string() const;

    friend bool operator==(const BitVector& a, const BitVector& b);

  private:
    std::vector<std::uint64_t> words_;
    std::size_t size_ = 0;
};

/// Appends fields most-significant-bit first into a byte buffer.
class BitWriter {
  public:
    void write(std::uint64_t value, unsigned width);
    void write_bits(const BitVector& bits);
    void write_bytes(ByteView bytes);

    [[nodiscard]] std::size_t bit_length() const { return bits_; }
    /// Returns the buffer zero-padded to a whole byte.
    [[nodiscard]] const Bytes& bytes() const { return out_; }

  private:
    Bytes out_;
    std::size_t bits_ = 0;
};

/// Reads MSB-first fields. Reads past the end throw std::out_of_range.
class BitReader {
  public:
    explicit BitReader(ByteView bytes) : in_(bytes) {}

    std::uint64_t read(unsigned width);
    bool read_bit();
    [[nodiscard]] std::size_t position() const { return pos_; }
    [[nodiscard]] std::size_t remaining() const { return in_.size() * 8 - pos_; }

  private:
    ByteView in_;
    std::size_t pos_ = 0;
};

}  // namespace tmt
