// SPDX-License-Identifier: Apache-2.0
#include "tmt/bitvec.hpp"

#include <bit>
#include <stdexcept>

namespace tmt {

BitVector::BitVector(std::size_t size, bool value)
    : words_((size + 63) / 64, value ? ~std::uint64_t{0} : 0), size_(size) {
    resize(size);  // clears the tail of the last word
}

BitVector BitVector::from_string(std::string_view bits) {
    BitVector v;
    for (const char c : bits) {
        if (c != '0' && c != '1') throw std::invalid_argument("bit string may only contain 0 and 1");
        v.push_back(c == '1');
    }
    return v;
}

void BitVector::set(std::size_t i, bool value) {
    const std::uint64_t m = std::uint64_t{1} << (i & 63);
    if (value) {
        words_[i >> 6] |= m;
    } else {
        words_[i >> 6] &= ~m;
    }
}

void BitVector::push_back(bool bit) {
    if ((size_ & 63) == 0) words_.push_back(0);
    ++size_;
    if (bit) set(size_ - 1);
}

void BitVector::append(const BitVector& other) {
    for (std::size_t i = 0; i < other.size(); ++i) push_back(other.get(i));
}

void BitVector::resize(std::size_t size) {
    words_.resize((size + 63) / 64, 0);
    size_ = size;
    if ((size_ & 63) != 0) words_.back() &= (std::uint64_t{1} << (size_ & 63)) - 1;
}

std::size_t BitVector::popcount() const {
    std::size_t total = 0;
    for (const std::uint64_t w : words_) total += static_cast<std::size_t>(std::popcount(w));
    return total;
}

std::size_t BitVector::rank(std::size_t i) const {
    if (i > size_) throw std::out_of_range("rank position beyond bit vector");
    std::size_t total = 0;
    const std::size_t full = i >> 6;
    for (std::size_t w = 0; w < full; ++w) total += static_cast<std::size_t>(std::popcount(words_[w]));
    if ((i & 63) != 0) {
        const std::uint64_t mask = (std::uint64_t{1} << (i & 63)) - 1;
        total += static_cast<std::size_t>(std::popcount(words_[full] & mask));
    }
    return total;
}

std::vector<std::uint32_t> BitVector::ones() const {
    std::vector<std::uint32_t> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        std::uint64_t bits = words_[w];
        while (bits != 0) {
            out.push_back(static_cast<std::uint32_t>(w * 64 + static_cast<std::size_t>(std::countr_zero(bits))));
            bits &= bits - 1;
        }
    }
    return out;
}

std::string BitVector::to_string() const {
    std::string s(size_, '0');
    for (std::size_t i = 0; i < size_; ++i) {
        if (get(i)) s[i] = '1';
    }
    return s;
}

bool operator==(const BitVector& a, const BitVector& b) { return a.size_ == b.size_ && a.words_ == b.words_; }

void BitWriter::write(std::uint64_t value, unsigned width) {
    if (width > 64) throw std::invalid_argument("field wider than 64 bits");
    if (width < 64 && (value >> width) != 0) throw std::invalid_argument("value does not fit its field");
    for (unsigned i = width; i-- > 0;) {
        if ((bits_ & 7) == 0) out_.push_back(0);
        if ((value >> i) & 1U) out_.back() |= static_cast<std::uint8_t>(0x80U >> (bits_ & 7));
        ++bits_;
    }
}

void BitWriter::write_bits(const BitVector& bits) {
    for (std::size_t i = 0; i < bits.size(); ++i) write(bits.get(i) ? 1 : 0, 1);
}

void BitWriter::write_bytes(ByteView bytes) {
    for (const std::uint8_t b : bytes) write(b, 8);
}

std::uint64_t BitReader::read(unsigned width) {
    if (width > 64) throw std::invalid_argument("field wider than 64 bits");
    if (width > remaining()) throw std::out_of_range("read past end of bit stream");
    std::uint64_t v = 0;
    for (unsigned i = 0; i < width; ++i) {
        const unsigned bit = (in_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1U;
        v = (v << 1) | bit;
        ++pos_;
    }
    return v;
}

bool BitReader::read_bit() { return read(1) != 0; }

}  // namespace tmt
