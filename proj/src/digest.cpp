// SPDX-License-Identifier: Apache-2.0
#include "tmt/digest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <memory>
#include <stdexcept>

namespace tmt {

namespace {

struct MdCtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
};

Hash sha256_parts(std::initializer_list<ByteView> parts) {
    thread_local std::unique_ptr<EVP_MD_CTX, MdCtxDeleter> ctx{EVP_MD_CTX_new()};
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256: digest init failed");
    }
    for (const ByteView part : parts) {
        if (!part.empty() && EVP_DigestUpdate(ctx.get(), part.data(), part.size()) != 1) {
            throw std::runtime_error("sha256: digest update failed");
        }
    }
    Hash out{};
    unsigned int len = 0;
    if (EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
        throw std::runtime_error("sha256: digest final failed");
    }
    return out;
}

int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

}  // namespace

Hash sha256(ByteView data) { return sha256_parts({data}); }

Hash sha256(ByteView a, ByteView b) { return sha256_parts({a, b}); }

Hash flip(const Hash& x) {
    Hash out;
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = static_cast<std::uint8_t>(~x[i]);
    return out;
}

Hash xor_hash(const Hash& a, const Hash& b) {
    Hash out;
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] ^ b[i];
    return out;
}

std::string to_hex(ByteView bytes) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::string s;
    s.reserve(bytes.size() * 2);
    for (const std::uint8_t b : bytes) {
        s.push_back(kDigits[b >> 4]);
        s.push_back(kDigits[b & 0xF]);
    }
    return s;
}

std::string to_hex(const Digest& d) { return d.is_null() ? std::string{"NULL"} : to_hex(d.hash()); }

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) throw std::invalid_argument("hex string has odd length");
    Bytes out(hex.size() / 2);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const int hi = hex_value(hex[2 * i]);
        const int lo = hex_value(hex[2 * i + 1]);
        if (hi < 0 || lo < 0) throw std::invalid_argument("invalid hex character");
        out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
    }
    return out;
}

Hash hash_from_hex(std::string_view hex) {
    const Bytes raw = from_hex(hex);
    if (raw.size() != kHashBytes) throw std::invalid_argument("hash hex must be 64 characters");
    Hash h;
    std::copy(raw.begin(), raw.end(), h.begin());
    return h;
}

}  // namespace tmt
