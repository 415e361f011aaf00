// SPDX-License-Identifier: Apache-2.0
#include "tmt/plschain.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace tmt::pls {

struct Aes256::Impl {
    EVP_CIPHER_CTX* enc = nullptr;
    EVP_CIPHER_CTX* dec = nullptr;
    bool keyed = false;
};

Aes256::Aes256() : impl_(std::make_unique<Impl>()) {
    impl_->enc = EVP_CIPHER_CTX_new();
    impl_->dec = EVP_CIPHER_CTX_new();
    if (impl_->enc == nullptr || impl_->dec == nullptr) {
        EVP_CIPHER_CTX_free(impl_->enc);
        EVP_CIPHER_CTX_free(impl_->dec);
        throw std::runtime_error("EVP_CIPHER_CTX_new failed");
    }
}

Aes256::~Aes256() {
    EVP_CIPHER_CTX_free(impl_->enc);
    EVP_CIPHER_CTX_free(impl_->dec);
}

void Aes256::set_key(const Hash& key) {
    if (EVP_EncryptInit_ex(impl_->enc, EVP_aes_256_ecb(), nullptr, key.data(), nullptr) != 1 ||
        EVP_DecryptInit_ex(impl_->dec, EVP_aes_256_ecb(), nullptr, key.data(), nullptr) != 1)
        throw std::runtime_error("AES-256 key setup failed");
    EVP_CIPHER_CTX_set_padding(impl_->enc, 0);
    EVP_CIPHER_CTX_set_padding(impl_->dec, 0);
    impl_->keyed = true;
}

BlockCipher::Block Aes256::encrypt(const Block& in) {
    if (!impl_->keyed) throw std::logic_error("AES-256 used before set_key");
    Block out{};
    int len = 0;
    if (EVP_EncryptUpdate(impl_->enc, out.data(), &len, in.data(), kBlockBytes) != 1 || len != kBlockBytes)
        throw std::runtime_error("AES-256 encryption failed");
    return out;
}

BlockCipher::Block Aes256::decrypt(const Block& in) {
    if (!impl_->keyed) throw std::logic_error("AES-256 used before set_key");
    Block out{};
    int len = 0;
    // ECB without padding: DecryptUpdate may hold back the last block, so
    // feed the block and flush with Final.
    if (EVP_DecryptUpdate(impl_->dec, out.data(), &len, in.data(), kBlockBytes) != 1)
        throw std::runtime_error("AES-256 decryption failed");
    if (len == 0) {
        int fin = 0;
        if (EVP_DecryptFinal_ex(impl_->dec, out.data(), &fin) != 1 || fin != kBlockBytes)
            throw std::runtime_error("AES-256 decryption failed");
    }
    return out;
}

namespace {

using Block = BlockCipher::Block;

void check_length(ByteView data) {
    if (data.size() % BlockCipher::kBlockBytes != 0) throw std::invalid_argument("PCBC input not a multiple of 16 bytes");
}

Block load(ByteView data, std::size_t off) {
    Block b{};
    std::copy_n(data.begin() + static_cast<std::ptrdiff_t>(off), b.size(), b.begin());
    return b;
}

void xor_into(Block& a, const Block& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] ^= b[i];
}

}  // namespace

Bytes pcbc_encrypt(BlockCipher& cipher, const Hash& key, ByteView plaintext) {
    check_length(plaintext);
    cipher.set_key(key);
    Bytes out;
    out.reserve(plaintext.size());
    Block chain{};  // P_{i-1} ^ C_{i-1}, zero IV
    for (std::size_t off = 0; off < plaintext.size(); off += BlockCipher::kBlockBytes) {
        const Block p = load(plaintext, off);
        Block x = p;
        xor_into(x, chain);
        const Block c = cipher.encrypt(x);
        out.insert(out.end(), c.begin(), c.end());
        chain = p;
        xor_into(chain, c);
    }
    return out;
}

Bytes pcbc_decrypt(BlockCipher& cipher, const Hash& key, ByteView ciphertext) {
    check_length(ciphertext);
    cipher.set_key(key);
    Bytes out;
    out.reserve(ciphertext.size());
    Block chain{};
    for (std::size_t off = 0; off < ciphertext.size(); off += BlockCipher::kBlockBytes) {
        const Block c = load(ciphertext, off);
        Block p = cipher.decrypt(c);
        xor_into(p, chain);
        out.insert(out.end(), p.begin(), p.end());
        chain = p;
        xor_into(chain, c);
    }
    return out;
}

Bytes xor_cyclic(ByteView data, const Hash& pad) {
    Bytes out(data.begin(), data.end());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] ^= pad[i % pad.size()];
    return out;
}

PlsInterval gen_interval(std::uint64_t k, const Hash& n_k, const Hash& n_next, ByteView j_k, BlockCipher& cipher) {
    const Hash pad = sha256(n_next);
    Bytes x(j_k.begin(), j_k.end());
    x.resize((x.size() + BlockCipher::kBlockBytes - 1) / BlockCipher::kBlockBytes * BlockCipher::kBlockBytes, 0);
    PlsInterval iv;
    iv.k = k;
    iv.N = n_k;
    iv.msg.L = xor_hash(pad, n_k);
    iv.msg.S = pcbc_encrypt(cipher, n_k, xor_cyclic(x, pad));
    iv.msg.P = sha256(n_k);
    return iv;
}

bool verify_interval(const Hash& l_prev, const Hash& p_k, const Hash& p_prev) {
    return sha256(xor_hash(l_prev, p_k)) == p_prev;
}

std::optional<Unlocked> unlock(const Hash& p_k, const Hash& l_prev, ByteView s_prev, BlockCipher& cipher) {
    if (s_prev.empty() || s_prev.size() % BlockCipher::kBlockBytes != 0) return std::nullopt;
    const Bytes j = xor_cyclic(pcbc_decrypt(cipher, xor_hash(l_prev, p_k), s_prev), p_k);
    try {
        rot::PrefixDecode d = rot::decode_rot_prefix(j);
        if (!std::all_of(j.begin() + static_cast<std::ptrdiff_t>(d.bytes_used), j.end(), [](auto b) { return b == 0; }))
            return std::nullopt;
        if (j.size() - d.bytes_used >= BlockCipher::kBlockBytes) return std::nullopt;
        return Unlocked{Bytes(j.begin(), j.begin() + static_cast<std::ptrdiff_t>(d.bytes_used)), std::move(d.rot)};
    } catch (const rot::FormatError&) {
        return std::nullopt;
    }
}

Sequencer::Sequencer(std::uint64_t seed, BlockCipher& cipher) : rng_(seed), cipher_(cipher) { next_ = draw(); }

Hash Sequencer::draw() {
    Hash h{};
    for (std::size_t i = 0; i < h.size(); i += 8) {
        const std::uint64_t v = rng_();
        for (std::size_t b = 0; b < 8; ++b) h[i + b] = static_cast<std::uint8_t>(v >> (8 * b));
    }
    return h;
}

PlsInterval Sequencer::emit(ByteView j_k) {
    const Hash n_k = next_;
    next_ = draw();
    return gen_interval(k_++, n_k, next_, j_k, cipher_);
}

Receiver::Step Receiver::receive(const Messages& msg) {
    Step step;
    if (!prev_) {
        step.verified = msg.P == anchor_;
    } else {
        step.verified = verify_interval(prev_->L, msg.P, prev_->P);
        if (step.verified) step.previous = unlock(msg.P, prev_->L, prev_->S, cipher_);
    }
    prev_ = msg;
    return step;
}

std::string format_transcript(const std::vector<PlsInterval>& intervals) {
    std::ostringstream out;
    for (const PlsInterval& iv : intervals) {
        out << "interval " << iv.k << '\n'
            << "L " << to_hex(iv.msg.L) << '\n'
            << "S " << to_hex(ByteView{iv.msg.S}) << '\n'
            << "P " << to_hex(iv.msg.P) << "\n\n";
    }
    return out.str();
}

}  // namespace tmt::pls
