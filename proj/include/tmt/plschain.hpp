// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tmt/digest.hpp"
#include "tmt/rootoftrust.hpp"

namespace tmt::pls {

/// 128-bit block cipher keyed with a 256-bit secret. Stateful: set_key once,
/// then process blocks.
class BlockCipher {
  public:
    static constexpr std::size_t kBlockBytes = 16;
    using Block = std::array<std::uint8_t, kBlockBytes>;

    virtual ~BlockCipher() = default;
    virtual void set_key(const Hash& key) = 0;
    [[nodiscard]] virtual Block encrypt(const Block& in) = 0;
    [[nodiscard]] virtual Block decrypt(const Block& in) = 0;
};

/// AES-256, keyed directly with the 256-bit secret.
class Aes256 final : public BlockCipher {
  public:
    Aes256();
    ~Aes256() override;
    Aes256(const Aes256&) = delete;
    Aes256& operator=(const Aes256&) = delete;

    void set_key(const Hash& key) override;
    [[nodiscard]] Block encrypt(const Block& in) override;
    [[nodiscard]] Block decrypt(const Block& in) override;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// PCBC with a zero IV: C_i = E(P_i ^ P_{i-1} ^ C_{i-1}). Input length must be
/// a multiple of 16 (std::invalid_argument otherwise).
[[nodiscard]] Bytes pcbc_encrypt(BlockCipher& cipher, const Hash& key, ByteView plaintext);
[[nodiscard]] Bytes pcbc_decrypt(BlockCipher& cipher, const Hash& key, ByteView ciphertext);

/// XOR with `pad` repeated cyclically.
[[nodiscard]] Bytes xor_cyclic(ByteView data, const Hash& pad);

/// What a sequencer transmits in one interval.
struct Messages {
    Hash L{};
    Bytes S;
    Hash P{};

    friend bool operator==(const Messages&, const Messages&) = default;
};

struct PlsInterval {
    std::uint64_t k = 0;
    Hash N{};  // secret; never transmitted in interval k
    Messages msg;
};

/// L = H(N_next) ^ N_k, S = E_{N_k}(pad16(J) ^ H(N_next)), P = H(N_k).
[[nodiscard]] PlsInterval gen_interval(std::uint64_t k, const Hash& n_k, const Hash& n_next, ByteView j_k,
                                       BlockCipher& cipher);

/// H(L_prev ^ P_k) == P_prev.
[[nodiscard]] bool verify_interval(const Hash& l_prev, const Hash& p_k, const Hash& p_prev);

struct Unlocked {
    Bytes j;  // exact root-of-trust bytes, padding stripped
    rot::RootOfTrust rot;
};

/// Decrypts S_prev under L_prev ^ P_k, strips H(N_k) = P_k, and parses the
/// root of trust. Returns nullopt when the plaintext is not a well-formed
/// root of trust followed by zero padding (random or replayed S).
[[nodiscard]] std::optional<Unlocked> unlock(const Hash& p_k, const Hash& l_prev, ByteView s_prev, BlockCipher& cipher);

/// Simulated sequencer with seeded secrets.
class Sequencer {
  public:
    Sequencer(std::uint64_t seed, BlockCipher& cipher);

    /// Anchor P_0 = H(N_0), distributed out of band.
    [[nodiscard]] Hash anchor() const { return sha256(next_); }
    /// Emits interval k carrying J_k, drawing N_{k+1}.
    PlsInterval emit(ByteView j_k);

  private:
    Hash draw();

    std::mt19937_64 rng_;
    BlockCipher& cipher_;
    std::uint64_t k_ = 0;
    Hash next_{};
};

/// Receiver state machine. Each interval is checked against the previous one;
/// it always advances, so a single bad message only fails its own step.
class Receiver {
  public:
    Receiver(const Hash& anchor, BlockCipher& cipher) : anchor_(anchor), cipher_(cipher) {}

    struct Step {
        bool verified = false;
        std::optional<Unlocked> previous;  // J of the previous interval
    };

    Step receive(const Messages& msg);

  private:
    Hash anchor_;
    BlockCipher& cipher_;
    std::optional<Messages> prev_;
};

/// One stanza per interval: "interval k", then L, S, P as hex.
[[nodiscard]] std::string format_transcript(const std::vector<PlsInterval>& intervals);

}  // namespace tmt::pls
