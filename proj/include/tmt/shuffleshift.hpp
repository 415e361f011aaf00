// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace tmt::shuffleshift {

/// LCG multiplier; 0x5EED = 5 (mod 8) satisfies Hull-Dobell for any n = 2^d.
inline constexpr std::uint64_t kMultiplier = 0x5EED;
inline constexpr unsigned kDefaultRounds = 200;
inline constexpr unsigned kMaxExtraRounds = 31;
inline constexpr unsigned kMinLogSize = 1;
inline constexpr unsigned kMaxLogSize = 16;

/// d-bit left rotation: the top bit moves to position 0. Throws
/// std::out_of_range when i >= 2^d.
[[nodiscard]] std::uint32_t sigma(std::uint32_t i, unsigned d);
[[nodiscard]] std::uint32_t sigma_inverse(std::uint32_t i, unsigned d);

/// (i + v) mod n, n a power of two.
[[nodiscard]] std::uint32_t tau(std::uint32_t i, std::uint32_t v, std::uint32_t n);

/// (0x5EED v + 1) mod n, n a power of two.
[[nodiscard]] std::uint32_t lcg_next(std::uint32_t v, std::uint32_t n);

struct PermParams {
    unsigned d = 10;
    std::uint64_t block_number = 0;
    unsigned base_rounds = kDefaultRounds;
    unsigned extra_rounds = 0;
    /// False selects the identity (the "no permutation" sentinel).
    bool enabled = true;

    /// Parameters as announced in a root of trust: extra == 0 disables the
    /// permutation, otherwise base + extra rounds are applied.
    static PermParams from_flags(unsigned d, std::uint64_t block_number, unsigned base_rounds, unsigned extra);

    [[nodiscard]] std::uint32_t n() const { return std::uint32_t{1} << d; }
    [[nodiscard]] unsigned rounds() const { return base_rounds + extra_rounds; }
};

/// Applies rounds() shuffle-shift rounds Q_v = sigma o tau_v, with v_0 =
/// block_number mod n and v_{j+1} = lcg_next(v_j). Bijective on [0, 2^d).
/// Throws std::out_of_range for id >= 2^d, std::invalid_argument for d
/// outside [1, 16].
[[nodiscard]] std::uint32_t permute(std::uint32_t id, const PermParams& params);

/// Exact inverse of permute().
[[nodiscard]] std::uint32_t invert(std::uint32_t position, const PermParams& params);

/// Round-by-round application to many ids. Advancing one round at a time lets
/// a caller evaluate base + 1, base + 2, ... rounds without recomputing the
/// common prefix.
class RoundStepper {
  public:
    RoundStepper(unsigned d, std::uint64_t block_number, std::span<const std::uint32_t> ids);

    void advance(unsigned rounds);
    [[nodiscard]] unsigned rounds_applied() const { return applied_; }
    [[nodiscard]] const std::vector<std::uint32_t>& positions() const { return positions_; }

  private:
    unsigned d_;
    std::uint32_t v_;
    unsigned applied_ = 0;
    std::vector<std::uint32_t> positions_;
};

/// Bit-flip frequency matrix K[k][l] = <bit l of Q(x) xor Q(x ^ 2^k)> over all
/// x in [0, 2^d) and the sampled block numbers.
struct AvalancheReport {
    unsigned d = 0;
    unsigned t = 0;
    unsigned samples = 0;
    std::vector<std::vector<double>> K;
    double delta = 0.0;  // max_{k,l} (K[k][l] - 1/2)
};

/// Samples `block_samples` block numbers uniformly from [0, 10000] with the
/// given seed.
[[nodiscard]] AvalancheReport avalanche(unsigned d, unsigned t, unsigned block_samples, std::uint64_t seed = 1);

}  // namespace tmt::shuffleshift
