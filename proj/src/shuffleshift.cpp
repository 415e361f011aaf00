// SPDX-License-Identifier: Apache-2.0
#include "tmt/shuffleshift.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

namespace tmt::shuffleshift {

namespace {

void check_log_size(unsigned d) {
    if (d < kMinLogSize || d > kMaxLogSize) throw std::invalid_argument("domain log-size must lie in [1, 16]");
}

std::uint32_t rotl(std::uint32_t i, unsigned d, std::uint32_t mask) { return ((i << 1) | (i >> (d - 1))) & mask; }

std::uint32_t rotr(std::uint32_t i, unsigned d, std::uint32_t mask) { return ((i >> 1) | (i << (d - 1))) & mask; }

}  // namespace

std::uint32_t sigma(std::uint32_t i, unsigned d) {
    check_log_size(d);
    if ((i >> d) != 0) throw std::out_of_range("sigma argument outside [0, 2^d)");
    return rotl(i, d, (std::uint32_t{1} << d) - 1);
}

std::uint32_t sigma_inverse(std::uint32_t i, unsigned d) {
    check_log_size(d);
    if ((i >> d) != 0) throw std::out_of_range("sigma argument outside [0, 2^d)");
    return rotr(i, d, (std::uint32_t{1} << d) - 1);
}

std::uint32_t tau(std::uint32_t i, std::uint32_t v, std::uint32_t n) { return (i + v) & (n - 1); }

std::uint32_t lcg_next(std::uint32_t v, std::uint32_t n) {
    return static_cast<std::uint32_t>((kMultiplier * v + 1) & (n - 1));
}

PermParams PermParams::from_flags(unsigned d, std::uint64_t block_number, unsigned base_rounds, unsigned extra) {
    if (extra > kMaxExtraRounds) throw std::invalid_argument("extra rounds must lie in [0, 31]");
    return PermParams{d, block_number, base_rounds, extra, extra != 0};
}

std::uint32_t permute(std::uint32_t id, const PermParams& params) {
    check_log_size(params.d);
    const std::uint32_t n = params.n();
    if (id >= n) throw std::out_of_range("id outside permutation domain");
    if (!params.enabled) return id;
    const std::uint32_t mask = n - 1;
    auto v = static_cast<std::uint32_t>(params.block_number & mask);
    std::uint32_t x = id;
    for (unsigned r = 0; r < params.rounds(); ++r) {
        x = rotl((x + v) & mask, params.d, mask);
        v = lcg_next(v, n);
    }
    return x;
}

std::uint32_t invert(std::uint32_t position, const PermParams& params) {
    check_log_size(params.d);
    const std::uint32_t n = params.n();
    if (position >= n) throw std::out_of_range("position outside permutation domain");
    if (!params.enabled) return position;
    const std::uint32_t mask = n - 1;
    std::vector<std::uint32_t> vs(params.rounds());
    auto v = static_cast<std::uint32_t>(params.block_number & mask);
    for (auto& slot : vs) {
        slot = v;
        v = lcg_next(v, n);
    }
    std::uint32_t x = position;
    for (auto it = vs.rbegin(); it != vs.rend(); ++it) x = (rotr(x, params.d, mask) + (n - *it)) & mask;
    return x;
}

RoundStepper::RoundStepper(unsigned d, std::uint64_t block_number, std::span<const std::uint32_t> ids)
    : d_(d), positions_(ids.begin(), ids.end()) {
    check_log_size(d);
    const std::uint32_t n = std::uint32_t{1} << d;
    v_ = static_cast<std::uint32_t>(block_number & (n - 1));
    for (const std::uint32_t id : positions_) {
        if (id >= n) throw std::out_of_range("id outside permutation domain");
    }
}

void RoundStepper::advance(unsigned rounds) {
    const std::uint32_t n = std::uint32_t{1} << d_;
    const std::uint32_t mask = n - 1;
    for (unsigned r = 0; r < rounds; ++r) {
        for (auto& x : positions_) x = rotl((x + v_) & mask, d_, mask);
        v_ = lcg_next(v_, n);
    }
    applied_ += rounds;
}

AvalancheReport avalanche(unsigned d, unsigned t, unsigned block_samples, std::uint64_t seed) {
    check_log_size(d);
    if (block_samples == 0) throw std::invalid_argument("avalanche needs at least one block sample");
    const std::uint32_t n = std::uint32_t{1} << d;

    std::vector<std::uint32_t> domain(n);
    for (std::uint32_t x = 0; x < n; ++x) domain[x] = x;

    std::mt19937_64 rng(seed);
    std::vector<std::vector<std::uint64_t>> flips(d, std::vector<std::uint64_t>(d, 0));
    for (unsigned s = 0; s < block_samples; ++s) {
        const std::uint64_t block = rng() % 10001;
        // Q is a permutation, so Q(x ^ 2^k) is a lookup into the full image.
        RoundStepper stepper(d, block, domain);
        stepper.advance(t);
        const std::vector<std::uint32_t>& image = stepper.positions();
        for (unsigned k = 0; k < d; ++k) {
            for (std::uint32_t x = 0; x < n; ++x) {
                const std::uint32_t diff = image[x] ^ image[x ^ (std::uint32_t{1} << k)];
                for (unsigned l = 0; l < d; ++l) flips[k][l] += (diff >> l) & 1U;
            }
        }
    }

    AvalancheReport rep{d, t, block_samples, std::vector<std::vector<double>>(d, std::vector<double>(d)), -0.5};
    const double denom = static_cast<double>(n) * block_samples;
    for (unsigned k = 0; k < d; ++k) {
        for (unsigned l = 0; l < d; ++l) {
            rep.K[k][l] = static_cast<double>(flips[k][l]) / denom;
            rep.delta = std::max(rep.delta, rep.K[k][l] - 0.5);
        }
    }
    return rep;
}

}  // namespace tmt::shuffleshift
