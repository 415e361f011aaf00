// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "tmt/bitvec.hpp"

namespace tmt::tunstall {

/// Codeword stream does not decode to the announced number of bits.
class MalformedStream : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

using Codeword = std::uint16_t;

/// Zero-order entropy -p log2 p - (1-p) log2 (1-p). Requires 0 < p < 1.
[[nodiscard]] double entropy(double p);

/// Variable-to-fixed Tunstall dictionary for a Bernoulli(p) source.
///
/// Construction repeatedly splits the most likely leaf until 2^w leaves
/// exist. Likelihoods are compared as log-likelihoods derived from each
/// chunk's (length, ones) pair, so equal chunks compare exactly equal; ties
/// go to the leaf created first (0-child before 1-child). Codewords number
/// the leaves in prefix order with the 0-edge visited first, which makes the
/// codeword order the lexicographic order of the chunks.
class Codebook {
  public:
    /// Throws std::invalid_argument unless 0 < p < 1 and w is 4 or 8.
    Codebook(double p, unsigned w);

    [[nodiscard]] double p() const { return p_; }
    [[nodiscard]] unsigned width() const { return w_; }
    [[nodiscard]] std::size_t size() const { return chunks_.size(); }

    [[nodiscard]] const BitVector& chunk(Codeword cw) const { return chunks_.at(cw); }
    /// -log2 of the chunk likelihood.
    [[nodiscard]] double cost(Codeword cw) const;

    /// Node walk used by the encoder: child of `node` along `bit`. Returns a
    /// negative value -(codeword + 1) when the child is a leaf.
    [[nodiscard]] int step(int node, bool bit) const { return nodes_[static_cast<std::size_t>(node)].child[bit ? 1 : 0]; }

  private:
    struct Node {
        int child[2] = {0, 0};
    };

    double p_;
    unsigned w_;
    std::vector<Node> nodes_;  // internal nodes, root at 0
    std::vector<BitVector> chunks_;
};

[[nodiscard]] inline Codebook build_codebook(double p, unsigned w) { return Codebook{p, w}; }

struct Encoded {
    std::vector<Codeword> codewords;
    std::size_t pad_bits = 0;  // zero bits appended to finish the last chunk
};

[[nodiscard]] Encoded encode(const BitVector& bits, const Codebook& book);

/// Concatenates the chunks and truncates to n_bits. The stream must be
/// canonical, as produced by encode(): the last codeword is needed to reach
/// n_bits and every padding bit past n_bits is zero. Throws MalformedStream
/// otherwise, or when a codeword is outside the table.
[[nodiscard]] BitVector decode(std::span<const Codeword> codewords, std::size_t n_bits, const Codebook& book);

struct CompressionReport {
    std::size_t n = 0;    // source bits
    std::size_t r = 0;    // codewords emitted
    unsigned w = 0;
    double kappa = 0.0;   // r w / n
    double h0 = 0.0;      // per-bit entropy
    double rho = 0.0;     // (kappa - h0) / h0
};

[[nodiscard]] CompressionReport report(std::size_t n_bits, std::size_t codewords, unsigned w, double p);

/// Encodes n_bits Bernoulli(p) bits drawn from a seeded generator.
[[nodiscard]] CompressionReport measure(double p, unsigned w, std::size_t n_bits, std::uint64_t seed);

/// Seeded Bernoulli(p) bit string; integer-only generator path so the same
/// seed yields the same bits on every platform.
[[nodiscard]] BitVector random_bits(std::size_t n_bits, double p, std::uint64_t seed);

}  // namespace tmt::tunstall
