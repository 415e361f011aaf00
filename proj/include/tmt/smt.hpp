// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "tmt/digest.hpp"

namespace tmt::smt {

/// Parent label under the NULL extension:
///   (NULL, NULL) -> NULL
///   (x, NULL)    -> H(x || x')
///   (NULL, x)    -> H(x' || x)
///   (x, y)       -> H(x || y)
[[nodiscard]] Digest combine(const Digest& left, const Digest& right);

/// Smallest h with 2^h >= n; ceil_log2(1) == 0. n must be >= 1.
[[nodiscard]] unsigned ceil_log2(std::uint64_t n);

/// Leaf proof. Bit k of `mask` (k = 0 at the leaf level) is set iff the level-k
/// sibling on the path is non-NULL; `adjuncts` lists those siblings leaf-to-root.
struct AdjunctPath {
    std::uint64_t leaf_index = 0;
    std::uint64_t mask = 0;
    std::vector<Hash> adjuncts;

    /// Number of adjunct hashes, i.e. popcount(mask) for a well-formed path.
    [[nodiscard]] unsigned weight() const { return static_cast<unsigned>(adjuncts.size()); }
};

struct LeafProof {
    Digest leaf;
    AdjunctPath path;
};

/// Immutable binary Merkle tree over 2^h leaf labels, any of which may be NULL.
class MerkleTree {
  public:
    /// Baseline sparse tree indexed by raw id. `leaves.size()` must be a power
    /// of two (std::invalid_argument otherwise); absent entries become NULL.
    static MerkleTree build_sparse(std::span<const std::optional<Hash>> leaves);

    /// Dense truncated tree: height ceil(log2 m), leaves 0..m-1 occupied,
    /// the rest NULL. m == 0 throws std::invalid_argument.
    static MerkleTree build_truncated(std::span<const Hash> record_hashes);

    [[nodiscard]] unsigned height() const { return static_cast<unsigned>(levels_.size() - 1); }
    [[nodiscard]] std::uint64_t leaf_count() const { return levels_.front().size(); }
    [[nodiscard]] const Digest& root() const { return levels_.back().front(); }
    [[nodiscard]] const Digest& leaf(std::uint64_t index) const { return levels_.front().at(index); }
    /// Label of node `index` on `level` (level 0 holds the leaves).
    [[nodiscard]] const Digest& node(unsigned level, std::uint64_t index) const { return levels_.at(level).at(index); }

    /// Proves any leaf, including a NULL one. Throws std::out_of_range.
    [[nodiscard]] LeafProof prove(std::uint64_t leaf_index) const;

  private:
    explicit MerkleTree(std::vector<Digest> leaves);

    std::vector<std::vector<Digest>> levels_;
};

/// Folds `leaf` to the root along `path`. Never throws: malformed input
/// (mask wider than h, adjunct count != popcount(mask), index mismatch or out
/// of range) simply fails.
[[nodiscard]] bool verify(const Digest& root, std::uint64_t leaf_index, const Digest& leaf, const AdjunctPath& path,
                          unsigned height) noexcept;

/// Mask of the truncated tree with m leaves, reconstructed from m alone.
/// Throws std::invalid_argument for m == 0, std::out_of_range for an index
/// outside [0, 2^ceil(log2 m)).
[[nodiscard]] std::uint64_t shape_mask(std::uint64_t m, std::uint64_t leaf_index);

}  // namespace tmt::smt
