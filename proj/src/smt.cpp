// SPDX-License-Identifier: Apache-2.0
#include "tmt/smt.hpp"

#include <bit>
#include <stdexcept>

namespace tmt::smt {

Digest combine(const Digest& left, const Digest& right) {
    if (left.is_null() && right.is_null()) return Digest::null();
    if (right.is_null()) {
        const Hash& x = left.hash();
        return Digest{sha256(x, flip(x))};
    }
    if (left.is_null()) {
        const Hash& x = right.hash();
        return Digest{sha256(flip(x), x)};
    }
    return Digest{sha256(left.hash(), right.hash())};
}

unsigned ceil_log2(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("ceil_log2 of zero");
    return n == 1 ? 0U : static_cast<unsigned>(std::bit_width(n - 1));
}

MerkleTree::MerkleTree(std::vector<Digest> leaves) {
    levels_.push_back(std::move(leaves));
    while (levels_.back().size() > 1) {
        const std::vector<Digest>& below = levels_.back();
        std::vector<Digest> above(below.size() / 2);
        for (std::size_t i = 0; i < above.size(); ++i) above[i] = combine(below[2 * i], below[2 * i + 1]);
        levels_.push_back(std::move(above));
    }
}

MerkleTree MerkleTree::build_sparse(std::span<const std::optional<Hash>> leaves) {
    if (leaves.empty() || !std::has_single_bit(leaves.size())) {
        throw std::invalid_argument("sparse tree leaf count must be a power of two");
    }
    std::vector<Digest> labels;
    labels.reserve(leaves.size());
    for (const auto& leaf : leaves) labels.push_back(leaf ? Digest{*leaf} : Digest::null());
    return MerkleTree{std::move(labels)};
}

MerkleTree MerkleTree::build_truncated(std::span<const Hash> record_hashes) {
    if (record_hashes.empty()) throw std::invalid_argument("truncated tree needs at least one record");
    const std::uint64_t width = std::uint64_t{1} << ceil_log2(record_hashes.size());
    std::vector<Digest> labels(width);
    for (std::size_t i = 0; i < record_hashes.size(); ++i) labels[i] = Digest{record_hashes[i]};
    return MerkleTree{std::move(labels)};
}

LeafProof MerkleTree::prove(std::uint64_t leaf_index) const {
    if (leaf_index >= leaf_count()) throw std::out_of_range("leaf index outside tree");
    LeafProof proof{leaf(leaf_index), AdjunctPath{leaf_index, 0, {}}};
    std::uint64_t pos = leaf_index;
    for (unsigned level = 0; level < height(); ++level, pos >>= 1) {
        const Digest& sibling = levels_[level][pos ^ 1];
        if (!sibling.is_null()) {
            proof.path.mask |= std::uint64_t{1} << level;
            proof.path.adjuncts.push_back(sibling.hash());
        }
    }
    return proof;
}

bool verify(const Digest& root, std::uint64_t leaf_index, const Digest& leaf, const AdjunctPath& path,
            unsigned height) noexcept {
    if (height >= 64) return false;
    if (path.leaf_index != leaf_index || (leaf_index >> height) != 0) return false;
    if ((path.mask >> height) != 0) return false;
    if (static_cast<std::size_t>(std::popcount(path.mask)) != path.adjuncts.size()) return false;

    try {
        Digest acc = leaf;
        std::size_t next = 0;
        for (unsigned level = 0; level < height; ++level) {
            const Digest sibling = ((path.mask >> level) & 1U) ? Digest{path.adjuncts[next++]} : Digest::null();
            const bool is_right = (leaf_index >> level) & 1U;
            acc = is_right ? combine(sibling, acc) : combine(acc, sibling);
        }
        return acc == root;
    } catch (...) {
        return false;
    }
}

std::uint64_t shape_mask(std::uint64_t m, std::uint64_t leaf_index) {
    if (m == 0) throw std::invalid_argument("shape_mask needs m >= 1");
    const unsigned h = ceil_log2(m);
    if ((leaf_index >> h) != 0) throw std::out_of_range("leaf index outside truncated tree");
    std::uint64_t mask = 0;
    for (unsigned level = 0; level < h; ++level) {
        // The level-k sibling subtree covers leaves [s << k, (s + 1) << k); it
        // is non-NULL iff its first leaf is occupied.
        const std::uint64_t sibling = (leaf_index >> level) ^ 1U;
        if ((sibling << level) < m) mask |= std::uint64_t{1} << level;
    }
    return mask;
}

}  // namespace tmt::smt
