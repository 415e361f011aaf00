// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "tmt/bitvec.hpp"
#include "tmt/digest.hpp"
#include "tmt/rootoftrust.hpp"
#include "tmt/smt.hpp"

namespace tmt::blockstore {

/// The CAS could not answer: unknown block, index out of range, unreadable
/// or malformed stored data.
class CasError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// The CAS was unreachable. Distinct from a failed verification.
class TransportError : public CasError {
  public:
    using CasError::CasError;
};

/// u32 big-endian length followed by the bytes.
[[nodiscard]] Bytes serialize_record(ByteView value);
/// Tree leaf for a record: SHA-256 of its serialization.
[[nodiscard]] Hash record_digest(ByteView value);

struct Record {
    std::uint32_t raw_id = 0;
    Bytes value;
};

struct Block {
    std::uint64_t number = 0;
    std::uint32_t n = 0;
    unsigned base_t = 0;
    std::vector<Record> records;  // new-ID order
    BitVector raw_bitmap;
    BitVector processed_bitmap;
    std::optional<smt::MerkleTree> tree;  // absent for an empty block
    rot::RootOfTrust rot;

    [[nodiscard]] std::uint32_t m() const { return static_cast<std::uint32_t>(records.size()); }
};

/// Builds a block from (raw id, record) pairs in any order. Throws
/// std::invalid_argument on duplicate ids, ids >= n, or n outside [1, 4096].
[[nodiscard]] Block build_block(std::uint64_t number, std::vector<Record> records, std::uint32_t n, unsigned base_t);

/// Position of raw_id in the processed bitmap announced by `flags`.
[[nodiscard]] std::uint32_t processed_position(std::uint32_t raw_id, std::uint32_t n, std::uint64_t block_number,
                                               unsigned base_t, unsigned extra_rounds);

/// Stored form: u64 number, u32 n, u32 m, then per record in new-ID order
/// u32 raw id, u32 length, bytes. All integers big-endian.
[[nodiscard]] Bytes serialize_block(const Block& block);

struct StoredBlock {
    std::uint64_t number = 0;
    std::uint32_t n = 0;
    std::vector<Record> records;
};

[[nodiscard]] Bytes serialize_block(const StoredBlock& block);
/// Throws CasError on malformed input.
[[nodiscard]] StoredBlock parse_block(ByteView bytes);

// Wire sizes of the simulated path query.
inline constexpr std::size_t kRequestBytes = 12;        // u64 block number, u32 local index
inline constexpr std::size_t kResponseHeaderBytes = 1;  // adjunct count

struct PathResponse {
    Hash leaf{};
    std::vector<Hash> adjuncts;

    [[nodiscard]] std::size_t wire_bytes() const { return kResponseHeaderBytes + kHashBytes * (1 + adjuncts.size()); }
};

/// Anything able to answer path queries; the client never trusts it.
class PathSource {
  public:
    virtual ~PathSource() = default;
    /// Leaf digest and adjunct list, no mask. Throws CasError.
    virtual PathResponse get_path(std::uint64_t block_number, std::uint32_t local_index) = 0;
};

/// Content-addressed block store. In-memory by default; with a directory it
/// keeps one file per block named by the hex digest plus an `index` file of
/// "number digest" lines, and re-reads the file on every query.
/// Concurrent readers, exclusive writers.
class CasStore : public PathSource {
  public:
    CasStore() = default;
    explicit CasStore(std::filesystem::path directory);

    /// Stores `value` under its SHA-256 and returns the key.
    Hash put(ByteView value);
    [[nodiscard]] std::optional<Bytes> get(const Hash& key) const;

    /// Stores the block bytes and indexes them by block number.
    Hash publish(const Block& block);
    [[nodiscard]] std::optional<Hash> block_key(std::uint64_t number) const;
    [[nodiscard]] std::optional<std::filesystem::path> blob_path(const Hash& key) const;

    PathResponse get_path(std::uint64_t block_number, std::uint32_t local_index) override;

    /// Total bytes exchanged (requests plus responses) over all path queries.
    [[nodiscard]] std::uint64_t bytes_exchanged() const { return bytes_.load(); }
    [[nodiscard]] std::uint64_t queries() const { return queries_.load(); }

  private:
    std::shared_ptr<const smt::MerkleTree> tree_for(std::uint64_t block_number) const;
    std::optional<Bytes> read_blob(const Hash& key) const;

    std::optional<std::filesystem::path> dir_;
    mutable std::shared_mutex mu_;
    std::map<Hash, Bytes> blobs_;
    std::map<std::uint64_t, Hash> index_;
    std::map<std::uint64_t, std::shared_ptr<const smt::MerkleTree>> trees_;  // in-memory mode only
    std::atomic<std::uint64_t> bytes_{0};
    std::atomic<std::uint64_t> queries_{0};
};

struct LookupTrace {
    std::size_t bytes_sent = 0;
    std::size_t bytes_received = 0;
    unsigned adjuncts = 0;
};

/// Bytes the client exchanged.
[[nodiscard]] inline std::size_t comm_cost(const LookupTrace& t) { return t.bytes_sent + t.bytes_received; }

struct Present {
    Hash record_digest{};
    smt::AdjunctPath path;
    bool verified = false;
};

struct Absent {
    std::uint32_t position = 0;
};

struct LookupResult {
    std::variant<Present, Absent> outcome;
    std::uint32_t position = 0;  // in the processed bitmap
    LookupTrace trace;

    [[nodiscard]] bool present() const { return std::holds_alternative<Present>(outcome); }
    [[nodiscard]] bool verified() const { return present() && std::get<Present>(outcome).verified; }
};

/// Client side of a record query against an authenticated root of trust.
/// Absence is read off the bitmap with no CAS traffic. Throws
/// std::out_of_range for raw_id >= n, rot::FormatError for a root of trust
/// whose bitmap cannot be reconstructed, and lets CasError through.
[[nodiscard]] LookupResult client_lookup(const rot::RootOfTrust& rot, std::uint64_t block_number, std::uint32_t raw_id,
                                         unsigned base_t, PathSource& cas);

/// Baseline for cost comparison: a sparse tree over all n raw ids (n must be
/// a power of two). Every probe, present or absent, costs a path.
class SparseBaseline {
  public:
    explicit SparseBaseline(const Block& block);

    [[nodiscard]] LookupTrace probe(std::uint32_t raw_id) const;
    [[nodiscard]] const smt::MerkleTree& tree() const { return tree_; }

  private:
    smt::MerkleTree tree_;
};

}  // namespace tmt::blockstore
