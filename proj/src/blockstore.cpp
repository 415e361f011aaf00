// SPDX-License-Identifier: Apache-2.0
#include "tmt/blockstore.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>

#include "tmt/shuffleshift.hpp"

namespace tmt::blockstore {

namespace {

void put_be(Bytes& out, std::uint64_t v, unsigned bytes) {
    for (unsigned i = bytes; i-- > 0;) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Cursor {
  public:
    explicit Cursor(ByteView in) : in_(in) {}
    std::uint64_t be(unsigned bytes) {
        if (in_.size() - pos_ < bytes) throw CasError("stored block truncated");
        std::uint64_t v = 0;
        for (unsigned i = 0; i < bytes; ++i) v = (v << 8) | in_[pos_++];
        return v;
    }
    Bytes take(std::size_t len) {
        if (in_.size() - pos_ < len) throw CasError("stored block truncated");
        Bytes out(in_.begin() + static_cast<std::ptrdiff_t>(pos_), in_.begin() + static_cast<std::ptrdiff_t>(pos_ + len));
        pos_ += len;
        return out;
    }
    [[nodiscard]] bool done() const { return pos_ == in_.size(); }

  private:
    ByteView in_;
    std::size_t pos_ = 0;
};

std::vector<Hash> leaf_hashes(const std::vector<Record>& records) {
    std::vector<Hash> out;
    out.reserve(records.size());
    for (const Record& r : records) out.push_back(record_digest(r.value));
    return out;
}

PathResponse respond(const smt::MerkleTree& tree, std::uint32_t local_index) {
    const smt::LeafProof proof = tree.prove(local_index);
    return PathResponse{proof.leaf.hash(), proof.path.adjuncts};
}

}  // namespace

Bytes serialize_record(ByteView value) {
    if (value.size() > 0xFFFFFFFFULL) throw std::invalid_argument("record longer than 2^32 - 1 bytes");
    Bytes out;
    out.reserve(4 + value.size());
    put_be(out, value.size(), 4);
    out.insert(out.end(), value.begin(), value.end());
    return out;
}

Hash record_digest(ByteView value) { return sha256(serialize_record(value)); }

std::uint32_t processed_position(std::uint32_t raw_id, std::uint32_t n, std::uint64_t block_number, unsigned base_t,
                                 unsigned extra_rounds) {
    if (raw_id >= n) throw std::out_of_range("raw id outside [0, n)");
    if (extra_rounds == 0) return raw_id;
    if (n < 2 || (n & (n - 1)) != 0) throw std::invalid_argument("permutation requires n to be a power of two");
    const auto params = shuffleshift::PermParams::from_flags(smt::ceil_log2(n), block_number, base_t, extra_rounds);
    return shuffleshift::permute(raw_id, params);
}

Block build_block(std::uint64_t number, std::vector<Record> records, std::uint32_t n, unsigned base_t) {
    if (n < 1 || n > rot::kMaxUsers) throw std::invalid_argument("n outside [1, 4096]");
    Block block;
    block.number = number;
    block.n = n;
    block.base_t = base_t;
    block.raw_bitmap = BitVector(n);
    for (const Record& r : records) {
        if (r.raw_id >= n) throw std::invalid_argument("record id outside [0, n)");
        if (block.raw_bitmap.get(r.raw_id)) throw std::invalid_argument("duplicate record id");
        block.raw_bitmap.set(r.raw_id);
    }

    rot::RoundsChoice choice = rot::search_extra_rounds(block.raw_bitmap, number, base_t);
    block.processed_bitmap = std::move(choice.processed_bitmap);

    // New ID = number of ones before the record's processed position.
    std::vector<std::pair<std::uint32_t, Record>> keyed;
    keyed.reserve(records.size());
    for (Record& r : records) {
        const std::uint32_t pos = processed_position(r.raw_id, n, number, base_t, choice.extra_rounds);
        keyed.emplace_back(pos, std::move(r));
    }
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [pos, r] : keyed) block.records.push_back(std::move(r));

    block.rot.n = n;
    block.rot.m = block.m();
    block.rot.flags = choice.mode.flags;
    block.rot.payload = std::move(choice.mode.payload);
    if (!block.records.empty()) {
        const std::vector<Hash> leaves = leaf_hashes(block.records);
        block.tree = smt::MerkleTree::build_truncated(leaves);
        block.rot.tree_root = block.tree->root().hash();
    }
    return block;
}

Bytes serialize_block(const Block& block) { return serialize_block(StoredBlock{block.number, block.n, block.records}); }

Bytes serialize_block(const StoredBlock& block) {
    Bytes out;
    put_be(out, block.number, 8);
    put_be(out, block.n, 4);
    put_be(out, block.records.size(), 4);
    for (const Record& r : block.records) {
        put_be(out, r.raw_id, 4);
        const Bytes rec = serialize_record(r.value);
        out.insert(out.end(), rec.begin(), rec.end());
    }
    return out;
}

StoredBlock parse_block(ByteView bytes) {
    Cursor in(bytes);
    StoredBlock b;
    b.number = in.be(8);
    b.n = static_cast<std::uint32_t>(in.be(4));
    const auto m = static_cast<std::uint32_t>(in.be(4));
    if (m > b.n) throw CasError("stored block has m > n");
    b.records.reserve(m);
    for (std::uint32_t j = 0; j < m; ++j) {
        Record r;
        r.raw_id = static_cast<std::uint32_t>(in.be(4));
        r.value = in.take(in.be(4));
        b.records.push_back(std::move(r));
    }
    if (!in.done()) throw CasError("trailing bytes in stored block");
    return b;
}

CasStore::CasStore(std::filesystem::path directory) : dir_(std::move(directory)) {
    std::filesystem::create_directories(*dir_);
    std::ifstream idx(*dir_ / "index");
    std::string line;
    while (std::getline(idx, line)) {
        std::istringstream fields(line);
        std::uint64_t number = 0;
        std::string hex;
        if (!(fields >> number >> hex)) throw CasError("malformed CAS index line: " + line);
        index_[number] = hash_from_hex(hex);
    }
}

Hash CasStore::put(ByteView value) {
    const Hash key = sha256(value);
    std::unique_lock lock(mu_);
    if (dir_) {
        const auto path = *dir_ / to_hex(key);
        if (!std::filesystem::exists(path)) {
            const auto tmp = *dir_ / (to_hex(key) + ".tmp");
            {
                std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
                f.write(reinterpret_cast<const char*>(value.data()), static_cast<std::streamsize>(value.size()));
                if (!f) throw CasError("cannot write " + tmp.string());
            }
            std::filesystem::rename(tmp, path);
        }
    } else {
        blobs_.try_emplace(key, value.begin(), value.end());
    }
    return key;
}

std::optional<Bytes> CasStore::read_blob(const Hash& key) const {
    if (!dir_) {
        const auto it = blobs_.find(key);
        if (it == blobs_.end()) return std::nullopt;
        return it->second;
    }
    std::ifstream f(*dir_ / to_hex(key), std::ios::binary);
    if (!f) return std::nullopt;
    return Bytes(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

std::optional<Bytes> CasStore::get(const Hash& key) const {
    std::shared_lock lock(mu_);
    return read_blob(key);
}

Hash CasStore::publish(const Block& block) {
    const Hash key = put(serialize_block(block));
    std::unique_lock lock(mu_);
    index_[block.number] = key;
    if (dir_) {
        std::ofstream idx(*dir_ / "index", std::ios::app);
        idx << block.number << ' ' << to_hex(key) << '\n';
        if (!idx) throw CasError("cannot append to the CAS index");
    } else if (block.tree) {
        trees_[block.number] = std::make_shared<const smt::MerkleTree>(*block.tree);
    }
    return key;
}

std::optional<Hash> CasStore::block_key(std::uint64_t number) const {
    std::shared_lock lock(mu_);
    const auto it = index_.find(number);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::optional<std::filesystem::path> CasStore::blob_path(const Hash& key) const {
    if (!dir_) return std::nullopt;
    return *dir_ / to_hex(key);
}

std::shared_ptr<const smt::MerkleTree> CasStore::tree_for(std::uint64_t block_number) const {
    std::shared_lock lock(mu_);
    if (const auto it = trees_.find(block_number); it != trees_.end()) return it->second;
    const auto key = index_.find(block_number);
    if (key == index_.end()) throw CasError("unknown block " + std::to_string(block_number));
    const std::optional<Bytes> blob = read_blob(key->second);
    if (!blob) throw CasError("block " + std::to_string(block_number) + " missing from the store");
    const StoredBlock stored = parse_block(*blob);
    if (stored.records.empty()) throw CasError("block " + std::to_string(block_number) + " has no records");
    return std::make_shared<const smt::MerkleTree>(smt::MerkleTree::build_truncated(leaf_hashes(stored.records)));
}

PathResponse CasStore::get_path(std::uint64_t block_number, std::uint32_t local_index) {
    const auto tree = tree_for(block_number);
    const std::uint64_t m = tree->leaf_count();
    // leaf_count() is the padded width; the occupied prefix ends at the first NULL leaf.
    if (local_index >= m || tree->leaf(local_index).is_null())
        throw CasError("local index outside the block's records");
    PathResponse resp = respond(*tree, local_index);
    queries_.fetch_add(1);
    bytes_.fetch_add(kRequestBytes + resp.wire_bytes());
    return resp;
}

LookupResult client_lookup(const rot::RootOfTrust& rot, std::uint64_t block_number, std::uint32_t raw_id,
                           unsigned base_t, PathSource& cas) {
    if (raw_id >= rot.n) throw std::out_of_range("raw id outside [0, n)");
    const BitVector bitmap = rot::logical_bitmap(rot);
    const std::uint32_t pos = processed_position(raw_id, rot.n, block_number, base_t, rot.flags.extra_rounds);

    LookupResult result{Absent{pos}, pos, {}};
    if (!bitmap.get(pos)) return result;

    const auto index = static_cast<std::uint32_t>(bitmap.rank(pos));
    PathResponse resp = cas.get_path(block_number, index);
    result.trace.bytes_sent = kRequestBytes;
    result.trace.bytes_received = resp.wire_bytes();
    result.trace.adjuncts = static_cast<unsigned>(resp.adjuncts.size());

    Present present;
    present.record_digest = resp.leaf;
    present.path = smt::AdjunctPath{index, smt::shape_mask(rot.m, index), std::move(resp.adjuncts)};
    present.verified =
        smt::verify(Digest(rot.tree_root), index, Digest(resp.leaf), present.path, smt::ceil_log2(rot.m));
    result.outcome = std::move(present);
    return result;
}

namespace {

smt::MerkleTree sparse_tree(const Block& block) {
    if (block.n < 1 || (block.n & (block.n - 1)) != 0) throw std::invalid_argument("sparse baseline needs n = 2^k");
    std::vector<std::optional<Hash>> leaves(block.n);
    for (const Record& r : block.records) leaves[r.raw_id] = record_digest(r.value);
    return smt::MerkleTree::build_sparse(leaves);
}

}  // namespace

SparseBaseline::SparseBaseline(const Block& block) : tree_(sparse_tree(block)) {}

LookupTrace SparseBaseline::probe(std::uint32_t raw_id) const {
    const smt::LeafProof proof = tree_.prove(raw_id);
    LookupTrace t;
    t.bytes_sent = kRequestBytes;
    t.adjuncts = proof.path.weight();
    // count byte, explicit mask, leaf (if present) and adjuncts
    t.bytes_received = kResponseHeaderBytes + (tree_.height() + 7) / 8 +
                       kHashBytes * ((proof.leaf.is_null() ? 0 : 1) + proof.path.adjuncts.size());
    return t;
}

}  // namespace tmt::blockstore
