// SPDX-License-Identifier: Apache-2.0
#include "tmt/rootoftrust.hpp"

#include <map>
#include <memory>
#include <optional>
#include <tuple>

#include "tmt/shuffleshift.hpp"
#include "tmt/smt.hpp"
#include "tmt/tunstall.hpp"

namespace tmt::rot {

namespace {

// Hostile input builds codebooks for arbitrary (n, m); keep a small cache so
// repeated parses of one deployment's messages don't rebuild them.
const tunstall::Codebook& codebook_for(std::uint32_t n, std::uint32_t m, unsigned w) {
    using Key = std::tuple<std::uint32_t, std::uint32_t, unsigned>;
    thread_local std::map<Key, std::unique_ptr<tunstall::Codebook>> cache;
    const Key key{n, m, w};
    auto it = cache.find(key);
    if (it == cache.end()) {
        if (cache.size() >= 64) cache.clear();
        const double p = static_cast<double>(m) / static_cast<double>(n);
        it = cache.emplace(key, std::make_unique<tunstall::Codebook>(p, w)).first;
    }
    return *it->second;
}

std::size_t expected_payload_bits(BitmapMode mode, std::uint32_t n, std::uint32_t m) {
    switch (mode) {
        case BitmapMode::plain: return n;
        case BitmapMode::list: return std::size_t{m} * list_entry_bits(n);
        case BitmapMode::empty: return 0;
        case BitmapMode::compressed: break;
    }
    return 0;
}

// Header consistency shared by the encoder and the parser. Returns an error
// message or nullptr.
const char* header_problem(const RootOfTrust& rot) {
    if (rot.n < 1 || rot.n > kMaxUsers) return "n outside [1, 4096]";
    if (rot.m > rot.n) return "m exceeds n";
    if (rot.flags.extra_rounds > shuffleshift::kMaxExtraRounds) return "extra rounds exceed 31";
    const bool empty = rot.flags.mode == BitmapMode::empty;
    if (empty != (rot.m == 0)) return "empty mode must coincide with m = 0";
    if (empty && (rot.flags.wide || rot.flags.extra_rounds != 0)) return "empty mode carries no width or rounds";
    if ((rot.flags.mode == BitmapMode::plain || rot.flags.mode == BitmapMode::list) && rot.flags.wide)
        return "width bit set outside compressed mode";
    if (rot.flags.mode == BitmapMode::list && rot.n < 2) return "list mode needs n >= 2";
    if (rot.flags.mode == BitmapMode::compressed && rot.m == rot.n) return "compressed mode needs m < n";
    return nullptr;
}

std::uint32_t checked_domain_log(std::uint32_t n) {
    return static_cast<std::uint32_t>(smt::ceil_log2(n));
}

bool permutable(std::size_t n) {
    return n >= 2 && (n & (n - 1)) == 0 && n <= (std::size_t{1} << shuffleshift::kMaxLogSize);
}

std::optional<ModeChoice> try_choose(const BitVector& bitmap) {
    try {
        return choose_mode(bitmap);
    } catch (const std::invalid_argument&) {
        return std::nullopt;
    }
}

}  // namespace

const char* to_string(BitmapMode mode) {
    switch (mode) {
        case BitmapMode::plain: return "plain";
        case BitmapMode::compressed: return "compressed";
        case BitmapMode::list: return "list";
        case BitmapMode::empty: return "empty";
    }
    return "?";
}

std::uint8_t Flags::pack() const {
    return static_cast<std::uint8_t>(static_cast<unsigned>(mode) | (wide ? 4U : 0U) | ((extra_rounds & 31U) << 3));
}

Flags Flags::unpack(std::uint8_t phi) {
    return Flags{static_cast<BitmapMode>(phi & 3U), ((phi >> 2) & 1U) != 0, static_cast<unsigned>(phi >> 3)};
}

unsigned list_entry_bits(std::uint32_t n) { return checked_domain_log(n); }

BitVector logical_bitmap(const RootOfTrust& rot) {
    if (const char* why = header_problem(rot)) throw FormatError(why);
    BitVector bitmap(rot.n);
    const BitVector& pl = rot.payload;
    switch (rot.flags.mode) {
        case BitmapMode::empty:
            if (!pl.empty()) throw FormatError("empty mode with a payload");
            return bitmap;
        case BitmapMode::plain:
            if (pl.size() != rot.n) throw FormatError("plain payload length differs from n");
            bitmap = pl;
            break;
        case BitmapMode::list: {
            const unsigned b = list_entry_bits(rot.n);
            if (pl.size() != std::size_t{rot.m} * b) throw FormatError("list payload length differs from m ceil(log2 n)");
            std::uint64_t prev = 0;
            for (std::uint32_t j = 0; j < rot.m; ++j) {
                std::uint64_t pos = 0;
                for (unsigned i = 0; i < b; ++i) pos = (pos << 1) | (pl.get(std::size_t{j} * b + i) ? 1U : 0U);
                if (pos >= rot.n) throw FormatError("list entry outside [0, n)");
                if (j > 0 && pos <= prev) throw FormatError("list entries not strictly increasing");
                bitmap.set(pos);
                prev = pos;
            }
            break;
        }
        case BitmapMode::compressed: {
            const unsigned w = rot.flags.width();
            if (pl.empty() || pl.size() % w != 0) throw FormatError("compressed payload not a whole number of codewords");
            std::vector<tunstall::Codeword> cws(pl.size() / w);
            for (std::size_t j = 0; j < cws.size(); ++j) {
                unsigned cw = 0;
                for (unsigned i = 0; i < w; ++i) cw = (cw << 1) | (pl.get(j * w + i) ? 1U : 0U);
                cws[j] = static_cast<tunstall::Codeword>(cw);
            }
            try {
                bitmap = tunstall::decode(cws, rot.n, codebook_for(rot.n, rot.m, w));
            } catch (const tunstall::MalformedStream& e) {
                throw FormatError(e.what());
            }
            break;
        }
    }
    if (bitmap.popcount() != rot.m) throw FormatError("bitmap popcount differs from m");
    return bitmap;
}

Bytes encode_rot(const RootOfTrust& rot) {
    if (rot.payload.size() > kMaxPayloadBits) throw std::invalid_argument("payload exceeds 1024 bits");
    try {
        (void)logical_bitmap(rot);
    } catch (const FormatError& e) {
        throw std::invalid_argument(e.what());
    }
    BitWriter out;
    out.write_bytes(rot.tree_root);
    out.write(rot.n - 1, 12);
    out.write(rot.m == 0 ? 0 : rot.m - 1, 12);
    out.write(rot.flags.pack(), 8);
    out.write_bits(rot.payload);
    out.write(0, kRedundancyBits);
    return out.bytes();
}

PrefixDecode decode_rot_prefix(ByteView bytes) {
    if (bytes.size() * 8 < kOverheadBits) throw FormatError("message shorter than 320 bits");
    BitReader in(bytes);
    RootOfTrust rot;
    for (auto& b : rot.tree_root) b = static_cast<std::uint8_t>(in.read(8));
    rot.n = static_cast<std::uint32_t>(in.read(12)) + 1;
    const auto m_field = static_cast<std::uint32_t>(in.read(12));
    rot.flags = Flags::unpack(static_cast<std::uint8_t>(in.read(8)));
    rot.m = rot.flags.mode == BitmapMode::empty ? 0 : m_field + 1;
    if (rot.flags.mode == BitmapMode::empty && m_field != 0) throw FormatError("empty mode with nonzero m field");
    if (const char* why = header_problem(rot)) throw FormatError(why);

    const auto need = [&](std::size_t bits) {
        if (in.remaining() < bits + kRedundancyBits) throw FormatError("message truncated");
    };
    if (rot.flags.mode == BitmapMode::compressed) {
        // Length is implicit: read codewords until the chunks cover n bits.
        const unsigned w = rot.flags.width();
        const tunstall::Codebook& book = codebook_for(rot.n, rot.m, w);
        std::size_t covered = 0;
        while (covered < rot.n) {
            if (rot.payload.size() + w > kMaxPayloadBits) throw FormatError("payload exceeds 1024 bits");
            need(w);
            const auto cw = static_cast<tunstall::Codeword>(in.read(w));
            for (unsigned i = w; i-- > 0;) rot.payload.push_back(((cw >> i) & 1U) != 0);
            covered += book.chunk(cw).size();
        }
    } else {
        const std::size_t len = expected_payload_bits(rot.flags.mode, rot.n, rot.m);
        if (len > kMaxPayloadBits) throw FormatError("payload exceeds 1024 bits");
        need(len);
        for (std::size_t i = 0; i < len; ++i) rot.payload.push_back(in.read_bit());
    }

    if (in.read(kRedundancyBits) != 0) throw FormatError("nonzero redundancy field");
    while (in.position() % 8 != 0) {
        if (in.read_bit()) throw FormatError("nonzero byte padding");
    }
    (void)logical_bitmap(rot);
    return PrefixDecode{std::move(rot), in.position() / 8};
}

RootOfTrust decode_rot(ByteView bytes) {
    PrefixDecode d = decode_rot_prefix(bytes);
    if (d.bytes_used != bytes.size()) throw FormatError("trailing bytes after the root of trust");
    return std::move(d.rot);
}

BitVector plain_payload(const BitVector& bitmap) { return bitmap; }

BitVector list_payload(const BitVector& bitmap) {
    if (bitmap.size() < 2 || bitmap.size() > kMaxUsers) throw std::invalid_argument("list mode needs 2 <= n <= 4096");
    const unsigned b = list_entry_bits(static_cast<std::uint32_t>(bitmap.size()));
    BitVector out;
    for (const std::uint32_t pos : bitmap.ones()) {
        for (unsigned i = b; i-- > 0;) out.push_back(((pos >> i) & 1U) != 0);
    }
    return out;
}

BitVector compressed_payload(const BitVector& bitmap, unsigned w) {
    const std::size_t m = bitmap.popcount();
    if (m == 0 || m == bitmap.size()) throw std::invalid_argument("compressed mode needs 0 < m < n");
    if (bitmap.size() > kMaxUsers) throw std::invalid_argument("n exceeds 4096");
    const auto& book = codebook_for(static_cast<std::uint32_t>(bitmap.size()), static_cast<std::uint32_t>(m), w);
    const tunstall::Encoded enc = tunstall::encode(bitmap, book);
    BitVector out;
    for (const tunstall::Codeword cw : enc.codewords) {
        for (unsigned i = w; i-- > 0;) out.push_back(((cw >> i) & 1U) != 0);
    }
    return out;
}

ModeChoice choose_mode(const BitVector& bitmap) {
    const std::size_t n = bitmap.size();
    if (n < 1 || n > kMaxUsers) throw std::invalid_argument("bitmap length outside [1, 4096]");
    const std::size_t m = bitmap.popcount();
    if (m == 0) return ModeChoice{Flags{BitmapMode::empty, false, 0}, BitVector{}};

    std::optional<ModeChoice> best;
    const auto offer = [&](Flags flags, BitVector payload) {
        if (payload.size() > kMaxPayloadBits) return;
        if (!best || payload.size() < best->payload.size()) best = ModeChoice{flags, std::move(payload)};
    };
    if (n <= kMaxPayloadBits) offer({BitmapMode::plain, false, 0}, plain_payload(bitmap));
    if (n >= 2 && m * list_entry_bits(static_cast<std::uint32_t>(n)) <= kMaxPayloadBits)
        offer({BitmapMode::list, false, 0}, list_payload(bitmap));
    if (m < n) {
        offer({BitmapMode::compressed, false, 0}, compressed_payload(bitmap, 4));
        offer({BitmapMode::compressed, true, 0}, compressed_payload(bitmap, 8));
    }
    if (!best) throw std::invalid_argument("no bitmap encoding fits in 1024 bits");
    return std::move(*best);
}

RoundsChoice search_extra_rounds(const BitVector& raw_bitmap, std::uint64_t block_number, unsigned base_t) {
    std::optional<RoundsChoice> best;
    const auto consider = [&](unsigned extra, BitVector processed) {
        std::optional<ModeChoice> mode = try_choose(processed);
        if (!mode) return;
        if (best && mode->payload.size() >= best->mode.payload.size()) return;
        mode->flags.extra_rounds = mode->flags.mode == BitmapMode::empty ? 0 : extra;
        best = RoundsChoice{extra, std::move(*mode), std::move(processed)};
    };

    consider(0, raw_bitmap);
    const std::size_t n = raw_bitmap.size();
    if (permutable(n) && raw_bitmap.popcount() > 0) {
        const unsigned d = checked_domain_log(static_cast<std::uint32_t>(n));
        const std::vector<std::uint32_t> ids = raw_bitmap.ones();
        shuffleshift::RoundStepper stepper(d, block_number, ids);
        stepper.advance(base_t);
        for (unsigned extra = 1; extra <= shuffleshift::kMaxExtraRounds; ++extra) {
            stepper.advance(1);
            BitVector processed(n);
            for (const std::uint32_t pos : stepper.positions()) processed.set(pos);
            consider(extra, std::move(processed));
        }
    }
    if (!best) throw std::invalid_argument("no bitmap encoding fits in 1024 bits for any permutation");
    return std::move(*best);
}

}  // namespace tmt::rot
