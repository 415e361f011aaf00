#include <doctest.h>

#include <stdexcept>

#include <random>
#include <string>

#include "tmt/rootoftrust.hpp"
#include "tmt/tunstall.hpp"

using namespace tmt;
using namespace tmt::rot;

namespace {

Hash tag(const std::string& s) { return sha256(Bytes(s.begin(), s.end())); }

BitVector with_ones(std::size_t n, std::initializer_list<std::uint32_t> ones) {
    BitVector b(n);
    for (const auto i : ones) b.set(i);
    return b;
}

BitVector random_bitmap(std::size_t n, std::size_t m, std::mt19937_64& rng) {
    BitVector b(n);
    while (b.popcount() < m) b.set(rng() % n);
    return b;
}

RootOfTrust make(const BitVector& bitmap, Flags flags, BitVector payload) {
    RootOfTrust r;
    r.tree_root = tag("T");
    r.n = static_cast<std::uint32_t>(bitmap.size());
    r.m = static_cast<std::uint32_t>(bitmap.popcount());
    r.flags = flags;
    r.payload = std::move(payload);
    return r;
}

}  // namespace

TEST_CASE("flags pack") {
    const Flags f{BitmapMode::compressed, true, 19};
    CHECK(f.pack() == (1 | 4 | (19 << 3)));
    CHECK(Flags::unpack(f.pack()) == f);
    CHECK(Flags::unpack(0xFF) == Flags{BitmapMode::empty, true, 31});
}

TEST_CASE("golden messages") {
    SUBCASE("empty") {
        RootOfTrust r;
        r.n = 64;
        const Bytes j = encode_rot(r);
        CHECK(j.size() == 40);
        CHECK(to_hex(ByteView{j}) == "000000000000000000000000000000000000000000000000000000000000000003f0000300000000");
        CHECK(decode_rot(j) == r);
    }
    const BitVector five = with_ones(64, {3, 17, 18, 40, 63});
    SUBCASE("plain") {
        const RootOfTrust r = make(five, {BitmapMode::plain, false, 0}, plain_payload(five));
        const Bytes j = encode_rot(r);
        CHECK(to_hex(ByteView{j}) ==
              "e632b7095b0bf32c260fa4c539e9fd7b852d0de454e9be26f24d0d6f91d069d303f00400100060000080000100000000");
        CHECK(j.size() * 8 == 64 + kOverheadBits);
        CHECK(decode_rot(j) == r);
        CHECK(logical_bitmap(r) == five);
    }
    SUBCASE("list with extra rounds") {
        const RootOfTrust r = make(five, {BitmapMode::list, false, 7}, list_payload(five));
        CHECK(r.payload.size() == 30);
        const Bytes j = encode_rot(r);
        CHECK(to_hex(ByteView{j}) ==
              "e632b7095b0bf32c260fa4c539e9fd7b852d0de454e9be26f24d0d6f91d069d303f0043a0d14a8fc00000000");
        CHECK(decode_rot(j) == r);
    }
    SUBCASE("compressed") {
        const BitVector eight = with_ones(64, {5, 9, 20, 21, 33, 50, 51, 62});
        const BitVector payload = compressed_payload(eight, 4);
        CHECK(payload.size() == 40);  // codewords 10 12 5 15 4 0 14 15 5 0
        const RootOfTrust r = make(eight, {BitmapMode::compressed, false, 0}, payload);
        const Bytes j = encode_rot(r);
        CHECK(to_hex(ByteView{j}) ==
              "e632b7095b0bf32c260fa4c539e9fd7b852d0de454e9be26f24d0d6f91d069d303f00701ac5f40ef5000000000");
        CHECK(decode_rot(j) == r);
        CHECK(logical_bitmap(r) == eight);
    }
}

TEST_CASE("randomized round trip") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 400; ++trial) {
        const std::uint32_t n = 1 + static_cast<std::uint32_t>(rng() % 1024);
        const std::size_t m = rng() % (n + 1);
        const BitVector bitmap = random_bitmap(n, m, rng);
        ModeChoice choice;
        try {
            choice = choose_mode(bitmap);
        } catch (const std::invalid_argument&) {
            continue;  // dense and large: nothing fits
        }
        choice.flags.extra_rounds = choice.flags.mode == BitmapMode::empty ? 0 : static_cast<unsigned>(rng() % 32);
        RootOfTrust r = make(bitmap, choice.flags, choice.payload);
        if (m == 0) r.tree_root = Hash{};
        const Bytes j = encode_rot(r);
        CHECK(j.size() == (r.payload.size() + kOverheadBits + 7) / 8);
        const RootOfTrust back = decode_rot(j);
        CHECK(back == r);
        CHECK(logical_bitmap(back) == bitmap);
    }
}

TEST_CASE("hostile input is rejected") {
    std::mt19937_64 rng(5);
    const BitVector bitmap = random_bitmap(1024, 102, rng);
    const ModeChoice c = choose_mode(bitmap);
    const RootOfTrust r = make(bitmap, c.flags, c.payload);
    const Bytes good = encode_rot(r);
    const std::size_t total_bits = r.payload.size() + kOverheadBits;

    SUBCASE("any redundancy bit set") {
        for (std::size_t bit = total_bits - 32; bit < total_bits; ++bit) {
            Bytes bad = good;
            bad[bit / 8] ^= static_cast<std::uint8_t>(0x80U >> (bit % 8));
            CHECK_THROWS_AS((void)decode_rot(bad), FormatError);
        }
    }
    SUBCASE("truncated or extended") {
        CHECK_THROWS_AS((void)decode_rot(Bytes(good.begin(), good.end() - 1)), FormatError);
        Bytes longer = good;
        longer.push_back(0);
        CHECK_THROWS_AS((void)decode_rot(longer), FormatError);
        CHECK(decode_rot_prefix(longer).bytes_used == good.size());
        CHECK_THROWS_AS((void)decode_rot(Bytes(10, 0)), FormatError);
    }
    SUBCASE("m field inconsistent with the payload") {
        Bytes bad = good;
        // m - 1 occupies bits 268..279; bump its low bit.
        bad[279 / 8] ^= static_cast<std::uint8_t>(0x80U >> (279 % 8));
        CHECK_THROWS_AS((void)decode_rot(bad), FormatError);
    }
    SUBCASE("empty mode with nonzero m") {
        RootOfTrust e;
        e.n = 64;
        Bytes bad = encode_rot(e);
        bad[34] |= 0x01;
        CHECK_THROWS_AS((void)decode_rot(bad), FormatError);
    }
    SUBCASE("plain payload popcount differs from m") {
        RootOfTrust p = make(with_ones(64, {1, 2}), {BitmapMode::plain, false, 0}, plain_payload(with_ones(64, {1, 2})));
        Bytes bad = encode_rot(p);
        bad[36] ^= 0x01;  // a payload bit
        CHECK_THROWS_AS((void)decode_rot(bad), FormatError);
    }
    SUBCASE("list out of order") {
        RootOfTrust l = make(with_ones(64, {1, 2}), {BitmapMode::list, false, 0}, BitVector::from_string("000010000001"));
        CHECK_THROWS_AS((void)logical_bitmap(l), FormatError);
    }
}

TEST_CASE("encoder preconditions") {
    RootOfTrust r;
    r.n = 5000;
    CHECK_THROWS_AS((void)encode_rot(r), std::invalid_argument);
    r.n = 10;
    r.m = 11;
    r.flags.mode = BitmapMode::plain;
    CHECK_THROWS_AS((void)encode_rot(r), std::invalid_argument);
    const BitVector wide = with_ones(2048, {1});
    CHECK_THROWS_AS((void)encode_rot(make(wide, {BitmapMode::plain, false, 0}, plain_payload(wide))), std::invalid_argument);
    const BitVector two = with_ones(64, {1, 2});
    CHECK_THROWS_AS((void)encode_rot(make(two, {BitmapMode::empty, false, 0}, {})), std::invalid_argument);
    CHECK_THROWS_AS((void)encode_rot(make(two, {BitmapMode::plain, false, 0}, BitVector(63))), std::invalid_argument);
}

TEST_CASE("choose_mode") {
    CHECK(choose_mode(BitVector(1024)).flags.mode == BitmapMode::empty);
    CHECK(choose_mode(BitVector(1024)).payload.empty());

    std::mt19937_64 rng(11);
    const BitVector sparse = random_bitmap(1024, 102, rng);
    const ModeChoice c = choose_mode(sparse);
    CHECK(c.flags.mode == BitmapMode::compressed);
    CHECK(c.payload.size() >= 482);
    CHECK(c.payload.size() <= 560);
    CHECK(c.payload.size() <= compressed_payload(sparse, 4).size());
    CHECK(c.payload.size() <= compressed_payload(sparse, 8).size());

    // Every candidate is measured; the winner is the shortest.
    for (const std::size_t m : {1, 5, 30, 102, 500, 1020, 1023}) {
        const BitVector b = random_bitmap(1024, m, rng);
        const ModeChoice best = choose_mode(b);
        std::size_t shortest = 1024;
        if (m * 10 < shortest) shortest = m * 10;
        shortest = std::min(shortest, compressed_payload(b, 4).size());
        shortest = std::min(shortest, compressed_payload(b, 8).size());
        CHECK(best.payload.size() == shortest);
    }

    const BitVector full(1024, true);
    CHECK(choose_mode(full).flags.mode == BitmapMode::plain);
    CHECK(choose_mode(with_ones(1, {0})).flags.mode == BitmapMode::plain);
    CHECK_THROWS_AS((void)choose_mode(BitVector(4096, true)), std::invalid_argument);
}

TEST_CASE("search_extra_rounds") {
    std::mt19937_64 rng(3);
    SUBCASE("random bitmap: choice is minimal over the sweep") {
        const BitVector raw = random_bitmap(1024, 102, rng);
        const RoundsChoice rc = search_extra_rounds(raw, 77, 200);
        CHECK(rc.processed_bitmap.popcount() == 102);
        CHECK(rc.mode.flags.extra_rounds == rc.extra_rounds);
        CHECK(rc.mode.payload.size() <= choose_mode(raw).payload.size());
        CHECK(choose_mode(rc.processed_bitmap).payload == rc.mode.payload);
    }
    SUBCASE("clustered bitmap benefits from permutation") {
        BitVector raw(1024);
        for (std::uint32_t i = 0; i < 102; ++i) raw.set(i);
        const RoundsChoice rc = search_extra_rounds(raw, 5, 200);
        CHECK(rc.extra_rounds != 0);
        CHECK(rc.mode.payload.size() < compressed_payload(raw, 4).size());
        CHECK(rc.mode.payload.size() < compressed_payload(raw, 8).size());
    }
    SUBCASE("all ones") {
        const RoundsChoice rc = search_extra_rounds(BitVector(1024, true), 5, 200);
        CHECK(rc.extra_rounds == 0);
        CHECK(rc.mode.flags.mode == BitmapMode::plain);
    }
    SUBCASE("empty") {
        const RoundsChoice rc = search_extra_rounds(BitVector(1024), 5, 200);
        CHECK(rc.mode.flags.mode == BitmapMode::empty);
        CHECK(rc.extra_rounds == 0);
    }
    SUBCASE("non power of two is never permuted") {
        const BitVector raw = random_bitmap(1000, 100, rng);
        CHECK(search_extra_rounds(raw, 5, 200).extra_rounds == 0);
    }
}
