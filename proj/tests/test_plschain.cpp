#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <random>
#include <string>

#include "tmt/blockstore.hpp"
#include "tmt/plschain.hpp"

using namespace tmt;
using namespace tmt::pls;

namespace {

Bytes text(const std::string& s) { return Bytes(s.begin(), s.end()); }

Bytes rot_bytes(std::uint64_t number, std::uint32_t n, double p, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<blockstore::Record> recs;
    for (std::uint32_t id = 0; id < n; ++id) {
        if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) recs.push_back({id, text(std::to_string(rng()))});
    }
    return rot::encode_rot(blockstore::build_block(number, recs, n, 200).rot);
}

bool contains(ByteView hay, const Hash& needle) {
    return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

}  // namespace

TEST_CASE("AES-256 known answer") {
    Aes256 aes;
    Hash key{};
    for (std::size_t i = 0; i < key.size(); ++i) key[i] = static_cast<std::uint8_t>(i);
    aes.set_key(key);
    BlockCipher::Block pt{};
    const Bytes in = from_hex("00112233445566778899aabbccddeeff");
    std::copy(in.begin(), in.end(), pt.begin());
    const auto ct = aes.encrypt(pt);
    CHECK(to_hex(ByteView{ct}) == "8ea2b7ca516745bfeafc49904b496089");
    CHECK(aes.decrypt(ct) == pt);
}

TEST_CASE("PCBC reference vector and round trip") {
    Aes256 aes;
    Hash key{};
    for (std::size_t i = 0; i < key.size(); ++i) key[i] = static_cast<std::uint8_t>(i);
    Bytes pt(48);
    for (std::size_t i = 0; i < pt.size(); ++i) pt[i] = static_cast<std::uint8_t>(i);
    const Bytes ct = pcbc_encrypt(aes, key, pt);
    CHECK(to_hex(ByteView{ct}) ==
          "5a6e045708fb7196f02e553d02c3a69282877d1bd26cd1815595064df1adbad0"
          "76e50e47526e5c9134aefcdb4ec68bfd");
    CHECK(pcbc_decrypt(aes, key, ct) == pt);
    CHECK(pcbc_encrypt(aes, key, Bytes{}).empty());
    CHECK_THROWS_AS((void)pcbc_encrypt(aes, key, Bytes(15)), std::invalid_argument);
    CHECK_THROWS_AS((void)pcbc_decrypt(aes, key, Bytes(17)), std::invalid_argument);
}

TEST_CASE("interval reference vector") {
    Aes256 aes;
    const Hash n0 = sha256(text("N0"));
    const Hash n1 = sha256(text("N1"));
    Bytes j(40);
    for (std::size_t i = 0; i < j.size(); ++i) j[i] = static_cast<std::uint8_t>(i + 1);
    const PlsInterval iv = gen_interval(0, n0, n1, j, aes);
    CHECK(to_hex(iv.msg.L) == "6ccd176ea2ce734620ee4ae1a4cd0707ff360dfae97e1b5ead185f83e0ddf2a7");
    CHECK(to_hex(ByteView{iv.msg.S}) ==
          "8ba193a71d2d1dfe71765e13820b0d5bda0872d754a5ea6cb6504c2da4f221ac"
          "3689ca4d143f1ccb2bb1740666093b59");
    CHECK(to_hex(iv.msg.P) == "3060dc3bbc268cf207c17cbea6d4003212bc2a4ab2b09b530074c7286723c3e6");
}

TEST_CASE("honest chain verifies and unlocks every J") {
    Aes256 seq_aes, rx_aes;
    Sequencer seq(17, seq_aes);
    Receiver rx(seq.anchor(), rx_aes);
    std::vector<Bytes> js;
    std::vector<PlsInterval> ivs;
    for (unsigned k = 0; k < 30; ++k) {
        js.push_back(rot_bytes(k, k % 3 == 0 ? 64 : 1024, k % 5 == 0 ? 0.0 : 0.1, k));
        ivs.push_back(seq.emit(js.back()));
        const Receiver::Step step = rx.receive(ivs.back().msg);
        CHECK(step.verified);
        if (k > 0) {
            REQUIRE(step.previous.has_value());
            CHECK(step.previous->j == js[k - 1]);
            CHECK(rot::encode_rot(step.previous->rot) == js[k - 1]);
        }
    }
    // No secret shows up in its own or any earlier interval's messages.
    for (std::size_t k = 0; k < ivs.size(); ++k) {
        for (std::size_t i = 0; i <= k; ++i) {
            CHECK_FALSE(contains(ivs[i].msg.L, ivs[k].N));
            CHECK_FALSE(contains(ivs[i].msg.P, ivs[k].N));
            CHECK_FALSE(contains(ivs[i].msg.S, ivs[k].N));
        }
    }
    const std::string dump = format_transcript(ivs);
    CHECK(dump.rfind("interval 0\nL ", 0) == 0);
    CHECK(dump.find(to_hex(ivs[3].msg.P)) != std::string::npos);
}

TEST_CASE("tampering breaks only the affected step") {
    Aes256 aes;
    Sequencer seq(5, aes);
    const Hash anchor = seq.anchor();
    std::vector<PlsInterval> ivs;
    for (unsigned k = 0; k < 6; ++k) ivs.push_back(seq.emit(rot_bytes(k, 256, 0.1, k)));
    CHECK(ivs[0].msg.P == anchor);

    for (unsigned bit = 0; bit < 256; ++bit) {
        Hash l = ivs[2].msg.L;
        l[bit / 8] ^= static_cast<std::uint8_t>(1U << (bit % 8));
        CHECK_FALSE(verify_interval(l, ivs[3].msg.P, ivs[2].msg.P));
    }
    CHECK_FALSE(verify_interval(ivs[0].msg.L, ivs[1].msg.P, sha256(text("wrong anchor"))));

    Aes256 rx_aes;
    Receiver rx(anchor, rx_aes);
    std::vector<Messages> msgs;
    for (const auto& iv : ivs) msgs.push_back(iv.msg);
    msgs[2].L[0] ^= 1;
    std::vector<bool> verified;
    for (const auto& m : msgs) verified.push_back(rx.receive(m).verified);
    CHECK(verified == std::vector<bool>{true, true, true, false, true, true});
}

TEST_CASE("random and replayed S messages are rejected") {
    Aes256 aes;
    Sequencer seq(9, aes);
    std::vector<PlsInterval> ivs;
    for (unsigned k = 0; k < 4; ++k) ivs.push_back(seq.emit(rot_bytes(k, 1024, 0.1, k)));
    CHECK(unlock(ivs[2].msg.P, ivs[1].msg.L, ivs[1].msg.S, aes).has_value());
    CHECK_FALSE(unlock(ivs[2].msg.P, ivs[1].msg.L, ivs[0].msg.S, aes).has_value());
    CHECK_FALSE(unlock(ivs[2].msg.P, ivs[1].msg.L, Bytes{}, aes).has_value());
    CHECK_FALSE(unlock(ivs[2].msg.P, ivs[1].msg.L, Bytes(20, 1), aes).has_value());

    std::mt19937_64 rng(1);
    for (int t = 0; t < 20000; ++t) {
        Bytes s(ivs[1].msg.S.size());
        for (auto& b : s) b = static_cast<std::uint8_t>(rng());
        CHECK_FALSE(unlock(ivs[2].msg.P, ivs[1].msg.L, s, aes).has_value());
    }
}
