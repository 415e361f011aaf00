// SPDX-License-Identifier: Apache-2.0
#include "tmt/tunstall.hpp"

#include <cmath>
#include <queue>
#include <random>

namespace tmt::tunstall {

namespace {

void check_probability(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("Tunstall probability must lie in (0, 1)");
}

constexpr int kUnassignedLeaf = -1;

struct OpenLeaf {
    int parent;
    int side;
    long ones;
    long zeros;
    std::uint64_t seq;
};

// True when leaf `x` is strictly more likely than `y`, or equally likely and
// created earlier. Costs are -log2 likelihoods.
bool preferred(const OpenLeaf& x, const OpenLeaf& y, double cost_one, double cost_zero) {
    const auto d_ones = static_cast<double>(x.ones - y.ones);
    const auto d_zeros = static_cast<double>(x.zeros - y.zeros);
    const double diff = d_ones * cost_one + d_zeros * cost_zero;
    const double scale = std::abs(d_ones) * cost_one + std::abs(d_zeros) * cost_zero;
    if (std::abs(diff) > 1e-12 * scale) return diff < 0.0;
    return x.seq < y.seq;
}

}  // namespace

double entropy(double p) {
    check_probability(p);
    return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

Codebook::Codebook(double p, unsigned w) : p_(p), w_(w) {
    check_probability(p);
    if (w != 4 && w != 8) throw std::invalid_argument("codeword width must be 4 or 8");

    const double cost_one = -std::log2(p);
    const double cost_zero = -std::log2(1.0 - p);
    const std::size_t target = std::size_t{1} << w;

    nodes_.push_back(Node{{kUnassignedLeaf, kUnassignedLeaf}});
    const auto lower = [&](const OpenLeaf& a, const OpenLeaf& b) { return preferred(b, a, cost_one, cost_zero); };
    std::priority_queue<OpenLeaf, std::vector<OpenLeaf>, decltype(lower)> open(lower);
    open.push({0, 0, 0, 1, 0});
    open.push({0, 1, 1, 0, 1});
    std::uint64_t seq = 2;

    while (open.size() < target) {
        const OpenLeaf split = open.top();
        open.pop();

        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(Node{{kUnassignedLeaf, kUnassignedLeaf}});
        nodes_[static_cast<std::size_t>(split.parent)].child[split.side] = id;
        open.push({id, 0, split.ones, split.zeros + 1, seq++});
        open.push({id, 1, split.ones + 1, split.zeros, seq++});
    }

    // Prefix-order walk, 0-edge first, numbers the leaves.
    chunks_.reserve(target);
    struct Frame {
        int node;
        int side;
    };
    std::vector<Frame> stack{{0, 0}};
    BitVector path;
    while (!stack.empty()) {
        Frame& top = stack.back();
        if (top.side == 2) {
            stack.pop_back();
            if (!path.empty()) path.resize(path.size() - 1);
            continue;
        }
        const int side = top.side++;
        int& child = nodes_[static_cast<std::size_t>(top.node)].child[side];
        if (child == kUnassignedLeaf) {
            BitVector chunk = path;
            chunk.push_back(side == 1);
            child = -static_cast<int>(chunks_.size()) - 1;
            chunks_.push_back(std::move(chunk));
        } else {
            path.push_back(side == 1);
            stack.push_back({child, 0});
        }
    }
}

double Codebook::cost(Codeword cw) const {
    const BitVector& c = chunk(cw);
    const auto ones = static_cast<double>(c.popcount());
    const auto zeros = static_cast<double>(c.size()) - ones;
    return ones * -std::log2(p_) + zeros * -std::log2(1.0 - p_);
}

Encoded encode(const BitVector& bits, const Codebook& book) {
    Encoded out;
    int node = 0;
    const auto feed = [&](bool bit) {
        const int next = book.step(node, bit);
        if (next < 0) {
            out.codewords.push_back(static_cast<Codeword>(-next - 1));
            node = 0;
        } else {
            node = next;
        }
    };
    for (std::size_t i = 0; i < bits.size(); ++i) feed(bits.get(i));
    while (node != 0) {
        feed(false);
        ++out.pad_bits;
    }
    return out;
}

BitVector decode(std::span<const Codeword> codewords, std::size_t n_bits, const Codebook& book) {
    BitVector out;
    for (const Codeword cw : codewords) {
        if (cw >= book.size()) throw MalformedStream("codeword outside the code table");
        if (out.size() >= n_bits) throw MalformedStream("codeword stream longer than the bitmap");
        out.append(book.chunk(cw));
    }
    if (out.size() < n_bits) throw MalformedStream("codeword stream shorter than the bitmap");
    for (std::size_t i = n_bits; i < out.size(); ++i) {
        if (out.get(i)) throw MalformedStream("non-zero padding after the last bitmap bit");
    }
    out.resize(n_bits);
    return out;
}

CompressionReport report(std::size_t n_bits, std::size_t codewords, unsigned w, double p) {
    CompressionReport r;
    r.n = n_bits;
    r.r = codewords;
    r.w = w;
    r.kappa = n_bits == 0 ? 0.0 : static_cast<double>(codewords) * w / static_cast<double>(n_bits);
    r.h0 = entropy(p);
    r.rho = (r.kappa - r.h0) / r.h0;
    return r;
}

BitVector random_bits(std::size_t n_bits, double p, std::uint64_t seed) {
    check_probability(p);
    std::mt19937_64 rng(seed);
    BitVector bits(n_bits);
    for (std::size_t i = 0; i < n_bits; ++i) {
        if (static_cast<double>(rng() >> 11) * 0x1.0p-53 < p) bits.set(i);
    }
    return bits;
}

CompressionReport measure(double p, unsigned w, std::size_t n_bits, std::uint64_t seed) {
    const Codebook book(p, w);
    const Encoded enc = encode(random_bits(n_bits, p, seed), book);
    return report(n_bits, enc.codewords.size(), w, p);
}

}  // namespace tmt::tunstall
