// SPDX-License-Identifier: Apache-2.0
#include "tmt/pathstats.hpp"

#include <bit>
#include <cmath>
#include <random>
#include <stdexcept>

#include "tmt/smt.hpp"

namespace tmt::pathstats {

namespace {

void check_probability(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("occupancy probability must lie in (0, 1)");
}

}  // namespace

double alpha(unsigned k, double p) {
    check_probability(p);
    return std::exp(std::ldexp(1.0, static_cast<int>(k)) * std::log1p(-p));
}

WeightPdf pdf(unsigned k, double p) {
    check_probability(p);
    WeightPdf out{k, p, {1.0}};
    for (unsigned level = 0; level < k; ++level) {
        const double a = alpha(level, p);
        std::vector<double> next(out.probs.size() + 1, 0.0);
        for (std::size_t i = 0; i < out.probs.size(); ++i) {
            next[i] += a * out.probs[i];
            next[i + 1] += (1.0 - a) * out.probs[i];
        }
        out.probs = std::move(next);
    }
    return out;
}

double mean_weight(const WeightPdf& pdf) {
    double m = 0.0;
    for (std::size_t i = 0; i < pdf.probs.size(); ++i) m += static_cast<double>(i) * pdf.probs[i];
    return m;
}

double std_weight(const WeightPdf& pdf) {
    const double m = mean_weight(pdf);
    double var = 0.0;
    for (std::size_t i = 0; i < pdf.probs.size(); ++i) {
        const double d = static_cast<double>(i) - m;
        var += d * d * pdf.probs[i];
    }
    return std::sqrt(var);
}

double tail_prob(const WeightPdf& pdf, unsigned max_weight) {
    double t = 0.0;
    for (std::size_t i = max_weight + 1; i < pdf.probs.size(); ++i) t += pdf.probs[i];
    return t;
}

WeightPdf monte_carlo_pdf(unsigned k, double p, std::uint64_t trials, std::uint64_t seed) {
    check_probability(p);
    if (trials == 0) throw std::invalid_argument("monte_carlo_pdf needs at least one trial");
    if (k > 24) throw std::invalid_argument("monte_carlo_pdf supports k <= 24");

    std::mt19937_64 rng(seed);
    // 53-bit uniform draw; integer-only engine output keeps runs reproducible
    // across standard libraries.
    const auto uniform = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

    const std::size_t leaves = std::size_t{1} << k;
    std::vector<std::uint8_t> occupied(2 * leaves);  // heap layout, root at 1
    std::vector<std::uint64_t> counts(k + 1, 0);
    for (std::uint64_t t = 0; t < trials; ++t) {
        for (std::size_t i = 0; i < leaves; ++i) occupied[leaves + i] = uniform() < p ? 1 : 0;
        for (std::size_t i = leaves - 1; i >= 1; --i) occupied[i] = occupied[2 * i] | occupied[2 * i + 1];
        unsigned weight = 0;
        for (std::size_t node = leaves; node > 1; node >>= 1) weight += occupied[node ^ 1];
        ++counts[weight];
    }
    WeightPdf out{k, p, std::vector<double>(k + 1)};
    for (unsigned i = 0; i <= k; ++i) out.probs[i] = static_cast<double>(counts[i]) / static_cast<double>(trials);
    return out;
}

double total_variation(const WeightPdf& a, const WeightPdf& b) {
    const std::size_t n = std::max(a.probs.size(), b.probs.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = i < a.probs.size() ? a.probs[i] : 0.0;
        const double y = i < b.probs.size() ? b.probs[i] : 0.0;
        sum += std::abs(x - y);
    }
    return 0.5 * sum;
}

double truncated_mean_weight(std::uint64_t n, double p) {
    check_probability(p);
    if (n == 0 || !std::has_single_bit(n)) throw std::invalid_argument("n must be a power of two");
    const auto m = static_cast<std::uint64_t>(std::llround(static_cast<double>(n) * p));
    if (m == 0) return 0.0;
    const std::uint64_t width = std::uint64_t{1} << smt::ceil_log2(m);
    std::uint64_t total = 0;
    for (std::uint64_t i = 0; i < width; ++i) total += static_cast<std::uint64_t>(std::popcount(smt::shape_mask(m, i)));
    return static_cast<double>(total) / static_cast<double>(width);
}

std::vector<ComparisonPoint> compare_sparse_truncated(std::uint64_t n, const std::vector<double>& ps) {
    if (n == 0 || !std::has_single_bit(n)) throw std::invalid_argument("n must be a power of two");
    const unsigned h = smt::ceil_log2(n);
    std::vector<ComparisonPoint> rows;
    rows.reserve(ps.size());
    for (const double p : ps) rows.push_back({p, mean_weight(pdf(h, p)), truncated_mean_weight(n, p)});
    return rows;
}

}  // namespace tmt::pathstats
