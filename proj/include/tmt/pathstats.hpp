// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

namespace tmt::pathstats {

/// Distribution of the adjunct count on a leaf-to-level-k path of a sparse
/// tree whose leaves are occupied independently with probability p.
struct WeightPdf {
    unsigned level = 0;
    double p = 0.0;
    std::vector<double> probs;  // probs[i] = Pr(weight == i), i in [0, level]
};

/// Probability that a subtree rooted at level k (2^k leaves) is entirely NULL:
/// (1 - p)^(2^k). Evaluated in log space. Throws std::invalid_argument unless
/// 0 < p < 1.
[[nodiscard]] double alpha(unsigned k, double p);

/// PDF_1 = {1-p, p}; PDF_{k+1}(i) = alpha_k PDF_k(i) + (1 - alpha_k) PDF_k(i-1).
/// k == 0 yields the point mass at 0.
[[nodiscard]] WeightPdf pdf(unsigned k, double p);

[[nodiscard]] double mean_weight(const WeightPdf& pdf);
[[nodiscard]] double std_weight(const WeightPdf& pdf);
/// Pr(weight > max_weight).
[[nodiscard]] double tail_prob(const WeightPdf& pdf, unsigned max_weight);

/// Empirical weight distribution of the path from leaf 0 over `trials` random
/// occupancy patterns of a 2^k-leaf sparse tree. Only NULL-ness matters for the
/// weight, so the tree is built over occupancy bits rather than hashes.
[[nodiscard]] WeightPdf monte_carlo_pdf(unsigned k, double p, std::uint64_t trials, std::uint64_t seed);

/// Total-variation distance between two weight distributions.
[[nodiscard]] double total_variation(const WeightPdf& a, const WeightPdf& b);

/// Mean popcount(shape_mask) over all 2^h leaf positions of a truncated dense
/// tree holding round(n p) leaves; 0 when that rounds to zero. n must be a
/// power of two.
[[nodiscard]] double truncated_mean_weight(std::uint64_t n, double p);

/// One row of the sparse-vs-truncated comparison: p, mean weight of the
/// sparse tree over n leaves, mean weight of the truncated tree.
struct ComparisonPoint {
    double p;
    double sparse_mean;
    double truncated_mean;
};

[[nodiscard]] std::vector<ComparisonPoint> compare_sparse_truncated(std::uint64_t n, const std::vector<double>& ps);

}  // namespace tmt::pathstats
