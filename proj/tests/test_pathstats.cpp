#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <optional>

#include "tmt/pathstats.hpp"
#include "tmt/smt.hpp"

using namespace tmt;
using namespace tmt::pathstats;

namespace {

// Brute force over every occupancy pattern of a 2^k-leaf sparse tree; the
// weight is read off the real tree's proof for leaf 0.
std::vector<double> enumerate(unsigned k, double p) {
    const unsigned n = 1U << k;
    std::vector<double> out(k + 1, 0.0);
    const Hash filler = sha256(Bytes{1, 2, 3});
    for (std::uint64_t occ = 0; occ < (std::uint64_t{1} << n); ++occ) {
        std::vector<std::optional<Hash>> leaves(n);
        double pr = 1.0;
        for (unsigned i = 0; i < n; ++i) {
            const bool set = (occ >> i) & 1U;
            if (set) leaves[i] = filler;
            pr *= set ? p : 1.0 - p;
        }
        const auto t = smt::MerkleTree::build_sparse(leaves);
        out[t.prove(0).path.weight()] += pr;
    }
    return out;
}

// Sibling subtrees at distinct levels are disjoint, so the weight is a sum of
// independent Bernoulli(1 - (1-p)^(2^l)) variables.
std::vector<double> poisson_binomial(unsigned k, double p) {
    std::vector<double> out{1.0};
    for (unsigned l = 0; l < k; ++l) {
        const double q = 1.0 - std::pow(1.0 - p, std::ldexp(1.0, static_cast<int>(l)));
        std::vector<double> next(out.size() + 1, 0.0);
        for (std::size_t i = 0; i < out.size(); ++i) {
            next[i] += out[i] * (1.0 - q);
            next[i + 1] += out[i] * q;
        }
        out = next;
    }
    return out;
}

}  // namespace

TEST_CASE("alpha") {
    CHECK(alpha(0, 0.1) == doctest::Approx(0.9).epsilon(1e-15));
    CHECK(alpha(3, 0.1) == doctest::Approx(std::pow(0.9, 8)).epsilon(1e-13));
    CHECK(alpha(40, 0.1) == 0.0);
    CHECK_THROWS_AS((void)alpha(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)alpha(1, 1.0), std::invalid_argument);
}

TEST_CASE("pdf small levels against frozen enumeration") {
    const auto k1 = pdf(1, 0.1).probs;
    CHECK(k1.size() == 2);
    CHECK(k1[0] == doctest::Approx(0.9));
    CHECK(k1[1] == doctest::Approx(0.1));

    const std::vector<double> k2{0.729, 0.252, 0.019};
    const std::vector<double> k3{0.4782969, 0.4160403, 0.0991287, 0.0065341};
    const std::vector<double> k3_half{0.0078125, 0.1484375, 0.4921875, 0.3515625};
    for (std::size_t i = 0; i < k2.size(); ++i) CHECK(pdf(2, 0.1).probs[i] == doctest::Approx(k2[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < k3.size(); ++i) CHECK(pdf(3, 0.1).probs[i] == doctest::Approx(k3[i]).epsilon(1e-12));
    for (std::size_t i = 0; i < 4; ++i) CHECK(pdf(3, 0.5).probs[i] == doctest::Approx(k3_half[i]).epsilon(1e-12));

    const auto k0 = pdf(0, 0.3).probs;
    CHECK(k0 == std::vector<double>{1.0});
}

TEST_CASE("pdf equals exhaustive enumeration of real trees for k <= 4") {
    for (const double p : {0.05, 0.1, 0.15, 0.5}) {
        for (unsigned k = 1; k <= 4; ++k) {
            const auto ref = enumerate(k, p);
            const auto got = pdf(k, p).probs;
            REQUIRE(got.size() == ref.size());
            for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-12);
        }
    }
}

TEST_CASE("pdf equals the independent-level convolution up to k = 30") {
    for (const double p : {0.01, 0.1, 0.3}) {
        for (unsigned k = 1; k <= 30; ++k) {
            const auto ref = poisson_binomial(k, p);
            const auto got = pdf(k, p).probs;
            for (std::size_t i = 0; i < ref.size(); ++i) CHECK(std::abs(got[i] - ref[i]) < 1e-12);
        }
    }
}

TEST_CASE("distribution properties") {
    double prev_mean = -1.0;
    for (unsigned k = 1; k <= 20; ++k) {
        const WeightPdf f = pdf(k, 0.1);
        double sum = 0.0;
        for (const double v : f.probs) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        const double mean = mean_weight(f);
        CHECK(mean > prev_mean);
        CHECK(mean <= k);
        CHECK(std_weight(f) >= 0.0);
        prev_mean = mean;
    }
    // k = 10, p = 0.1: sum_l (1 - 0.9^(2^l)).
    CHECK(mean_weight(pdf(10, 0.1)) == doctest::Approx(6.982613524).epsilon(1e-9));
    const WeightPdf f = pdf(10, 0.1);
    CHECK(tail_prob(f, 10) == 0.0);
    CHECK(tail_prob(f, 8) == doctest::Approx(f.probs[9] + f.probs[10]));
}

TEST_CASE("monte carlo agrees with the recurrence") {
    for (const double p : {0.05, 0.1, 0.15}) {
        for (unsigned k = 1; k <= 8; ++k) {
            const WeightPdf mc = monte_carlo_pdf(k, p, 20000, 11);
            CHECK(total_variation(mc, pdf(k, p)) < 0.02);
        }
    }
    CHECK(monte_carlo_pdf(6, 0.1, 1000, 3).probs == monte_carlo_pdf(6, 0.1, 1000, 3).probs);
    CHECK_THROWS_AS((void)monte_carlo_pdf(25, 0.1, 10, 1), std::invalid_argument);
}

TEST_CASE("truncated tree mean weight") {
    CHECK(truncated_mean_weight(1024, 0.05) == doctest::Approx(5.296875));
    CHECK(truncated_mean_weight(1024, 0.1) == doctest::Approx(6.09375));
    CHECK(truncated_mean_weight(1024, 0.5) == doctest::Approx(9.0));
    CHECK(truncated_mean_weight(1024, 0.0001) == 0.0);
    CHECK_THROWS_AS((void)truncated_mean_weight(1000, 0.1), std::invalid_argument);

    const auto rows = compare_sparse_truncated(1024, {0.05, 0.1, 0.5});
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) CHECK(r.truncated_mean < r.sparse_mean + 1e-12);
}
