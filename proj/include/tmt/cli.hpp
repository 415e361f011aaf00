// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tmt/blockstore.hpp"

namespace tmt::cli {

/// Bad option or configuration value; main() prints it and exits 2.
class UsageError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

struct Config {
    std::uint32_t n = 1024;
    double p = 0.1;  // activity / Bernoulli probability
    unsigned w = 4;
    unsigned base_t = 200;
    unsigned hash_width = 256;
    std::uint64_t seed = 1;
    std::string cas_dir;  // empty = in-memory CAS

    /// Throws UsageError naming the first offending field.
    void validate() const;
};

/// Deterministic synthetic records: each id in [0, n) posts with probability
/// p, the stream depending only on (seed, block).
[[nodiscard]] std::vector<blockstore::Record> random_records(std::uint32_t n, double p, std::uint64_t seed,
                                                             std::uint64_t block);

struct StatsOptions {
    unsigned k_min = 1;
    unsigned k_max = 10;
    double p = 0.1;
    bool oracle = false;
    std::uint64_t trials = 100000;
    std::uint64_t seed = 1;
    bool csv = false;
};
void cmd_stats(std::ostream& out, const StatsOptions& opt);

/// Sparse vs truncated mean path weight over a grid of p.
void cmd_fig6(std::ostream& out, std::uint64_t n, bool csv);

void cmd_codebook(std::ostream& out, double p, unsigned w, bool csv);
void cmd_compress_bench(std::ostream& out, double p, unsigned w, std::size_t n_bits, std::uint64_t seed, bool csv);
void cmd_avalanche(std::ostream& out, const std::vector<unsigned>& ds, const std::vector<unsigned>& ts,
                   unsigned samples, std::uint64_t seed, bool csv);

/// Builds block `number` from synthetic records and prints its root of trust.
/// Publishes to the configured CAS directory when one is set.
void cmd_build_block(std::ostream& out, const Config& cfg, std::uint64_t number);

/// Looks up raw_id in block `number`. Returns the exit status: 0 for a
/// verified record or an absence, 1 when verification fails.
int cmd_lookup(std::ostream& out, const Config& cfg, std::uint64_t number, std::uint32_t raw_id);

struct DemoOptions {
    unsigned blocks = 100;
    std::uint32_t counterparty = 45;
    std::optional<double> counterparty_p;  // defaults to cfg.p
    std::optional<std::uint64_t> tamper_block;
    bool csv = false;
};
/// Full pipeline: sequencer, receiver, CAS and a client following one
/// counterparty. Returns 0 if every lookup verified, 1 otherwise.
int cmd_demo(std::ostream& out, const Config& cfg, const DemoOptions& opt);

void cmd_pls_transcript(std::ostream& out, const Config& cfg, unsigned intervals);

}  // namespace tmt::cli
