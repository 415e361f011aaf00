// SPDX-License-Identifier: Apache-2.0
// tmt: command-line front end for the Tunstall-Merkle tree library.
#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "tmt/cli.hpp"

int main(int argc, char** argv) {
    using namespace tmt::cli;

    CLI::App app{"Tunstall-Merkle tree tools"};
    app.require_subcommand(1);
    app.fallthrough();

    Config cfg;
    app.set_config("--config", "", "key=value configuration file")->envname("TMT_CONFIG");
    app.add_option("--n", cfg.n, "total users");
    app.add_option("--p", cfg.p, "activity / bit probability");
    app.add_option("--w", cfg.w, "codeword width (4 or 8)");
    app.add_option("--base-t", cfg.base_t, "base shuffle-shift rounds");
    app.add_option("--hash-width", cfg.hash_width, "hash width in bits (256)");
    app.add_option("--seed", cfg.seed, "random seed");
    app.add_option("--cas-dir", cfg.cas_dir, "directory-backed CAS");
    bool csv = false;
    app.add_flag("--csv", csv, "CSV output");

    auto* stats = app.add_subcommand("stats", "path weight distribution of the sparse tree");
    StatsOptions so;
    bool fig6 = false;
    std::uint64_t fig6_n = 1024;
    stats->add_option("--k-min", so.k_min);
    stats->add_option("--k-max", so.k_max);
    stats->add_flag("--oracle", so.oracle, "add Monte-Carlo columns");
    stats->add_option("--trials", so.trials);
    stats->add_flag("--fig6", fig6, "sparse vs truncated mean weight over p");
    stats->add_option("--fig6-n", fig6_n);

    auto* codebook = app.add_subcommand("codebook", "dump the Tunstall code table");

    auto* bench = app.add_subcommand("compress-bench", "measure Tunstall redundancy");
    std::size_t bits = 1000000;
    bench->add_option("--bits", bits);

    auto* aval = app.add_subcommand("avalanche", "avalanche test of the permutation");
    std::vector<unsigned> ds{10}, ts{100, 150, 200};
    unsigned samples = 50;
    aval->add_option("--d", ds)->delimiter(',');
    aval->add_option("--t", ts)->delimiter(',');
    aval->add_option("--samples", samples);

    auto* build = app.add_subcommand("build-block", "build a synthetic block and print its root of trust");
    std::uint64_t block = 0;
    build->add_option("--block", block);

    auto* lookup = app.add_subcommand("lookup", "look up one user in a synthetic block");
    std::uint32_t id = 0;
    lookup->add_option("--block", block);
    lookup->add_option("--id", id)->required();

    auto* demo = app.add_subcommand("demo", "end-to-end PLS + CAS + client run");
    DemoOptions dopt;
    std::uint64_t tamper = 0;
    double cp_p = -1.0;
    demo->add_option("--blocks", dopt.blocks);
    demo->add_option("--counterparty", dopt.counterparty);
    demo->add_option("--counterparty-p", cp_p, "posting probability of the counterparty");
    auto* tamper_opt = demo->add_option("--tamper-block", tamper, "corrupt the CAS copy of this block");

    auto* transcript = app.add_subcommand("pls-transcript", "dump L, S, P messages as hex");
    unsigned intervals = 4;
    transcript->add_option("--intervals", intervals);

    CLI11_PARSE(app, argc, argv);

    try {
        so.p = cfg.p;
        so.seed = cfg.seed;
        so.csv = csv;
        int status = 0;
        if (*stats) {
            if (fig6)
                cmd_fig6(std::cout, fig6_n, csv);
            else
                cmd_stats(std::cout, so);
        } else if (*codebook) {
            cfg.validate();
            cmd_codebook(std::cout, cfg.p, cfg.w, csv);
        } else if (*bench) {
            cfg.validate();
            cmd_compress_bench(std::cout, cfg.p, cfg.w, bits, cfg.seed, csv);
        } else if (*aval) {
            cmd_avalanche(std::cout, ds, ts, samples, cfg.seed, csv);
        } else if (*build) {
            cmd_build_block(std::cout, cfg, block);
        } else if (*lookup) {
            status = cmd_lookup(std::cout, cfg, block, id);
        } else if (*demo) {
            dopt.csv = csv;
            if (cp_p >= 0.0) dopt.counterparty_p = cp_p;
            if (tamper_opt->count() > 0) dopt.tamper_block = tamper;
            status = cmd_demo(std::cout, cfg, dopt);
        } else if (*transcript) {
            cmd_pls_transcript(std::cout, cfg, intervals);
        }
        if (status != 0) std::cerr << "error: record failed verification against the root of trust\n";
        return status;
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
