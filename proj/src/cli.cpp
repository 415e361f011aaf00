// SPDX-License-Identifier: Apache-2.0
#include "tmt/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include "tmt/pathstats.hpp"
#include "tmt/plschain.hpp"
#include "tmt/rootoftrust.hpp"
#include "tmt/shuffleshift.hpp"
#include "tmt/tunstall.hpp"

namespace tmt::cli {

namespace {

std::string fixed(double v, int prec) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(prec) << v;
    return s.str();
}

std::string full(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

void check_p(double p) {
    if (!(p > 0.0 && p < 1.0)) throw UsageError("p must lie in (0, 1)");
}

// Serves honest paths except for one block, whose leaf digest is altered.
class TamperingSource : public blockstore::PathSource {
  public:
    TamperingSource(blockstore::PathSource& inner, std::uint64_t block) : inner_(inner), block_(block) {}
    blockstore::PathResponse get_path(std::uint64_t b, std::uint32_t idx) override {
        blockstore::PathResponse r = inner_.get_path(b, idx);
        if (b == block_) r.leaf[0] ^= 1;
        return r;
    }

  private:
    blockstore::PathSource& inner_;
    std::uint64_t block_;
};

// Rewrites the stored copy of `block` with the counterparty's record altered.
void tamper_directory(blockstore::CasStore& cas, std::uint64_t block, std::uint32_t raw_id) {
    const auto key = cas.block_key(block);
    const auto path = key ? cas.blob_path(*key) : std::nullopt;
    if (!path) throw std::runtime_error("tamper target not in the CAS directory");
    blockstore::StoredBlock stored = blockstore::parse_block(*cas.get(*key));
    for (auto& r : stored.records) {
        if (r.raw_id == raw_id && !r.value.empty()) r.value.back() ^= 1;
    }
    const Bytes bytes = blockstore::serialize_block(stored);
    std::ofstream f(*path, std::ios::binary | std::ios::trunc);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::unique_ptr<blockstore::CasStore> open_cas(const Config& cfg) {
    if (cfg.cas_dir.empty()) return std::make_unique<blockstore::CasStore>();
    return std::make_unique<blockstore::CasStore>(cfg.cas_dir);
}

}  // namespace

void Config::validate() const {
    if (n < 1 || n > rot::kMaxUsers) throw UsageError("n must lie in [1, 4096]");
    if (!(p > 0.0 && p < 1.0)) throw UsageError("p must lie in (0, 1)");
    if (w != 4 && w != 8) throw UsageError("w must be 4 or 8");
    if (base_t > 100000) throw UsageError("base-t must not exceed 100000");
    if (hash_width != kHashBits) throw UsageError("hash-width must be 256 (SHA-256)");
}

std::vector<blockstore::Record> random_records(std::uint32_t n, double p, std::uint64_t seed, std::uint64_t block) {
    std::seed_seq sseq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                       static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32)};
    std::mt19937_64 rng(sseq);
    std::vector<blockstore::Record> out;
    for (std::uint32_t id = 0; id < n; ++id) {
        if (static_cast<double>(rng() >> 11) * 0x1.0p-53 >= p) continue;
        const std::string text = "user " + std::to_string(id) + " block " + std::to_string(block) + " nonce " +
                                 std::to_string(rng());
        out.push_back({id, Bytes(text.begin(), text.end())});
    }
    return out;
}

void cmd_stats(std::ostream& out, const StatsOptions& opt) {
    check_p(opt.p);
    if (opt.k_min > opt.k_max || opt.k_max > 62) throw UsageError("k range must satisfy k-min <= k-max <= 62");
    if (opt.oracle && opt.k_max > 24) throw UsageError("--oracle supports k <= 24");

    if (opt.csv) {
        out << "k,mean";
        for (unsigned j = 0; j <= opt.k_max; ++j) out << ",w" << j;
        if (opt.oracle) out << ",mc_mean,tv";
        out << '\n';
    } else {
        out << "path weight pdf (%), p = " << opt.p << '\n' << std::setw(3) << "k" << std::setw(8) << "mean";
        for (unsigned j = 0; j <= opt.k_max; ++j) out << std::setw(7) << j;
        if (opt.oracle) out << std::setw(9) << "mc_mean" << std::setw(9) << "tv";
        out << '\n';
    }
    for (unsigned k = opt.k_min; k <= opt.k_max; ++k) {
        const pathstats::WeightPdf f = pathstats::pdf(k, opt.p);
        const double mean = pathstats::mean_weight(f);
        if (opt.csv) {
            out << k << ',' << full(mean);
            for (unsigned j = 0; j <= opt.k_max; ++j) out << ',' << full(j <= k ? 100.0 * f.probs[j] : 0.0);
        } else {
            out << std::setw(3) << k << std::setw(8) << fixed(mean, 3);
            for (unsigned j = 0; j <= k; ++j) out << std::setw(7) << fixed(100.0 * f.probs[j], 2);
            for (unsigned j = k + 1; j <= opt.k_max; ++j) out << std::setw(7) << "";
        }
        if (opt.oracle) {
            const pathstats::WeightPdf mc = pathstats::monte_carlo_pdf(k, opt.p, opt.trials, opt.seed);
            const double tv = pathstats::total_variation(f, mc);
            if (opt.csv)
                out << ',' << full(pathstats::mean_weight(mc)) << ',' << full(tv);
            else
                out << std::setw(9) << fixed(pathstats::mean_weight(mc), 3) << std::setw(9) << fixed(tv, 4);
        }
        out << '\n';
    }
}

void cmd_fig6(std::ostream& out, std::uint64_t n, bool csv) {
    if (n < 2 || (n & (n - 1)) != 0 || n > (std::uint64_t{1} << 20)) throw UsageError("n must be a power of two in [2, 2^20]");
    const std::vector<double> ps{0.01, 0.02, 0.05, 0.1, 0.15, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
    const auto points = pathstats::compare_sparse_truncated(n, ps);
    if (csv) {
        out << "p,sparse_mean,truncated_mean\n";
        for (const auto& pt : points) out << full(pt.p) << ',' << full(pt.sparse_mean) << ',' << full(pt.truncated_mean) << '\n';
        return;
    }
    out << "mean path weight, n = " << n << '\n' << std::setw(6) << "p" << std::setw(10) << "sparse" << std::setw(11) << "truncated\n";
    for (const auto& pt : points)
        out << std::setw(6) << fixed(pt.p, 2) << std::setw(10) << fixed(pt.sparse_mean, 3) << std::setw(10)
            << fixed(pt.truncated_mean, 3) << '\n';
}

void cmd_codebook(std::ostream& out, double p, unsigned w, bool csv) {
    check_p(p);
    const tunstall::Codebook book(p, w);
    if (csv)
        out << "codeword,chunk,cost\n";
    else
        out << w << "-bit Tunstall code, p = " << p << '\n' << "codeword  chunk           -log2 p_c\n";
    for (std::size_t i = 0; i < book.size(); ++i) {
        const auto cw = static_cast<tunstall::Codeword>(i);
        std::string bits;
        for (unsigned b = w; b-- > 0;) bits.push_back(((cw >> b) & 1U) ? '1' : '0');
        const std::string chunk = book.chunk(cw).to_string();
        if (csv)
            out << bits << ',' << chunk << ',' << full(book.cost(cw)) << '\n';
        else
            out << std::left << std::setw(10) << bits << std::setw(16) << chunk << std::right << fixed(book.cost(cw), 2)
                << '\n';
    }
}

void cmd_compress_bench(std::ostream& out, double p, unsigned w, std::size_t n_bits, std::uint64_t seed, bool csv) {
    check_p(p);
    if (n_bits == 0) throw UsageError("bits must be positive");
    const tunstall::CompressionReport r = tunstall::measure(p, w, n_bits, seed);
    if (csv) {
        out << "p,w,n,r,kappa,h0,rho\n"
            << full(p) << ',' << w << ',' << r.n << ',' << r.r << ',' << full(r.kappa) << ',' << full(r.h0) << ','
            << full(r.rho) << '\n';
        return;
    }
    out << "p = " << p << "  w = " << w << "  n = " << r.n << "  codewords = " << r.r << '\n'
        << "kappa = " << fixed(r.kappa, 4) << "  H0 = " << fixed(r.h0, 4) << "  rho = " << fixed(100.0 * r.rho, 1)
        << "%\n";
}

void cmd_avalanche(std::ostream& out, const std::vector<unsigned>& ds, const std::vector<unsigned>& ts, unsigned samples,
                   std::uint64_t seed, bool csv) {
    if (ds.empty() || ts.empty()) throw UsageError("need at least one d and one t");
    out << (csv ? "d,t,delta\n" : "   d     t   delta\n");
    for (const unsigned d : ds) {
        if (d < shuffleshift::kMinLogSize || d > shuffleshift::kMaxLogSize) throw UsageError("d must lie in [1, 16]");
        for (const unsigned t : ts) {
            const auto rep = shuffleshift::avalanche(d, t, samples, seed);
            if (csv)
                out << d << ',' << t << ',' << full(rep.delta) << '\n';
            else
                out << std::setw(4) << d << std::setw(6) << t << std::setw(8) << fixed(rep.delta, 3) << '\n';
        }
    }
}

void cmd_build_block(std::ostream& out, const Config& cfg, std::uint64_t number) {
    cfg.validate();
    const blockstore::Block block =
        blockstore::build_block(number, random_records(cfg.n, cfg.p, cfg.seed, number), cfg.n, cfg.base_t);
    const Bytes j = rot::encode_rot(block.rot);
    out << "block " << number << '\n'
        << "n " << block.n << '\n'
        << "m " << block.m() << '\n'
        << "mode " << rot::to_string(block.rot.flags.mode) << '\n'
        << "width " << block.rot.flags.width() << '\n'
        << "extra_rounds " << block.rot.flags.extra_rounds << '\n'
        << "payload_bits " << block.rot.payload.size() << '\n'
        << "message_bytes " << j.size() << '\n'
        << "T " << to_hex(block.rot.tree_root) << '\n'
        << "J " << to_hex(ByteView{j}) << '\n';
    if (!cfg.cas_dir.empty()) {
        blockstore::CasStore cas(cfg.cas_dir);
        out << "cas_key " << to_hex(cas.publish(block)) << '\n';
    }
}

int cmd_lookup(std::ostream& out, const Config& cfg, std::uint64_t number, std::uint32_t raw_id) {
    cfg.validate();
    if (raw_id >= cfg.n) throw UsageError("id must lie in [0, n)");
    const blockstore::Block block =
        blockstore::build_block(number, random_records(cfg.n, cfg.p, cfg.seed, number), cfg.n, cfg.base_t);
    auto cas = open_cas(cfg);
    // A directory that already holds the block is served as-is.
    if (!cas->block_key(number)) cas->publish(block);

    const blockstore::LookupResult res = blockstore::client_lookup(block.rot, number, raw_id, cfg.base_t, *cas);
    out << "block " << number << " id " << raw_id << " position " << res.position << '\n';
    if (!res.present()) {
        out << "absent  cas_bytes 0\n";
        return 0;
    }
    const auto& pr = std::get<blockstore::Present>(res.outcome);
    out << "present  index " << pr.path.leaf_index << "  adjuncts " << pr.path.weight() << "  bytes "
        << blockstore::comm_cost(res.trace) << '\n'
        << "leaf " << to_hex(pr.record_digest) << '\n'
        << "verified " << (pr.verified ? "true" : "false") << '\n';
    return pr.verified ? 0 : 1;
}

int cmd_demo(std::ostream& out, const Config& cfg, const DemoOptions& opt) {
    cfg.validate();
    if (opt.blocks == 0) throw UsageError("blocks must be positive");
    if (opt.counterparty >= cfg.n) throw UsageError("counterparty must lie in [0, n)");
    const double cp_p = opt.counterparty_p.value_or(cfg.p);
    if (!(cp_p >= 0.0 && cp_p <= 1.0)) throw UsageError("counterparty-p must lie in [0, 1]");
    const bool sparse_ok = cfg.n >= 2 && (cfg.n & (cfg.n - 1)) == 0;

    auto cas = open_cas(cfg);
    std::optional<TamperingSource> tampering;
    blockstore::PathSource* source = cas.get();
    if (opt.tamper_block && cfg.cas_dir.empty()) source = &tampering.emplace(*cas, *opt.tamper_block);

    pls::Aes256 seq_cipher;
    pls::Aes256 rx_cipher;
    pls::Sequencer seq(cfg.seed, seq_cipher);
    pls::Receiver rx(seq.anchor(), rx_cipher);
    std::mt19937_64 cp_rng(cfg.seed ^ 0xC0FFEEULL);

    if (opt.csv)
        out << "block,m,status,verified,tmt_bytes,sparse_bytes,sparse_adjuncts\n";
    else
        out << "following user " << opt.counterparty << " over " << opt.blocks << " blocks (n = " << cfg.n
            << ", p = " << cfg.p << ")\n";

    unsigned absent = 0, present = 0, failures = 0;
    std::uint64_t tmt_bytes = 0, sparse_bytes = 0, absent_cas_bytes = 0, sparse_adjuncts = 0;
    std::optional<blockstore::Block> pending;  // block whose J is unlocked next interval

    // One interval past the last block is needed to unlock it.
    for (unsigned b = 0; b <= opt.blocks; ++b) {
        std::vector<blockstore::Record> records = random_records(cfg.n, cfg.p, cfg.seed, b);
        std::erase_if(records, [&](const auto& r) { return r.raw_id == opt.counterparty; });
        const bool forced = opt.tamper_block && *opt.tamper_block == b;
        if (forced || static_cast<double>(cp_rng() >> 11) * 0x1.0p-53 < cp_p) {
            const std::string text = "counterparty record, block " + std::to_string(b);
            records.push_back({opt.counterparty, Bytes(text.begin(), text.end())});
        }
        blockstore::Block block = blockstore::build_block(b, std::move(records), cfg.n, cfg.base_t);
        cas->publish(block);
        if (forced && !cfg.cas_dir.empty()) tamper_directory(*cas, b, opt.counterparty);

        const pls::PlsInterval iv = seq.emit(rot::encode_rot(block.rot));
        const pls::Receiver::Step step = rx.receive(iv.msg);
        if (!step.verified) throw std::runtime_error("PLS chain failed to verify at interval " + std::to_string(b));

        if (pending) {
            if (!step.previous) throw std::runtime_error("root of trust for block " + std::to_string(pending->number) + " rejected");
            const std::uint64_t number = pending->number;
            const std::uint64_t cas_before = cas->bytes_exchanged();
            const blockstore::LookupResult res =
                blockstore::client_lookup(step.previous->rot, number, opt.counterparty, cfg.base_t, *source);
            std::size_t sp = 0;
            unsigned sp_adj = 0;
            if (sparse_ok) {
                const auto trace = blockstore::SparseBaseline(*pending).probe(opt.counterparty);
                sp = blockstore::comm_cost(trace);
                sp_adj = trace.adjuncts;
            }
            const std::size_t cost = blockstore::comm_cost(res.trace);
            tmt_bytes += cost;
            sparse_bytes += sp;
            sparse_adjuncts += sp_adj;
            if (res.present()) {
                ++present;
                if (!res.verified()) ++failures;
            } else {
                ++absent;
                absent_cas_bytes += cas->bytes_exchanged() - cas_before;
            }
            const char* status = res.present() ? "present" : "absent";
            const char* ver = res.present() ? (res.verified() ? "true" : "false") : "-";
            if (opt.csv)
                out << number << ',' << pending->m() << ',' << status << ',' << ver << ',' << cost << ',' << sp << ','
                    << sp_adj << '\n';
            else
                out << "block " << std::setw(4) << number << "  m " << std::setw(4) << pending->m() << "  "
                    << std::left << std::setw(8) << status << std::right << " verified " << std::setw(5) << ver
                    << "  bytes " << std::setw(4) << cost << "  sparse " << std::setw(4) << sp << '\n';
        }
        pending = std::move(block);
    }

    if (!opt.csv) {
        out << "absent " << absent << '/' << opt.blocks << "  (CAS bytes for absences: " << absent_cas_bytes << ")\n"
            << "present " << present << '/' << opt.blocks << "  verification failures " << failures << '\n'
            << "total bytes: tmt " << tmt_bytes << "  sparse baseline " << sparse_bytes << '\n';
        if (sparse_ok) {
            const double mean_adj = static_cast<double>(sparse_adjuncts) / opt.blocks;
            out << "sparse baseline mean adjuncts per probe " << fixed(mean_adj, 3) << "  (x10 probes = "
                << fixed(10.0 * mean_adj, 1) << ")\n";
        }
    }
    return failures == 0 ? 0 : 1;
}

void cmd_pls_transcript(std::ostream& out, const Config& cfg, unsigned intervals) {
    cfg.validate();
    pls::Aes256 cipher;
    pls::Sequencer seq(cfg.seed, cipher);
    const Hash anchor = seq.anchor();
    std::vector<pls::PlsInterval> ivs;
    for (unsigned k = 0; k < intervals; ++k) {
        const auto block = blockstore::build_block(k, random_records(cfg.n, cfg.p, cfg.seed, k), cfg.n, cfg.base_t);
        ivs.push_back(seq.emit(rot::encode_rot(block.rot)));
    }
    out << "anchor " << to_hex(anchor) << "\n\n";
    out << pls::format_transcript(ivs);
}

}  // namespace tmt::cli
