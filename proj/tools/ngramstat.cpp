// Command-line front end: exact counts, sketch estimation runs, simultaneous
// multi-length estimation, accuracy-bound tables and synthetic stream
// generation. Exit codes: 0 success, 2 usage error, 3 runtime error.

#include <CLI11.hpp>

#include <ngramstat/bounds.hpp>
#include <ngramstat/exact_oracle.hpp>
#include <ngramstat/experiment.hpp>
#include <ngramstat/stream.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

using namespace ngramstat;

namespace {

struct InputOptions {
    std::string path;
    std::string zipf;  // "s,alphabet,N"
    std::string mode = "bytes";

    bool has_input() const { return !path.empty() || !zipf.empty(); }

    ZipfConfig parse_zipf(uint64_t seed) const {
        ZipfConfig cfg;
        cfg.seed = seed;
        unsigned long long length = 0;
        char trailing;
        if (std::sscanf(zipf.c_str(), "%lf,%u,%llu%c", &cfg.skew, &cfg.alphabet,
                        &length, &trailing) != 3)
            throw usage_error("--zipf expects s,alphabet,N");
        cfg.length = length;
        cfg.validate();
        return cfg;
    }

    std::unique_ptr<SymbolStream> open(uint64_t seed) const {
        if (!path.empty() && !zipf.empty())
            throw usage_error("give either --input or --zipf, not both");
        if (!path.empty()) {
            if (mode != "bytes" && mode != "codepoints")
                throw usage_error("--mode must be bytes or codepoints");
            return open_stream(path, mode == "bytes" ? SymbolMode::bytes
                                                     : SymbolMode::codepoints);
        }
        if (!zipf.empty()) return std::make_unique<ZipfStream>(parse_zipf(seed));
        throw usage_error("an input is required: --input PATH or --zipf s,alphabet,N");
    }
};

struct HashFlags {
    std::string family = "general";
    uint32_t width = 19;
    std::string poly_hex;
    uint64_t multiplier = 37;
    uint32_t pieces = 2;

    HashFamilyConfig build(uint32_t n) const {
        HashFamilyConfig cfg;
        auto fam = family_from_name(family);
        if (!fam)
            throw usage_error("unknown hash family: " + family +
                              " (expected nwise|cyclic|general|id37|hybrid)");
        cfg.family = *fam;
        cfg.n = n;
        cfg.width_bits = width;
        cfg.multiplier = multiplier;
        cfg.pieces = pieces;
        if (!poly_hex.empty()) {
            try {
                cfg.poly_bits = std::stoull(poly_hex, nullptr, 16);
            } catch (const std::exception&) {
                throw usage_error("--poly expects a hex polynomial, e.g. f10eb");
            }
        }
        cfg.validate();
        return cfg;
    }
};

void add_input_flags(CLI::App* cmd, InputOptions& in) {
    cmd->add_option("--input", in.path, "input file path");
    cmd->add_option("--zipf", in.zipf, "synthetic zipfian input: s,alphabet,N");
    cmd->add_option("--mode", in.mode, "symbol mode: bytes|codepoints");
}

void add_hash_flags(CLI::App* cmd, HashFlags& h) {
    cmd->add_option("--hash", h.family, "hash family: nwise|cyclic|general|id37|hybrid");
    cmd->add_option("--L", h.width, "hash width in bits");
    cmd->add_option("--poly", h.poly_hex, "irreducible polynomial (hex, general only)");
    cmd->add_option("--B", h.multiplier, "id37 multiplier");
    cmd->add_option("--p", h.pieces, "hybrid piece count");
}

IcebergQuery iceberg_from(std::optional<uint64_t> min_count,
                          std::optional<uint64_t> exact_count) {
    if (min_count && exact_count)
        throw usage_error("give either --min-count or --exact-count, not both");
    IcebergQuery q;
    if (min_count) {
        q.kind = IcebergQuery::Kind::min_count;
        q.threshold = *min_count;
    } else if (exact_count) {
        q.kind = IcebergQuery::Kind::exact_count;
        q.threshold = *exact_count;
    }
    return q;
}

std::string describe_iceberg(const IcebergQuery& q) {
    if (q.kind == IcebergQuery::Kind::min_count)
        return "count >= " + std::to_string(q.threshold);
    if (q.kind == IcebergQuery::Kind::exact_count)
        return "count == " + std::to_string(q.threshold);
    return "any count";
}

void emit_csv(const std::string& path, const std::function<void(std::ostream&)>& fn) {
    if (path.empty()) {
        fn(std::cout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    fn(out);
}

// --- subcommands -------------------------------------------------------------

int cmd_exact(const InputOptions& in, uint32_t n, uint64_t seed, const IcebergQuery& q) {
    auto stream = in.open(seed);
    ExactStats stats = exact_stats(*stream, n);
    std::printf("n=%u\n", n);
    std::printf("total_ngrams=%llu\n", static_cast<unsigned long long>(stats.total));
    std::printf("distinct=%llu\n", static_cast<unsigned long long>(stats.distinct));
    std::printf("entropy_bits=%.10g\n", stats.entropy_bits);
    std::printf("iceberg(%s)=%llu\n", describe_iceberg(q).c_str(),
                static_cast<unsigned long long>(
                    stats.iceberg([&](uint64_t f) { return q.matches(f); })));
    return 0;
}

int cmd_estimate(const InputOptions& in, const ExperimentConfig& cfg,
                 const std::string& csv_path) {
    auto stream = in.open(cfg.base_seed);
    ExperimentOutcome out = run_experiment(*stream, cfg);
    emit_csv(csv_path, [&](std::ostream& os) { write_csv(os, out); });
    if (!csv_path.empty()) {
        std::printf("runs=%u M=%llu hash=%s n=%u L=%u\n", cfg.runs,
                    static_cast<unsigned long long>(cfg.capacity),
                    family_name(cfg.hash.family), cfg.hash.n, cfg.hash.width_bits);
        if (out.have_exact) {
            std::printf("exact distinct=%.10g entropy=%.10g iceberg=%llu\n",
                        out.exact_distinct, out.exact_entropy,
                        static_cast<unsigned long long>(out.exact_iceberg));
            std::printf("distinct rel-error p50=%.4f p95=%.4f mean=%.4f\n",
                        out.distinct_errors.p50, out.distinct_errors.p95,
                        out.distinct_errors.mean);
        } else {
            std::printf("exact oracle skipped (memory guard); error columns are nan\n");
        }
        std::printf("wrote %s\n", csv_path.c_str());
    }
    return 0;
}

int cmd_multi(const InputOptions& in, uint32_t n_max, const ExperimentConfig& cfg,
              const std::string& csv_path) {
    auto stream = in.open(cfg.base_seed);
    auto results = run_multi(*stream, n_max, cfg);
    emit_csv(csv_path, [&](std::ostream& os) { write_multi_csv(os, results); });
    if (!csv_path.empty()) {
        for (const auto& res : results)
            std::printf("length %u: exact=%.10g p95=%.4f mean=%.4f\n", res.length,
                        res.exact_distinct, res.distinct_errors.p95,
                        res.distinct_errors.mean);
        std::printf("wrote %s\n", csv_path.c_str());
    }
    return 0;
}

int cmd_bounds(std::vector<double> ps, std::vector<double> ms, double delta,
               const std::string& agnostic, const std::string& lower_gram,
               const std::string& csv_path) {
    if (!agnostic.empty()) {
        double v, eta;
        if (std::sscanf(agnostic.c_str(), "%lf,%lf", &v, &eta) != 2)
            throw usage_error("--agnostic expects V,eta");
        auto est = bounds::agnostic_estimates(v, eta);
        std::printf("draw-scaled unoccupied form: eta(1-1/V)^eta = %.10g\n",
                    est.unoccupied_eta_form);
        std::printf("occupancy expected distinct: V(1-(1-1/V)^eta) = %.10g\n",
                    est.expected_distinct);
        return 0;
    }
    if (!lower_gram.empty()) {
        double m, v, sigma;
        if (std::sscanf(lower_gram.c_str(), "%lf,%lf,%lf", &m, &v, &sigma) != 3)
            throw usage_error("--lower-gram expects m,V,sigma");
        std::printf("shorter-gram estimate: m(1-(m/V)^sigma) = %.10g\n",
                    bounds::agnostic_lower_gram(m, v, sigma));
        return 0;
    }
    if (!(delta > 0.0) || !(delta < 1.0))
        throw usage_error("--delta must lie in (0,1)");
    if (ps.empty()) ps = {2, 4, 8};
    if (ms.empty()) ms = {256, 1024, 2048, 65536, 262144, 1048576};
    std::printf("maximum relative error at reliability %.4g\n", 1.0 - delta);
    std::printf("%-6s", "p\\M");
    for (double m : ms) std::printf("%12.0f", m);
    std::printf("\n");
    std::vector<std::vector<std::optional<double>>> cells;
    for (double p : ps) {
        std::printf("%-6.0f", p);
        cells.emplace_back();
        for (double m : ms) {
            std::optional<double> eps;
            try {
                eps = bounds::epsilon_for(p, m, delta);
            } catch (const usage_error&) {
                // cell outside the M >= 8p regime
            }
            cells.back().push_back(eps);
            if (eps)
                std::printf("%11.1f%%", *eps * 100.0);
            else
                std::printf("%12s", "—");
        }
        std::printf("\n");
    }
    if (!csv_path.empty()) {
        emit_csv(csv_path, [&](std::ostream& os) {
            os << "p,M,delta,epsilon\n";
            for (std::size_t i = 0; i < ps.size(); ++i)
                for (std::size_t j = 0; j < ms.size(); ++j) {
                    os << ps[i] << ',' << ms[j] << ',' << delta << ',';
                    if (cells[i][j])
                        os << *cells[i][j];
                    else
                        os << "no_guarantee";
                    os << '\n';
                }
        });
        std::printf("wrote %s\n", csv_path.c_str());
    }
    return 0;
}

int cmd_zipf(const InputOptions& in, uint64_t seed, const std::string& out_path) {
    if (in.zipf.empty()) throw usage_error("zipf generation requires --zipf s,alphabet,N");
    ZipfConfig cfg = in.parse_zipf(seed);
    ZipfStream stream(cfg);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    uint64_t written = 0;
    if (cfg.alphabet <= 256) {
        while (auto s = stream.next()) {
            const char b = static_cast<char>(static_cast<unsigned char>(*s));
            out.write(&b, 1);
            ++written;
        }
        std::printf("wrote %llu byte symbols to %s\n",
                    static_cast<unsigned long long>(written), out_path.c_str());
    } else {
        // fixed-width 4-byte little-endian records
        while (auto s = stream.next()) {
            const uint32_t v = *s;
            const char rec[4] = {static_cast<char>(v & 0xFF),
                                 static_cast<char>((v >> 8) & 0xFF),
                                 static_cast<char>((v >> 16) & 0xFF),
                                 static_cast<char>((v >> 24) & 0xFF)};
            out.write(rec, 4);
            ++written;
        }
        std::printf("wrote %llu 4-byte records to %s\n",
                    static_cast<unsigned long long>(written), out_path.c_str());
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"streaming n-gram statistics: sketch estimation, exact counts, "
                 "accuracy bounds and synthetic streams"};
    app.require_subcommand(1);

    InputOptions in;
    HashFlags hash;
    uint32_t n = 5, n_max = 4, runs = 100;
    uint64_t capacity = 1024, seed = 1;
    std::optional<uint64_t> min_count, exact_count;
    std::optional<uint32_t> median_of;
    double delta = 0.05;
    std::vector<double> p_list, m_list;
    std::string csv_path, out_path;

    auto* exact_cmd = app.add_subcommand("exact", "exact statistics by full tabulation");
    add_input_flags(exact_cmd, in);
    exact_cmd->add_option("--n", n, "n-gram length");
    exact_cmd->add_option("--seed", seed, "stream seed for --zipf inputs");
    exact_cmd->add_option("--min-count", min_count, "iceberg predicate: count >= c");
    exact_cmd->add_option("--exact-count", exact_count, "iceberg predicate: count == c");

    auto* est_cmd = app.add_subcommand("estimate", "randomized sketch estimation runs");
    add_input_flags(est_cmd, in);
    add_hash_flags(est_cmd, hash);
    est_cmd->add_option("--n", n, "n-gram length");
    est_cmd->add_option("--M", capacity, "sketch capacity (distinct keys)");
    est_cmd->add_option("--runs", runs, "number of independent runs");
    est_cmd->add_option("--seed", seed, "base seed (also seeds --zipf inputs)");
    est_cmd->add_option("--median-of", median_of, "median-of-q post-process group size");
    est_cmd->add_option("--min-count", min_count, "iceberg predicate: count >= c");
    est_cmd->add_option("--exact-count", exact_count, "iceberg predicate: count == c");
    est_cmd->add_option("--csv", csv_path, "write per-run CSV here (default stdout)");

    auto* multi_cmd =
        app.add_subcommand("multi", "simultaneous estimation for lengths 1..n-max");
    add_input_flags(multi_cmd, in);
    add_hash_flags(multi_cmd, hash);
    multi_cmd->add_option("--n-max", n_max, "largest n-gram length");
    multi_cmd->add_option("--M", capacity, "per-length sketch capacity");
    multi_cmd->add_option("--runs", runs, "number of independent runs");
    multi_cmd->add_option("--seed", seed, "base seed (also seeds --zipf inputs)");
    multi_cmd->add_option("--csv", csv_path, "write per-run CSV here (default stdout)");

    std::string agnostic, lower_gram;
    auto* bounds_cmd =
        app.add_subcommand("bounds", "theoretical precision table for probing");
    bounds_cmd->add_option("--p", p_list, "independence degrees (default 2 4 8)");
    bounds_cmd->add_option("--M", m_list, "buffer capacities");
    bounds_cmd->add_option("--delta", delta, "failure probability (default 0.05)");
    bounds_cmd->add_option("--agnostic", agnostic,
                           "data-agnostic occupancy estimates for V,eta");
    bounds_cmd->add_option("--lower-gram", lower_gram,
                           "shorter-gram estimate for m,V,sigma");
    bounds_cmd->add_option("--csv", csv_path, "also write the grid as CSV");

    auto* zipf_cmd = app.add_subcommand("zipf", "materialize a synthetic zipfian stream");
    add_input_flags(zipf_cmd, in);
    zipf_cmd->add_option("--seed", seed, "stream seed");
    zipf_cmd->add_option("--out", out_path, "output file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*exact_cmd) return cmd_exact(in, n, seed, iceberg_from(min_count, exact_count));
        if (*est_cmd) {
            ExperimentConfig cfg;
            cfg.hash = hash.build(n);
            cfg.capacity = capacity;
            cfg.runs = runs;
            cfg.base_seed = seed;
            cfg.iceberg = iceberg_from(min_count, exact_count);
            cfg.median_of = median_of;
            return cmd_estimate(in, cfg, csv_path);
        }
        if (*multi_cmd) {
            ExperimentConfig cfg;
            hash.family = "nwise";  // the only family supporting chained extension
            cfg.hash = hash.build(n_max);
            cfg.capacity = capacity;
            cfg.runs = runs;
            cfg.base_seed = seed;
            return cmd_multi(in, n_max, cfg, csv_path);
        }
        if (*bounds_cmd)
            return cmd_bounds(p_list, m_list, delta, agnostic, lower_gram, csv_path);
        if (*zipf_cmd) return cmd_zipf(in, seed, out_path);
    } catch (const usage_error& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}
