#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "exact_oracle.hpp"
#include "gt_sketch.hpp"
#include "hash_family.hpp"
#include "stream.hpp"

namespace ngramstat {

struct IcebergQuery {
    enum class Kind { none, min_count, exact_count };
    Kind kind = Kind::none;
    uint64_t threshold = 0;

    bool active() const { return kind != Kind::none; }
    bool matches(uint64_t f) const {
        switch (kind) {
            case Kind::min_count: return f >= threshold;
            case Kind::exact_count: return f == threshold;
            case Kind::none: return true;
        }
        return true;
    }
};

struct ExperimentConfig {
    HashFamilyConfig hash;       // carries n and L
    uint64_t capacity = 1024;    // M
    uint32_t runs = 100;         // R
    uint64_t base_seed = 1;
    IcebergQuery iceberg;
    std::optional<uint32_t> median_of;
    uint64_t oracle_max_keys = 1ull << 26;
};

// Seed for run i: splitmix64 applied to base + (i+1) * golden gamma. Fresh
// tables per run, reproducible from (base seed, run index) alone.
inline uint64_t run_seed(uint64_t base, uint32_t run_index) {
    return mix_seed(base, run_index);
}

// The q-th percentile as the k-th largest value, k = R - floor(qR/100)
// (clamped to 1): for 100 runs at q = 95 that is the 5th-largest value.
inline double percentile(std::vector<double> values, double q) {
    if (values.empty()) throw usage_error("percentile of an empty list");
    const auto r = values.size();
    auto k = static_cast<std::size_t>(
        static_cast<double>(r) - std::floor(q * static_cast<double>(r) / 100.0));
    if (k < 1) k = 1;
    std::nth_element(values.begin(), values.begin() + (k - 1), values.end(),
                     std::greater<>());
    return values[k - 1];
}

struct RunResult {
    uint32_t run = 0;
    uint64_t seed = 0;
    double estimate = 0.0;
    double distinct_error = 0.0;
    uint32_t level = 0;
    uint64_t buffered = 0;
    double entropy_estimate = 0.0;
    double entropy_error = 0.0;
    double iceberg_estimate = 0.0;
    double iceberg_error = 0.0;
    double wall_ms = 0.0;
    bool entropy_absolute = false;  // exact entropy was 0; error is absolute
    bool iceberg_absolute = false;  // exact iceberg was 0; error is absolute
    bool level_exhausted = false;
};

struct ErrorPercentiles {
    double p25 = 0.0, p50 = 0.0, p75 = 0.0, p95 = 0.0, mean = 0.0;
};

inline ErrorPercentiles summarize_errors(const std::vector<double>& errors) {
    std::vector<double> clean;
    clean.reserve(errors.size());
    for (double e : errors)
        if (!std::isnan(e)) clean.push_back(e);
    ErrorPercentiles s;
    if (clean.empty()) {
        s.p25 = s.p50 = s.p75 = s.p95 = s.mean = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    s.p25 = percentile(clean, 25);
    s.p50 = percentile(clean, 50);
    s.p75 = percentile(clean, 75);
    s.p95 = percentile(clean, 95);
    double sum = 0.0;
    for (double e : clean) sum += e;
    s.mean = sum / static_cast<double>(clean.size());
    return s;
}

struct ExperimentOutcome {
    // exact references (NaN / 0 when the oracle hit its memory guard)
    bool have_exact = false;
    double exact_distinct = std::numeric_limits<double>::quiet_NaN();
    double exact_entropy = std::numeric_limits<double>::quiet_NaN();
    uint64_t exact_iceberg = 0;
    uint64_t total_ngrams = 0;

    std::vector<RunResult> runs;
    ErrorPercentiles distinct_errors;
    ErrorPercentiles entropy_errors;
    ErrorPercentiles iceberg_errors;

    // median-of-q post-process over the distinct estimates
    std::optional<uint32_t> median_group;
    ErrorPercentiles median_errors;
};

namespace detail {

inline double relative_or_absolute(double estimate, double exact, bool& absolute_flag) {
    if (exact > 0.0) {
        absolute_flag = false;
        return std::abs(estimate - exact) / exact;
    }
    absolute_flag = true;
    return std::abs(estimate - exact);
}

inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const auto m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

// Stream once through a sketch with the given hasher seed. The key is only
// materialized for offers that pass the level filter.
inline StreamStats sketch_stream(SymbolStream& stream, const HashFamilyConfig& hash,
                                 uint64_t capacity, uint64_t seed,
                                 GtSketch* out_sketch = nullptr) {
    NgramHasher hasher(hash, seed);
    GtSketch sketch(capacity, hash.width_bits);
    const uint32_t n = hash.n;
    std::vector<uint32_t> first;
    first.reserve(n);
    uint64_t h = 0;
    while (auto s = stream.next()) {
        if (first.size() < n) {
            first.push_back(*s);
            if (first.size() < n) continue;
            h = hasher.warm_up(first);
        } else {
            h = hasher.slide(*s);
        }
        sketch.offer_hashed(h, [&] { return hasher.window_key(); });
    }
    StreamStats stats = sketch.stats();
    if (out_sketch) *out_sketch = std::move(sketch);
    return stats;
}

inline ExperimentOutcome run_experiment(SymbolStream& stream, const ExperimentConfig& cfg) {
    if (cfg.runs < 1) throw usage_error("run count must be >= 1");
    cfg.hash.validate();

    ExperimentOutcome out;
    stream.rewind();
    try {
        ExactStats exact = exact_stats(stream, cfg.hash.n, cfg.oracle_max_keys);
        out.have_exact = true;
        out.exact_distinct = static_cast<double>(exact.distinct);
        out.exact_entropy = exact.entropy_bits;
        out.exact_iceberg =
            exact.iceberg([&](uint64_t f) { return cfg.iceberg.matches(f); });
        out.total_ngrams = exact.total;
    } catch (const memory_guard_error&) {
        out.have_exact = false;  // estimates still run; error columns stay NaN
    }

    const double nan = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> d_err, e_err, i_err, estimates;
    for (uint32_t r = 0; r < cfg.runs; ++r) {
        RunResult row;
        row.run = r;
        row.seed = run_seed(cfg.base_seed, r);
        stream.rewind();
        GtSketch sketch(cfg.capacity, cfg.hash.width_bits);
        const auto t0 = std::chrono::steady_clock::now();
        try {
            StreamStats stats =
                sketch_stream(stream, cfg.hash, cfg.capacity, row.seed, &sketch);
            row.estimate = stats.distinct_estimate;
            row.level = stats.level;
            row.buffered = stats.buffered;
            row.entropy_estimate = stats.entropy_estimate;
            row.iceberg_estimate = sketch.estimate_iceberg(
                [&](uint64_t f) { return cfg.iceberg.matches(f); });
        } catch (const level_exhaustion_error& ex) {
            row.level_exhausted = true;
            row.estimate = ex.partial_estimate;
            row.level = ex.level;
            row.buffered = ex.buffered;
            row.entropy_estimate = nan;
            row.iceberg_estimate = nan;
        }
        const auto t1 = std::chrono::steady_clock::now();
        row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();

        if (out.have_exact && !row.level_exhausted) {
            bool dummy = false;
            row.distinct_error =
                detail::relative_or_absolute(row.estimate, out.exact_distinct, dummy);
            row.entropy_error = detail::relative_or_absolute(
                row.entropy_estimate, out.exact_entropy, row.entropy_absolute);
            row.iceberg_error = detail::relative_or_absolute(
                row.iceberg_estimate, static_cast<double>(out.exact_iceberg),
                row.iceberg_absolute);
        } else {
            row.distinct_error = row.entropy_error = row.iceberg_error = nan;
        }

        d_err.push_back(row.distinct_error);
        e_err.push_back(row.entropy_error);
        i_err.push_back(row.iceberg_error);
        estimates.push_back(row.estimate);
        out.runs.push_back(row);
    }

    out.distinct_errors = summarize_errors(d_err);
    out.entropy_errors = summarize_errors(e_err);
    out.iceberg_errors = summarize_errors(i_err);

    if (cfg.median_of && *cfg.median_of >= 1 && out.have_exact) {
        const uint32_t q = *cfg.median_of;
        std::vector<double> med_errors;
        for (std::size_t g = 0; g + q <= estimates.size(); g += q) {
            std::vector<double> group(estimates.begin() + g, estimates.begin() + g + q);
            const double med = detail::median_of(std::move(group));
            med_errors.push_back(std::abs(med - out.exact_distinct) /
                                 std::max(out.exact_distinct, 1.0));
        }
        if (!med_errors.empty()) {
            out.median_group = q;
            out.median_errors = summarize_errors(med_errors);
        }
    }
    return out;
}

// --- multi-length estimation -------------------------------------------------

struct MultiLengthResult {
    uint32_t length = 0;
    double exact_distinct = 0.0;
    std::vector<RunResult> runs;  // estimate/level/buffered/error/wall only
    ErrorPercentiles distinct_errors;
};

inline std::vector<MultiLengthResult> run_multi(SymbolStream& stream, uint32_t n_max,
                                                const ExperimentConfig& cfg) {
    if (cfg.hash.family != HashFamily::nwise || cfg.hash.unsafe_shared_table)
        throw usage_error("multi-length estimation requires the nwise family");
    if (n_max < 1) throw usage_error("n_max must be >= 1");

    std::vector<MultiLengthResult> results(n_max);
    for (uint32_t k = 1; k <= n_max; ++k) {
        stream.rewind();
        results[k - 1].length = k;
        results[k - 1].exact_distinct = static_cast<double>(
            exact_stats(stream, k, cfg.oracle_max_keys).distinct);
    }

    HashFamilyConfig hash = cfg.hash;
    hash.n = n_max;
    for (uint32_t r = 0; r < cfg.runs; ++r) {
        const uint64_t seed = run_seed(cfg.base_seed, r);
        stream.rewind();
        MultiSketch multi(hash, cfg.capacity, seed);
        const auto t0 = std::chrono::steady_clock::now();
        while (auto s = stream.next()) multi.push(*s);
        const auto t1 = std::chrono::steady_clock::now();
        const double wall = std::chrono::duration<double, std::milli>(t1 - t0).count();
        for (uint32_t k = 1; k <= n_max; ++k) {
            const GtSketch& sk = multi.sketch_for(k);
            RunResult row;
            row.run = r;
            row.seed = seed;
            row.estimate = sk.estimate_distinct();
            row.level = sk.level();
            row.buffered = sk.buffered();
            row.wall_ms = wall;
            bool dummy = false;
            row.distinct_error = detail::relative_or_absolute(
                row.estimate, results[k - 1].exact_distinct, dummy);
            results[k - 1].runs.push_back(row);
        }
    }
    for (auto& res : results) {
        std::vector<double> errs;
        for (const auto& row : res.runs) errs.push_back(row.distinct_error);
        res.distinct_errors = summarize_errors(errs);
    }
    return results;
}

// --- CSV ---------------------------------------------------------------------

namespace detail {

inline std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}
inline std::string fmt_ms(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace detail

// Per-run rows followed by summary rows. Everything except wall_ms is a pure
// function of the configuration and seeds.
inline void write_csv(std::ostream& os, const ExperimentOutcome& out) {
    os << "run,seed,estimate,exact,rel_error,t,m_prime,entropy_est,entropy_exact,"
          "iceberg_est,iceberg_exact,wall_ms,flags\n";
    using detail::fmt;
    for (const auto& r : out.runs) {
        std::string flags;
        auto add = [&](const char* f) {
            if (!flags.empty()) flags += ';';
            flags += f;
        };
        if (r.level_exhausted) add("level_exhausted");
        if (r.entropy_absolute) add("entropy_abs_error");
        if (r.iceberg_absolute) add("iceberg_abs_error");
        if (!out.have_exact) add("no_exact");
        os << r.run << ',' << r.seed << ',' << fmt(r.estimate) << ','
           << fmt(out.exact_distinct) << ',' << fmt(r.distinct_error) << ','
           << r.level << ',' << r.buffered << ',' << fmt(r.entropy_estimate) << ','
           << fmt(out.exact_entropy) << ',' << fmt(r.iceberg_estimate) << ','
           << out.exact_iceberg << ',' << detail::fmt_ms(r.wall_ms) << ',' << flags
           << '\n';
    }
    os << "summary,exact," << fmt(out.exact_distinct) << ',' << fmt(out.exact_entropy)
       << ',' << out.exact_iceberg << '\n';
    auto srow = [&](const char* key, double d, double e, double i) {
        os << "summary," << key << ',' << fmt(d) << ',' << fmt(e) << ',' << fmt(i)
           << '\n';
    };
    srow("p25", out.distinct_errors.p25, out.entropy_errors.p25, out.iceberg_errors.p25);
    srow("p50", out.distinct_errors.p50, out.entropy_errors.p50, out.iceberg_errors.p50);
    srow("p75", out.distinct_errors.p75, out.entropy_errors.p75, out.iceberg_errors.p75);
    srow("p95", out.distinct_errors.p95, out.entropy_errors.p95, out.iceberg_errors.p95);
    srow("mean", out.distinct_errors.mean, out.entropy_errors.mean,
         out.iceberg_errors.mean);
    if (out.median_group) {
        const std::string key = "median_of_" + std::to_string(*out.median_group);
        os << key << ",p50," << fmt(out.median_errors.p50) << '\n';
        os << key << ",p95," << fmt(out.median_errors.p95) << '\n';
        os << key << ",mean," << fmt(out.median_errors.mean) << '\n';
    }
}

inline void write_multi_csv(std::ostream& os, const std::vector<MultiLengthResult>& results) {
    os << "run,length,seed,estimate,exact,rel_error,t,m_prime,wall_ms\n";
    using detail::fmt;
    for (const auto& res : results)
        for (const auto& r : res.runs)
            os << r.run << ',' << res.length << ',' << r.seed << ',' << fmt(r.estimate)
               << ',' << fmt(res.exact_distinct) << ',' << fmt(r.distinct_error) << ','
               << r.level << ',' << r.buffered << ',' << detail::fmt_ms(r.wall_ms)
               << '\n';
    for (const auto& res : results) {
        os << "summary," << res.length << ",p95," << fmt(res.distinct_errors.p95)
           << '\n';
        os << "summary," << res.length << ",mean," << fmt(res.distinct_errors.mean)
           << '\n';
    }
}

}  // namespace ngramstat
