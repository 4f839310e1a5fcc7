#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "hash_family.hpp"

namespace ngramstat {

using NgramKey = std::u32string;

// Sum of (f/N) log2(f/N) over a count histogram, accumulated over counts in
// ascending order so that independent tabulations of the same multiset of
// counts produce bitwise-identical sums.
inline double entropy_bits_from_histogram(const std::map<uint64_t, uint64_t>& by_count,
                                          uint64_t total) {
    double sum = 0.0;
    const double n = static_cast<double>(total);
    for (const auto& [count, multiplicity] : by_count) {
        const double p = static_cast<double>(count) / n;
        sum += static_cast<double>(multiplicity) * p * std::log2(p);
    }
    return 0.0 - sum;  // 0.0 - (-0.0) keeps the degenerate case at +0
}

struct StreamStats {
    double distinct_estimate = 0.0;
    uint32_t level = 0;       // t
    uint64_t buffered = 0;    // m'
    double entropy_estimate = 0.0;
    uint64_t exact_total = 0;  // N
};

// Adaptive sampling buffer: keeps only keys whose hash has `level` trailing
// zero bits, doubling the selectivity whenever the buffer spills over
// capacity. A key that survives to the end was captured at its first
// occurrence, so its stored count is its exact occurrence count, which is
// what the entropy and iceberg estimators lean on.
class GtSketch {
public:
    struct Entry {
        uint64_t count;
        uint64_t hash;
    };

    GtSketch(uint64_t capacity, uint32_t hash_bits, uint32_t initial_level = 0)
        : capacity_(capacity), hash_bits_(hash_bits), level_(initial_level) {
        if (capacity < 1) throw usage_error("sketch capacity must be >= 1");
        if (hash_bits < 1 || hash_bits > 64)
            throw usage_error("sketch hash width must be in [1,64] bits");
        if (initial_level > hash_bits)
            throw usage_error("initial level exceeds hash width");
    }

    // Core path: the key is only materialized when the hash passes the
    // current level filter.
    template <class KeyFn>
    void offer_hashed(uint64_t hash, KeyFn&& make_key) {
        ++total_;
        if (hash & level_mask()) return;
        auto [it, inserted] = buffer_.try_emplace(make_key(), Entry{0, hash});
        ++it->second.count;
        if (inserted && buffer_.size() > capacity_) purge();
    }

    void offer(const NgramKey& key, uint64_t hash) {
        offer_hashed(hash, [&]() -> const NgramKey& { return key; });
    }

    double estimate_distinct() const {
        return std::ldexp(static_cast<double>(buffer_.size()), static_cast<int>(level_));
    }

    double estimate_entropy() const {
        if (total_ == 0 || buffer_.empty())
            throw undefined_estimate_error("entropy estimate undefined on an empty buffer");
        std::map<uint64_t, uint64_t> by_count;
        for (const auto& kv : buffer_) ++by_count[kv.second.count];
        return std::ldexp(entropy_bits_from_histogram(by_count, total_),
                          static_cast<int>(level_));
    }

    // Number of distinct keys whose occurrence count satisfies the predicate,
    // scaled back up by 2^level.
    double estimate_iceberg(const std::function<bool(uint64_t)>& predicate) const {
        uint64_t hits = 0;
        for (const auto& kv : buffer_)
            if (predicate(kv.second.count)) ++hits;
        return std::ldexp(static_cast<double>(hits), static_cast<int>(level_));
    }

    StreamStats stats() const {
        StreamStats s;
        s.distinct_estimate = estimate_distinct();
        s.level = level_;
        s.buffered = buffer_.size();
        s.entropy_estimate = buffer_.empty() ? 0.0 : estimate_entropy();
        s.exact_total = total_;
        return s;
    }

    uint32_t level() const { return level_; }
    uint64_t buffered() const { return buffer_.size(); }
    uint64_t total() const { return total_; }
    uint64_t capacity() const { return capacity_; }
    const std::unordered_map<NgramKey, Entry>& buffer() const { return buffer_; }

private:
    uint64_t level_mask() const {
        return level_ == 64 ? ~0ull : (1ull << level_) - 1;
    }

    void purge() {
        while (buffer_.size() > capacity_) {
            if (level_ == hash_bits_)
                throw level_exhaustion_error(level_, buffer_.size(), estimate_distinct());
            ++level_;
            const uint64_t m = level_mask();
            std::erase_if(buffer_,
                          [m](const auto& kv) { return (kv.second.hash & m) != 0; });
        }
    }

    uint64_t capacity_;
    uint32_t hash_bits_;
    uint32_t level_;
    uint64_t total_ = 0;
    std::unordered_map<NgramKey, Entry> buffer_;
};

// Simultaneous estimation for lengths 1..n in one pass: n sketches fed from
// one chain of extend() updates per stream symbol.
class MultiSketch {
public:
    MultiSketch(const HashFamilyConfig& cfg, uint64_t capacity_each, uint64_t seed,
                GeneratorKind kind = GeneratorKind::default_prng)
        : hasher_(checked(cfg), seed, kind) {
        sketches_.reserve(cfg.n);
        for (uint32_t k = 0; k < cfg.n; ++k)
            sketches_.emplace_back(capacity_each, cfg.width_bits);
    }

    void push(uint32_t symbol) {
        hasher_.absorb(symbol);
        const uint32_t kmax = static_cast<uint32_t>(
            std::min<uint64_t>(sketches_.size(), hasher_.absorbed()));
        uint64_t h = 0;
        for (uint32_t k = 0; k < kmax; ++k) {
            h = hasher_.extend(h, k);
            sketches_[k].offer_hashed(h, [&] { return hasher_.window_key(k + 1); });
        }
    }

    uint32_t max_length() const { return static_cast<uint32_t>(sketches_.size()); }
    GtSketch& sketch_for(uint32_t length) { return sketches_.at(length - 1); }
    const GtSketch& sketch_for(uint32_t length) const { return sketches_.at(length - 1); }

private:
    static const HashFamilyConfig& checked(const HashFamilyConfig& cfg) {
        if (cfg.family != HashFamily::nwise || cfg.unsafe_shared_table)
            throw usage_error("simultaneous estimation requires the nwise family");
        return cfg;
    }

    NgramHasher hasher_;
    std::vector<GtSketch> sketches_;
};

}  // namespace ngramstat
