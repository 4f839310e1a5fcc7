#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <unordered_map>

#include "errors.hpp"
#include "gt_sketch.hpp"
#include "stream.hpp"

namespace ngramstat {

// Ground truth by full tabulation, keyed on the raw symbol window. Desk-scale
// tool: refuses inputs whose distinct-key table would exceed `max_keys`.
struct ExactStats {
    uint64_t distinct = 0;
    uint64_t total = 0;  // N = stream length - n + 1
    double entropy_bits = 0.0;
    std::unordered_map<NgramKey, uint64_t> counts;

    uint64_t iceberg(const std::function<bool(uint64_t)>& predicate) const {
        uint64_t hits = 0;
        for (const auto& kv : counts)
            if (predicate(kv.second)) ++hits;
        return hits;
    }
};

inline ExactStats exact_stats(SymbolStream& stream, uint32_t n,
                              uint64_t max_keys = 1ull << 26) {
    if (n < 1) throw usage_error("n must be >= 1");
    ExactStats stats;
    std::vector<uint32_t> ring(n, 0);
    std::size_t pos = 0;
    uint64_t seen = 0;
    NgramKey key(n, 0);
    while (auto s = stream.next()) {
        ring[pos] = *s;
        pos = (pos + 1) % n;
        ++seen;
        if (seen < n) continue;
        for (uint32_t i = 0; i < n; ++i)
            key[i] = static_cast<char32_t>(ring[(pos + i) % n]);
        ++stats.counts[key];
        ++stats.total;
        if (stats.counts.size() > max_keys) throw memory_guard_error(max_keys);
    }
    if (stats.total == 0)
        throw empty_input_error("stream shorter than one n-gram window");
    stats.distinct = stats.counts.size();
    std::map<uint64_t, uint64_t> by_count;
    for (const auto& kv : stats.counts) ++by_count[kv.second];
    stats.entropy_bits = entropy_bits_from_histogram(by_count, stats.total);
    return stats;
}

inline ExactStats exact_stats(std::span<const uint32_t> symbols, uint32_t n,
                              uint64_t max_keys = 1ull << 26) {
    MemoryStream stream(std::vector<uint32_t>(symbols.begin(), symbols.end()));
    return exact_stats(stream, n, max_keys);
}

}  // namespace ngramstat
