#pragma once

#include <cstdint>
#include <unordered_map>

#include "errors.hpp"
#include "random.hpp"

namespace ngramstat {

// Lazily populated random lookup table: the first lookup of a symbol draws a
// fresh uniform L-bit value from the seeded source, later lookups return the
// same value. The alphabet does not need to be known in advance.
//
// Values depend on the order in which new symbols are first seen, so two
// tables agree only after identical lookup sequences.
class SymbolTable {
public:
    SymbolTable(uint64_t seed, uint32_t width_bits,
                GeneratorKind kind = GeneratorKind::default_prng)
        : SymbolTable(RandomSource(seed, kind), width_bits) {}

    SymbolTable(RandomSource source, uint32_t width_bits)
        : source_(source), width_(width_bits) {
        if (width_bits < 1 || width_bits > 64)
            throw usage_error("symbol table width must be in [1,64] bits");
        mask_ = width_bits == 64 ? ~0ull : (1ull << width_bits) - 1;
    }

    uint64_t lookup(uint32_t symbol) {
        auto it = entries_.find(symbol);
        if (it != entries_.end()) return it->second;
        uint64_t value = source_.next() & mask_;
        entries_.emplace(symbol, value);
        return value;
    }

    uint32_t width_bits() const { return width_; }
    uint64_t mask() const { return mask_; }
    std::size_t size() const { return entries_.size(); }

private:
    RandomSource source_;
    uint32_t width_;
    uint64_t mask_ = 0;
    std::unordered_map<uint32_t, uint64_t> entries_;
};

}  // namespace ngramstat
