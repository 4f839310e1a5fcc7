#pragma once

#include <cstdint>
#include <random>

namespace ngramstat {

inline constexpr uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

// splitmix64 step (Steele, Lea, Flood: "Fast splittable pseudorandom number
// generators"). Pure integer arithmetic, so the sequence for a given seed is
// identical on every platform.
inline uint64_t splitmix64_next(uint64_t& state) {
    state += kGoldenGamma;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// One-shot mixer used to derive per-run seeds from (base seed, run index).
inline uint64_t mix_seed(uint64_t base, uint64_t index) {
    uint64_t s = base + kGoldenGamma * (index + 1);
    return splitmix64_next(s);
}

enum class GeneratorKind {
    default_prng,         // seeded splitmix64, reproducible
    os_entropy_snapshot,  // seed drawn once from the OS, then splitmix64
};

class RandomSource {
public:
    explicit RandomSource(uint64_t seed, GeneratorKind kind = GeneratorKind::default_prng)
        : kind_(kind),
          seed_(kind == GeneratorKind::os_entropy_snapshot ? entropy_seed() : seed),
          state_(seed_) {}

    uint64_t next() { return splitmix64_next(state_); }

    // Uniform in [0,1) with 53 random bits.
    double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    uint64_t seed() const { return seed_; }
    GeneratorKind kind() const { return kind_; }

    // Independent child source: seed XOR a per-index constant. Children of an
    // entropy-snapshot source derive deterministically from the snapshot.
    RandomSource split(uint64_t index) const {
        return RandomSource(seed_ ^ (kGoldenGamma * (index + 1)));
    }

private:
    static uint64_t entropy_seed() {
        std::random_device rd;
        return (static_cast<uint64_t>(rd()) << 32) ^ rd();
    }

    GeneratorKind kind_;
    uint64_t seed_;
    uint64_t state_;
};

}  // namespace ngramstat
