#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "gf2.hpp"
#include "random.hpp"
#include "symbol_table.hpp"

namespace ngramstat {

// Randomized hash families for n-grams of 32-bit symbols, all mapping to
// [0, 2^L). Each family supports from-scratch hashing of a full window and a
// sliding update as the window advances by one symbol:
//
//   nwise    h_0(x_j) ^ h_1(x_{j-1}) ^ ... ^ h_{n-1}(x_{j-n+1})
//            one random table per position, counted back from the window end.
//            n-wise independent, but the slide recomputes all n lookups.
//            Supports extend(): growing a k-gram hash into the (k+1)-gram
//            hash ending at the same position with a single extra lookup.
//   cyclic   polynomial hash in GF(2)[x]/(x^L + 1); multiplying by x is an
//            L-bit rotate-left, so the slide is two rotates and two XORs.
//   general  polynomial hash in GF(2)[x]/p(x) with p irreducible of degree L;
//            multiplying by x is a shift plus conditional XOR with p.
//            Pairwise independent.
//   id37     sum of h(x_i) * B^i mod 2^L with the newest symbol at the
//            highest power; B odd so the slide can divide by B via the
//            precomputed inverse mod 2^64.
//   hybrid   window split into `pieces` equal blocks, block b XOR-hashed
//            through its own table; the slide touches only block boundaries.
enum class HashFamily { nwise, cyclic, general, id37, hybrid };

inline const char* family_name(HashFamily f) {
    switch (f) {
        case HashFamily::nwise: return "nwise";
        case HashFamily::cyclic: return "cyclic";
        case HashFamily::general: return "general";
        case HashFamily::id37: return "id37";
        case HashFamily::hybrid: return "hybrid";
    }
    return "?";
}

inline std::optional<HashFamily> family_from_name(std::string_view name) {
    if (name == "nwise") return HashFamily::nwise;
    if (name == "cyclic") return HashFamily::cyclic;
    if (name == "general") return HashFamily::general;
    if (name == "id37") return HashFamily::id37;
    if (name == "hybrid") return HashFamily::hybrid;
    return std::nullopt;
}

// Default irreducible polynomial of degree 19:
// x^19+x^18+x^17+x^16+x^12+x^7+x^6+x^5+x^3+x+1.
inline constexpr uint64_t kDefaultPoly19 = 0xF10EB;

struct HashFamilyConfig {
    HashFamily family = HashFamily::general;
    uint32_t n = 1;            // window length
    uint32_t width_bits = 19;  // L
    uint64_t poly_bits = 0;    // general: bit i = coeff of x^i, leading bit included;
                               // 0 selects the degree-19 default when width_bits == 19
    uint64_t multiplier = 37;  // id37: B, must be odd
    uint32_t pieces = 2;       // hybrid: p, divides n, n >= 2p
    bool unsafe_shared_table = false;  // nwise: one shared table, recursive but
                                       // not pairwise independent; tests only

    uint64_t resolved_poly() const {
        if (poly_bits) return poly_bits;
        if (width_bits == 19) return kDefaultPoly19;
        return 0;
    }

    void validate() const {
        if (n < 1) throw usage_error("window length n must be >= 1");
        if (width_bits < 1 || width_bits > 64)
            throw usage_error("hash width must be in [1,64] bits");
        switch (family) {
            case HashFamily::nwise:
                break;
            case HashFamily::cyclic:
                if (n > width_bits)
                    throw usage_error("cyclic hashing requires n <= hash width");
                break;
            case HashFamily::general: {
                if (width_bits > 63)
                    throw usage_error("general hashing supports widths up to 63 bits");
                if (n > width_bits)
                    throw usage_error("general hashing requires n <= hash width");
                uint64_t p = resolved_poly();
                if (p == 0)
                    throw usage_error("general hashing needs an explicit polynomial "
                                      "for widths other than 19");
                if (gf2::degree(p) != static_cast<int>(width_bits))
                    throw usage_error("polynomial degree must equal the hash width");
                if (!gf2::irreducible(p))
                    throw usage_error("polynomial is reducible; general hashing "
                                      "requires an irreducible modulus");
                break;
            }
            case HashFamily::id37:
                if ((multiplier & 1) == 0)
                    throw usage_error("id37 multiplier must be odd");
                break;
            case HashFamily::hybrid:
                if (pieces < 1 || n % pieces != 0)
                    throw usage_error("hybrid piece count must divide n");
                if (n < 2 * pieces)
                    throw usage_error("hybrid hashing requires n >= 2 * pieces");
                break;
        }
    }
};

class NgramHasher {
public:
    NgramHasher(const HashFamilyConfig& cfg, uint64_t seed,
                GeneratorKind kind = GeneratorKind::default_prng)
        : cfg_(cfg), ring_(cfg.n, 0) {
        cfg_.validate();
        mask_ = cfg_.width_bits == 64 ? ~0ull : (1ull << cfg_.width_bits) - 1;
        std::size_t count = 1;
        if (cfg_.family == HashFamily::nwise && !cfg_.unsafe_shared_table)
            count = cfg_.n;
        else if (cfg_.family == HashFamily::hybrid)
            count = cfg_.pieces;
        RandomSource root(seed, kind);
        tables_.reserve(count);
        for (std::size_t i = 0; i < count; ++i)
            tables_.emplace_back(root.split(i), cfg_.width_bits);

        switch (cfg_.family) {
            case HashFamily::cyclic:
                rot_n_ = cfg_.n % cfg_.width_bits;
                break;
            case HashFamily::general:
                poly_ = cfg_.resolved_poly();
                xn_mod_poly_ = gf2::xpow_mod(cfg_.n, poly_);
                break;
            case HashFamily::id37: {
                mult_inv_ = odd_inverse(cfg_.multiplier);
                mult_pow_n1_ = 1;
                for (uint32_t i = 0; i + 1 < cfg_.n; ++i) mult_pow_n1_ *= cfg_.multiplier;
                break;
            }
            default:
                break;
        }
    }

    const HashFamilyConfig& config() const { return cfg_; }
    uint64_t mask() const { return mask_; }
    bool warmed() const { return warmed_; }
    uint64_t absorbed() const { return seen_; }

    // The per-position (nwise), per-piece (hybrid) or single symbol table.
    SymbolTable& table(std::size_t index) { return tables_.at(index); }
    std::size_t table_count() const { return tables_.size(); }

    // From-scratch hash of a window. The nwise family also accepts shorter
    // grams (position tables indexed back from the gram's end), which is the
    // reference route for extend().
    uint64_t hash_full(std::span<const uint32_t> gram) {
        const uint32_t n = cfg_.n;
        if (cfg_.family == HashFamily::nwise && !cfg_.unsafe_shared_table) {
            if (gram.empty() || gram.size() > n)
                throw usage_error("nwise hash_full takes between 1 and n symbols");
            uint64_t acc = 0;
            for (std::size_t i = 0; i < gram.size(); ++i)
                acc ^= tables_[i].lookup(gram[gram.size() - 1 - i]);
            return acc;
        }
        if (gram.size() != n)
            throw usage_error("hash_full window length does not match n");
        uint64_t acc = 0;
        switch (cfg_.family) {
            case HashFamily::nwise:  // shared-table variant
                for (uint32_t s : gram) acc ^= tables_[0].lookup(s);
                break;
            case HashFamily::cyclic:
                for (uint32_t s : gram) acc = rotl1(acc) ^ tables_[0].lookup(s);
                break;
            case HashFamily::general:
                for (uint32_t s : gram)
                    acc = gf2::mulx_mod(acc, poly_) ^ tables_[0].lookup(s);
                break;
            case HashFamily::id37:
                for (std::size_t i = gram.size(); i-- > 0;)
                    acc = acc * cfg_.multiplier + tables_[0].lookup(gram[i]);
                acc &= mask_;
                break;
            case HashFamily::hybrid: {
                const uint32_t block = n / cfg_.pieces;
                for (uint32_t i = 0; i < n; ++i)
                    acc ^= tables_[i / block].lookup(gram[i]);
                break;
            }
        }
        return acc;
    }

    // Fill the window with the first n symbols and compute the initial hash.
    uint64_t warm_up(std::span<const uint32_t> first) {
        if (seen_ != 0) throw usage_error("warm_up requires a fresh hasher");
        if (first.size() != cfg_.n)
            throw usage_error("warm_up needs exactly n symbols");
        for (uint32_t s : first) push(s);
        current_ = hash_full(first);
        warmed_ = true;
        return current_;
    }

    // Advance the window by one symbol and return the hash of the new window.
    uint64_t slide(uint32_t incoming) {
        if (!warmed_) throw usage_error("slide called before warm_up");
        const uint32_t n = cfg_.n;
        const uint32_t out = symbol_back(n - 1);
        switch (cfg_.family) {
            case HashFamily::nwise:
                if (cfg_.unsafe_shared_table) {
                    current_ ^= tables_[0].lookup(out) ^ tables_[0].lookup(incoming);
                    push(incoming);
                } else {
                    // not recursive: recompute all n position lookups
                    push(incoming);
                    uint64_t acc = 0;
                    for (uint32_t i = 0; i < n; ++i)
                        acc ^= tables_[i].lookup(symbol_back(i));
                    current_ = acc;
                }
                return current_;
            case HashFamily::cyclic:
                current_ = rotl1(current_) ^ rotl(tables_[0].lookup(out), rot_n_) ^
                           tables_[0].lookup(incoming);
                break;
            case HashFamily::general:
                current_ = gf2::mulx_mod(current_, poly_) ^
                           gf2::mulmod(tables_[0].lookup(out), xn_mod_poly_, poly_) ^
                           tables_[0].lookup(incoming);
                break;
            case HashFamily::id37:
                current_ = ((current_ - tables_[0].lookup(out)) * mult_inv_ +
                            mult_pow_n1_ * tables_[0].lookup(incoming)) &
                           mask_;
                break;
            case HashFamily::hybrid: {
                const uint32_t block = n / cfg_.pieces;
                uint64_t acc = current_ ^ tables_[0].lookup(out);
                for (uint32_t b = 1; b < cfg_.pieces; ++b) {
                    // boundary symbol crossing from block b into block b-1
                    uint32_t s = symbol_back(n - b * block - 1);
                    acc ^= tables_[b].lookup(s) ^ tables_[b - 1].lookup(s);
                }
                current_ = acc ^ tables_[cfg_.pieces - 1].lookup(incoming);
                break;
            }
        }
        push(incoming);
        return current_;
    }

    // Window-only update for semi-recursive chaining (no hash maintained).
    void absorb(uint32_t symbol) {
        push(symbol);
        warmed_ = false;
    }

    // Hash of the (k+1)-gram ending at the newest symbol, given the hash of
    // the k-gram ending there (k = 0 starts the chain with hash 0).
    uint64_t extend(uint64_t hash_k, uint32_t k) {
        if (cfg_.family != HashFamily::nwise || cfg_.unsafe_shared_table)
            throw usage_error("extend requires the position-table nwise family");
        if (k >= cfg_.n) throw usage_error("extend beyond configured n");
        if (seen_ < k + 1) throw usage_error("extend before k+1 symbols absorbed");
        return hash_k ^ tables_[k].lookup(symbol_back(k));
    }

    uint64_t current() const {
        if (!warmed_) throw usage_error("no current hash before warm_up");
        return current_;
    }

    // Symbol `offset` positions back from the newest (offset 0 = newest).
    uint32_t symbol_back(uint32_t offset) const {
        const uint32_t n = cfg_.n;
        return ring_[(ring_pos_ + n - 1 - offset % n) % n];
    }

    // The last `len` window symbols, oldest first (len = 0 means the full window).
    std::u32string window_key(uint32_t len = 0) const {
        if (len == 0) len = cfg_.n;
        if (len > cfg_.n) throw usage_error("window_key length exceeds n");
        std::u32string key(len, 0);
        for (uint32_t i = 0; i < len; ++i)
            key[len - 1 - i] = static_cast<char32_t>(symbol_back(i));
        return key;
    }

private:
    void push(uint32_t symbol) {
        ring_[ring_pos_] = symbol;
        ring_pos_ = (ring_pos_ + 1) % cfg_.n;
        ++seen_;
    }

    uint64_t rotl(uint64_t v, uint32_t k) const {
        return gf2::rotl_bits(v, k, cfg_.width_bits);
    }
    uint64_t rotl1(uint64_t v) const { return rotl(v, 1); }

    // Inverse of an odd b modulo 2^64 by Newton iteration.
    static uint64_t odd_inverse(uint64_t b) {
        uint64_t x = b;  // correct mod 2^3
        for (int i = 0; i < 5; ++i) x *= 2 - b * x;
        return x;
    }

    HashFamilyConfig cfg_;
    std::vector<SymbolTable> tables_;
    std::vector<uint32_t> ring_;
    std::size_t ring_pos_ = 0;
    uint64_t seen_ = 0;
    uint64_t current_ = 0;
    bool warmed_ = false;
    uint64_t mask_ = 0;
    uint64_t poly_ = 0;
    uint32_t rot_n_ = 0;
    uint64_t xn_mod_poly_ = 0;
    uint64_t mult_inv_ = 0;
    uint64_t mult_pow_n1_ = 0;
};

}  // namespace ngramstat
