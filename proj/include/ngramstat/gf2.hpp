#pragma once

#include <bit>
#include <cstdint>

namespace ngramstat::gf2 {

// Polynomials over GF(2) packed into an unsigned integer: bit i is the
// coefficient of x^i. Degree up to 63.

inline int degree(uint64_t p) {
    return static_cast<int>(std::bit_width(p)) - 1;  // degree(0) == -1
}

// Remainder of a divided by p (p != 0).
inline uint64_t mod(uint64_t a, uint64_t p) {
    const int dp = degree(p);
    for (int da = degree(a); da >= dp; da = degree(a))
        a ^= p << (da - dp);
    return a;
}

// a * x mod p for a of degree < degree(p). p carries its leading bit, so the
// conditional XOR clears the overflow.
inline uint64_t mulx_mod(uint64_t a, uint64_t p) {
    const int dp = degree(p);
    a <<= 1;
    if ((a >> dp) & 1) a ^= p;
    return a;
}

// Rotate left within the low `width` bits. This is multiplication by x^k in
// GF(2)[x]/(x^width + 1).
inline uint64_t rotl_bits(uint64_t v, uint32_t k, uint32_t width) {
    const uint64_t mask = width == 64 ? ~0ull : (1ull << width) - 1;
    k %= width;
    if (k == 0) return v & mask;
    return ((v << k) | (v >> (width - k))) & mask;
}

// a * b mod p, carry-less peasant multiplication with eager reduction.
inline uint64_t mulmod(uint64_t a, uint64_t b, uint64_t p) {
    a = mod(a, p);
    b = mod(b, p);
    uint64_t result = 0;
    while (b) {
        if (b & 1) result ^= a;
        b >>= 1;
        a = mulx_mod(a, p);
    }
    return result;
}

// x^k mod p.
inline uint64_t xpow_mod(uint64_t k, uint64_t p) {
    uint64_t r = mod(1, p);
    for (uint64_t i = 0; i < k; ++i) r = mulx_mod(r, p);
    return r;
}

// Exhaustive trial division by every polynomial of degree 1..deg(p)/2.
// Cheap for degrees up to ~32.
inline bool irreducible(uint64_t p) {
    const int d = degree(p);
    if (d < 1) return false;
    if (d == 1) return true;
    const uint64_t limit = 1ull << (d / 2 + 1);
    for (uint64_t q = 2; q < limit; ++q)
        if (mod(p, q) == 0) return false;
    return true;
}

}  // namespace ngramstat::gf2
