#pragma once

#include <cstdint>
#include <string>

#include "tfreg/errors.hpp"

namespace tfreg {

// Field elements are polynomials over GF(2): bit i holds the coefficient of
// x^i. Supported field sizes: 1 <= k <= 16, so an element fits in 16 bits
// and a modulus in 17.
using FieldElem = std::uint32_t;

namespace poly2 {

inline int degree(std::uint32_t p) {
    int d = -1;
    while (p) {
        ++d;
        p >>= 1;
    }
    return d;
}

// Remainder of a mod m in GF(2)[x].
inline std::uint32_t mod(std::uint32_t a, std::uint32_t m) {
    const int dm = degree(m);
    for (int da = degree(a); da >= dm; da = degree(a))
        a ^= m << (da - dm);
    return a;
}

// Carry-less product (no reduction).
inline std::uint64_t mul_raw(std::uint32_t a, std::uint32_t b) {
    std::uint64_t r = 0;
    for (int i = 0; b >> i; ++i)
        if ((b >> i) & 1u) r ^= static_cast<std::uint64_t>(a) << i;
    return r;
}

// Trial division by every polynomial of degree 1..deg(m)/2.
inline bool irreducible(std::uint32_t m) {
    const int dm = degree(m);
    if (dm < 1) return false;
    if (dm == 1) return true;
    if ((m & 1u) == 0) return false;  // divisible by x
    for (std::uint32_t q = 2; degree(q) <= dm / 2; ++q)
        if (mod(m, q) == 0) return false;
    return true;
}

}  // namespace poly2

// GF(2^k) with the lexicographically smallest irreducible modulus of degree
// k (smallest when read as an integer bit pattern).
class FieldCtx {
public:
    explicit FieldCtx(int k) : k_(k) {
        if (k < 1 || k > 16)
            throw ContractError("FieldCtx: k must be in [1,16], got " + std::to_string(k));
        const std::uint32_t lo = 1u << k;
        const std::uint32_t hi = lo << 1;
        for (std::uint32_t m = lo + 1; m < hi; m += 2) {
            if (poly2::irreducible(m)) {
                modulus_ = m;
                return;
            }
        }
        throw ContractError("FieldCtx: no irreducible modulus found");  // unreachable
    }

    int k() const noexcept { return k_; }
    std::uint32_t modulus() const noexcept { return modulus_; }
    std::uint32_t order() const noexcept { return 1u << k_; }
    bool valid(FieldElem a) const noexcept { return a < order(); }

private:
    int k_;
    std::uint32_t modulus_ = 0;
};

inline FieldCtx make_field(int k) { return FieldCtx(k); }

inline FieldElem add(const FieldCtx&, FieldElem a, FieldElem b) { return a ^ b; }

// Shift-and-xor product with eager reduction; operands stay below 2^(k+1).
inline FieldElem mul(const FieldCtx& ctx, FieldElem a, FieldElem b) {
    const std::uint32_t top = ctx.order();
    std::uint32_t r = 0;
    while (b) {
        if (b & 1u) r ^= a;
        b >>= 1;
        a <<= 1;
        if (a & top) a ^= ctx.modulus();
    }
    return r;
}

// Square-and-multiply. pow(ctx, 0, 0) == 1 by convention.
inline FieldElem pow(const FieldCtx& ctx, FieldElem a, std::uint64_t e) {
    FieldElem r = 1;
    while (e) {
        if (e & 1u) r = mul(ctx, r, a);
        a = mul(ctx, a, a);
        e >>= 1;
    }
    return r;
}

}  // namespace tfreg
