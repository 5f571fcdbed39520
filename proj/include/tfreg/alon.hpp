#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "tfreg/errors.hpp"
#include "tfreg/gf2k.hpp"
#include "tfreg/graph.hpp"

namespace tfreg {

// Triangle-free Cayley base graph on the group GF(2)^(3k). Vertices are
// triples (a,b,c) of GF(2^k) elements packed as a | b<<k | c<<2k. The
// generator for a pair (w0,w1) is (w0+w1, w0^3+w1^3, w0^5+w1^5), where the
// nonzero field elements are split into two disjoint classes by the top bit
// of w^7: W0 has it clear, W1 has it set.
//
// Why this is triangle-free: three generators summing to zero would give six
// class elements whose first, third, and fifth power sums all vanish. In
// characteristic 2 the even power sums follow by squaring, so via Newton's
// identities e1 = e3 = e5 = 0 and the degree-6 root polynomial is a perfect
// square: the six elements pair up into three doubled values. Each doubled
// value contributes an even count to W1, but the three generators contribute
// exactly three W1 elements. The same pairing argument on four elements makes
// (w0,w1) -> generator injective, so the degree is exactly |W0|*|W1|.
//
// Why the split uses w^7: 7 divides 2^k - 1 exactly when 3 divides k, so for
// the supported k the map w -> w^7 is a bijection of the nonzero elements and
// the classes have sizes 2^(k-1)-1 and 2^(k-1) exactly. Splitting on a linear
// functional of w instead would make every generator's first component carry
// the same top bit, which makes the graph bipartite (an eigenvalue of -D and
// not a single odd cycle); the w^7 indicator is nonlinear, so every
// nontrivial character sum stays small.
//
// k = 4 needs one extra repair: every fifth power lies in the subfield GF(4)
// (since (w^5)^4 = w^20 = w^5), so the plain third coordinate would span only
// 2 of its 4 bits and the Cayley graph would fall apart into 4 components.
// GF(16) under x^4+x+1 has GF(4) = {0,1,6,7}, which the low two bits identify
// uniquely, so for k=4 the third coordinate packs those two bits of w0^5+w1^5
// together with the low two bits of w0^7+w1^7. A vanishing third coordinate
// still forces the fifth power sum to vanish (the projection is injective on
// GF(4)), so the triangle argument is unchanged, and the seventh-power bits
// restore the full 12-dimensional span. The split reads the top bit of w^7
// and the repair its low bits: independent functionals, so no bipartition
// appears either.

struct AlonSpec {
    int k = 0;
    std::int64_t n = 0;            // 2^(3k)
    std::int64_t d = 0;            // 2^(k-1) * (2^(k-1) - 1)
    double lambda_bound = 0.0;     // 9*2^k + 3*2^(k/2) + 1/4
};

inline double alon_lambda_bound(int k) {
    return 9.0 * std::exp2(k) + 3.0 * std::exp2(0.5 * k) + 0.25;
}

inline AlonSpec alon_spec(int k) {
    AlonSpec s;
    s.k = k;
    s.n = std::int64_t{1} << (3 * k);
    const std::int64_t half = std::int64_t{1} << (k - 1);
    s.d = half * (half - 1);
    s.lambda_bound = alon_lambda_bound(k);
    return s;
}

// Sorted, duplicate-free packed generator set. Requires k >= 2 (k = 1 gives
// an empty set) and k not divisible by 3 (otherwise w -> w^7 is not a
// bijection and the class sizes come out wrong).
inline std::vector<std::uint64_t> generator_set(const FieldCtx& ctx) {
    const int k = ctx.k();
    if (k < 2) throw ContractError("generator_set: k must be at least 2");
    if (k % 3 == 0) throw ContractError("generator_set: k divisible by 3 is unsupported");
    const std::uint32_t half = 1u << (k - 1);
    const std::uint32_t order = 2 * half;
    struct Powers {
        FieldElem w, w3, w5, w7;
    };
    std::vector<Powers> w0s, w1s;
    w0s.reserve(half - 1);
    w1s.reserve(half);
    for (std::uint32_t w = 1; w < order; ++w) {
        const Powers p{w, pow(ctx, w, 3), pow(ctx, w, 5), pow(ctx, w, 7)};
        if (p.w7 & half)
            w1s.push_back(p);
        else
            w0s.push_back(p);
    }
    if (w0s.size() != half - 1 || w1s.size() != half)
        throw ContractError("generator_set: class sizes off (construction bug)");
    std::vector<std::uint64_t> gens;
    gens.reserve(static_cast<std::size_t>(half) * (half - 1));
    for (const Powers& p0 : w0s) {
        for (const Powers& p1 : w1s) {
            const std::uint64_t a = p0.w ^ p1.w;
            const std::uint64_t b = p0.w3 ^ p1.w3;
            std::uint64_t c = p0.w5 ^ p1.w5;
            if (k == 4) c = (c & 3u) | (((p0.w7 ^ p1.w7) & 3u) << 2);
            gens.push_back(a | (b << k) | (c << (2 * k)));
        }
    }
    std::sort(gens.begin(), gens.end());
    if (std::adjacent_find(gens.begin(), gens.end()) != gens.end())
        throw ContractError("generator_set: duplicate generator (construction bug)");
    return gens;
}

struct AlonGraph {
    Graph graph;
    AlonSpec spec;
};

// Builds the Cayley graph for a supported k and verifies regularity and
// triangle-freeness before returning. k in {2,4,5,7,8}; larger k would
// exceed the address space this toolkit is sized for.
inline AlonGraph build_alon(int k) {
    if (k < 2 || k > 8 || k % 3 == 0)
        throw ContractError("build_alon: k must be in {2,4,5,7,8}, got " + std::to_string(k));
    const FieldCtx ctx(k);
    const AlonSpec spec = alon_spec(k);
    const std::vector<std::uint64_t> gens = generator_set(ctx);
    if (static_cast<std::int64_t>(gens.size()) != spec.d)
        throw ContractError("build_alon: generator count mismatch");

    const std::int64_t n = spec.n;
    const std::size_t d = gens.size();
    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(n) + 1);
    for (std::int64_t v = 0; v <= n; ++v)
        offsets[static_cast<std::size_t>(v)] = static_cast<std::uint64_t>(v) * d;
    std::vector<Vertex> adj(static_cast<std::size_t>(n) * d);
    for (std::int64_t v = 0; v < n; ++v) {
        Vertex* blk = adj.data() + static_cast<std::size_t>(v) * d;
        for (std::size_t i = 0; i < d; ++i)
            blk[i] = static_cast<Vertex>(static_cast<std::uint64_t>(v) ^ gens[i]);
        std::sort(blk, blk + d);
    }
    Graph g = Graph::from_csr(static_cast<Vertex>(n), std::move(offsets), std::move(adj));

    if (!is_regular(g, spec.d))
        throw ContractError("build_alon: graph is not " + std::to_string(spec.d) + "-regular");
    if (auto t = find_triangle(g))
        throw ContractError("build_alon: triangle found at (" + std::to_string((*t)[0]) + "," +
                            std::to_string((*t)[1]) + "," + std::to_string((*t)[2]) + ")");
    return {std::move(g), spec};
}

// Generator dump format: line 1 is k, then one packed generator per line in
// lowercase hex, ascending.
inline void write_generator_dump(std::ostream& out, int k,
                                 const std::vector<std::uint64_t>& gens) {
    out << k << '\n';
    for (std::uint64_t g : gens) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%llx", static_cast<unsigned long long>(g));
        out << buf << '\n';
    }
}

}  // namespace tfreg
