#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <ostream>
#include <string>
#include <unordered_set>
#include <vector>

#include "tfreg/errors.hpp"
#include "tfreg/graph.hpp"
#include "tfreg/maxflow.hpp"
#include "tfreg/rng.hpp"

namespace tfreg {

// A 5-cycle v0-v1-v2-v3-v4-v0 in the host graph with one designated vertex
// (the anchor). Splitting its edges around the anchor gives the two halves
// of the degree-adjusting pair: R_C = the 2 edges not touching the anchor,
// S_C = the other 3 (a path through the anchor plus the opposite edge).
// Swapping S_C for R_C lowers exactly the anchor's degree, by exactly 2.
struct Pentagon {
    std::array<Vertex, 5> cycle{};
    Vertex anchor = -1;  // -1 until assigned
};

inline int anchor_pos(const Pentagon& p) {
    for (int i = 0; i < 5; ++i)
        if (p.cycle[static_cast<std::size_t>(i)] == p.anchor) return i;
    throw ContractError("Pentagon: anchor is not a cycle vertex");
}

inline std::array<Edge, 2> pentagon_r_edges(const Pentagon& p) {
    const int a = anchor_pos(p);
    auto at = [&](int i) { return p.cycle[static_cast<std::size_t>((a + i) % 5)]; };
    return {Edge{at(1), at(2)}, Edge{at(3), at(4)}};
}

inline std::array<Edge, 3> pentagon_s_edges(const Pentagon& p) {
    const int a = anchor_pos(p);
    auto at = [&](int i) { return p.cycle[static_cast<std::size_t>((a + i) % 5)]; };
    return {Edge{at(0), at(1)}, Edge{at(4), at(0)}, Edge{at(2), at(3)}};
}

struct SpongeConfig {
    std::int64_t per_vertex_min = 1;    // anchors required per vertex
    std::int64_t pent_quota = 5;        // mining target: pentagons through each
                                        // vertex before anchor assignment (5x
                                        // per_vertex_min makes the assignment
                                        // feasible for any pentagon placement)
    std::int64_t pent_floor = 5;        // hard minimum; between floor and quota
                                        // the anchor max-flow is the feasibility
                                        // arbiter
    std::int64_t rs_maxdeg = 64;        // hard cap on the degree of R union S
    std::int64_t phase_maxdeg = 32;     // support-role degree cap during mining
    std::int64_t phase_edge_factor = 15;  // |E(R union S)| <= factor * n
    std::int64_t bundle_target = 3;     // pentagons requested per mining call
    std::int64_t stall_retry_cap = 200;  // full passes before declaring a stall
};

inline void validate_sponge_config(const SpongeConfig& cfg) {
    if (cfg.per_vertex_min <= 0 || cfg.pent_quota <= 0 || cfg.pent_floor <= 0 ||
        cfg.rs_maxdeg <= 0 || cfg.phase_maxdeg <= 0 || cfg.phase_edge_factor <= 0 ||
        cfg.bundle_target <= 0 || cfg.stall_retry_cap <= 0)
        throw ContractError("SpongeConfig: all fields must be positive");
    if (cfg.rs_maxdeg < 2 * cfg.phase_maxdeg)
        throw ContractError("SpongeConfig: rs_maxdeg must be at least 2*phase_maxdeg");
    if (cfg.pent_quota < cfg.pent_floor)
        throw ContractError("SpongeConfig: pent_quota below pent_floor");
    if (cfg.pent_floor < cfg.per_vertex_min)
        throw ContractError("SpongeConfig: pent_floor below per_vertex_min");
}

struct Sponge {
    Graph r;
    Graph s;
    std::vector<Pentagon> pentagons;
    // collections[v] = indices of pentagons anchored at v, ascending
    std::vector<std::vector<std::int32_t>> collections;
    SpongeConfig config;
};

namespace detail {

struct EdgeUse {
    std::unordered_set<std::uint64_t> used;

    static std::uint64_t key(Vertex u, Vertex v) {
        if (u > v) std::swap(u, v);
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
               static_cast<std::uint32_t>(v);
    }
    bool is_used(Vertex u, Vertex v) const { return used.count(key(u, v)) != 0; }
    void mark(Vertex u, Vertex v) { used.insert(key(u, v)); }
};

struct MineScratch {
    std::vector<int> used_stamp;  // vertices consumed by this call's pentagons
    std::vector<int> nb_stamp;    // per-pair marking of usable N(b) vertices
    int call_epoch = 0;
    int pair_epoch = 0;

    explicit MineScratch(std::size_t n) : used_stamp(n, 0), nb_stamp(n, 0) {}
};

// Core pentagon search around hub v: walk admissible neighbor pairs (a,b) of
// v, lightest load first, and look for an edge (x,y) with x adjacent to a and
// y adjacent to b, all four support vertices distinct, admissible, and not
// yet consumed by this call. Among the (x,y) candidates of the first viable
// pair the lightest (by load(x)+load(y), ties broken lexicographically) wins,
// which spreads the packing instead of piling onto low ids. Accepted
// pentagons share only v pairwise, so they are automatically edge-disjoint
// within the call.
template <typename EdgeOk, typename SupportOk, typename LoadFn>
std::vector<Pentagon> mine_bundle(const Graph& g, Vertex v, std::int64_t t,
                                  const EdgeOk& edge_ok, const SupportOk& support_ok,
                                  const LoadFn& load, MineScratch& scr) {
    std::vector<Pentagon> out;
    if (t <= 0) return out;
    const int ce = ++scr.call_epoch;
    std::vector<Vertex> cand;
    for (Vertex u : g.neighbors(v))
        if (support_ok(u) && edge_ok(v, u)) cand.push_back(u);
    std::stable_sort(cand.begin(), cand.end(),
                     [&](Vertex p, Vertex q) { return load(p) < load(q); });
    for (std::size_t i = 0; i < cand.size(); ++i) {
        const Vertex a = cand[i];
        if (scr.used_stamp[static_cast<std::size_t>(a)] == ce) continue;
        bool a_used = false;
        for (std::size_t j = i + 1; j < cand.size() && !a_used; ++j) {
            const Vertex b = cand[j];
            if (scr.used_stamp[static_cast<std::size_t>(b)] == ce) continue;
            const int pe = ++scr.pair_epoch;
            int marked = 0;
            for (Vertex y : g.neighbors(b)) {
                if (y == v || y == a) continue;
                if (scr.used_stamp[static_cast<std::size_t>(y)] == ce) continue;
                if (!support_ok(y) || !edge_ok(b, y)) continue;
                scr.nb_stamp[static_cast<std::size_t>(y)] = pe;
                ++marked;
            }
            if (!marked) continue;
            Vertex bx = -1, by = -1;
            std::int64_t best = 0;
            for (Vertex x : g.neighbors(a)) {
                if (x == v || x == b) continue;
                if (scr.used_stamp[static_cast<std::size_t>(x)] == ce) continue;
                if (!support_ok(x) || !edge_ok(a, x)) continue;
                for (Vertex y : g.neighbors(x)) {
                    if (scr.nb_stamp[static_cast<std::size_t>(y)] != pe || !edge_ok(x, y))
                        continue;
                    const std::int64_t w = load(x) + load(y);
                    if (bx < 0 || w < best ||
                        (w == best && (x < bx || (x == bx && y < by)))) {
                        bx = x;
                        by = y;
                        best = w;
                    }
                }
            }
            if (bx >= 0) {
                out.push_back(Pentagon{{v, a, bx, by, b}, -1});
                scr.used_stamp[static_cast<std::size_t>(a)] = ce;
                scr.used_stamp[static_cast<std::size_t>(b)] = ce;
                scr.used_stamp[static_cast<std::size_t>(bx)] = ce;
                scr.used_stamp[static_cast<std::size_t>(by)] = ce;
                a_used = true;
            }
        }
        if (static_cast<std::int64_t>(out.size()) >= t) break;
    }
    return out;
}

}  // namespace detail

// Mines up to t pentagons through v inside g[x + {v}], pairwise sharing only
// v. Never fabricates: may return fewer than t.
inline std::vector<Pentagon> c5_bundle(const Graph& g, const VertexSet& x, Vertex v,
                                       std::int64_t t) {
    validate_vertex_set(g.vertex_count(), x, "c5_bundle");
    if (v < 0 || v >= g.vertex_count())
        throw ContractError("c5_bundle: hub vertex out of range");
    if (t < 0) throw ContractError("c5_bundle: negative bundle size");
    std::vector<char> in_x(static_cast<std::size_t>(g.vertex_count()), 0);
    for (Vertex u : x) in_x[static_cast<std::size_t>(u)] = 1;
    in_x[static_cast<std::size_t>(v)] = 0;
    detail::MineScratch scr(static_cast<std::size_t>(g.vertex_count()));
    return detail::mine_bundle(
        g, v, t, [](Vertex, Vertex) { return true; },
        [&](Vertex u) { return in_x[static_cast<std::size_t>(u)] != 0; },
        [](Vertex) { return std::int64_t{0}; }, scr);
}

// Builds the degree-adjusting pair (R, S) on a triangle-free graph: mines
// edge-disjoint pentagons until every vertex lies in at least cfg.pent_quota
// of them (greedy repair passes with support-degree caps), then assigns each
// vertex at least cfg.per_vertex_min anchors by max-flow, spreading leftover
// pentagons by seeded balancing, and finally splits every pentagon into its
// R_C / S_C halves.
inline Sponge build_sponge(const Graph& g, const SpongeConfig& cfg, std::uint64_t seed) {
    validate_sponge_config(cfg);
    const Vertex n = g.vertex_count();
    const std::size_t sn = static_cast<std::size_t>(n);
    if (n == 0) throw ContractError("build_sponge: empty graph");

    detail::EdgeUse used;
    detail::MineScratch scr(sn);
    std::vector<std::int64_t> df(sn, 0);        // degree in R union S so far
    std::vector<std::int64_t> pent_cnt(sn, 0);  // pentagons through each vertex
    std::vector<Pentagon> pents;
    const std::int64_t edge_budget = cfg.phase_edge_factor * static_cast<std::int64_t>(n);

    auto edge_ok = [&](Vertex a, Vertex b) { return !used.is_used(a, b); };
    // The packing must end up nearly uniform: pent_quota per vertex uses up
    // 2*pent_quota of everyone's edges, and phase_maxdeg is only slightly
    // above that, so any vertex that overshoots early starves a neighbor
    // later. Tier-1 supports therefore stop at the quota itself and keep
    // enough free edges to finish their own quota; tier 2 (entered once no
    // tier-1 round makes progress, and sticky, since admission only ever
    // tightens) lets supports run up to the phase cap to serve the leftovers.
    auto support_t1 = [&](Vertex u) {
        const std::size_t su = static_cast<std::size_t>(u);
        if (pent_cnt[su] + 1 > cfg.pent_quota) return false;
        if (df[su] + 2 > cfg.phase_maxdeg) return false;
        std::int64_t free_edges = g.degree(u) - df[su] - 2;
        std::int64_t still_needed =
            std::max<std::int64_t>(0, cfg.pent_quota - pent_cnt[su] - 1);
        return free_edges >= 2 * still_needed;
    };
    auto support_t2 = [&](Vertex u) {
        return df[static_cast<std::size_t>(u)] + 2 <= cfg.phase_maxdeg;
    };
    auto load = [&](Vertex u) { return df[static_cast<std::size_t>(u)]; };

    auto accept = [&](const Pentagon& p) {
        for (int e = 0; e < 5; ++e) {
            Vertex a = p.cycle[static_cast<std::size_t>(e)];
            Vertex b = p.cycle[static_cast<std::size_t>((e + 1) % 5)];
            used.mark(a, b);
            ++df[static_cast<std::size_t>(a)];
            ++df[static_cast<std::size_t>(b)];
        }
        for (Vertex u : p.cycle) ++pent_cnt[static_cast<std::size_t>(u)];
        pents.push_back(p);
        if (static_cast<std::int64_t>(pents.size()) * 5 > edge_budget)
            throw InfeasibleError("sponge",
                                  "edge budget exceeded: " + std::to_string(pents.size() * 5) +
                                      " pentagon edges > " + std::to_string(edge_budget));
    };

    // rounds: serve the most deficient vertices first, one bundle request per
    // vertex per round, so early ids cannot starve late ones
    std::vector<Vertex> order;
    order.reserve(sn);
    int tier = 1;
    for (std::int64_t pass = 0;; ++pass) {
        order.clear();
        for (Vertex v = 0; v < n; ++v)
            if (pent_cnt[static_cast<std::size_t>(v)] < cfg.pent_quota) order.push_back(v);
        if (order.empty()) break;
        std::stable_sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
            return pent_cnt[static_cast<std::size_t>(a)] < pent_cnt[static_cast<std::size_t>(b)];
        });
        bool progressed = false;
        for (Vertex v : order) {
            const std::int64_t deficit =
                cfg.pent_quota - pent_cnt[static_cast<std::size_t>(v)];
            if (deficit <= 0) continue;
            const std::int64_t t = std::min(cfg.bundle_target, deficit);
            auto got = tier == 1
                           ? detail::mine_bundle(g, v, t, edge_ok, support_t1, load, scr)
                           : detail::mine_bundle(g, v, t, edge_ok, support_t2, load, scr);
            for (const auto& p : got) accept(p);
            if (!got.empty()) progressed = true;
        }
        if (!progressed) {
            if (tier == 1) {
                tier = 2;
                continue;
            }
            // every pentagon through a vertex needs two of its unused edges
            // on a completable pair, so a stalled vertex is dead in the
            // residual graph no matter the search order. Below the floor
            // that sinks the attempt; at or above it the anchor flow is the
            // real test, provided total supply covers the anchor demand.
            const Vertex worst = order[0];
            if (pent_cnt[static_cast<std::size_t>(worst)] < cfg.pent_floor)
                throw InfeasibleError(
                    "sponge", "pentagon floor stalled at vertex " + std::to_string(worst) +
                                  " with pentagon-degree " +
                                  std::to_string(pent_cnt[static_cast<std::size_t>(worst)]) +
                                  " of " + std::to_string(cfg.pent_floor) + " required");
            if (static_cast<std::int64_t>(pents.size()) < cfg.per_vertex_min * n)
                throw InfeasibleError(
                    "sponge", "pentagon supply " + std::to_string(pents.size()) +
                                  " cannot cover anchor demand " +
                                  std::to_string(cfg.per_vertex_min * n));
            break;
        }
        if (pass >= cfg.stall_retry_cap)
            throw InfeasibleError("sponge", "pentagon mining exceeded " +
                                                std::to_string(cfg.stall_retry_cap) +
                                                " passes without meeting quotas");
    }

    for (Vertex v = 0; v < n; ++v)
        if (df[static_cast<std::size_t>(v)] > cfg.rs_maxdeg)
            throw InfeasibleError("sponge", "degree of R union S at vertex " + std::to_string(v) +
                                                " is " + std::to_string(df[static_cast<std::size_t>(v)]) +
                                                ", exceeds rs_maxdeg " +
                                                std::to_string(cfg.rs_maxdeg));

    // anchor assignment: every vertex needs per_vertex_min anchored
    // pentagons; a pentagon can anchor only one of its 5 vertices
    const int pcount = static_cast<int>(pents.size());
    MaxFlow flow(2 + pcount + n);
    const int src = 0;
    const int sink = 1 + pcount + n;
    auto pent_node = [&](int i) { return 1 + i; };
    auto vert_node = [&](Vertex v) { return 1 + pcount + v; };
    std::vector<int> pent_arc(static_cast<std::size_t>(pcount));
    std::vector<std::array<int, 5>> choice_arc(static_cast<std::size_t>(pcount));
    for (int i = 0; i < pcount; ++i) {
        pent_arc[static_cast<std::size_t>(i)] = flow.add_edge(src, pent_node(i), 1);
        for (int c = 0; c < 5; ++c)
            choice_arc[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)] =
                flow.add_edge(pent_node(i), vert_node(pents[static_cast<std::size_t>(i)].cycle[static_cast<std::size_t>(c)]), 1);
    }
    std::vector<int> sink_arc(sn);
    for (Vertex v = 0; v < n; ++v)
        sink_arc[static_cast<std::size_t>(v)] = flow.add_edge(vert_node(v), sink, cfg.per_vertex_min);
    const std::int64_t need = static_cast<std::int64_t>(n) * cfg.per_vertex_min;
    const std::int64_t got = flow.run(src, sink);
    if (got < need) {
        Vertex worst = -1;
        std::int64_t worst_got = 0;
        for (Vertex v = 0; v < n; ++v) {
            std::int64_t fv = flow.flow_on(sink_arc[static_cast<std::size_t>(v)]);
            if (fv < cfg.per_vertex_min) {
                worst = v;
                worst_got = fv;
                break;
            }
        }
        throw InfeasibleError("sponge", "anchor quota infeasible at vertex " +
                                            std::to_string(worst) + " (" +
                                            std::to_string(worst_got) + " of " +
                                            std::to_string(cfg.per_vertex_min) +
                                            " anchors achievable)");
    }

    std::vector<std::int64_t> anchors_at(sn, 0);
    std::vector<int> leftovers;
    for (int i = 0; i < pcount; ++i) {
        if (flow.flow_on(pent_arc[static_cast<std::size_t>(i)]) == 0) {
            leftovers.push_back(i);
            continue;
        }
        for (int c = 0; c < 5; ++c) {
            if (flow.flow_on(choice_arc[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)]) > 0) {
                Vertex a = pents[static_cast<std::size_t>(i)].cycle[static_cast<std::size_t>(c)];
                pents[static_cast<std::size_t>(i)].anchor = a;
                ++anchors_at[static_cast<std::size_t>(a)];
                break;
            }
        }
    }
    // leftovers go to their currently least-anchored cycle vertex; seeded
    // shuffle decides the processing order, ids break remaining ties
    std::mt19937_64 rng(splitmix64(seed));
    shuffle_vec(leftovers, rng);
    for (int i : leftovers) {
        Pentagon& p = pents[static_cast<std::size_t>(i)];
        Vertex best = p.cycle[0];
        for (Vertex cand : p.cycle) {
            if (anchors_at[static_cast<std::size_t>(cand)] < anchors_at[static_cast<std::size_t>(best)] ||
                (anchors_at[static_cast<std::size_t>(cand)] == anchors_at[static_cast<std::size_t>(best)] &&
                 cand < best))
                best = cand;
        }
        p.anchor = best;
        ++anchors_at[static_cast<std::size_t>(best)];
    }

    Sponge sp;
    sp.config = cfg;
    sp.pentagons = std::move(pents);
    sp.collections.assign(sn, {});
    std::vector<Edge> r_edges, s_edges;
    r_edges.reserve(static_cast<std::size_t>(pcount) * 2);
    s_edges.reserve(static_cast<std::size_t>(pcount) * 3);
    for (int i = 0; i < pcount; ++i) {
        const Pentagon& p = sp.pentagons[static_cast<std::size_t>(i)];
        sp.collections[static_cast<std::size_t>(p.anchor)].push_back(i);
        for (const Edge& e : pentagon_r_edges(p)) r_edges.push_back(e);
        for (const Edge& e : pentagon_s_edges(p)) s_edges.push_back(e);
    }
    sp.r = Graph::from_edges(n, std::move(r_edges));
    sp.s = Graph::from_edges(n, std::move(s_edges));
    if (sp.r.edge_count() != 2 * static_cast<std::int64_t>(pcount) ||
        sp.s.edge_count() != 3 * static_cast<std::int64_t>(pcount))
        throw ContractError("build_sponge: pentagon edges are not disjoint (construction bug)");
    for (Vertex v = 0; v < n; ++v) {
        const std::int64_t cv = static_cast<std::int64_t>(sp.collections[static_cast<std::size_t>(v)].size());
        if (cv < cfg.per_vertex_min)
            throw ContractError("build_sponge: anchor quota violated after assignment");
        if (sp.s.degree(v) < 2 * cv)
            throw ContractError("build_sponge: S-degree below twice the collection size");
    }
    return sp;
}

// H: for f(v) pentagons anchored at v use their R_C half, for the rest the
// S_C half. Exact effect: d_H(v) = d_S(v) - 2 f(v) at every vertex.
inline Graph sponge_reduce(const Sponge& sp, const std::vector<std::int64_t>& f) {
    const Vertex n = sp.s.vertex_count();
    if (static_cast<Vertex>(f.size()) != n)
        throw ContractError("sponge_reduce: f must assign a value to every vertex");
    std::vector<char> use_r(sp.pentagons.size(), 0);
    for (Vertex v = 0; v < n; ++v) {
        const auto& coll = sp.collections[static_cast<std::size_t>(v)];
        const std::int64_t fv = f[static_cast<std::size_t>(v)];
        if (fv < 0 || fv > static_cast<std::int64_t>(coll.size()))
            throw ContractError("sponge_reduce: f(" + std::to_string(v) + ") = " +
                                std::to_string(fv) + " outside [0," +
                                std::to_string(coll.size()) + "]");
        for (std::int64_t i = 0; i < fv; ++i)
            use_r[static_cast<std::size_t>(coll[static_cast<std::size_t>(i)])] = 1;
    }
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < sp.pentagons.size(); ++i) {
        const Pentagon& p = sp.pentagons[i];
        if (use_r[i])
            for (const Edge& e : pentagon_r_edges(p)) edges.push_back(e);
        else
            for (const Edge& e : pentagon_s_edges(p)) edges.push_back(e);
    }
    Graph h = Graph::from_edges(n, std::move(edges));
    for (Vertex v = 0; v < n; ++v) {
        if (h.degree(v) != sp.s.degree(v) - 2 * f[static_cast<std::size_t>(v)])
            throw ContractError("sponge_reduce: degree identity failed at vertex " +
                                std::to_string(v));
    }
    return h;
}

// Debug dump: one line per pentagon, cycle then anchor.
inline void write_sponge_dump(std::ostream& out, const Sponge& sp) {
    for (const Pentagon& p : sp.pentagons) {
        for (Vertex v : p.cycle) out << v << ' ';
        out << p.anchor << '\n';
    }
}

}  // namespace tfreg
