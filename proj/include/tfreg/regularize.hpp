#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tfreg/alon.hpp"
#include "tfreg/errors.hpp"
#include "tfreg/graph.hpp"
#include "tfreg/maxflow.hpp"
#include "tfreg/rng.hpp"
#include "tfreg/spectral.hpp"
#include "tfreg/sponge.hpp"

namespace tfreg {

enum class Profile { paper, desk };

inline const char* profile_name(Profile p) { return p == Profile::paper ? "paper" : "desk"; }

inline Profile profile_from_name(const std::string& s) {
    if (s == "paper") return Profile::paper;
    if (s == "desk") return Profile::desk;
    throw ContractError("unknown profile '" + s + "' (expected paper or desk)");
}

// Planned pipeline parameters. The paper profile evaluates the asymptotic
// formulas literally (and is honest about being infeasible at small n); the
// desk profile uses concrete slacks sized so the final degree spread stays
// within the sponge's per-vertex capacity: with offw_cap + tree_maxdeg = 4
// and delta forced odd at runtime, every vertex ends within 4 of delta and
// f(v) = (deg - d_prime)/2 never exceeds 2 = per_vertex_min.
struct Plan {
    std::int64_t n = 0;
    int k = 0;
    std::int64_t big_n = 0;  // 2^(3k)
    std::int64_t big_d = 0;  // base degree
    double p = 0.0;          // big_d / big_n
    double conc_slack = 0.0;
    double delta = 0.0;  // planned trim threshold; desk reads the real one off the graph
    std::int64_t offw_cap = 0;
    std::int64_t tree_maxdeg = 0;
    std::int64_t d_prime = 0;  // planned final degree
    Profile profile = Profile::desk;
    std::int64_t sample_retry_cap = 50;
    std::int64_t pipeline_retry_cap = 50;
};

// largest even integer strictly below x
inline std::int64_t largest_even_below(double x) {
    double fl = std::floor(x);
    std::int64_t li = static_cast<std::int64_t>(fl == x ? fl - 1 : fl);
    return li % 2 == 0 ? li : li - 1;
}

inline Plan make_plan(std::int64_t n, Profile profile) {
    if (n < 64) throw ContractError("plan: n must be at least 64, got " + std::to_string(n));
    Plan pl;
    pl.n = n;
    pl.profile = profile;
    static const int supported_k[] = {2, 4, 5, 7, 8};
    for (int k : supported_k) {
        if (n <= (std::int64_t{1} << (3 * k))) {
            pl.k = k;
            break;
        }
    }
    if (pl.k == 0)
        throw InfeasibleError("plan", "no supported base parameter covers n = " + std::to_string(n));
    AlonSpec as = alon_spec(pl.k);
    pl.big_n = as.n;
    pl.big_d = as.d;
    pl.p = static_cast<double>(as.d) / static_cast<double>(as.n);
    const double dn = static_cast<double>(n);
    const double pn = pl.p * dn;
    if (profile == Profile::paper) {
        pl.conc_slack = 10.0 * std::cbrt(dn) * std::sqrt(std::log(dn));
        pl.delta = pn - 11.0 * std::cbrt(dn) * std::sqrt(std::log(dn));
        double offw = std::pow(std::log(dn), 10.0);
        pl.offw_cap = offw > 1e15 ? std::int64_t{1} << 50 : static_cast<std::int64_t>(offw);
        pl.tree_maxdeg = 10;
    } else {
        pl.conc_slack = 3.0 * std::sqrt(pl.p * (1.0 - pl.p) * dn * std::log(dn));
        pl.offw_cap = 1;
        pl.tree_maxdeg = 3;
        // planning estimate only; the pipeline reads the real minimum degree.
        // Half the sponge support cap bounds how many pentagon R-edges can
        // land on one vertex, so that is what sampling slack must leave room
        // for below the minimum induced degree.
        const double fpc = static_cast<double>(pl.big_n - n) /
                           static_cast<double>(std::max<std::int64_t>(pl.big_n - 1, 1));
        const double sigma = std::sqrt(pl.p * (1.0 - pl.p) * dn * fpc);
        const double support_cap = std::max(24.0, std::ceil(pn / 4.0));
        pl.delta = pn - 3.0 * sigma - support_cap / 2.0;
    }
    pl.d_prime = largest_even_below(pl.delta - static_cast<double>(pl.offw_cap) -
                                    static_cast<double>(pl.tree_maxdeg));
    if (pl.d_prime <= 0)
        throw InfeasibleError("plan", "planned final degree is " + std::to_string(pl.d_prime) +
                                          " at n = " + std::to_string(n) +
                                          " (infeasible at this scale)");
    return pl;
}

inline SpongeConfig sponge_config_for(const Plan& pl) {
    SpongeConfig cfg;
    const double pn = pl.p * static_cast<double>(pl.n);
    if (pl.profile == Profile::paper) {
        const double root = std::pow(static_cast<double>(pl.n), 0.1);
        cfg.per_vertex_min = static_cast<std::int64_t>(std::ceil(root));
        cfg.pent_quota = static_cast<std::int64_t>(std::ceil(10.0 * root));
        cfg.pent_floor = static_cast<std::int64_t>(std::ceil(6.0 * root));
        cfg.phase_maxdeg = static_cast<std::int64_t>(std::ceil(300.0 * root));
        cfg.rs_maxdeg = static_cast<std::int64_t>(std::ceil(600.0 * root));
        cfg.phase_edge_factor = static_cast<std::int64_t>(std::ceil(50.0 * root));
        cfg.bundle_target = std::max<std::int64_t>(1, static_cast<std::int64_t>(pn / 100.0));
    } else {
        cfg.per_vertex_min = 2;
        cfg.pent_quota = 5 * cfg.per_vertex_min;
        cfg.pent_floor = 3 * cfg.per_vertex_min;
        cfg.phase_maxdeg = std::max<std::int64_t>(2 * cfg.pent_quota + 4,
                                                  static_cast<std::int64_t>(std::ceil(pn / 4.0)));
        cfg.rs_maxdeg = 2 * cfg.phase_maxdeg;
        cfg.phase_edge_factor = 15;
        cfg.bundle_target =
            std::max<std::int64_t>(3, static_cast<std::int64_t>(std::ceil(pn / 100.0)));
    }
    cfg.stall_retry_cap = 200;
    return cfg;
}

// --set key=value registry: every tunable of Plan and SpongeConfig by name,
// type-checked. Unknown keys are rejected with the full list.
inline void apply_override(Plan& pl, SpongeConfig& cfg, const std::string& key,
                           const std::string& value) {
    auto as_count = [&](std::int64_t& slot) {
        std::size_t pos = 0;
        std::int64_t v = 0;
        try {
            v = std::stoll(value, &pos);
        } catch (const std::exception&) {
            throw ContractError("override " + key + ": '" + value + "' is not an integer");
        }
        if (pos != value.size())
            throw ContractError("override " + key + ": '" + value + "' is not an integer");
        if (v <= 0) throw ContractError("override " + key + ": must be positive");
        slot = v;
    };
    auto as_real = [&](double& slot) {
        std::size_t pos = 0;
        double v = 0;
        try {
            v = std::stod(value, &pos);
        } catch (const std::exception&) {
            throw ContractError("override " + key + ": '" + value + "' is not a number");
        }
        if (pos != value.size())
            throw ContractError("override " + key + ": '" + value + "' is not a number");
        slot = v;
    };
    if (key == "conc_slack") as_real(pl.conc_slack);
    else if (key == "delta") as_real(pl.delta);
    else if (key == "offw_cap") as_count(pl.offw_cap);
    else if (key == "tree_maxdeg") as_count(pl.tree_maxdeg);
    else if (key == "sample_retry_cap") as_count(pl.sample_retry_cap);
    else if (key == "pipeline_retry_cap") as_count(pl.pipeline_retry_cap);
    else if (key == "per_vertex_min") as_count(cfg.per_vertex_min);
    else if (key == "pent_quota") as_count(cfg.pent_quota);
    else if (key == "pent_floor") as_count(cfg.pent_floor);
    else if (key == "rs_maxdeg") as_count(cfg.rs_maxdeg);
    else if (key == "phase_maxdeg") as_count(cfg.phase_maxdeg);
    else if (key == "phase_edge_factor") as_count(cfg.phase_edge_factor);
    else if (key == "bundle_target") as_count(cfg.bundle_target);
    else if (key == "stall_retry_cap") as_count(cfg.stall_retry_cap);
    else
        throw ContractError(
            "unknown override '" + key +
            "' (valid: conc_slack delta offw_cap tree_maxdeg sample_retry_cap "
            "pipeline_retry_cap per_vertex_min pent_quota pent_floor rs_maxdeg "
            "phase_maxdeg phase_edge_factor bundle_target stall_retry_cap)");
}

struct SampleResult {
    VertexSet x;
    int attempts = 0;
};

// Uniform n-subset of the base graph's vertices, resampled until every
// induced degree lands in p*n +/- conc_slack.
inline SampleResult sample_subset(const Graph& a, const Plan& pl, std::uint64_t seed) {
    const Vertex big_n = a.vertex_count();
    if (static_cast<std::int64_t>(big_n) != pl.big_n)
        throw ContractError("sample_subset: graph order does not match the plan");
    if (pl.n > big_n) throw ContractError("sample_subset: n exceeds base graph order");
    const double pn = pl.p * static_cast<double>(pl.n);
    if (pl.n == big_n) {
        VertexSet x(static_cast<std::size_t>(big_n));
        for (Vertex v = 0; v < big_n; ++v) x[static_cast<std::size_t>(v)] = v;
        return {std::move(x), 1};
    }
    std::mt19937_64 rng(seed);
    std::vector<char> in(static_cast<std::size_t>(big_n));
    double best_dev = -1.0;
    for (int attempt = 1; attempt <= pl.sample_retry_cap; ++attempt) {
        VertexSet x = sample_without_replacement(big_n, pl.n, rng);
        std::fill(in.begin(), in.end(), 0);
        for (Vertex v : x) in[static_cast<std::size_t>(v)] = 1;
        double worst = 0.0;
        for (Vertex v : x) {
            std::int64_t deg = 0;
            for (Vertex w : a.neighbors(v)) deg += in[static_cast<std::size_t>(w)];
            worst = std::max(worst, std::abs(static_cast<double>(deg) - pn));
        }
        if (worst <= pl.conc_slack) return {std::move(x), attempt};
        if (best_dev < 0 || worst < best_dev) best_dev = worst;
    }
    throw InfeasibleError("sample", "no concentrated subset within " +
                                        std::to_string(pl.sample_retry_cap) +
                                        " attempts (best deviation " +
                                        std::to_string(best_dev) + ", window " +
                                        std::to_string(pl.conc_slack) + ")");
}

struct TrimResult {
    Graph g1;
    VertexSet w;                  // vertices still above delta, independent in g1
    std::vector<std::int64_t> h;  // excess over delta, zero off w
};

// Deletes edges of g0 while both endpoints sit above delta in g1 union s,
// always draining the vertex with the largest remaining excess along an edge
// to its largest-excess neighbor. Degrees never drop below delta, and the
// excess-first order keeps the stuck leftover (vertices whose neighbors all
// reached delta first) small. Ties break toward smaller ids.
inline TrimResult trim_excess(const Graph& g0, const Graph& s, std::int64_t delta) {
    const Vertex n = g0.vertex_count();
    if (s.vertex_count() != n)
        throw ContractError("trim_excess: graphs on different vertex sets");
    for (const Edge& e : s.edges())
        if (g0.has_edge(e.first, e.second))
            throw ContractError("trim_excess: edge (" + std::to_string(e.first) + "," +
                                std::to_string(e.second) + ") present in both inputs");
    std::vector<std::int64_t> excess(static_cast<std::size_t>(n));
    for (Vertex v = 0; v < n; ++v) {
        const std::int64_t deg = g0.degree(v) + s.degree(v);
        if (deg < delta)
            throw InfeasibleError("trim", "vertex " + std::to_string(v) + " has degree " +
                                              std::to_string(deg) + " below delta " +
                                              std::to_string(delta));
        excess[static_cast<std::size_t>(v)] = deg - delta;
    }
    std::unordered_set<std::uint64_t> deleted;
    auto ekey = [](Vertex u, Vertex v) {
        if (u > v) std::swap(u, v);
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(u)) << 32) |
               static_cast<std::uint32_t>(v);
    };
    // max-heap on (excess, smaller id first), entries go stale lazily
    using Entry = std::pair<std::int64_t, Vertex>;
    auto lighter = [](const Entry& a, const Entry& b) {
        if (a.first != b.first) return a.first < b.first;
        return a.second > b.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(lighter)> pq(lighter);
    for (Vertex v = 0; v < n; ++v)
        if (excess[static_cast<std::size_t>(v)] > 0) pq.push({excess[static_cast<std::size_t>(v)], v});
    while (!pq.empty()) {
        auto [ex, v] = pq.top();
        pq.pop();
        if (ex != excess[static_cast<std::size_t>(v)] || ex == 0) continue;
        Vertex best = -1;
        std::int64_t best_ex = 0;
        for (Vertex u : g0.neighbors(v)) {
            if (excess[static_cast<std::size_t>(u)] <= 0) continue;
            if (deleted.count(ekey(v, u))) continue;
            if (excess[static_cast<std::size_t>(u)] > best_ex ||
                (excess[static_cast<std::size_t>(u)] == best_ex && u < best)) {
                best = u;
                best_ex = excess[static_cast<std::size_t>(u)];
            }
        }
        if (best < 0) continue;  // stuck: partners can only lose excess from here on
        deleted.insert(ekey(v, best));
        --excess[static_cast<std::size_t>(v)];
        --excess[static_cast<std::size_t>(best)];
        if (excess[static_cast<std::size_t>(v)] > 0) pq.push({excess[static_cast<std::size_t>(v)], v});
        if (excess[static_cast<std::size_t>(best)] > 0)
            pq.push({excess[static_cast<std::size_t>(best)], best});
    }
    std::vector<Edge> kept;
    for (const Edge& e : g0.edges())
        if (!deleted.count(ekey(e.first, e.second))) kept.push_back(e);
    TrimResult res;
    res.g1 = Graph::from_edges(n, std::move(kept));
    res.h.assign(static_cast<std::size_t>(n), 0);
    for (Vertex v = 0; v < n; ++v) {
        if (excess[static_cast<std::size_t>(v)] > 0) {
            res.w.push_back(v);
            res.h[static_cast<std::size_t>(v)] = excess[static_cast<std::size_t>(v)];
        }
    }
    if (!is_independent(res.g1, res.w))
        throw ContractError("trim_excess: leftover excess vertices are not independent");
    return res;
}

// Subgraph of g1 with exact degree h(x) at every x in w and degree at most
// cap elsewhere, as a max-flow b-matching. Infeasibility reports the
// deficient side of the min cut (a Hall witness).
inline Graph prescribed_subgraph(const Graph& g1, const VertexSet& w,
                                 const std::vector<std::int64_t>& h, std::int64_t cap) {
    const Vertex n = g1.vertex_count();
    validate_vertex_set(n, w, "prescribed_subgraph");
    if (static_cast<Vertex>(h.size()) != n)
        throw ContractError("prescribed_subgraph: h must cover every vertex");
    if (cap < 0) throw ContractError("prescribed_subgraph: negative cap");
    if (!is_independent(g1, w))
        throw ContractError("prescribed_subgraph: w is not independent");
    std::vector<char> in_w(static_cast<std::size_t>(n), 0);
    for (Vertex x : w) in_w[static_cast<std::size_t>(x)] = 1;
    std::int64_t demand = 0;
    for (Vertex v = 0; v < n; ++v) {
        if (h[static_cast<std::size_t>(v)] < 0)
            throw ContractError("prescribed_subgraph: negative demand");
        if (!in_w[static_cast<std::size_t>(v)] && h[static_cast<std::size_t>(v)] != 0)
            throw ContractError("prescribed_subgraph: demand outside w at vertex " +
                                std::to_string(v));
        demand += h[static_cast<std::size_t>(v)];
    }
    const int wcount = static_cast<int>(w.size());
    MaxFlow flow(2 + wcount + n);
    const int src = 0;
    const int sink = 1 + wcount + n;
    auto w_node = [&](int i) { return 1 + i; };
    auto v_node = [&](Vertex v) { return 1 + wcount + v; };
    std::vector<int> demand_arc(static_cast<std::size_t>(wcount));
    std::vector<std::pair<int, Edge>> cross_arcs;
    for (int i = 0; i < wcount; ++i) {
        Vertex x = w[static_cast<std::size_t>(i)];
        demand_arc[static_cast<std::size_t>(i)] =
            flow.add_edge(src, w_node(i), h[static_cast<std::size_t>(x)]);
        for (Vertex y : g1.neighbors(x))
            cross_arcs.emplace_back(flow.add_edge(w_node(i), v_node(y), 1), Edge{x, y});
    }
    for (Vertex v = 0; v < n; ++v)
        if (!in_w[static_cast<std::size_t>(v)]) flow.add_edge(v_node(v), sink, cap);
    if (flow.run(src, sink) < demand) {
        auto side = flow.min_cut_side();
        std::string witness;
        int listed = 0;
        int total = 0;
        for (int i = 0; i < wcount; ++i) {
            if (side[static_cast<std::size_t>(w_node(i))]) {
                ++total;
                if (listed < 16) {
                    witness += (listed ? "," : "") + std::to_string(w[static_cast<std::size_t>(i)]);
                    ++listed;
                }
            }
        }
        throw InfeasibleError("prescribe", "demand infeasible; Hall witness {" + witness +
                                               (total > listed ? ",..." : "") + "} (" +
                                               std::to_string(total) + " vertices)");
    }
    std::vector<Edge> edges;
    for (const auto& [arc, e] : cross_arcs)
        if (flow.flow_on(arc) > 0) edges.push_back(e);
    Graph f = Graph::from_edges(n, std::move(edges));
    for (Vertex v = 0; v < n; ++v) {
        if (in_w[static_cast<std::size_t>(v)]) {
            if (f.degree(v) != h[static_cast<std::size_t>(v)])
                throw ContractError("prescribed_subgraph: demand not met at vertex " +
                                    std::to_string(v));
        } else if (f.degree(v) > cap) {
            throw ContractError("prescribed_subgraph: cap exceeded at vertex " +
                                std::to_string(v));
        }
    }
    return f;
}

// Spanning tree with maximum degree at most maxdeg: BFS spanning tree first,
// then degree-reducing swaps. Each swap removes a tree edge at an over-budget
// vertex and reconnects the two halves through a non-tree edge whose
// endpoints have slack, so the total excess drops by one per swap and the
// loop terminates. Fails only when some over-budget vertex admits no
// reconnecting edge at all.
inline Graph bounded_spanning_tree(const Graph& g2, std::int64_t maxdeg) {
    const Vertex n = g2.vertex_count();
    if (maxdeg < 2) throw ContractError("bounded_spanning_tree: maxdeg must be at least 2");
    if (n == 0) return Graph();
    std::vector<std::unordered_set<Vertex>> tadj(static_cast<std::size_t>(n));
    std::vector<std::int64_t> tdeg(static_cast<std::size_t>(n), 0);
    {
        std::vector<char> visited(static_cast<std::size_t>(n), 0);
        std::queue<Vertex> q;
        visited[0] = 1;
        q.push(0);
        Vertex reached = 1;
        while (!q.empty()) {
            Vertex u = q.front();
            q.pop();
            for (Vertex w : g2.neighbors(u)) {
                if (visited[static_cast<std::size_t>(w)]) continue;
                visited[static_cast<std::size_t>(w)] = 1;
                ++reached;
                tadj[static_cast<std::size_t>(u)].insert(w);
                tadj[static_cast<std::size_t>(w)].insert(u);
                ++tdeg[static_cast<std::size_t>(u)];
                ++tdeg[static_cast<std::size_t>(w)];
                q.push(w);
            }
        }
        if (reached != n) {
            std::string comps;
            int listed = 0;
            for (Vertex v = 0; v < n && listed < 8; ++v)
                if (!visited[static_cast<std::size_t>(v)]) {
                    comps += (listed ? "," : "") + std::to_string(v);
                    ++listed;
                }
            throw InfeasibleError("spanning_tree",
                                  "graph is disconnected: " + std::to_string(n - reached) +
                                      " vertices unreachable from 0 (e.g. {" + comps + "})");
        }
    }
    // component of c in the tree minus the edge (w,c)
    std::vector<char> in_a(static_cast<std::size_t>(n), 0);
    std::vector<Vertex> a_list;
    auto collect_side = [&](Vertex c, Vertex w) {
        for (Vertex v : a_list) in_a[static_cast<std::size_t>(v)] = 0;
        a_list.clear();
        a_list.push_back(c);
        in_a[static_cast<std::size_t>(c)] = 1;
        for (std::size_t head = 0; head < a_list.size(); ++head) {
            Vertex u = a_list[head];
            for (Vertex x : tadj[static_cast<std::size_t>(u)]) {
                if (u == c && x == w) continue;
                if (!in_a[static_cast<std::size_t>(x)]) {
                    in_a[static_cast<std::size_t>(x)] = 1;
                    a_list.push_back(x);
                }
            }
        }
    };
    for (;;) {
        Vertex w = -1;
        for (Vertex v = 0; v < n; ++v)
            if (tdeg[static_cast<std::size_t>(v)] > maxdeg) {
                w = v;
                break;
            }
        if (w < 0) break;
        bool swapped = false;
        std::vector<Vertex> children(tadj[static_cast<std::size_t>(w)].begin(),
                                     tadj[static_cast<std::size_t>(w)].end());
        std::sort(children.begin(), children.end());
        for (Vertex c : children) {
            collect_side(c, w);
            for (Vertex u : a_list) {
                if (tdeg[static_cast<std::size_t>(u)] >= maxdeg) continue;
                for (Vertex v2 : g2.neighbors(u)) {
                    if (in_a[static_cast<std::size_t>(v2)] || v2 == w) continue;
                    if (tdeg[static_cast<std::size_t>(v2)] >= maxdeg) continue;
                    if (tadj[static_cast<std::size_t>(u)].count(v2)) continue;
                    tadj[static_cast<std::size_t>(w)].erase(c);
                    tadj[static_cast<std::size_t>(c)].erase(w);
                    --tdeg[static_cast<std::size_t>(w)];
                    --tdeg[static_cast<std::size_t>(c)];
                    tadj[static_cast<std::size_t>(u)].insert(v2);
                    tadj[static_cast<std::size_t>(v2)].insert(u);
                    ++tdeg[static_cast<std::size_t>(u)];
                    ++tdeg[static_cast<std::size_t>(v2)];
                    swapped = true;
                    break;
                }
                if (swapped) break;
            }
            if (swapped) break;
        }
        if (!swapped)
            throw InfeasibleError("spanning_tree",
                                  "cannot reduce tree degree at vertex " + std::to_string(w) +
                                      " below " + std::to_string(tdeg[static_cast<std::size_t>(w)]) +
                                      " within budget " + std::to_string(maxdeg));
    }
    std::vector<Edge> tree_edges;
    for (Vertex v = 0; v < n; ++v)
        for (Vertex u : tadj[static_cast<std::size_t>(v)])
            if (v < u) tree_edges.emplace_back(v, u);
    Graph t = Graph::from_edges(n, std::move(tree_edges));
    if (t.edge_count() != static_cast<std::int64_t>(n) - 1)
        throw ContractError("bounded_spanning_tree: not spanning");
    if (n > 0 && degree_stats(t).max > maxdeg)
        throw ContractError("bounded_spanning_tree: degree bound violated");
    return t;
}

// Subgraph of a tree whose degree parities match the target at every
// vertex. One leaf-to-root pass: a vertex pulls in its parent edge iff its
// parity is still wrong when its subtree is done.
inline Graph parity_subgraph(const Graph& tree, const std::vector<std::uint8_t>& target) {
    const Vertex n = tree.vertex_count();
    if (static_cast<Vertex>(target.size()) != n)
        throw ContractError("parity_subgraph: target must cover every vertex");
    if (n == 0) return Graph();
    if (tree.edge_count() != static_cast<std::int64_t>(n) - 1)
        throw ContractError("parity_subgraph: input is not a tree (wrong edge count)");
    std::int64_t sum = 0;
    for (std::uint8_t t : target) {
        if (t > 1) throw ContractError("parity_subgraph: target values must be 0 or 1");
        sum += t;
    }
    if (sum % 2 != 0)
        throw ContractError("parity_subgraph: target parities sum to odd (handshake violation)");
    std::vector<Vertex> parent(static_cast<std::size_t>(n), -1);
    std::vector<Vertex> order;
    order.reserve(static_cast<std::size_t>(n));
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<Vertex> q;
    seen[0] = 1;
    q.push(0);
    while (!q.empty()) {
        Vertex u = q.front();
        q.pop();
        order.push_back(u);
        for (Vertex w : tree.neighbors(u)) {
            if (seen[static_cast<std::size_t>(w)]) continue;
            seen[static_cast<std::size_t>(w)] = 1;
            parent[static_cast<std::size_t>(w)] = u;
            q.push(w);
        }
    }
    if (static_cast<Vertex>(order.size()) != n)
        throw ContractError("parity_subgraph: input is not a tree (disconnected)");
    std::vector<std::uint8_t> cur(static_cast<std::size_t>(n), 0);
    std::vector<Edge> edges;
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        Vertex v = *it;
        if (parent[static_cast<std::size_t>(v)] < 0) continue;
        if (cur[static_cast<std::size_t>(v)] != (target[static_cast<std::size_t>(v)] & 1)) {
            Vertex p = parent[static_cast<std::size_t>(v)];
            edges.emplace_back(std::min(v, p), std::max(v, p));
            cur[static_cast<std::size_t>(v)] ^= 1;
            cur[static_cast<std::size_t>(p)] ^= 1;
        }
    }
    if (cur[0] != (target[0] & 1))
        throw ContractError("parity_subgraph: root parity unresolved (handshake bug)");
    return Graph::from_edges(n, std::move(edges));
}

struct LambdaRecord {
    double computed = 0.0;
    double bound = 0.0;
};

struct StageLogEntry {
    std::string stage;
    std::int64_t edges_removed = 0;
    std::int64_t edges_added = 0;
    std::int64_t max_degree_delta = 0;
    double wall_ms = 0.0;
};

struct Certificate {
    std::int64_t n = 0;
    std::int64_t d_prime = 0;
    int k = 0;
    std::int64_t big_n = 0;
    std::int64_t big_d = 0;
    double p = 0.0;
    LambdaRecord lambda_base;
    std::int64_t max_deleted_degree = 0;
    LambdaRecord lambda_final;
    std::int64_t triangle_count = 0;
    bool regular = false;
    std::uint64_t seed_master = 0;
    std::uint64_t seed_sample = 0;
    std::uint64_t seed_sponge = 0;
    int attempts = 0;
    std::string profile;
    std::vector<StageLogEntry> stage_log;
    double ratio_d_n23 = 0.0;          // d_prime / n^(2/3)
    double ratio_lambda_dlogn = 0.0;   // lambda_final / sqrt(d_prime * ln n)
    double total_wall_ms = 0.0;
};

// Wall-clock data lives only under "timing" so byte-compare determinism
// checks can drop one sub-object and keep everything else.
inline nlohmann::ordered_json certificate_to_json(const Certificate& c) {
    nlohmann::ordered_json j;
    j["n"] = c.n;
    j["d_prime"] = c.d_prime;
    j["k"] = c.k;
    j["N"] = c.big_n;
    j["D"] = c.big_d;
    j["p"] = c.p;
    j["lambda_base"] = {{"computed", c.lambda_base.computed},
                        {"bound", c.lambda_base.bound},
                        {"smaller", c.lambda_base.computed <= c.lambda_base.bound ? "computed" : "bound"}};
    j["max_deleted_degree"] = c.max_deleted_degree;
    j["lambda_final"] = {{"computed", c.lambda_final.computed},
                         {"bound", c.lambda_final.bound},
                         {"smaller", c.lambda_final.computed <= c.lambda_final.bound ? "computed" : "bound"}};
    j["triangle_count"] = c.triangle_count;
    j["regular"] = c.regular;
    j["seeds"] = {{"master", c.seed_master}, {"sample", c.seed_sample}, {"sponge", c.seed_sponge}};
    j["attempts"] = c.attempts;
    j["profile"] = c.profile;
    j["headline"] = {{"d_over_n23", c.ratio_d_n23}, {"lambda_over_sqrt_d_ln_n", c.ratio_lambda_dlogn}};
    j["stage_log"] = nlohmann::ordered_json::array();
    for (const auto& e : c.stage_log)
        j["stage_log"].push_back({{"stage", e.stage},
                                  {"edges_removed", e.edges_removed},
                                  {"edges_added", e.edges_added},
                                  {"max_degree_delta", e.max_degree_delta}});
    nlohmann::ordered_json stages = nlohmann::ordered_json::array();
    for (const auto& e : c.stage_log) stages.push_back({{"stage", e.stage}, {"wall_ms", e.wall_ms}});
    j["timing"] = {{"total_wall_ms", c.total_wall_ms}, {"stages", stages}};
    return j;
}

struct SynthResult {
    Graph graph;
    Certificate cert;
};

using OverrideList = std::vector<std::pair<std::string, std::string>>;

// The full pipeline. Base graph and its lambda are computed once; the
// sampled stages retry with fresh derived seeds on any stage infeasibility.
inline SynthResult synthesize(std::int64_t n, std::uint64_t seed, Profile profile,
                              const OverrideList& overrides = {}, int threads = 1) {
    Plan pl = make_plan(n, profile);
    SpongeConfig scfg = sponge_config_for(pl);
    for (const auto& [k, v] : overrides) apply_override(pl, scfg, k, v);
    validate_sponge_config(scfg);

    Certificate cert;
    cert.n = n;
    cert.k = pl.k;
    cert.big_n = pl.big_n;
    cert.big_d = pl.big_d;
    cert.p = pl.p;
    cert.seed_master = seed;
    cert.profile = profile_name(pl.profile);

    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    auto ms_since = [](clock::time_point a) {
        return std::chrono::duration<double, std::milli>(clock::now() - a).count();
    };
    auto log_stage = [&](std::vector<StageLogEntry>& log, const std::string& stage,
                         std::int64_t removed, std::int64_t added, std::int64_t maxdelta,
                         clock::time_point since) {
        log.push_back({stage, removed, added, maxdelta, ms_since(since)});
    };

    auto t0 = clock::now();
    AlonGraph base = build_alon(pl.k);
    std::vector<StageLogEntry> base_log;
    log_stage(base_log, "base", 0, base.graph.edge_count(), base.spec.d, t0);

    t0 = clock::now();
    SpectralReport base_rep =
        spectral_lambda(base.graph, EigMethod::lanczos, 1e-8, 0, threads);
    cert.lambda_base = {base_rep.lambda, base.spec.lambda_bound};
    log_stage(base_log, "base_spectrum", 0, 0, 0, t0);

    std::string last_failure;
    for (int attempt = 1; attempt <= pl.pipeline_retry_cap; ++attempt) {
        std::vector<StageLogEntry> log = base_log;
        const std::uint64_t sample_seed = derive_seed(seed, 0x100 + static_cast<std::uint64_t>(attempt));
        const std::uint64_t sponge_seed = derive_seed(seed, 0x200 + static_cast<std::uint64_t>(attempt));
        try {
            t0 = clock::now();
            SampleResult sample = sample_subset(base.graph, pl, sample_seed);
            InducedResult ind = induced(base.graph, sample.x);
            const Graph& g = ind.graph;
            {
                std::int64_t mindeg = n ? g.degree(0) : 0;
                for (Vertex v = 0; v < g.vertex_count(); ++v)
                    mindeg = std::min(mindeg, g.degree(v));
                log_stage(log, "sample", base.graph.edge_count() - g.edge_count(), 0,
                          base.spec.d - mindeg, t0);
            }

            t0 = clock::now();
            Sponge sp = build_sponge(g, scfg, sponge_seed);
            Graph f_all = overlay(sp.r, sp.s, OverlayMode::add);
            Graph g0 = overlay(g, f_all, OverlayMode::remove);
            log_stage(log, "sponge", f_all.edge_count(), 0, degree_stats(f_all).max, t0);

            t0 = clock::now();
            std::int64_t delta;
            if (pl.profile == Profile::desk) {
                delta = g0.degree(0) + sp.s.degree(0);
                for (Vertex v = 0; v < g0.vertex_count(); ++v)
                    delta = std::min(delta, g0.degree(v) + sp.s.degree(v));
                if (delta % 2 == 0) --delta;  // odd delta keeps the final spread at 4
            } else {
                delta = static_cast<std::int64_t>(std::floor(pl.delta));
            }
            const std::int64_t d_prime = largest_even_below(
                static_cast<double>(delta - pl.offw_cap - pl.tree_maxdeg));
            if (d_prime <= 0)
                throw InfeasibleError("degree_target",
                                      "measured delta " + std::to_string(delta) +
                                          " leaves no positive final degree");
            TrimResult trim = trim_excess(g0, sp.s, delta);
            log_stage(log, "trim", g0.edge_count() - trim.g1.edge_count(), 0,
                      [&] {
                          std::int64_t md = 0;
                          for (Vertex v = 0; v < g0.vertex_count(); ++v)
                              md = std::max(md, g0.degree(v) - trim.g1.degree(v));
                          return md;
                      }(),
                      t0);

            t0 = clock::now();
            Graph fw = prescribed_subgraph(trim.g1, trim.w, trim.h, pl.offw_cap);
            Graph g2 = overlay(trim.g1, fw, OverlayMode::remove);
            log_stage(log, "prescribe", fw.edge_count(), 0, degree_stats(fw).max, t0);

            t0 = clock::now();
            Graph tree = bounded_spanning_tree(g2, pl.tree_maxdeg);
            log_stage(log, "spanning_tree", 0, 0, 0, t0);

            t0 = clock::now();
            std::vector<std::uint8_t> target(static_cast<std::size_t>(n));
            for (Vertex v = 0; v < g2.vertex_count(); ++v)
                target[static_cast<std::size_t>(v)] =
                    static_cast<std::uint8_t>((g2.degree(v) + sp.s.degree(v)) & 1);
            Graph tprime = parity_subgraph(tree, target);
            Graph gstar = overlay(g2, tprime, OverlayMode::remove);
            log_stage(log, "parity", tprime.edge_count(), 0, degree_stats(tprime).max, t0);

            t0 = clock::now();
            std::vector<std::int64_t> f(static_cast<std::size_t>(n));
            for (Vertex v = 0; v < gstar.vertex_count(); ++v) {
                const std::int64_t dv = gstar.degree(v) + sp.s.degree(v);
                if ((dv - d_prime) % 2 != 0)
                    throw ContractError("synthesize: parity step left an odd gap at vertex " +
                                        std::to_string(v));
                f[static_cast<std::size_t>(v)] = (dv - d_prime) / 2;
                if (f[static_cast<std::size_t>(v)] < 0)
                    throw InfeasibleError("reduce", "vertex " + std::to_string(v) +
                                                        " fell below the final degree");
                if (f[static_cast<std::size_t>(v)] >
                    static_cast<std::int64_t>(sp.collections[static_cast<std::size_t>(v)].size()))
                    throw InfeasibleError("reduce",
                                          "f(" + std::to_string(v) + ") = " +
                                              std::to_string(f[static_cast<std::size_t>(v)]) +
                                              " exceeds the anchored pentagon count " +
                                              std::to_string(sp.collections[static_cast<std::size_t>(v)].size()));
            }
            Graph h = sponge_reduce(sp, f);
            Graph final_graph = overlay(gstar, h, OverlayMode::add);
            log_stage(log, "reduce", 0, h.edge_count(), degree_stats(h).max, t0);

            t0 = clock::now();
            if (!is_regular(final_graph, d_prime))
                throw ContractError("synthesize: output is not exactly regular (pipeline bug)");
            cert.triangle_count = triangle_count(final_graph);
            if (cert.triangle_count != 0)
                throw ContractError("synthesize: output contains a triangle (pipeline bug)");
            for (const Edge& e : final_graph.edges())
                if (!g.has_edge(e.first, e.second))
                    throw ContractError("synthesize: output edge outside the sampled graph");
            std::int64_t max_del = 0;
            for (Vertex v = 0; v < g.vertex_count(); ++v)
                max_del = std::max(max_del, g.degree(v) - d_prime);
            SpectralReport fin_rep =
                spectral_lambda(final_graph, EigMethod::lanczos, 1e-8, 0, threads);
            if (fin_rep.lambda >
                cert.lambda_base.computed + static_cast<double>(max_del) + 1e-6)
                throw ContractError("synthesize: spectral chain violated (lambda " +
                                    std::to_string(fin_rep.lambda) + " > base " +
                                    std::to_string(cert.lambda_base.computed) + " + " +
                                    std::to_string(max_del) + ")");
            log_stage(log, "verify", 0, 0, 0, t0);

            cert.d_prime = d_prime;
            cert.max_deleted_degree = max_del;
            cert.lambda_final = {fin_rep.lambda,
                                 cert.lambda_base.computed + static_cast<double>(max_del)};
            cert.regular = true;
            cert.seed_sample = sample_seed;
            cert.seed_sponge = sponge_seed;
            cert.attempts = attempt;
            cert.stage_log = std::move(log);
            cert.ratio_d_n23 =
                static_cast<double>(d_prime) / std::pow(static_cast<double>(n), 2.0 / 3.0);
            cert.ratio_lambda_dlogn =
                fin_rep.lambda /
                std::sqrt(static_cast<double>(d_prime) * std::log(static_cast<double>(n)));
            cert.total_wall_ms = ms_since(t_start);
            return {std::move(final_graph), std::move(cert)};
        } catch (const InfeasibleError& e) {
            last_failure = e.what();
        }
    }
    throw InfeasibleError("synthesize", "all " + std::to_string(pl.pipeline_retry_cap) +
                                            " attempts failed; last: " + last_failure);
}

}  // namespace tfreg
