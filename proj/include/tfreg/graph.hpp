#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tfreg/errors.hpp"

namespace tfreg {

using Vertex = std::int32_t;
using Edge = std::pair<Vertex, Vertex>;

// Sorted, duplicate-free list of vertex ids. validate_vertex_set enforces
// the invariant where a set crosses an API boundary.
using VertexSet = std::vector<Vertex>;

inline void validate_vertex_set(Vertex n, const VertexSet& x, const char* what) {
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] < 0 || x[i] >= n)
            throw ContractError(std::string(what) + ": vertex " + std::to_string(x[i]) +
                                " out of range [0," + std::to_string(n) + ")");
        if (i > 0 && x[i] <= x[i - 1])
            throw ContractError(std::string(what) + ": not sorted strictly ascending at index " +
                                std::to_string(i));
    }
}

// Immutable undirected simple graph in CSR form. Neighbor blocks are sorted
// strictly ascending; construction validates every invariant it can.
class Graph {
public:
    Graph() : offsets_(1, 0) {}

    // Builds from an edge list. Accepts either orientation and duplicate
    // mentions; canonicalizes to u < v and deduplicates. Self-loops and
    // out-of-range endpoints are rejected.
    static Graph from_edges(Vertex n, std::vector<Edge> edges) {
        if (n < 0) throw ContractError("Graph: negative vertex count");
        for (auto& [u, v] : edges) {
            if (u < 0 || u >= n || v < 0 || v >= n)
                throw ContractError("Graph: edge (" + std::to_string(u) + "," +
                                    std::to_string(v) + ") out of range");
            if (u == v)
                throw ContractError("Graph: self-loop at vertex " + std::to_string(u));
            if (u > v) std::swap(u, v);
        }
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

        Graph g;
        g.n_ = n;
        g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);
        for (const auto& [u, v] : edges) {
            ++g.offsets_[static_cast<std::size_t>(u) + 1];
            ++g.offsets_[static_cast<std::size_t>(v) + 1];
        }
        for (std::size_t i = 1; i < g.offsets_.size(); ++i) g.offsets_[i] += g.offsets_[i - 1];
        g.adj_.resize(g.offsets_.back());
        std::vector<std::uint64_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
        for (const auto& [u, v] : edges) {
            g.adj_[fill[static_cast<std::size_t>(u)]++] = v;
            g.adj_[fill[static_cast<std::size_t>(v)]++] = u;
        }
        // lexicographic edge order makes every neighbor block ascending
        return g;
    }

    // Builds from prevalidated CSR arrays; revalidates everything (sorted
    // strict blocks, range, symmetry, no self-loops).
    static Graph from_csr(Vertex n, std::vector<std::uint64_t> offsets,
                          std::vector<Vertex> adj) {
        if (n < 0) throw ContractError("Graph: negative vertex count");
        if (offsets.size() != static_cast<std::size_t>(n) + 1 || offsets.front() != 0 ||
            offsets.back() != adj.size())
            throw ContractError("Graph: malformed offsets");
        Graph g;
        g.n_ = n;
        g.offsets_ = std::move(offsets);
        g.adj_ = std::move(adj);
        for (Vertex v = 0; v < n; ++v) {
            if (g.offsets_[static_cast<std::size_t>(v)] > g.offsets_[static_cast<std::size_t>(v) + 1])
                throw ContractError("Graph: offsets not monotone");
            auto blk = g.neighbors(v);
            for (std::size_t i = 0; i < blk.size(); ++i) {
                Vertex w = blk[i];
                if (w < 0 || w >= n) throw ContractError("Graph: neighbor out of range");
                if (w == v) throw ContractError("Graph: self-loop at vertex " + std::to_string(v));
                if (i > 0 && blk[i - 1] >= w)
                    throw ContractError("Graph: neighbors of " + std::to_string(v) +
                                        " not strictly ascending");
                if (!std::binary_search(g.neighbors(w).begin(), g.neighbors(w).end(), v))
                    throw ContractError("Graph: asymmetric edge (" + std::to_string(v) + "," +
                                        std::to_string(w) + ")");
            }
        }
        return g;
    }

    Vertex vertex_count() const noexcept { return n_; }
    std::int64_t edge_count() const noexcept { return static_cast<std::int64_t>(adj_.size() / 2); }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {adj_.data() + offsets_[static_cast<std::size_t>(v)],
                adj_.data() + offsets_[static_cast<std::size_t>(v) + 1]};
    }

    std::int64_t degree(Vertex v) const {
        return static_cast<std::int64_t>(offsets_[static_cast<std::size_t>(v) + 1] -
                                         offsets_[static_cast<std::size_t>(v)]);
    }

    bool has_edge(Vertex u, Vertex v) const {
        if (u < 0 || u >= n_ || v < 0 || v >= n_ || u == v) return false;
        auto blk = neighbors(u);
        return std::binary_search(blk.begin(), blk.end(), v);
    }

    // Canonical edge list: u < v, lexicographically ascending.
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(adj_.size() / 2);
        for (Vertex u = 0; u < n_; ++u)
            for (Vertex v : neighbors(u))
                if (v > u) out.emplace_back(u, v);
        return out;
    }

    bool operator==(const Graph&) const = default;

private:
    Vertex n_ = 0;
    std::vector<std::uint64_t> offsets_;
    std::vector<Vertex> adj_;
};

inline Graph build_graph(Vertex n, std::vector<Edge> edges) {
    return Graph::from_edges(n, std::move(edges));
}

struct InducedResult {
    Graph graph;       // vertices relabeled 0..|x|-1 in x's sort order
    VertexSet vertices;  // vertices[i] = original id of new vertex i
};

inline InducedResult induced(const Graph& g, const VertexSet& x) {
    validate_vertex_set(g.vertex_count(), x, "induced");
    std::vector<Vertex> pos(static_cast<std::size_t>(g.vertex_count()), -1);
    for (std::size_t i = 0; i < x.size(); ++i) pos[static_cast<std::size_t>(x[i])] = static_cast<Vertex>(i);
    std::vector<Edge> edges;
    for (Vertex v : x)
        for (Vertex w : g.neighbors(v))
            if (w > v && pos[static_cast<std::size_t>(w)] >= 0)
                edges.emplace_back(pos[static_cast<std::size_t>(v)], pos[static_cast<std::size_t>(w)]);
    return {Graph::from_edges(static_cast<Vertex>(x.size()), std::move(edges)), x};
}

enum class OverlayMode { add, remove };

// Edge-set union (add) or difference (remove) of two graphs on the same
// vertex set. add requires disjoint edge sets; remove requires h to be a
// subgraph of g. Violations name the offending edge.
inline Graph overlay(const Graph& g, const Graph& h, OverlayMode mode) {
    if (g.vertex_count() != h.vertex_count())
        throw ContractError("overlay: vertex counts differ (" +
                            std::to_string(g.vertex_count()) + " vs " +
                            std::to_string(h.vertex_count()) + ")");
    const Vertex n = g.vertex_count();
    std::vector<std::uint64_t> offsets(static_cast<std::size_t>(n) + 1, 0);
    std::vector<Vertex> adj;
    adj.reserve(static_cast<std::size_t>(2 * (g.edge_count() + h.edge_count())));
    for (Vertex v = 0; v < n; ++v) {
        auto a = g.neighbors(v);
        auto b = h.neighbors(v);
        std::size_t i = 0, j = 0;
        while (i < a.size() || j < b.size()) {
            if (j == b.size() || (i < a.size() && a[i] < b[j])) {
                adj.push_back(a[i++]);
            } else if (i == a.size() || b[j] < a[i]) {
                if (mode == OverlayMode::remove)
                    throw ContractError("overlay remove: edge (" + std::to_string(v) + "," +
                                        std::to_string(b[j]) + ") not present in base graph");
                adj.push_back(b[j++]);
            } else {  // a[i] == b[j]
                if (mode == OverlayMode::add)
                    throw ContractError("overlay add: edge (" + std::to_string(v) + "," +
                                        std::to_string(a[i]) + ") present in both graphs");
                ++i;
                ++j;
            }
        }
        offsets[static_cast<std::size_t>(v) + 1] = adj.size();
    }
    return Graph::from_csr(n, std::move(offsets), std::move(adj));
}

// Exact triangle count: for each edge (u,v) with u < v, counts common
// neighbors w > v by merging the two sorted blocks, so each triangle is
// counted exactly once.
inline std::int64_t triangle_count(const Graph& g) {
    std::int64_t total = 0;
    for (Vertex u = 0; u < g.vertex_count(); ++u) {
        auto nu = g.neighbors(u);
        for (Vertex v : nu) {
            if (v <= u) continue;
            auto nv = g.neighbors(v);
            auto it1 = std::upper_bound(nu.begin(), nu.end(), v);
            auto it2 = std::upper_bound(nv.begin(), nv.end(), v);
            while (it1 != nu.end() && it2 != nv.end()) {
                if (*it1 < *it2) ++it1;
                else if (*it2 < *it1) ++it2;
                else { ++total; ++it1; ++it2; }
            }
        }
    }
    return total;
}

inline std::optional<std::array<Vertex, 3>> find_triangle(const Graph& g) {
    for (Vertex u = 0; u < g.vertex_count(); ++u) {
        auto nu = g.neighbors(u);
        for (Vertex v : nu) {
            if (v <= u) continue;
            auto nv = g.neighbors(v);
            auto it1 = std::upper_bound(nu.begin(), nu.end(), v);
            auto it2 = std::upper_bound(nv.begin(), nv.end(), v);
            while (it1 != nu.end() && it2 != nv.end()) {
                if (*it1 < *it2) ++it1;
                else if (*it2 < *it1) ++it2;
                else return std::array<Vertex, 3>{u, v, *it1};
            }
        }
    }
    return std::nullopt;
}

struct DegreeStats {
    std::int64_t min = 0;
    std::int64_t max = 0;
    std::map<std::int64_t, std::int64_t> histogram;
};

inline DegreeStats degree_stats(const Graph& g) {
    DegreeStats s;
    if (g.vertex_count() == 0) return s;
    s.min = s.max = g.degree(0);
    for (Vertex v = 0; v < g.vertex_count(); ++v) {
        std::int64_t d = g.degree(v);
        s.min = std::min(s.min, d);
        s.max = std::max(s.max, d);
        ++s.histogram[d];
    }
    return s;
}

inline bool is_regular(const Graph& g, std::int64_t d) {
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) != d) return false;
    return true;
}

inline bool is_independent(const Graph& g, const VertexSet& x) {
    validate_vertex_set(g.vertex_count(), x, "is_independent");
    std::vector<char> in(static_cast<std::size_t>(g.vertex_count()), 0);
    for (Vertex v : x) in[static_cast<std::size_t>(v)] = 1;
    for (Vertex v : x)
        for (Vertex w : g.neighbors(v))
            if (w > v && in[static_cast<std::size_t>(w)]) return false;
    return true;
}

// Ordered adjacent pairs (u,v) with u in s, v in t. s and t may overlap;
// e(V,V) equals twice the edge count.
inline std::int64_t ordered_edge_pairs(const Graph& g, const VertexSet& s, const VertexSet& t) {
    validate_vertex_set(g.vertex_count(), s, "ordered_edge_pairs: s");
    validate_vertex_set(g.vertex_count(), t, "ordered_edge_pairs: t");
    std::vector<char> in(static_cast<std::size_t>(g.vertex_count()), 0);
    for (Vertex v : t) in[static_cast<std::size_t>(v)] = 1;
    std::int64_t total = 0;
    for (Vertex v : s)
        for (Vertex w : g.neighbors(v))
            if (in[static_cast<std::size_t>(w)]) ++total;
    return total;
}

}  // namespace tfreg
