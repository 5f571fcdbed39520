#pragma once

// shared graph generators and brute-force oracles for the test suites

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "tfreg/graph.hpp"
#include "tfreg/rng.hpp"

namespace testutil {

using tfreg::Edge;
using tfreg::Graph;
using tfreg::Vertex;

using tfreg::build_graph;

inline Graph cycle_graph(Vertex n) {
    std::vector<Edge> e;
    for (Vertex i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    return Graph::from_edges(n, std::move(e));
}

inline Graph path_graph(Vertex n) {
    std::vector<Edge> e;
    for (Vertex i = 0; i + 1 < n; ++i) e.push_back({i, i + 1});
    return Graph::from_edges(n, std::move(e));
}

inline Graph complete_graph(Vertex n) {
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v) e.push_back({u, v});
    return Graph::from_edges(n, std::move(e));
}

// center is vertex 0
inline Graph star_graph(Vertex leaves) {
    std::vector<Edge> e;
    for (Vertex i = 1; i <= leaves; ++i) e.push_back({0, i});
    return Graph::from_edges(leaves + 1, std::move(e));
}

// outer cycle 0..4, inner pentagram 5..9, spokes i - i+5
inline Graph petersen_graph() {
    std::vector<Edge> e;
    for (Vertex i = 0; i < 5; ++i) {
        e.push_back({i, (i + 1) % 5});
        e.push_back({i, i + 5});
        e.push_back({i + 5, (i + 2) % 5 + 5});
    }
    return Graph::from_edges(10, std::move(e));
}

inline Graph random_graph(Vertex n, double p, std::mt19937_64& rng) {
    std::vector<Edge> e;
    const std::uint64_t cut = static_cast<std::uint64_t>(p * 4294967296.0);
    for (Vertex u = 0; u < n; ++u)
        for (Vertex v = u + 1; v < n; ++v)
            if ((rng() & 0xffffffffu) < cut) e.push_back({u, v});
    return Graph::from_edges(n, std::move(e));
}

// circulant base graph randomized by double-edge swaps; exactly d-regular,
// terminates in a fixed number of swap attempts
inline Graph random_regular(Vertex n, std::int64_t d, std::mt19937_64& rng) {
    if ((static_cast<std::int64_t>(n) * d) % 2 != 0 || d >= n || d < 1)
        throw std::logic_error("random_regular: bad parameters");
    std::vector<Edge> edges;
    for (std::int64_t s = 1; s <= d / 2; ++s)
        for (Vertex u = 0; u < n; ++u)
            edges.push_back({u, static_cast<Vertex>((u + s) % n)});
    if (d % 2 == 1)
        for (Vertex u = 0; u < n / 2; ++u) edges.push_back({u, static_cast<Vertex>(u + n / 2)});

    std::unordered_set<std::uint64_t> present;
    auto key = [n](Vertex a, Vertex b) {
        if (a > b) std::swap(a, b);
        return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(n) +
               static_cast<std::uint64_t>(b);
    };
    for (const Edge& e : edges) present.insert(key(e.first, e.second));

    const std::size_t m = edges.size();
    for (std::size_t attempt = 0; attempt < 20 * m; ++attempt) {
        std::size_t i = tfreg::uniform_below(rng, m);
        std::size_t j = tfreg::uniform_below(rng, m);
        if (i == j) continue;
        auto [a, b] = edges[i];
        auto [c, e] = edges[j];
        if (tfreg::uniform_below(rng, 2)) std::swap(c, e);
        if (a == c || a == e || b == c || b == e) continue;
        if (present.count(key(a, c)) || present.count(key(b, e))) continue;
        present.erase(key(a, b));
        present.erase(key(c, e));
        present.insert(key(a, c));
        present.insert(key(b, e));
        edges[i] = {a, c};
        edges[j] = {b, e};
    }
    return Graph::from_edges(n, std::move(edges));
}

// random labeled tree from a uniform parent choice per vertex
inline Graph random_tree(Vertex n, std::mt19937_64& rng) {
    std::vector<Edge> e;
    for (Vertex v = 1; v < n; ++v)
        e.push_back({static_cast<Vertex>(tfreg::uniform_below(rng, static_cast<std::uint64_t>(v))), v});
    return Graph::from_edges(n, std::move(e));
}

// hamiltonian cycle plus random chords: always connected
inline Graph random_connected(Vertex n, std::int64_t chords, std::mt19937_64& rng) {
    std::vector<Edge> e;
    for (Vertex i = 0; i < n; ++i) e.push_back({i, (i + 1) % n});
    for (std::int64_t c = 0; c < chords; ++c) {
        Vertex u = static_cast<Vertex>(tfreg::uniform_below(rng, static_cast<std::uint64_t>(n)));
        Vertex v = static_cast<Vertex>(tfreg::uniform_below(rng, static_cast<std::uint64_t>(n)));
        if (u != v) e.push_back({u, v});
    }
    return Graph::from_edges(n, std::move(e));
}

inline std::int64_t brute_triangle_count(const Graph& g) {
    const Vertex n = g.vertex_count();
    std::int64_t c = 0;
    for (Vertex a = 0; a < n; ++a)
        for (Vertex b = a + 1; b < n; ++b)
            for (Vertex cc = b + 1; cc < n; ++cc)
                if (g.has_edge(a, b) && g.has_edge(b, cc) && g.has_edge(a, cc)) ++c;
    return c;
}

inline bool is_connected(const Graph& g) {
    const Vertex n = g.vertex_count();
    if (n == 0) return true;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::vector<Vertex> stack{0};
    seen[0] = 1;
    Vertex cnt = 1;
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        for (Vertex w : g.neighbors(v))
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = 1;
                ++cnt;
                stack.push_back(w);
            }
    }
    return cnt == n;
}

inline bool is_bipartite(const Graph& g) {
    const Vertex n = g.vertex_count();
    std::vector<int> color(static_cast<std::size_t>(n), -1);
    for (Vertex s = 0; s < n; ++s) {
        if (color[static_cast<std::size_t>(s)] >= 0) continue;
        color[static_cast<std::size_t>(s)] = 0;
        std::vector<Vertex> stack{s};
        while (!stack.empty()) {
            Vertex v = stack.back();
            stack.pop_back();
            for (Vertex w : g.neighbors(v)) {
                if (color[static_cast<std::size_t>(w)] < 0) {
                    color[static_cast<std::size_t>(w)] = 1 - color[static_cast<std::size_t>(v)];
                    stack.push_back(w);
                } else if (color[static_cast<std::size_t>(w)] == color[static_cast<std::size_t>(v)]) {
                    return false;
                }
            }
        }
    }
    return true;
}

}  // namespace testutil
