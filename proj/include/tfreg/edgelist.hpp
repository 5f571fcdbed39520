#pragma once

#include <unistd.h>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <system_error>

#include "tfreg/errors.hpp"
#include "tfreg/graph.hpp"

namespace tfreg {

// Canonical edge-list format. ASCII, LF line endings:
//   line 1:        "<n> <m>"
//   lines 2..m+1:  "<u> <v>" with u < v, strictly ascending lexicographically
// Lines starting with '#' are comments and are skipped on read; the writer
// never emits them. The reader is strict: wrong counts, u >= v, out-of-range
// ids, duplicate or misordered edges are all rejected with a line number.

namespace detail {

inline bool parse_two_ints(const std::string& line, std::int64_t& a, std::int64_t& b) {
    const char* p = line.data();
    const char* end = p + line.size();
    auto r1 = std::from_chars(p, end, a);
    if (r1.ec != std::errc() || r1.ptr == end || *r1.ptr != ' ') return false;
    auto r2 = std::from_chars(r1.ptr + 1, end, b);
    return r2.ec == std::errc() && r2.ptr == end;
}

}  // namespace detail

inline Graph read_edge_list(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r')
                throw IoError(path + ":" + std::to_string(lineno) + ": CR line ending (LF required)");
            if (!line.empty() && line[0] == '#') continue;
            return true;
        }
        return false;
    };

    if (!next_line()) throw IoError(path + ": missing header line");
    std::int64_t n = 0, m = 0;
    if (!detail::parse_two_ints(line, n, m) || n < 0 || m < 0)
        throw IoError(path + ":" + std::to_string(lineno) + ": malformed header, expected \"<n> <m>\"");
    if (n > (std::int64_t{1} << 31) - 1)
        throw IoError(path + ":" + std::to_string(lineno) + ": vertex count too large");

    std::vector<Edge> edges;
    edges.reserve(static_cast<std::size_t>(m));
    Edge prev{-1, -1};
    for (std::int64_t i = 0; i < m; ++i) {
        if (!next_line())
            throw IoError(path + ": expected " + std::to_string(m) + " edges, found " +
                          std::to_string(i));
        std::int64_t u = 0, v = 0;
        if (!detail::parse_two_ints(line, u, v))
            throw IoError(path + ":" + std::to_string(lineno) + ": malformed edge line");
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw IoError(path + ":" + std::to_string(lineno) + ": endpoint out of range");
        if (u >= v)
            throw IoError(path + ":" + std::to_string(lineno) + ": requires u < v");
        Edge e{static_cast<Vertex>(u), static_cast<Vertex>(v)};
        if (!(prev < e))
            throw IoError(path + ":" + std::to_string(lineno) +
                          ": edges not strictly ascending (duplicate or misordered)");
        prev = e;
        edges.push_back(e);
    }
    if (next_line())
        throw IoError(path + ":" + std::to_string(lineno) + ": trailing content after " +
                      std::to_string(m) + " edges");
    return Graph::from_edges(static_cast<Vertex>(n), std::move(edges));
}

namespace detail {

// temp file in the target's directory + rename, so a crash never leaves a
// truncated file behind
template <typename Body>
void write_atomic(const std::string& path, const Body& body) {
    namespace fs = std::filesystem;
    fs::path target(path);
    fs::path dir = target.parent_path();
    fs::path tmp = (dir.empty() ? fs::path(".") : dir) /
                   (target.filename().string() + ".tmp." + std::to_string(::getpid()));
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
        body(out);
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw IoError("write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw IoError("rename to " + path + " failed: " + ec.message());
    }
}

}  // namespace detail

inline void write_edge_list(const std::string& path, const Graph& g) {
    detail::write_atomic(path, [&](std::ofstream& out) {
        out << g.vertex_count() << ' ' << g.edge_count() << '\n';
        for (Vertex u = 0; u < g.vertex_count(); ++u)
            for (Vertex v : g.neighbors(u))
                if (v > u) out << u << ' ' << v << '\n';
    });
}

inline void write_text_atomic(const std::string& path, const std::string& content) {
    detail::write_atomic(path, [&](std::ofstream& out) { out << content; });
}

}  // namespace tfreg
