#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "tfreg/errors.hpp"

namespace tfreg {

// Dinic max-flow. Deterministic: arcs are explored in insertion order.
// Scales comfortably to the unit-capacity bipartite instances used here.
class MaxFlow {
public:
    explicit MaxFlow(int node_count) : head_(static_cast<std::size_t>(node_count), -1) {
        if (node_count <= 0) throw ContractError("MaxFlow: need at least one node");
    }

    int node_count() const { return static_cast<int>(head_.size()); }

    // Returns an arc id usable with flow_on after run().
    int add_edge(int from, int to, std::int64_t cap) {
        check_node(from);
        check_node(to);
        if (cap < 0) throw ContractError("MaxFlow: negative capacity");
        int id = static_cast<int>(arcs_.size());
        arcs_.push_back({to, head_[static_cast<std::size_t>(from)], cap});
        head_[static_cast<std::size_t>(from)] = id;
        arcs_.push_back({from, head_[static_cast<std::size_t>(to)], 0});
        head_[static_cast<std::size_t>(to)] = id + 1;
        return id;
    }

    std::int64_t run(int s, int t) {
        check_node(s);
        check_node(t);
        if (s == t) throw ContractError("MaxFlow: source equals sink");
        s_ = s;
        std::int64_t total = 0;
        while (bfs(s, t)) {
            iter_ = head_;
            std::int64_t f;
            while ((f = dfs(s, t, INT64_MAX)) > 0) total += f;
        }
        return total;
    }

    std::int64_t flow_on(int arc_id) const {
        // flow pushed on an arc equals the residual capacity of its twin
        return arcs_[static_cast<std::size_t>(arc_id ^ 1)].cap;
    }

    // After run(): nodes still reachable from the source in the residual
    // network, i.e. the source side of a minimum cut.
    std::vector<char> min_cut_side() const {
        std::vector<char> side(head_.size(), 0);
        std::queue<int> q;
        q.push(s_);
        side[static_cast<std::size_t>(s_)] = 1;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int e = head_[static_cast<std::size_t>(v)]; e != -1; e = arcs_[static_cast<std::size_t>(e)].next) {
                const Arc& a = arcs_[static_cast<std::size_t>(e)];
                if (a.cap > 0 && !side[static_cast<std::size_t>(a.to)]) {
                    side[static_cast<std::size_t>(a.to)] = 1;
                    q.push(a.to);
                }
            }
        }
        return side;
    }

private:
    struct Arc {
        int to;
        int next;
        std::int64_t cap;
    };

    void check_node(int v) const {
        if (v < 0 || v >= node_count()) throw ContractError("MaxFlow: node out of range");
    }

    bool bfs(int s, int t) {
        level_.assign(head_.size(), -1);
        std::queue<int> q;
        q.push(s);
        level_[static_cast<std::size_t>(s)] = 0;
        while (!q.empty()) {
            int v = q.front();
            q.pop();
            for (int e = head_[static_cast<std::size_t>(v)]; e != -1; e = arcs_[static_cast<std::size_t>(e)].next) {
                const Arc& a = arcs_[static_cast<std::size_t>(e)];
                if (a.cap > 0 && level_[static_cast<std::size_t>(a.to)] < 0) {
                    level_[static_cast<std::size_t>(a.to)] = level_[static_cast<std::size_t>(v)] + 1;
                    q.push(a.to);
                }
            }
        }
        return level_[static_cast<std::size_t>(t)] >= 0;
    }

    std::int64_t dfs(int v, int t, std::int64_t limit) {
        if (v == t) return limit;
        for (int& e = iter_[static_cast<std::size_t>(v)]; e != -1;
             e = arcs_[static_cast<std::size_t>(e)].next) {
            Arc& a = arcs_[static_cast<std::size_t>(e)];
            if (a.cap > 0 && level_[static_cast<std::size_t>(a.to)] == level_[static_cast<std::size_t>(v)] + 1) {
                std::int64_t got = dfs(a.to, t, std::min(limit, a.cap));
                if (got > 0) {
                    a.cap -= got;
                    arcs_[static_cast<std::size_t>(e ^ 1)].cap += got;
                    return got;
                }
            }
        }
        return 0;
    }

    std::vector<Arc> arcs_;
    std::vector<int> head_;
    std::vector<int> level_;
    std::vector<int> iter_;
    int s_ = 0;
};

}  // namespace tfreg
