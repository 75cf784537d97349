#pragma once

// Builders and independent reference implementations used as test oracles.
// Nothing here calls into the library's transition or search code.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <deque>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "sysx/domain.hpp"

namespace testsupport {

using sysx::MazeState;

inline sysx::PlanningProblem maze(int rows, int cols, std::set<MazeState> obstacles, MazeState start, MazeState goal,
                                  std::string id = "m") {
    sysx::PlanningProblem p;
    p.id = std::move(id);
    p.domain = sysx::Domain::maze;
    p.grid = {rows, cols, std::move(obstacles)};
    p.start = start;
    p.goal = goal;
    return p;
}

inline sysx::BlocksState stacks(std::string_view text) {
    return std::get<sysx::BlocksState>(sysx::parse_state(text));
}

inline sysx::PlanningProblem blocks(std::string_view start, std::string_view goal, std::string id = "b") {
    sysx::PlanningProblem p;
    p.id = std::move(id);
    p.domain = sysx::Domain::blocks;
    p.start = stacks(start);
    p.goal = stacks(goal);
    p.universe = std::get<sysx::BlocksState>(p.start).blocks();
    return p;
}

/// Shortest path length on a grid by plain BFS; -1 if unreachable.
inline int grid_distance(int rows, int cols, const std::set<MazeState>& obstacles, MazeState from, MazeState to) {
    std::vector<int> dist(static_cast<std::size_t>(rows * cols), -1);
    auto idx = [&](int r, int c) { return static_cast<std::size_t>(r * cols + c); };
    std::deque<MazeState> q{from};
    dist[idx(from.row, from.col)] = 0;
    const int dr[] = {-1, 1, 0, 0}, dc[] = {0, 0, -1, 1};
    while (!q.empty()) {
        auto s = q.front();
        q.pop_front();
        if (s.row == to.row && s.col == to.col) return dist[idx(s.row, s.col)];
        for (int k = 0; k < 4; ++k) {
            int r = s.row + dr[k], c = s.col + dc[k];
            if (r < 0 || r >= rows || c < 0 || c >= cols || obstacles.count({r, c}) || dist[idx(r, c)] >= 0) continue;
            dist[idx(r, c)] = dist[idx(s.row, s.col)] + 1;
            q.push_back({r, c});
        }
    }
    return -1;
}

inline int grid_distance(const sysx::PlanningProblem& p) {
    return grid_distance(p.grid.rows, p.grid.cols, p.grid.obstacles, std::get<MazeState>(p.start),
                         std::get<MazeState>(p.goal));
}

/// Blocks world as sorted lists of bottom-to-top strings.
using Towers = std::vector<std::string>;

inline Towers towers(const sysx::BlocksState& s) {
    Towers t;
    for (const auto& st : s.stacks()) t.emplace_back(st.begin(), st.end());
    std::sort(t.begin(), t.end());
    return t;
}

inline std::vector<Towers> tower_successors(const Towers& t) {
    std::vector<Towers> out;
    for (std::size_t i = 0; i < t.size(); ++i) {
        char top = t[i].back();
        auto removed = t;
        removed[i].pop_back();
        // onto the table
        if (t[i].size() > 1) {
            auto n = removed;
            n.push_back(std::string(1, top));
            std::sort(n.begin(), n.end());
            out.push_back(n);
        }
        for (std::size_t j = 0; j < t.size(); ++j) {
            if (j == i) continue;
            auto n = removed;
            n[j].push_back(top);
            n.erase(std::remove(n.begin(), n.end(), std::string()), n.end());
            std::sort(n.begin(), n.end());
            out.push_back(n);
        }
    }
    return out;
}

/// Exhaustive BFS over block configurations; -1 if unreachable.
inline int blocks_distance_bfs(const sysx::BlocksState& from, const sysx::BlocksState& to) {
    Towers a = towers(from), b = towers(to);
    std::map<Towers, int> dist{{a, 0}};
    std::deque<Towers> q{a};
    while (!q.empty()) {
        auto s = q.front();
        q.pop_front();
        if (s == b) return dist[s];
        for (auto& n : tower_successors(s))
            if (dist.emplace(n, dist[s] + 1).second) q.push_back(n);
    }
    return -1;
}

/// Obstacles inside the closed rectangle spanned by a and b.
inline int rect_obstacles(const std::set<MazeState>& obstacles, MazeState a, MazeState b) {
    int n = 0;
    for (auto o : obstacles)
        n += o.row >= std::min(a.row, b.row) && o.row <= std::max(a.row, b.row) && o.col >= std::min(a.col, b.col) &&
             o.col <= std::max(a.col, b.col);
    return n;
}

struct WindowChoice {
    std::size_t u, v;
    int objective;
};

/// Argmin by enumeration of every placement (optionally only edge placements).
template <class H>
WindowChoice brute_force_window(std::size_t n, double x, H&& h, bool edges_only = false) {
    long w = std::lround(x * static_cast<double>(n));
    w = std::clamp<long>(w, 1, static_cast<long>(n));
    std::optional<WindowChoice> best;
    for (std::size_t u = 0; u + static_cast<std::size_t>(w) <= n; ++u) {
        std::size_t v = u + static_cast<std::size_t>(w);
        if (edges_only && u != 0 && v != n) continue;
        int obj = h(0, u) - h(u, v) + h(v, n);
        if (!best || obj < best->objective) best = WindowChoice{u, v, obj};
    }
    return *best;
}

/// Largest c in [1, max] with sum(min(size, c)) <= target * N, by scanning every c.
inline std::size_t scan_cap(const std::vector<std::size_t>& sizes, double target) {
    std::size_t mx = *std::max_element(sizes.begin(), sizes.end());
    std::size_t best = 1;
    for (std::size_t c = 1; c <= mx; ++c) {
        // Exact: a double times a small count fits a long double mantissa.
        long double total = 0;
        for (auto s : sizes) total += static_cast<long double>(std::min(s, c));
        if (total <= static_cast<long double>(target) * static_cast<long double>(sizes.size())) best = c;
    }
    return best;
}

inline sysx::BlocksState random_blocks(std::mt19937_64& rng, int n) {
    std::string labels;
    for (int i = 0; i < n; ++i) labels += static_cast<char>('A' + i);
    std::shuffle(labels.begin(), labels.end(), rng);
    std::vector<std::vector<char>> st;
    for (char c : labels) {
        if (st.empty() || rng() % 2) st.emplace_back();
        st.back().push_back(c);
    }
    return sysx::BlocksState(st);
}

}  // namespace testsupport
