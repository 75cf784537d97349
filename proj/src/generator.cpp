#include "sysx/generator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <deque>
#include <map>
#include <queue>
#include <set>
#include <string>
#include <tuple>
#include <unordered_map>

#include "sysx/rng.hpp"

namespace sysx {

std::vector<PlanningProblem> ProblemSets::all() const {
    std::vector<PlanningProblem> out;
    out.reserve(train.size() + val.size() + test.size());
    out.insert(out.end(), train.begin(), train.end());
    out.insert(out.end(), val.begin(), val.end());
    out.insert(out.end(), test.begin(), test.end());
    return out;
}

namespace {

std::string make_id(std::string_view domain, std::string_view split, std::size_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04zu", i);
    return std::string(domain) + "-" + std::string(split) + "-" + buf;
}

void finalize_split(std::vector<PlanningProblem>& split, std::string_view domain,
                    std::string_view name, Rng& rng) {
    shuffle(split, rng);
    for (std::size_t i = 0; i < split.size(); ++i) {
        split[i].id = make_id(domain, name, i);
        split[i].split = std::string(name);
    }
}

/// Per-bucket quota for one split: equal shares, remainder to the shortest lengths.
std::vector<int> bucket_quota(int total, int buckets) {
    std::vector<int> q(static_cast<std::size_t>(buckets), total / buckets);
    for (int i = 0; i < total % buckets; ++i) ++q[static_cast<std::size_t>(i)];
    return q;
}

}  // namespace

// ---------------------------------------------------------------------------
// Oracles

std::optional<Plan> maze_bfs_oracle(const MazeGrid& grid, MazeState from, MazeState to) {
    if (!grid.is_free(from) || !grid.is_free(to)) return std::nullopt;
    std::map<MazeState, std::pair<MazeState, Move>> parent;
    std::set<MazeState> seen{from};
    std::deque<MazeState> queue{from};
    while (!queue.empty()) {
        MazeState cur = queue.front();
        queue.pop_front();
        if (cur == to) {
            Plan plan;
            while (cur != from) {
                auto [prev, move] = parent.at(cur);
                plan.actions.push_back(move);
                cur = prev;
            }
            std::reverse(plan.actions.begin(), plan.actions.end());
            return plan;
        }
        for (Move m : kMoves) {
            MazeState next = displace(cur, m);
            if (!grid.is_free(next) || seen.count(next)) continue;
            seen.insert(next);
            parent[next] = {cur, m};
            queue.push_back(next);
        }
    }
    return std::nullopt;
}

namespace {

// Packed Blocksworld state: 4 bits per block holding the index of its support,
// with `n` meaning the table.
struct Packed {
    int n = 0;
    std::uint32_t code = 0;

    int support(int b) const { return static_cast<int>((code >> (4 * b)) & 0xF); }
    void set_support(int b, int s) {
        code &= ~(0xFU << (4 * b));
        code |= static_cast<std::uint32_t>(s) << (4 * b);
    }
};

Packed pack(const BlocksState& s, const std::vector<char>& labels) {
    Packed p{static_cast<int>(labels.size()), 0};
    auto index = [&](char c) {
        return static_cast<int>(std::find(labels.begin(), labels.end(), c) - labels.begin());
    };
    for (char b : labels) {
        auto below = s.below(b);
        p.set_support(index(b), below ? index(*below) : p.n);
    }
    return p;
}

int packed_mismatch(const Packed& a, const Packed& b) {
    int m = 0;
    for (int i = 0; i < a.n; ++i) m += a.support(i) != b.support(i);
    return m;
}

}  // namespace

std::optional<Plan> blocks_astar_oracle(const BlocksState& from, const BlocksState& to) {
    auto labels = from.blocks();
    if (labels != to.blocks()) return std::nullopt;
    if (labels.size() > 8) throw std::invalid_argument("blocks oracle supports at most 8 blocks");
    const int n = static_cast<int>(labels.size());
    const Packed start = pack(from, labels);
    const Packed goal = pack(to, labels);

    struct Node {
        int g;
        std::uint32_t parent;
        int moved;
        int dest;
    };
    std::unordered_map<std::uint32_t, Node> nodes;
    using Entry = std::tuple<int, int, std::uint64_t, std::uint32_t, int>;  // f, t, seq, code, g
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    std::uint64_t seq = 0;
    nodes[start.code] = {0, start.code, -1, -1};
    open.emplace(packed_mismatch(start, goal), packed_mismatch(start, goal), seq++, start.code, 0);

    while (!open.empty()) {
        auto [f, t, s, code, g] = open.top();
        open.pop();
        if (nodes.at(code).g < g) continue;
        if (code == goal.code) {
            Plan plan;
            std::uint32_t cur = code;
            while (cur != start.code) {
                const Node& node = nodes.at(cur);
                char dest = node.dest == n ? kTable : labels[static_cast<std::size_t>(node.dest)];
                plan.actions.push_back(BlocksMove{labels[static_cast<std::size_t>(node.moved)], dest});
                cur = node.parent;
            }
            std::reverse(plan.actions.begin(), plan.actions.end());
            return plan;
        }
        Packed p{n, code};
        std::array<bool, 8> clear{};
        clear.fill(true);
        for (int b = 0; b < n; ++b)
            if (p.support(b) != n) clear[static_cast<std::size_t>(p.support(b))] = false;
        for (int b = 0; b < n; ++b) {
            if (!clear[static_cast<std::size_t>(b)]) continue;
            for (int d = 0; d <= n; ++d) {
                if (d == b || d == p.support(b)) continue;
                if (d < n && !clear[static_cast<std::size_t>(d)]) continue;
                Packed q = p;
                q.set_support(b, d);
                auto it = nodes.find(q.code);
                if (it != nodes.end() && it->second.g <= g + 1) continue;
                nodes[q.code] = {g + 1, code, b, d};
                int h = packed_mismatch(q, goal);
                open.emplace(g + 1 + h, h, seq++, q.code, g + 1);
            }
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Maze problems

ProblemSets generate_maze_dataset(std::uint64_t seed, const MazeGenConfig& config) {
    if (config.rows <= 0 || config.cols <= 0)
        throw std::invalid_argument("maze dimensions must be positive");
    if (config.min_length < 1 || config.max_length < config.min_length)
        throw std::invalid_argument("maze plan-length range must satisfy 1 <= min <= max");

    const int cells = config.rows * config.cols;
    const int obstacle_count = static_cast<int>(std::floor(config.obstacle_fraction * cells + 1e-9));
    if (obstacle_count > cells - 2)
        throw std::invalid_argument("too many obstacles to place a start and a goal");

    const int buckets = config.max_length - config.min_length + 1;
    const std::array<int, 3> split_sizes{config.train, config.val, config.test};
    std::array<std::vector<int>, 3> quota;
    for (std::size_t s = 0; s < 3; ++s) quota[s] = bucket_quota(split_sizes[s], buckets);

    // Bucket b fills train, then val, then test.
    std::vector<int> bucket_need(static_cast<std::size_t>(buckets), 0);
    for (std::size_t b = 0; b < bucket_need.size(); ++b)
        for (std::size_t s = 0; s < 3; ++s) bucket_need[b] += quota[s][b];
    std::vector<std::vector<PlanningProblem>> filled(static_cast<std::size_t>(buckets));
    int remaining = config.train + config.val + config.test;

    Rng rng(seed);
    std::vector<MazeState> all_cells;
    for (int r = 0; r < config.rows; ++r)
        for (int c = 0; c < config.cols; ++c) all_cells.push_back({r, c});

    for (long attempt = 0; remaining > 0; ++attempt) {
        if (attempt >= config.max_attempts)
            throw GenerationExhausted("maze generation exhausted after " +
                                      std::to_string(config.max_attempts) + " attempts with " +
                                      std::to_string(remaining) + " problems missing");
        auto order = all_cells;
        // Partial Fisher-Yates: the first obstacle_count + 2 cells are obstacles, start, goal.
        for (int i = 0; i < obstacle_count + 2; ++i) {
            auto j = static_cast<std::size_t>(i) + uniform_below(rng, order.size() - static_cast<std::size_t>(i));
            std::swap(order[static_cast<std::size_t>(i)], order[j]);
        }
        MazeGrid grid{config.rows, config.cols, {}};
        for (int i = 0; i < obstacle_count; ++i) grid.obstacles.insert(order[static_cast<std::size_t>(i)]);
        MazeState start = order[static_cast<std::size_t>(obstacle_count)];
        MazeState goal = order[static_cast<std::size_t>(obstacle_count + 1)];

        auto plan = maze_bfs_oracle(grid, start, goal);
        if (!plan) continue;
        int len = static_cast<int>(plan->length());
        if (len < config.min_length || len > config.max_length) continue;
        auto b = static_cast<std::size_t>(len - config.min_length);
        if (static_cast<int>(filled[b].size()) >= bucket_need[b]) continue;

        PlanningProblem p;
        p.domain = Domain::maze;
        p.grid = std::move(grid);
        p.start = start;
        p.goal = goal;
        p.gold_plan = std::move(*plan);
        p.optimal_length = len;
        filled[b].push_back(std::move(p));
        --remaining;
    }

    ProblemSets sets;
    for (std::size_t b = 0; b < filled.size(); ++b) {
        auto it = filled[b].begin();
        std::array<std::vector<PlanningProblem>*, 3> dst{&sets.train, &sets.val, &sets.test};
        for (std::size_t s = 0; s < 3; ++s)
            for (int k = 0; k < quota[s][b]; ++k) dst[s]->push_back(std::move(*it++));
    }
    finalize_split(sets.train, "maze", "train", rng);
    finalize_split(sets.val, "maze", "val", rng);
    finalize_split(sets.test, "maze", "test", rng);
    return sets;
}

// ---------------------------------------------------------------------------
// Blocksworld problems

namespace {

BlocksState random_stacks(const std::vector<char>& labels, Rng& rng) {
    auto order = labels;
    shuffle(order, rng);
    std::vector<std::vector<char>> stacks{{order.front()}};
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (uniform_below(rng, 2) == 0) stacks.emplace_back();
        stacks.back().push_back(order[i]);
    }
    return BlocksState(std::move(stacks));
}

}  // namespace

ProblemSets generate_blocks_dataset(std::uint64_t seed, const BlocksGenConfig& config) {
    if (config.min_blocks < 1 || config.max_blocks < config.min_blocks || config.max_blocks > 8)
        throw std::invalid_argument("block counts must satisfy 1 <= min <= max <= 8");

    Rng rng(seed);
    ProblemSets sets;
    std::set<std::string> seen;
    auto need = [&] {
        return static_cast<long>(config.train - static_cast<int>(sets.train.size())) +
               (config.val - static_cast<int>(sets.val.size())) +
               (config.test - static_cast<int>(sets.test.size()));
    };
    const bool train_range_ok = config.train_min_length >= 1;

    for (long attempt = 0; need() > 0; ++attempt) {
        if (attempt >= config.max_attempts)
            throw GenerationExhausted("blocks generation exhausted after " +
                                      std::to_string(config.max_attempts) + " attempts with " +
                                      std::to_string(need()) + " problems missing");
        int k = uniform_int(rng, config.min_blocks, config.max_blocks);
        std::vector<char> labels;
        for (int i = 0; i < k; ++i) labels.push_back(static_cast<char>('A' + i));
        BlocksState start = random_stacks(labels, rng);
        BlocksState goal = random_stacks(labels, rng);
        if (start == goal) continue;
        std::string key = format_state(start) + "|" + format_state(goal);
        if (seen.count(key)) continue;

        bool train_open = sets.train.size() < static_cast<std::size_t>(config.train) ||
                          sets.val.size() < static_cast<std::size_t>(config.val);
        bool test_open = sets.test.size() < static_cast<std::size_t>(config.test);

        auto plan = blocks_astar_oracle(start, goal);
        if (!plan) continue;
        int len = static_cast<int>(plan->length());
        std::vector<PlanningProblem>* dst = nullptr;
        if (train_open && train_range_ok && len >= config.train_min_length && len <= config.train_max_length)
            dst = sets.train.size() < static_cast<std::size_t>(config.train) ? &sets.train : &sets.val;
        else if (test_open && len >= config.test_min_length && len <= config.test_max_length)
            dst = &sets.test;
        if (!dst) continue;

        seen.insert(std::move(key));
        PlanningProblem p;
        p.domain = Domain::blocks;
        p.universe = labels;
        p.start = std::move(start);
        p.goal = std::move(goal);
        p.gold_plan = std::move(*plan);
        p.optimal_length = len;
        dst->push_back(std::move(p));
    }

    finalize_split(sets.train, "blocks", "train", rng);
    finalize_split(sets.val, "blocks", "val", rng);
    finalize_split(sets.test, "blocks", "test", rng);
    return sets;
}

}  // namespace sysx
