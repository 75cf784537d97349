#include "sysx/hardness.hpp"

#include <algorithm>
#include <string>

#include "sysx/search.hpp"

namespace sysx {

std::string_view to_string(HardnessSelector s) {
    switch (s) {
        case HardnessSelector::maze_obstacles: return "maze-obstacles";
        case HardnessSelector::maze_manhattan: return "maze-manhattan";
        case HardnessSelector::blocks_distance: return "blocks-distance";
    }
    return "?";
}

HardnessSelector parse_hardness(std::string_view text) {
    for (auto s : {HardnessSelector::maze_obstacles, HardnessSelector::maze_manhattan,
                   HardnessSelector::blocks_distance})
        if (to_string(s) == text) return s;
    throw ParseError("unknown hardness selector '" + std::string(text) + "'");
}

Domain domain_of(HardnessSelector s) {
    return s == HardnessSelector::blocks_distance ? Domain::blocks : Domain::maze;
}

HardnessSelector default_hardness(Domain d) {
    return d == Domain::maze ? HardnessSelector::maze_obstacles : HardnessSelector::blocks_distance;
}

namespace {

int obstacles_in_rectangle(const MazeGrid& grid, MazeState a, MazeState b) {
    int r0 = std::min(a.row, b.row), r1 = std::max(a.row, b.row);
    int c0 = std::min(a.col, b.col), c1 = std::max(a.col, b.col);
    int count = 0;
    for (auto o : grid.obstacles)
        if (o.row >= r0 && o.row <= r1 && o.col >= c0 && o.col <= c1) ++count;
    return count;
}

int blocks_distance(const BlocksState& a, const BlocksState& b) {
    int cost = 0;
    for (char block : a.blocks()) {
        bool misplaced = a.below(block) != b.below(block) || a.above(block) != b.above(block);
        if (!misplaced) continue;
        cost += 1;
        if (a.below(block)) cost += 1;
    }
    return cost;
}

}  // namespace

int hardness(HardnessSelector selector, const PlanningProblem& context, const State& a, const State& b) {
    if (domain_of(selector) != context.domain)
        throw std::invalid_argument("hardness selector '" + std::string(to_string(selector)) +
                                    "' does not match the problem domain");
    switch (selector) {
        case HardnessSelector::maze_obstacles:
            return obstacles_in_rectangle(context.grid, std::get<MazeState>(a), std::get<MazeState>(b));
        case HardnessSelector::maze_manhattan:
            return manhattan(std::get<MazeState>(a), std::get<MazeState>(b));
        case HardnessSelector::blocks_distance:
            return blocks_distance(std::get<BlocksState>(a), std::get<BlocksState>(b));
    }
    return 0;
}

std::vector<PlanningProblem> rank_problems(std::vector<PlanningProblem> problems, HardnessSelector selector) {
    std::vector<std::pair<int, std::size_t>> keys;
    keys.reserve(problems.size());
    for (std::size_t i = 0; i < problems.size(); ++i)
        keys.emplace_back(hardness(selector, problems[i], problems[i].start, problems[i].goal), i);
    std::stable_sort(keys.begin(), keys.end(),
                     [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<PlanningProblem> out;
    out.reserve(problems.size());
    for (auto [h, i] : keys) out.push_back(std::move(problems[i]));
    return out;
}

}  // namespace sysx
