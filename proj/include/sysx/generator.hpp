#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "sysx/domain.hpp"

namespace sysx {

class GenerationExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MazeGenConfig {
    int rows = 5;
    int cols = 5;
    double obstacle_fraction = 0.4;
    int min_length = 1;
    int max_length = 8;
    int train = 3200;
    int val = 400;
    int test = 400;
    long max_attempts = 5'000'000;
};

struct BlocksGenConfig {
    int min_blocks = 4;
    int max_blocks = 7;
    int train = 3000;
    int val = 250;
    int test = 200;
    int train_min_length = 1;
    int train_max_length = 6;
    int test_min_length = 7;
    int test_max_length = 10;
    long max_attempts = 2'000'000;
};

struct ProblemSets {
    std::vector<PlanningProblem> train;
    std::vector<PlanningProblem> val;
    std::vector<PlanningProblem> test;

    /// train, then val, then test.
    std::vector<PlanningProblem> all() const;
};

/// Rejection-samples mazes with exactly floor(fraction * cells) obstacles until
/// every optimal-length bucket holds its equal share in every split. Gold plans
/// come from the BFS oracle. Pure function of (seed, config).
ProblemSets generate_maze_dataset(std::uint64_t seed, const MazeGenConfig& config = {});

/// Samples start/goal stack partitions over a uniform block count, keeps pairs
/// whose optimal length falls in the train/val or test range, drops duplicates.
ProblemSets generate_blocks_dataset(std::uint64_t seed, const BlocksGenConfig& config = {});

/// Shortest maze path; moves tried in canonical order, so the plan is unique
/// for a given instance. nullopt when unreachable.
std::optional<Plan> maze_bfs_oracle(const MazeGrid& grid, MazeState from, MazeState to);

/// Optimal Blocksworld plan via A* with the support-mismatch heuristic over a
/// packed state encoding (at most 8 blocks).
std::optional<Plan> blocks_astar_oracle(const BlocksState& from, const BlocksState& to);

}  // namespace sysx
