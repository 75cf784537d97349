#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sysx {

enum class Domain { maze, blocks };

std::string_view to_string(Domain d);
Domain parse_domain(std::string_view text);

// ---------------------------------------------------------------------------
// Maze navigation

/// Grid cell, 0-indexed. `up` decreases the row.
struct MazeState {
    int row = 0;
    int col = 0;
    auto operator<=>(const MazeState&) const = default;
};

struct MazeGrid {
    int rows = 0;
    int cols = 0;
    std::set<MazeState> obstacles;

    bool in_bounds(MazeState s) const {
        return s.row >= 0 && s.row < rows && s.col >= 0 && s.col < cols;
    }
    bool is_obstacle(MazeState s) const { return obstacles.count(s) != 0; }
    bool is_free(MazeState s) const { return in_bounds(s) && !is_obstacle(s); }

    bool operator==(const MazeGrid&) const = default;
};

enum class Move { up, down, left, right };

/// Canonical probe order for maze actions.
inline constexpr std::array<Move, 4> kMoves = {Move::up, Move::down, Move::left, Move::right};

Move opposite(Move m);
MazeState displace(MazeState s, Move m);

// ---------------------------------------------------------------------------
// Blocksworld

/// Destination label meaning "put the block on the table".
inline constexpr char kTable = '_';

struct BlocksMove {
    char block = 0;
    char dest = kTable;
    auto operator<=>(const BlocksMove&) const = default;
};

/// A configuration of stacks, each listed bottom to top. Stored in canonical
/// form (stacks sorted by bottom label) so equal configurations compare equal.
class BlocksState {
public:
    BlocksState() = default;
    explicit BlocksState(std::vector<std::vector<char>> stacks);

    const std::vector<std::vector<char>>& stacks() const { return stacks_; }
    std::vector<char> blocks() const;
    std::size_t block_count() const;

    bool contains(char block) const;
    bool is_clear(char block) const;
    /// Block directly underneath, or nullopt when on the table.
    std::optional<char> below(char block) const;
    /// Block directly on top, or nullopt when clear.
    std::optional<char> above(char block) const;

    auto operator<=>(const BlocksState&) const = default;

private:
    std::vector<std::vector<char>> stacks_;
};

// ---------------------------------------------------------------------------
// Shared vocabulary

using Action = std::variant<Move, BlocksMove>;
using State = std::variant<MazeState, BlocksState>;

enum class InvalidReason {
    out_of_bounds,
    obstacle,
    already_visited,
    block_not_clear,
    destination_not_clear,
    destination_missing,
    self_move,
};

std::string_view to_string(InvalidReason r);
std::optional<InvalidReason> parse_invalid_reason(std::string_view text);

/// Result of applying one action: the successor, or the reason it is illegal.
template <class S>
struct Step {
    std::optional<S> next;
    InvalidReason reason = InvalidReason::out_of_bounds;

    bool ok() const { return next.has_value(); }
};

struct Plan {
    std::vector<Action> actions;

    std::size_t length() const { return actions.size(); }
    bool operator==(const Plan&) const = default;
};

struct PlanningProblem {
    std::string id;
    Domain domain = Domain::maze;
    MazeGrid grid;               // maze only
    std::vector<char> universe;  // blocks only, sorted
    State start;
    State goal;
    std::optional<Plan> gold_plan;
    std::optional<int> optimal_length;
    std::string split;

    /// Same domain instance, different endpoints. Gold data is dropped.
    PlanningProblem with_endpoints(State from, State to, std::string sub_id) const;

    int block_count() const { return static_cast<int>(universe.size()); }
};

Step<MazeState> maze_step(const MazeGrid& grid, MazeState state, Move move);
Step<BlocksState> blocks_step(const BlocksState& state, BlocksMove move);
Step<State> step(const PlanningProblem& problem, const State& state, const Action& action);

/// Legal actions in canonical order. Maze: up, down, left, right. Blocks:
/// moved block ascending, destinations ascending with the table last.
std::vector<Action> valid_actions(const PlanningProblem& problem, const State& state);

struct Probe {
    Action action;
    Step<State> result;
};

/// Every candidate action a search engine considers at `state`, legal or not,
/// in canonical order. Maze: all four moves. Blocks: every (block, destination)
/// pair with destination != block.
std::vector<Probe> probe_actions(const PlanningProblem& problem, const State& state);

struct Validation {
    bool valid = false;
    /// 1-based index of the first illegal action; nullopt when every action was
    /// legal (an invalid plan then simply ends away from the goal).
    std::optional<std::size_t> failed_step;
    std::optional<InvalidReason> reason;
};

Validation validate_plan(const PlanningProblem& problem, const Plan& plan);

/// s_0 .. s_n visited by executing `plan`, or nullopt if some step is illegal.
std::optional<std::vector<State>> plan_states(const PlanningProblem& problem, const Plan& plan);

// ---------------------------------------------------------------------------
// Text forms shared by files, traces and datasets.
//   maze state  "(r,c)"          blocks state  "[A,B][C]"
//   maze action "up"             blocks action "move(B,C)" / "move(B,table)"

std::string format_state(const State& s);
std::string format_action(const Action& a);
State parse_state(std::string_view text);
Action parse_action(std::string_view text);

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace sysx
