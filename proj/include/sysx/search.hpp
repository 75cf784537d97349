#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sysx/domain.hpp"

namespace sysx {

enum class Algorithm { astar, bfs, dfs };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view text);

int manhattan(MazeState a, MazeState b);

/// Number of blocks whose support (block underneath, or the table) differs.
int blocks_mismatch(const BlocksState& a, const BlocksState& b);

/// Domain heuristic toward `goal`: manhattan for mazes, blocks_mismatch for blocks.
int heuristic(const State& s, const State& goal);

/// Per-expansion limits on what gets recorded. Successors beyond the cap still
/// enter the frontier; only the trace (and the explored-state count) shrinks.
struct RecordingCap {
    int valid = 3;
    int invalid = 2;
};

struct TraceConfig {
    std::optional<RecordingCap> cap;
    /// Drives the sampling of recorded invalid probes under a cap.
    std::uint64_t seed = 0;

    /// Uncapped for mazes, 3 valid / 2 invalid for Blocksworld.
    static TraceConfig for_domain(Domain d);
};

struct ExplorationEvent {
    std::size_t index = 0;
    /// Event that recorded `from`; nullopt when `from` is the start state or
    /// was never recorded.
    std::optional<std::size_t> parent;
    State from;
    Action action;
    /// Probed state. Maze probes always carry the probed cell (even off-grid);
    /// blocks probes that break a precondition carry none.
    std::optional<State> state;
    std::optional<InvalidReason> invalid;
    int g = 0;
    std::optional<int> t;
    std::optional<int> f;

    bool valid() const { return !invalid.has_value(); }
    bool operator==(const ExplorationEvent&) const = default;
};

struct SearchRun {
    std::string problem_id;
    Algorithm algorithm = Algorithm::astar;
    std::vector<ExplorationEvent> events;
    std::optional<Plan> plan;
    /// Event that first generated the goal. nullopt on failure, or when the
    /// start already is the goal.
    std::optional<std::size_t> goal_event;

    std::size_t states_explored() const { return events.size(); }
    bool success() const { return plan.has_value(); }
    bool operator==(const SearchRun&) const = default;
};

SearchRun astar(const PlanningProblem& problem, const TraceConfig& config = {});
SearchRun bfs(const PlanningProblem& problem, const TraceConfig& config = {});
SearchRun dfs(const PlanningProblem& problem, const TraceConfig& config = {});
SearchRun run_search(Algorithm algorithm, const PlanningProblem& problem, const TraceConfig& config = {});

/// First min(cap, n) events. Success survives only if the goal was generated
/// inside the kept prefix.
SearchRun truncate_run(const SearchRun& run, std::size_t cap);

nlohmann::json to_json(const SearchRun& run);
SearchRun search_run_from_json(const nlohmann::json& j);

/// One event per line: index, action, state, validity, scores.
std::string render_trace(const SearchRun& run);

}  // namespace sysx
