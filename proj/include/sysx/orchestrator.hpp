#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sysx/controller.hpp"
#include "sysx/domain.hpp"
#include "sysx/search.hpp"

namespace sysx {

struct PlannerOutcome {
    Mode mode = Mode::sys1;
    /// Absent when a System-2 engine failed or was cut off before the goal.
    std::optional<Plan> plan;
    std::size_t states_explored = 0;
    /// The plan validates for this outcome's own (from, to) pair.
    bool reached = false;
};

/// Search-free surrogate for a System-1 planner: greedy descent on the domain
/// heuristic, never revisiting a state. The traversal is emitted as the plan
/// even when it stalls short of the goal; states_explored = plan length.
PlannerOutcome greedy_plan(const PlanningProblem& problem);

struct EnginesConfig {
    Algorithm sys2 = Algorithm::astar;
    /// Defaults to TraceConfig::for_domain of the problem.
    std::optional<TraceConfig> trace;
    /// Global cap on explored states across all sub-goals.
    std::optional<std::size_t> budget;

    TraceConfig trace_for(Domain d) const { return trace.value_or(TraceConfig::for_domain(d)); }
};

struct HybridRun {
    std::string problem_id;
    MetaPlan meta_plan;
    std::vector<PlannerOutcome> parts;
    /// Concatenation of sub-plans; absent if some sub-goal produced no plan.
    std::optional<Plan> plan;
    bool valid = false;
    std::size_t states_explored = 0;
};

/// Solves the sub-goals in order (Sys1 via greedy_plan, Sys2 via the chosen
/// engine) and concatenates their plans. Under a budget, each sub-goal gets
/// what is left: Sys2 runs are truncated, Sys1 plans are cut short. Stops at
/// the first sub-goal that yields no plan or exhausts the budget.
HybridRun solve_hybrid(const PlanningProblem& problem, const MetaPlan& meta_plan, const EnginesConfig& engines);

inline std::size_t states_explored(const PlannerOutcome& o) { return o.states_explored; }
inline std::size_t states_explored(const SearchRun& r) { return r.states_explored(); }
inline std::size_t states_explored(const HybridRun& r) { return r.states_explored; }

nlohmann::json to_json(const HybridRun& run);

}  // namespace sysx
