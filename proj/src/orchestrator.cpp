#include "sysx/orchestrator.hpp"

#include <set>

#include "sysx/problem_io.hpp"

namespace sysx {

PlannerOutcome greedy_plan(const PlanningProblem& problem) {
    PlannerOutcome out;
    out.mode = Mode::sys1;
    out.plan = Plan{};

    const std::size_t cap = problem.domain == Domain::maze
                                ? 4 * static_cast<std::size_t>(problem.grid.rows * problem.grid.cols)
                                : 4 * 2 * static_cast<std::size_t>(problem.block_count());
    std::set<State> visited{problem.start};
    State cur = problem.start;
    while (cur != problem.goal && out.plan->length() < cap) {
        std::optional<Action> best_action;
        std::optional<State> best_state;
        int best_h = 0;
        for (auto& probe : probe_actions(problem, cur)) {
            if (!probe.result.ok() || visited.count(*probe.result.next)) continue;
            int h = heuristic(*probe.result.next, problem.goal);
            if (!best_state || h < best_h) {
                best_h = h;
                best_action = probe.action;
                best_state = std::move(*probe.result.next);
            }
        }
        if (!best_state) break;  // dead end
        out.plan->actions.push_back(*best_action);
        visited.insert(*best_state);
        cur = std::move(*best_state);
    }
    out.states_explored = out.plan->length();
    out.reached = cur == problem.goal;
    return out;
}

HybridRun solve_hybrid(const PlanningProblem& problem, const MetaPlan& meta_plan, const EnginesConfig& engines) {
    if (!meta_plan.chains(problem.start, problem.goal))
        throw std::invalid_argument("meta-plan for '" + problem.id + "' does not chain from start to goal");

    HybridRun run;
    run.problem_id = problem.id;
    run.meta_plan = meta_plan;
    const TraceConfig trace = engines.trace_for(problem.domain);
    std::optional<std::size_t> remaining = engines.budget;
    bool complete = true;

    for (std::size_t k = 0; k < meta_plan.subgoals.size(); ++k) {
        const auto& sg = meta_plan.subgoals[k];
        auto sub = problem.with_endpoints(sg.from, sg.to, problem.id + "#" + std::to_string(k));
        PlannerOutcome part;
        if (sg.mode == Mode::sys1) {
            part = greedy_plan(sub);
            if (remaining && part.states_explored > *remaining) {
                part.plan->actions.resize(*remaining);
                part.states_explored = *remaining;
                part.reached = false;
                complete = false;
            }
        } else {
            part.mode = Mode::sys2;
            SearchRun sr = run_search(engines.sys2, sub, trace);
            if (remaining) {
                if (*remaining == 0 && sr.states_explored() > 0) {
                    sr = SearchRun{sr.problem_id, sr.algorithm, {}, std::nullopt, std::nullopt};
                } else if (*remaining > 0) {
                    sr = truncate_run(sr, *remaining);
                }
            }
            part.plan = sr.plan;
            part.states_explored = sr.states_explored();
            part.reached = sr.success();
            if (!sr.success()) complete = false;
        }
        run.states_explored += part.states_explored;
        if (remaining) *remaining -= part.states_explored;
        run.parts.push_back(std::move(part));
        if (!complete) break;
    }

    if (complete) {
        Plan plan;
        for (const auto& part : run.parts)
            plan.actions.insert(plan.actions.end(), part.plan->actions.begin(), part.plan->actions.end());
        run.valid = validate_plan(problem, plan).valid;
        run.plan = std::move(plan);
    }
    return run;
}

nlohmann::json to_json(const HybridRun& run) {
    nlohmann::json parts = nlohmann::json::array();
    for (const auto& p : run.parts)
        parts.push_back({{"mode", std::string(to_string(p.mode))},
                         {"plan", p.plan ? plan_to_json(*p.plan) : nlohmann::json(nullptr)},
                         {"states_explored", p.states_explored},
                         {"reached", p.reached}});
    return {{"problem_id", run.problem_id},
            {"meta_plan", to_json(run.meta_plan)},
            {"parts", parts},
            {"plan", run.plan ? plan_to_json(*run.plan) : nlohmann::json(nullptr)},
            {"valid", run.valid},
            {"states_explored", run.states_explored}};
}

}  // namespace sysx
