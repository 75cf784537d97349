#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sysx/domain.hpp"
#include "sysx/hardness.hpp"

namespace sysx {

enum class Mode { sys1, sys2 };

std::string_view to_string(Mode m);

struct SubGoal {
    State from;
    State to;
    Mode mode = Mode::sys1;
    bool operator==(const SubGoal&) const = default;
};

/// Ordered, chained sub-goals: 1 to 3 entries, at most one of them Sys2.
struct MetaPlan {
    std::vector<SubGoal> subgoals;

    std::size_t sys2_count() const;
    /// First starts at `start`, last ends at `goal`, junctions agree.
    bool chains(const State& start, const State& goal) const;
    bool operator==(const MetaPlan&) const = default;
};

enum class ControllerVariant { sliding_window, edge_window, no_subgoal, random };

std::string_view to_string(ControllerVariant v);
ControllerVariant parse_variant(std::string_view text);

struct ControllerConfig {
    double x = 0.5;
    /// Added to x at inference; the sum is clamped to [0, 1].
    double bias = 0.0;
    ControllerVariant variant = ControllerVariant::sliding_window;
    HardnessSelector hardness = HardnessSelector::maze_obstacles;
    std::uint64_t seed = 0;

    double effective_x() const;
    /// Throws std::invalid_argument naming the offending field.
    void validate() const;
};

/// Sys2 window [u, v] over a state sequence s_0..s_n.
struct Window {
    std::size_t u = 0;
    std::size_t v = 0;
    int objective = 0;
};

/// round(x * n) clamped to [1, n].
std::size_t window_length(double x, std::size_t n);

/// h(s_0, s_u) - h(s_u, s_v) + h(s_v, s_n).
int window_objective(HardnessSelector selector, const PlanningProblem& context,
                     std::span<const State> states, std::size_t u, std::size_t v);

/// Minimizing placement of a window of length window_length(x, n); smallest u
/// on ties. `edges_only` restricts to u = 0 or v = n.
Window best_window(HardnessSelector selector, const PlanningProblem& context,
                   std::span<const State> states, double x, bool edges_only);

/// Sub-goals around the chosen window: (s_0, s_u) Sys1 if u > 0, (s_u, s_v)
/// Sys2, (s_v, s_n) Sys1 if v < n. Requires 0 < x <= 1.
MetaPlan decompose_states(HardnessSelector selector, const PlanningProblem& context,
                          std::span<const State> states, double x, bool edges_only);

MetaPlan sliding_window_decompose(const PlanningProblem& problem, const Plan& gold_plan, double x,
                                  HardnessSelector selector);
MetaPlan edge_window_decompose(const PlanningProblem& problem, const Plan& gold_plan, double x,
                               HardnessSelector selector);

MetaPlan single_subgoal(const PlanningProblem& problem, Mode mode);

/// floor((1 - x) * n).
std::size_t easy_count(std::size_t n, double x);

struct ControllerRecord {
    std::string problem_id;
    MetaPlan meta_plan;
    bool operator==(const ControllerRecord&) const = default;
};

/// Ranks by hardness, labels the easiest floor((1 - x) N) Sys1-only and
/// decomposes the rest with the configured variant. Records are returned in
/// input order. Every problem must carry a gold plan.
std::vector<ControllerRecord> build_controller_dataset(const std::vector<PlanningProblem>& problems,
                                                       const ControllerConfig& config);

/// Training-set hardness distribution used by the runtime gate.
class Calibration {
public:
    Calibration() = default;
    Calibration(HardnessSelector selector, std::vector<int> values);

    static Calibration fit(const std::vector<PlanningProblem>& train, HardnessSelector selector);

    HardnessSelector selector() const { return selector_; }
    const std::vector<int>& values() const { return values_; }

    /// floor((1 - x') * 100)-th percentile of the training hardness, or nullopt
    /// when x' <= 0 (nothing is hard). x' >= 1 yields 0 (everything is hard).
    std::optional<int> threshold(double effective_x) const;
    bool is_hard(int h, double effective_x) const;

    /// Sorted values plus the threshold table on a 0.05 grid of x'.
    nlohmann::json to_json() const;
    static Calibration from_json(const nlohmann::json& j);

    bool operator==(const Calibration&) const = default;

private:
    HardnessSelector selector_ = HardnessSelector::maze_obstacles;
    std::vector<int> values_;  // sorted ascending
};

/// Search-free state sequence from start toward goal. Maze: manhattan descent
/// ignoring obstacles, then off-grid-free states snapped to the nearest free
/// cell. Blocks: strictly mismatch-reducing moves, at most 2 * blocks of them;
/// nullopt if that stalls.
std::optional<std::vector<State>> skeleton(const PlanningProblem& problem);

/// Deterministic stand-in for a trained controller: percentile gate on the
/// instance hardness, then window decomposition over a search-free skeleton.
class RuntimeController {
public:
    RuntimeController(ControllerConfig config, Calibration calibration);

    const ControllerConfig& config() const { return config_; }
    bool gate_hard(const PlanningProblem& problem) const;
    MetaPlan decompose(const PlanningProblem& problem) const;

private:
    ControllerConfig config_;
    Calibration calibration_;
};

nlohmann::json to_json(const MetaPlan& mp);
MetaPlan meta_plan_from_json(const nlohmann::json& j);

}  // namespace sysx
