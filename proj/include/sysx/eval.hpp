#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "sysx/controller.hpp"
#include "sysx/domain.hpp"
#include "sysx/orchestrator.hpp"
#include "sysx/search.hpp"

namespace sysx {

enum class PlannerKind { system1, system2, system1x };

std::string_view to_string(PlannerKind k);
PlannerKind parse_planner_kind(std::string_view text);

struct PlannerConfig {
    PlannerKind kind = PlannerKind::system2;
    EnginesConfig engines;
    ControllerConfig controller;
    /// Required for system1x.
    std::optional<Calibration> calibration;

    std::string label() const;
};

/// Outcome of one planner on one problem, reduced to what the metrics need.
struct ProblemResult {
    std::string problem_id;
    std::optional<Plan> plan;
    std::size_t states_explored = 0;
    bool valid = false;
    /// nullopt when the problem carries no oracle length.
    std::optional<bool> optimal;
    std::size_t sys2_subgoals = 0;
    /// Set when planning threw; the result then counts as invalid.
    std::optional<std::string> error;
};

/// Runs one planner on one problem, optionally under a global state budget.
ProblemResult run_planner(const PlanningProblem& problem, const PlannerConfig& config,
                          std::optional<std::size_t> budget = std::nullopt);

/// Reference kernel: problems in order on the calling thread.
std::vector<ProblemResult> evaluate_serial(const std::vector<PlanningProblem>& problems,
                                           const PlannerConfig& config,
                                           std::optional<std::size_t> budget = std::nullopt);

/// OpenMP kernel over problems; result i always belongs to problem i, so the
/// output is identical to evaluate_serial. threads <= 0 uses the runtime default.
std::vector<ProblemResult> evaluate_parallel(const std::vector<PlanningProblem>& problems,
                                             const PlannerConfig& config,
                                             std::optional<std::size_t> budget = std::nullopt,
                                             int threads = 0);

/// Exact count ratio.
struct Rate {
    std::size_t num = 0;
    std::size_t den = 0;

    double value() const { return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const Rate&) const = default;
};

/// Throws std::invalid_argument on empty input.
Rate plan_validity_rate(std::span<const ProblemResult> results);

/// Valid and as short as the oracle. Throws if any oracle length is missing.
Rate plan_optimality_rate(std::span<const ProblemResult> results,
                          std::span<const std::optional<int>> oracle_lengths);

/// Exact sum / count of explored states.
Rate average_states_explored(std::span<const ProblemResult> results);

/// Largest integer cap c with mean(min(size, c)) <= target; 1 when even c = 1
/// overshoots.
std::size_t match_budget_cap(std::span<const std::size_t> sizes, double target);

struct BudgetRow {
    /// nullopt for the planner's untruncated default configuration.
    std::optional<double> target;
    Rate avg_se;
    Rate validity;
    Rate optimality;
    std::size_t n = 0;
    std::string mode;  // "default", "truncated", "test-time controlled"
    std::optional<std::size_t> cap;
    std::optional<double> bias;
};

struct BudgetReport {
    std::string planner;
    std::vector<BudgetRow> rows;
};

/// Below the planner's default average the runs are truncated to the matched
/// cap; above it, hybrid planners raise their bias in 0.05 steps and keep the
/// largest bias that stays within the target. System-1 yields one row.
BudgetReport budget_sweep(const std::vector<PlanningProblem>& problems, const PlannerConfig& config,
                          const std::vector<double>& budgets, int threads = 0);

/// Columns: planner,budget,avg_se,validity,optimality,n
std::string render_csv(std::span<const BudgetReport> reports);
std::string render_markdown(std::span<const BudgetReport> reports);
/// One series per planner: [{budget, avg_se, validity, optimality}, ...]
nlohmann::json plot_data(std::span<const BudgetReport> reports);

}  // namespace sysx
