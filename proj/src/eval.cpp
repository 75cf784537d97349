#include "sysx/eval.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sysx {

std::string_view to_string(PlannerKind k) {
    switch (k) {
        case PlannerKind::system1: return "system1";
        case PlannerKind::system2: return "system2";
        case PlannerKind::system1x: return "system1x";
    }
    return "?";
}

PlannerKind parse_planner_kind(std::string_view text) {
    for (auto k : {PlannerKind::system1, PlannerKind::system2, PlannerKind::system1x})
        if (to_string(k) == text) return k;
    throw ParseError("unknown planner '" + std::string(text) + "'");
}

std::string PlannerConfig::label() const {
    switch (kind) {
        case PlannerKind::system1: return "system1";
        case PlannerKind::system2: return "system2-" + std::string(to_string(engines.sys2));
        case PlannerKind::system1x: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "system%g", 1.0 + controller.x);
            std::string out = std::string(buf) + "-" + std::string(to_string(engines.sys2));
            if (controller.variant != ControllerVariant::sliding_window)
                out += "-" + std::string(to_string(controller.variant));
            return out;
        }
    }
    return "?";
}

ProblemResult run_planner(const PlanningProblem& problem, const PlannerConfig& config,
                          std::optional<std::size_t> budget) {
    ProblemResult r;
    r.problem_id = problem.id;
    switch (config.kind) {
        case PlannerKind::system1: {
            auto o = greedy_plan(problem);
            r.plan = std::move(o.plan);
            r.states_explored = o.states_explored;
            break;
        }
        case PlannerKind::system2: {
            auto run = run_search(config.engines.sys2, problem, config.engines.trace_for(problem.domain));
            if (budget && *budget > 0) run = truncate_run(run, *budget);
            r.plan = std::move(run.plan);
            r.states_explored = run.states_explored();
            r.sys2_subgoals = 1;
            break;
        }
        case PlannerKind::system1x: {
            if (!config.calibration) throw std::invalid_argument("system1x planner needs a calibration");
            RuntimeController controller(config.controller, *config.calibration);
            EnginesConfig engines = config.engines;
            engines.budget = budget;
            auto run = solve_hybrid(problem, controller.decompose(problem), engines);
            r.sys2_subgoals = run.meta_plan.sys2_count();
            r.plan = std::move(run.plan);
            r.states_explored = run.states_explored;
            break;
        }
    }
    r.valid = r.plan && validate_plan(problem, *r.plan).valid;
    if (problem.optimal_length)
        r.optimal = r.valid && static_cast<int>(r.plan->length()) == *problem.optimal_length;
    return r;
}

namespace {

ProblemResult run_guarded(const PlanningProblem& problem, const PlannerConfig& config,
                          std::optional<std::size_t> budget) {
    try {
        return run_planner(problem, config, budget);
    } catch (const std::exception& e) {
        ProblemResult r;
        r.problem_id = problem.id;
        r.error = e.what();
        if (problem.optimal_length) r.optimal = false;
        return r;
    }
}

}  // namespace

std::vector<ProblemResult> evaluate_serial(const std::vector<PlanningProblem>& problems,
                                           const PlannerConfig& config, std::optional<std::size_t> budget) {
    std::vector<ProblemResult> out;
    out.reserve(problems.size());
    for (const auto& p : problems) out.push_back(run_guarded(p, config, budget));
    return out;
}

std::vector<ProblemResult> evaluate_parallel(const std::vector<PlanningProblem>& problems,
                                             const PlannerConfig& config, std::optional<std::size_t> budget,
                                             int threads) {
    std::vector<ProblemResult> out(problems.size());
    const auto n = static_cast<long>(problems.size());
    const int team = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(team)
    for (long i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = run_guarded(problems[static_cast<std::size_t>(i)], config, budget);
    return out;
}

// ---------------------------------------------------------------------------
// Metrics

Rate plan_validity_rate(std::span<const ProblemResult> results) {
    if (results.empty()) throw std::invalid_argument("validity rate of an empty run set");
    Rate r{0, results.size()};
    for (const auto& x : results) r.num += x.valid;
    return r;
}

Rate plan_optimality_rate(std::span<const ProblemResult> results, std::span<const std::optional<int>> oracle) {
    if (results.empty()) throw std::invalid_argument("optimality rate of an empty run set");
    if (oracle.size() != results.size()) throw std::invalid_argument("one oracle length per run is required");
    Rate r{0, results.size()};
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!oracle[i]) throw std::invalid_argument("missing oracle length for '" + results[i].problem_id + "'");
        const auto& x = results[i];
        r.num += x.valid && static_cast<int>(x.plan->length()) == *oracle[i];
    }
    return r;
}

Rate average_states_explored(std::span<const ProblemResult> results) {
    Rate r{0, results.size()};
    for (const auto& x : results) r.num += x.states_explored;
    return r;
}

std::size_t match_budget_cap(std::span<const std::size_t> sizes, double target) {
    if (sizes.empty()) return 1;
    std::vector<std::size_t> sorted(sizes.begin(), sizes.end());
    std::sort(sorted.begin(), sorted.end());
    const long double limit = static_cast<long double>(target) * static_cast<long double>(sorted.size());
    // sum(min(size, c)) is nondecreasing in c; binary search the last c within the limit.
    auto total_at = [&](std::size_t c) {
        long double s = 0;
        for (auto v : sorted) s += static_cast<long double>(std::min(v, c));
        return s;
    };
    std::size_t lo = 1, hi = std::max<std::size_t>(1, sorted.back());
    if (total_at(lo) > limit) return 1;
    while (lo < hi) {
        std::size_t mid = lo + (hi - lo + 1) / 2;
        if (total_at(mid) <= limit)
            lo = mid;
        else
            hi = mid - 1;
    }
    return lo;
}

// ---------------------------------------------------------------------------
// Sweeps

namespace {

BudgetRow summarize(const std::vector<ProblemResult>& results, const std::vector<PlanningProblem>& problems) {
    BudgetRow row;
    row.n = results.size();
    row.avg_se = average_states_explored(results);
    row.validity = plan_validity_rate(results);
    std::vector<std::optional<int>> oracle;
    oracle.reserve(problems.size());
    for (const auto& p : problems) oracle.push_back(p.optimal_length);
    bool have_oracle = std::all_of(oracle.begin(), oracle.end(), [](const auto& o) { return o.has_value(); });
    row.optimality = have_oracle ? plan_optimality_rate(results, oracle) : Rate{0, results.size()};
    return row;
}

double effective_budget(const BudgetRow& r) {
    return r.target ? *r.target : r.avg_se.value();
}

}  // namespace

BudgetReport budget_sweep(const std::vector<PlanningProblem>& problems, const PlannerConfig& config,
                          const std::vector<double>& budgets, int threads) {
    if (!std::is_sorted(budgets.begin(), budgets.end()))
        throw std::invalid_argument("budget grid must be sorted ascending");
    BudgetReport report;
    report.planner = config.label();

    auto defaults = evaluate_parallel(problems, config, std::nullopt, threads);
    BudgetRow default_row = summarize(defaults, problems);
    default_row.mode = "default";
    if (config.kind == PlannerKind::system1x) default_row.bias = config.controller.bias;
    report.rows.push_back(default_row);
    if (config.kind == PlannerKind::system1) return report;

    std::vector<std::size_t> sizes;
    sizes.reserve(defaults.size());
    for (const auto& r : defaults) sizes.push_back(r.states_explored);
    const double default_avg = default_row.avg_se.value();

    // Test-time control: achieved rows per bias, computed lazily and shared across targets.
    std::map<long, BudgetRow> by_bias;  // key: bias in hundredths
    auto bias_row = [&](long hundredths) -> const BudgetRow& {
        auto it = by_bias.find(hundredths);
        if (it != by_bias.end()) return it->second;
        PlannerConfig c = config;
        c.controller.bias = static_cast<double>(hundredths) / 100.0;
        BudgetRow row = summarize(evaluate_parallel(problems, c, std::nullopt, threads), problems);
        row.mode = "test-time controlled";
        row.bias = c.controller.bias;
        return by_bias.emplace(hundredths, row).first->second;
    };

    for (double target : budgets) {
        if (target < default_avg) {
            BudgetRow row;
            std::size_t cap = match_budget_cap(sizes, target);
            row = summarize(evaluate_parallel(problems, config, cap, threads), problems);
            row.mode = "truncated";
            row.cap = cap;
            if (config.kind == PlannerKind::system1x) row.bias = config.controller.bias;
            row.target = target;
            report.rows.push_back(row);
            continue;
        }
        if (config.kind == PlannerKind::system2) {
            BudgetRow row = default_row;
            row.target = target;
            report.rows.push_back(row);
            continue;
        }
        const long start = std::lround(config.controller.bias * 100.0);
        std::optional<BudgetRow> best;
        for (long b = start; b <= 100; b += 5) {
            const auto& row = bias_row(b);
            if (row.avg_se.value() <= target) best = row;
            if (config.controller.x + static_cast<double>(b) / 100.0 >= 1.0) break;  // saturated
        }
        BudgetRow row = best ? *best : default_row;
        row.target = target;
        report.rows.push_back(row);
    }

    std::stable_sort(report.rows.begin(), report.rows.end(), [](const BudgetRow& a, const BudgetRow& b) {
        double ea = effective_budget(a), eb = effective_budget(b);
        if (ea != eb) return ea < eb;
        return a.target.has_value() && !b.target.has_value();
    });
    return report;
}

namespace {

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

std::string budget_cell(const BudgetRow& r) {
    return r.target ? fmt("%g", *r.target) : std::string("default");
}

}  // namespace

std::string render_csv(std::span<const BudgetReport> reports) {
    std::string out = "planner,budget,avg_se,validity,optimality,n\n";
    for (const auto& rep : reports)
        for (const auto& r : rep.rows)
            out += rep.planner + "," + budget_cell(r) + "," + fmt("%.1f", r.avg_se.value()) + "," +
                   fmt("%.4f", r.validity.value()) + "," + fmt("%.4f", r.optimality.value()) + "," +
                   std::to_string(r.n) + "\n";
    return out;
}

std::string render_markdown(std::span<const BudgetReport> reports) {
    std::string out = "| Planner | Budget | Plan Validity | Plan Optimality | #States-Explored |\n"
                      "|---|---|---|---|---|\n";
    for (const auto& rep : reports)
        for (const auto& r : rep.rows)
            out += "| " + rep.planner + " (" + r.mode + ") | " + budget_cell(r) + " | " +
                   fmt("%.1f", 100.0 * r.validity.value()) + " | " + fmt("%.1f", 100.0 * r.optimality.value()) +
                   " | " + fmt("%.1f", r.avg_se.value()) + " |\n";
    return out;
}

nlohmann::json plot_data(std::span<const BudgetReport> reports) {
    nlohmann::json out = nlohmann::json::object();
    for (const auto& rep : reports) {
        nlohmann::json series = nlohmann::json::array();
        for (const auto& r : rep.rows)
            series.push_back({{"budget", r.target ? nlohmann::json(*r.target) : nlohmann::json("default")},
                              {"mode", r.mode},
                              {"avg_se", r.avg_se.value()},
                              {"validity", r.validity.value()},
                              {"optimality", r.optimality.value()}});
        out[rep.planner] = series;
    }
    return out;
}

}  // namespace sysx
