#include "sysx/controller.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "sysx/rng.hpp"
#include "sysx/search.hpp"

namespace sysx {

std::string_view to_string(Mode m) {
    return m == Mode::sys1 ? "SYS1" : "SYS2";
}

std::size_t MetaPlan::sys2_count() const {
    return static_cast<std::size_t>(std::count_if(subgoals.begin(), subgoals.end(),
                                                  [](const SubGoal& s) { return s.mode == Mode::sys2; }));
}

bool MetaPlan::chains(const State& start, const State& goal) const {
    if (subgoals.empty()) return false;
    if (subgoals.front().from != start || subgoals.back().to != goal) return false;
    for (std::size_t i = 1; i < subgoals.size(); ++i)
        if (subgoals[i - 1].to != subgoals[i].from) return false;
    return true;
}

std::string_view to_string(ControllerVariant v) {
    switch (v) {
        case ControllerVariant::sliding_window: return "sliding-window";
        case ControllerVariant::edge_window: return "edge-window";
        case ControllerVariant::no_subgoal: return "no-subgoal";
        case ControllerVariant::random: return "random";
    }
    return "?";
}

ControllerVariant parse_variant(std::string_view text) {
    for (auto v : {ControllerVariant::sliding_window, ControllerVariant::edge_window,
                   ControllerVariant::no_subgoal, ControllerVariant::random})
        if (to_string(v) == text) return v;
    throw ParseError("unknown controller variant '" + std::string(text) + "'");
}

double ControllerConfig::effective_x() const {
    return std::clamp(x + bias, 0.0, 1.0);
}

void ControllerConfig::validate() const {
    if (!(x >= 0.0 && x <= 1.0)) throw std::invalid_argument("x must lie in [0, 1]");
    if (!(bias >= -1.0 && bias <= 1.0)) throw std::invalid_argument("bias must lie in [-1, 1]");
}

// ---------------------------------------------------------------------------
// Window optimization

std::size_t window_length(double x, std::size_t n) {
    auto w = static_cast<long>(std::lround(x * static_cast<double>(n)));
    return static_cast<std::size_t>(std::clamp<long>(w, 1, static_cast<long>(n)));
}

int window_objective(HardnessSelector selector, const PlanningProblem& context,
                     std::span<const State> states, std::size_t u, std::size_t v) {
    const auto& s0 = states.front();
    const auto& sg = states.back();
    return hardness(selector, context, s0, states[u]) - hardness(selector, context, states[u], states[v]) +
           hardness(selector, context, states[v], sg);
}

Window best_window(HardnessSelector selector, const PlanningProblem& context,
                   std::span<const State> states, double x, bool edges_only) {
    if (states.empty()) throw std::invalid_argument("empty state sequence");
    const std::size_t n = states.size() - 1;
    if (n == 0) return {0, 0, window_objective(selector, context, states, 0, 0)};
    const std::size_t w = window_length(x, n);

    std::vector<std::size_t> candidates;
    if (edges_only) {
        candidates.push_back(0);
        if (n - w != 0) candidates.push_back(n - w);
    } else {
        candidates.resize(n - w + 1);
        std::iota(candidates.begin(), candidates.end(), std::size_t{0});
    }
    Window best{0, 0, std::numeric_limits<int>::max()};
    for (auto u : candidates) {
        int obj = window_objective(selector, context, states, u, u + w);
        if (obj < best.objective) best = {u, u + w, obj};
    }
    return best;
}

MetaPlan decompose_states(HardnessSelector selector, const PlanningProblem& context,
                          std::span<const State> states, double x, bool edges_only) {
    if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("window decomposition needs 0 < x <= 1");
    auto win = best_window(selector, context, states, x, edges_only);
    const std::size_t n = states.size() - 1;
    MetaPlan mp;
    if (win.u > 0) mp.subgoals.push_back({states.front(), states[win.u], Mode::sys1});
    mp.subgoals.push_back({states[win.u], states[win.v], Mode::sys2});
    if (win.v < n) mp.subgoals.push_back({states[win.v], states.back(), Mode::sys1});
    return mp;
}

namespace {

std::vector<State> gold_states(const PlanningProblem& problem, const Plan& plan) {
    auto states = plan_states(problem, plan);
    if (!states || states->back() != problem.goal)
        throw std::invalid_argument("gold plan for '" + problem.id + "' does not validate");
    return std::move(*states);
}

}  // namespace

MetaPlan sliding_window_decompose(const PlanningProblem& problem, const Plan& gold_plan, double x,
                                  HardnessSelector selector) {
    auto states = gold_states(problem, gold_plan);
    return decompose_states(selector, problem, states, x, false);
}

MetaPlan edge_window_decompose(const PlanningProblem& problem, const Plan& gold_plan, double x,
                               HardnessSelector selector) {
    auto states = gold_states(problem, gold_plan);
    return decompose_states(selector, problem, states, x, true);
}

MetaPlan single_subgoal(const PlanningProblem& problem, Mode mode) {
    return MetaPlan{{SubGoal{problem.start, problem.goal, mode}}};
}

std::size_t easy_count(std::size_t n, double x) {
    double v = (1.0 - x) * static_cast<double>(n);
    return static_cast<std::size_t>(std::floor(v + 1e-9));
}

std::vector<ControllerRecord> build_controller_dataset(const std::vector<PlanningProblem>& problems,
                                                       const ControllerConfig& config) {
    config.validate();
    const std::size_t n = problems.size();
    std::vector<std::pair<int, std::size_t>> order;
    order.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!problems[i].gold_plan)
            throw std::invalid_argument("problem '" + problems[i].id + "' has no gold plan");
        order.emplace_back(hardness(config.hardness, problems[i], problems[i].start, problems[i].goal), i);
    }
    std::stable_sort(order.begin(), order.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    const std::size_t easy = easy_count(n, config.x);
    std::vector<bool> hard(n, false);
    if (config.variant == ControllerVariant::random) {
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        Rng rng(config.seed);
        shuffle(idx, rng);
        for (std::size_t k = 0; k < n - easy; ++k) hard[idx[k]] = true;
    } else {
        for (std::size_t rank = easy; rank < n; ++rank) hard[order[rank].second] = true;
    }

    std::vector<ControllerRecord> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = problems[i];
        MetaPlan mp;
        if (!hard[i]) {
            mp = single_subgoal(p, Mode::sys1);
        } else {
            switch (config.variant) {
                case ControllerVariant::sliding_window:
                case ControllerVariant::random:
                    mp = sliding_window_decompose(p, *p.gold_plan, config.x, config.hardness);
                    break;
                case ControllerVariant::edge_window:
                    mp = edge_window_decompose(p, *p.gold_plan, config.x, config.hardness);
                    break;
                case ControllerVariant::no_subgoal: mp = single_subgoal(p, Mode::sys2); break;
            }
        }
        out.push_back({p.id, std::move(mp)});
    }
    return out;
}

// ---------------------------------------------------------------------------
// Runtime gate

Calibration::Calibration(HardnessSelector selector, std::vector<int> values)
    : selector_(selector), values_(std::move(values)) {
    std::sort(values_.begin(), values_.end());
}

Calibration Calibration::fit(const std::vector<PlanningProblem>& train, HardnessSelector selector) {
    std::vector<int> values;
    values.reserve(train.size());
    for (const auto& p : train) values.push_back(hardness(selector, p, p.start, p.goal));
    return Calibration(selector, std::move(values));
}

std::optional<int> Calibration::threshold(double effective_x) const {
    if (effective_x <= 0.0) return std::nullopt;
    if (effective_x >= 1.0 || values_.empty()) return 0;
    auto pct = static_cast<std::size_t>(std::floor((1.0 - effective_x) * 100.0 + 1e-9));
    auto k = std::min(values_.size() - 1, pct * values_.size() / 100);
    return values_[k];
}

bool Calibration::is_hard(int h, double effective_x) const {
    auto tau = threshold(effective_x);
    return tau && h >= *tau;
}

nlohmann::json Calibration::to_json() const {
    nlohmann::json grid = nlohmann::json::array();
    for (int k = 0; k <= 20; ++k) {
        double x = k * 0.05;
        auto tau = threshold(x);
        grid.push_back({{"x", x}, {"tau", tau ? nlohmann::json(*tau) : nlohmann::json(nullptr)}});
    }
    return {{"selector", std::string(sysx::to_string(selector_))}, {"values", values_}, {"thresholds", grid}};
}

Calibration Calibration::from_json(const nlohmann::json& j) {
    return Calibration(parse_hardness(j.at("selector").get<std::string>()),
                       j.at("values").get<std::vector<int>>());
}

namespace {

MazeState snap_to_free(const MazeGrid& grid, MazeState s) {
    if (grid.is_free(s)) return s;
    std::optional<MazeState> best;
    int best_d = std::numeric_limits<int>::max();
    for (int r = 0; r < grid.rows; ++r)
        for (int c = 0; c < grid.cols; ++c) {
            MazeState cell{r, c};
            if (!grid.is_free(cell)) continue;
            int d = manhattan(cell, s);
            if (d < best_d) {  // row-major scan keeps the smallest (row, col) on ties
                best_d = d;
                best = cell;
            }
        }
    return best.value_or(s);
}

std::vector<State> maze_skeleton(const PlanningProblem& p) {
    auto cur = std::get<MazeState>(p.start);
    const auto goal = std::get<MazeState>(p.goal);
    std::vector<MazeState> path{cur};
    while (cur != goal) {
        for (Move m : kMoves) {
            auto next = displace(cur, m);
            if (manhattan(next, goal) < manhattan(cur, goal)) {
                cur = next;
                break;
            }
        }
        path.push_back(cur);
    }
    std::vector<State> out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        MazeState s = (i == 0 || i + 1 == path.size()) ? path[i] : snap_to_free(p.grid, path[i]);
        if (out.empty() || std::get<MazeState>(out.back()) != s) out.push_back(s);
    }
    return out;
}

std::optional<std::vector<State>> blocks_skeleton(const PlanningProblem& p) {
    std::vector<State> out{p.start};
    const auto& goal = std::get<BlocksState>(p.goal);
    const int max_steps = 2 * p.block_count();
    for (int k = 0; k < max_steps && out.back() != p.goal; ++k) {
        const auto& cur = std::get<BlocksState>(out.back());
        int cur_h = blocks_mismatch(cur, goal);
        std::optional<BlocksState> best;
        int best_h = cur_h;
        for (const auto& a : valid_actions(p, out.back())) {
            auto next = blocks_step(cur, std::get<BlocksMove>(a));
            int h = blocks_mismatch(*next.next, goal);
            if (h < best_h) {
                best_h = h;
                best = std::move(*next.next);
            }
        }
        if (!best) return std::nullopt;
        out.push_back(std::move(*best));
    }
    if (out.back() != p.goal) return std::nullopt;
    return out;
}

}  // namespace

std::optional<std::vector<State>> skeleton(const PlanningProblem& problem) {
    if (problem.domain == Domain::maze) return maze_skeleton(problem);
    return blocks_skeleton(problem);
}

RuntimeController::RuntimeController(ControllerConfig config, Calibration calibration)
    : config_(config), calibration_(std::move(calibration)) {
    config_.validate();
}

bool RuntimeController::gate_hard(const PlanningProblem& problem) const {
    const double xe = config_.effective_x();
    if (config_.variant == ControllerVariant::random) {
        Rng rng(derive_seed(config_.seed, problem.id));
        return uniform_unit(rng) < xe;
    }
    return calibration_.is_hard(hardness(config_.hardness, problem, problem.start, problem.goal), xe);
}

MetaPlan RuntimeController::decompose(const PlanningProblem& problem) const {
    if (!gate_hard(problem)) return single_subgoal(problem, Mode::sys1);
    if (config_.variant == ControllerVariant::no_subgoal) return single_subgoal(problem, Mode::sys2);
    auto states = skeleton(problem);
    if (!states) return single_subgoal(problem, Mode::sys2);
    if (states->size() < 2) return single_subgoal(problem, Mode::sys1);
    return decompose_states(config_.hardness, problem, *states, config_.effective_x(),
                            config_.variant == ControllerVariant::edge_window);
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const MetaPlan& mp) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& s : mp.subgoals)
        arr.push_back({{"from", format_state(s.from)},
                       {"to", format_state(s.to)},
                       {"mode", std::string(to_string(s.mode))}});
    return arr;
}

MetaPlan meta_plan_from_json(const nlohmann::json& j) {
    MetaPlan mp;
    for (const auto& s : j) {
        auto mode = s.at("mode").get<std::string>();
        if (mode != "SYS1" && mode != "SYS2") throw ParseError("unknown sub-goal mode '" + mode + "'");
        mp.subgoals.push_back({parse_state(s.at("from").get<std::string>()),
                               parse_state(s.at("to").get<std::string>()),
                               mode == "SYS1" ? Mode::sys1 : Mode::sys2});
    }
    return mp;
}

}  // namespace sysx
