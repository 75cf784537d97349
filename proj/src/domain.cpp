#include "sysx/domain.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace sysx {

std::string_view to_string(Domain d) {
    return d == Domain::maze ? "maze" : "blocks";
}

Domain parse_domain(std::string_view text) {
    if (text == "maze") return Domain::maze;
    if (text == "blocks") return Domain::blocks;
    throw ParseError("unknown domain '" + std::string(text) + "'");
}

Move opposite(Move m) {
    switch (m) {
        case Move::up: return Move::down;
        case Move::down: return Move::up;
        case Move::left: return Move::right;
        case Move::right: return Move::left;
    }
    return m;
}

MazeState displace(MazeState s, Move m) {
    switch (m) {
        case Move::up: return {s.row - 1, s.col};
        case Move::down: return {s.row + 1, s.col};
        case Move::left: return {s.row, s.col - 1};
        case Move::right: return {s.row, s.col + 1};
    }
    return s;
}

BlocksState::BlocksState(std::vector<std::vector<char>> stacks) {
    std::vector<char> seen;
    for (auto& stack : stacks) {
        if (stack.empty()) continue;
        for (char b : stack) seen.push_back(b);
        stacks_.push_back(std::move(stack));
    }
    std::sort(seen.begin(), seen.end());
    if (std::adjacent_find(seen.begin(), seen.end()) != seen.end())
        throw std::invalid_argument("blocks state repeats a block label");
    std::sort(stacks_.begin(), stacks_.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
}

std::vector<char> BlocksState::blocks() const {
    std::vector<char> out;
    for (const auto& s : stacks_) out.insert(out.end(), s.begin(), s.end());
    std::sort(out.begin(), out.end());
    return out;
}

std::size_t BlocksState::block_count() const {
    std::size_t n = 0;
    for (const auto& s : stacks_) n += s.size();
    return n;
}

bool BlocksState::contains(char block) const {
    for (const auto& s : stacks_)
        if (std::find(s.begin(), s.end(), block) != s.end()) return true;
    return false;
}

bool BlocksState::is_clear(char block) const {
    for (const auto& s : stacks_)
        if (s.back() == block) return true;
    return false;
}

std::optional<char> BlocksState::below(char block) const {
    for (const auto& s : stacks_) {
        auto it = std::find(s.begin(), s.end(), block);
        if (it == s.end()) continue;
        if (it == s.begin()) return std::nullopt;
        return *(it - 1);
    }
    return std::nullopt;
}

std::optional<char> BlocksState::above(char block) const {
    for (const auto& s : stacks_) {
        auto it = std::find(s.begin(), s.end(), block);
        if (it == s.end()) continue;
        if (it + 1 == s.end()) return std::nullopt;
        return *(it + 1);
    }
    return std::nullopt;
}

std::string_view to_string(InvalidReason r) {
    switch (r) {
        case InvalidReason::out_of_bounds: return "out-of-bounds";
        case InvalidReason::obstacle: return "obstacle";
        case InvalidReason::already_visited: return "already-visited";
        case InvalidReason::block_not_clear: return "block-not-clear";
        case InvalidReason::destination_not_clear: return "destination-not-clear";
        case InvalidReason::destination_missing: return "destination-missing";
        case InvalidReason::self_move: return "self-move";
    }
    return "?";
}

std::optional<InvalidReason> parse_invalid_reason(std::string_view text) {
    for (auto r : {InvalidReason::out_of_bounds, InvalidReason::obstacle,
                   InvalidReason::already_visited, InvalidReason::block_not_clear,
                   InvalidReason::destination_not_clear, InvalidReason::destination_missing,
                   InvalidReason::self_move})
        if (to_string(r) == text) return r;
    return std::nullopt;
}

PlanningProblem PlanningProblem::with_endpoints(State from, State to, std::string sub_id) const {
    PlanningProblem p;
    p.id = std::move(sub_id);
    p.domain = domain;
    p.grid = grid;
    p.universe = universe;
    p.start = std::move(from);
    p.goal = std::move(to);
    p.split = split;
    return p;
}

Step<MazeState> maze_step(const MazeGrid& grid, MazeState state, Move move) {
    MazeState next = displace(state, move);
    if (!grid.in_bounds(next)) return {std::nullopt, InvalidReason::out_of_bounds};
    if (grid.is_obstacle(next)) return {std::nullopt, InvalidReason::obstacle};
    return {next, {}};
}

Step<BlocksState> blocks_step(const BlocksState& state, BlocksMove move) {
    if (!state.contains(move.block))
        throw std::invalid_argument(std::string("moved block '") + move.block + "' does not exist");
    if (move.dest == move.block) return {std::nullopt, InvalidReason::self_move};
    if (!state.is_clear(move.block)) return {std::nullopt, InvalidReason::block_not_clear};
    if (move.dest == kTable) {
        if (!state.below(move.block)) return {std::nullopt, InvalidReason::self_move};
    } else {
        if (!state.contains(move.dest)) return {std::nullopt, InvalidReason::destination_missing};
        if (!state.is_clear(move.dest)) return {std::nullopt, InvalidReason::destination_not_clear};
    }

    auto stacks = state.stacks();
    for (auto& s : stacks)
        if (s.back() == move.block) s.pop_back();
    if (move.dest == kTable) {
        stacks.push_back({move.block});
    } else {
        for (auto& s : stacks)
            if (!s.empty() && s.back() == move.dest) {
                s.push_back(move.block);
                break;
            }
    }
    return {BlocksState(std::move(stacks)), {}};
}

Step<State> step(const PlanningProblem& problem, const State& state, const Action& action) {
    if (problem.domain == Domain::maze) {
        auto r = maze_step(problem.grid, std::get<MazeState>(state), std::get<Move>(action));
        if (!r.ok()) return {std::nullopt, r.reason};
        return {State{*r.next}, {}};
    }
    auto r = blocks_step(std::get<BlocksState>(state), std::get<BlocksMove>(action));
    if (!r.ok()) return {std::nullopt, r.reason};
    return {State{std::move(*r.next)}, {}};
}

std::vector<Probe> probe_actions(const PlanningProblem& problem, const State& state) {
    std::vector<Probe> out;
    if (problem.domain == Domain::maze) {
        out.reserve(kMoves.size());
        for (Move m : kMoves) out.push_back({m, step(problem, state, m)});
        return out;
    }
    const auto& bs = std::get<BlocksState>(state);
    auto blocks = bs.blocks();
    for (char b : blocks) {
        for (char d : blocks) {
            if (d == b) continue;
            BlocksMove m{b, d};
            out.push_back({m, step(problem, state, m)});
        }
        BlocksMove m{b, kTable};
        out.push_back({m, step(problem, state, m)});
    }
    return out;
}

std::vector<Action> valid_actions(const PlanningProblem& problem, const State& state) {
    std::vector<Action> out;
    for (auto& p : probe_actions(problem, state))
        if (p.result.ok()) out.push_back(p.action);
    return out;
}

namespace {

bool action_matches(Domain d, const Action& a) {
    return d == Domain::maze ? std::holds_alternative<Move>(a)
                             : std::holds_alternative<BlocksMove>(a);
}

bool block_exists(const State& s, const Action& a) {
    if (!std::holds_alternative<BlocksMove>(a)) return true;
    return std::get<BlocksState>(s).contains(std::get<BlocksMove>(a).block);
}

}  // namespace

Validation validate_plan(const PlanningProblem& problem, const Plan& plan) {
    State cur = problem.start;
    for (std::size_t i = 0; i < plan.actions.size(); ++i) {
        const auto& a = plan.actions[i];
        if (!action_matches(problem.domain, a) || !block_exists(cur, a))
            return {false, i + 1, std::nullopt};
        auto r = step(problem, cur, a);
        if (!r.ok()) return {false, i + 1, r.reason};
        cur = std::move(*r.next);
    }
    return {cur == problem.goal, std::nullopt, std::nullopt};
}

std::optional<std::vector<State>> plan_states(const PlanningProblem& problem, const Plan& plan) {
    std::vector<State> states{problem.start};
    for (const auto& a : plan.actions) {
        if (!action_matches(problem.domain, a) || !block_exists(states.back(), a))
            return std::nullopt;
        auto r = step(problem, states.back(), a);
        if (!r.ok()) return std::nullopt;
        states.push_back(std::move(*r.next));
    }
    return states;
}

// ---------------------------------------------------------------------------
// Text forms

std::string format_state(const State& s) {
    if (const auto* m = std::get_if<MazeState>(&s))
        return "(" + std::to_string(m->row) + "," + std::to_string(m->col) + ")";
    std::string out;
    for (const auto& stack : std::get<BlocksState>(s).stacks()) {
        out += '[';
        for (std::size_t i = 0; i < stack.size(); ++i) {
            if (i) out += ',';
            out += stack[i];
        }
        out += ']';
    }
    return out;
}

std::string format_action(const Action& a) {
    if (const auto* m = std::get_if<Move>(&a)) {
        switch (*m) {
            case Move::up: return "up";
            case Move::down: return "down";
            case Move::left: return "left";
            case Move::right: return "right";
        }
    }
    const auto& b = std::get<BlocksMove>(a);
    std::string out = "move(";
    out += b.block;
    out += ',';
    out += b.dest == kTable ? std::string("table") : std::string(1, b.dest);
    out += ')';
    return out;
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

int parse_int(std::string_view s, std::string_view whole) {
    s = trim(s);
    int v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw ParseError("malformed state '" + std::string(whole) + "'");
    return v;
}

bool is_label(char c) { return c >= 'A' && c <= 'Z'; }

}  // namespace

State parse_state(std::string_view text) {
    auto t = trim(text);
    if (t.size() >= 5 && t.front() == '(' && t.back() == ')') {
        auto body = t.substr(1, t.size() - 2);
        auto comma = body.find(',');
        if (comma == std::string_view::npos)
            throw ParseError("malformed state '" + std::string(text) + "'");
        return MazeState{parse_int(body.substr(0, comma), text), parse_int(body.substr(comma + 1), text)};
    }
    if (t.empty() || t.front() != '[')
        throw ParseError("malformed state '" + std::string(text) + "'");

    std::vector<std::vector<char>> stacks;
    std::size_t i = 0;
    while (i < t.size()) {
        if (t[i] != '[') throw ParseError("malformed state '" + std::string(text) + "'");
        auto close = t.find(']', i);
        if (close == std::string_view::npos)
            throw ParseError("malformed state '" + std::string(text) + "'");
        auto body = t.substr(i + 1, close - i - 1);
        std::vector<char> stack;
        for (std::size_t k = 0; k < body.size(); ++k) {
            bool want_label = k % 2 == 0;
            if (want_label ? !is_label(body[k]) : body[k] != ',')
                throw ParseError("malformed state '" + std::string(text) + "'");
            if (want_label) stack.push_back(body[k]);
        }
        if (stack.empty() || body.size() % 2 == 0)
            throw ParseError("malformed state '" + std::string(text) + "'");
        stacks.push_back(std::move(stack));
        i = close + 1;
    }
    try {
        return BlocksState(std::move(stacks));
    } catch (const std::invalid_argument&) {
        throw ParseError("repeated block in state '" + std::string(text) + "'");
    }
}

Action parse_action(std::string_view text) {
    auto t = trim(text);
    if (t == "up") return Move::up;
    if (t == "down") return Move::down;
    if (t == "left") return Move::left;
    if (t == "right") return Move::right;
    if (t.size() >= 9 && t.substr(0, 5) == "move(" && t.back() == ')' && t[6] == ',' &&
        is_label(t[5])) {
        auto dest = t.substr(7, t.size() - 8);
        if (dest == "table") return BlocksMove{t[5], kTable};
        if (dest.size() == 1 && is_label(dest[0])) return BlocksMove{t[5], dest[0]};
    }
    throw ParseError("unknown action '" + std::string(t) + "'");
}

}  // namespace sysx
