#include "sysx/search.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <queue>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "sysx/problem_io.hpp"
#include "sysx/rng.hpp"

namespace sysx {

std::string_view to_string(Algorithm a) {
    switch (a) {
        case Algorithm::astar: return "astar";
        case Algorithm::bfs: return "bfs";
        case Algorithm::dfs: return "dfs";
    }
    return "?";
}

Algorithm parse_algorithm(std::string_view text) {
    if (text == "astar") return Algorithm::astar;
    if (text == "bfs") return Algorithm::bfs;
    if (text == "dfs") return Algorithm::dfs;
    throw ParseError("unknown search algorithm '" + std::string(text) + "'");
}

int manhattan(MazeState a, MazeState b) {
    return std::abs(a.row - b.row) + std::abs(a.col - b.col);
}

int blocks_mismatch(const BlocksState& a, const BlocksState& b) {
    int m = 0;
    for (char block : a.blocks())
        if (a.below(block) != b.below(block)) ++m;
    return m;
}

int heuristic(const State& s, const State& goal) {
    if (const auto* m = std::get_if<MazeState>(&s)) return manhattan(*m, std::get<MazeState>(goal));
    return blocks_mismatch(std::get<BlocksState>(s), std::get<BlocksState>(goal));
}

TraceConfig TraceConfig::for_domain(Domain d) {
    TraceConfig c;
    if (d == Domain::blocks) c.cap = RecordingCap{};
    return c;
}

namespace {

struct Node {
    State state;
    int g = 0;
    std::optional<std::size_t> parent;
    std::optional<Action> action;
    std::optional<std::size_t> event;
    bool closed = false;
};

/// One probe of an expansion, classified before recording.
struct Candidate {
    Probe probe;
    std::optional<State> state;
    std::optional<InvalidReason> invalid;
    int score = 0;                      // heuristic of the probed state (ranking under a cap)
    std::optional<std::size_t> node;    // node created or improved by this probe
};

class Search {
public:
    Search(Algorithm algorithm, const PlanningProblem& problem, const TraceConfig& config)
        : algorithm_(algorithm),
          problem_(problem),
          config_(config),
          rng_(derive_seed(config.seed, problem.id)) {}

    SearchRun run() {
        SearchRun out;
        out.problem_id = problem_.id;
        out.algorithm = algorithm_;
        if (problem_.start == problem_.goal) {
            out.plan = Plan{};
            return out;
        }

        nodes_.push_back({problem_.start, 0, std::nullopt, std::nullopt, std::nullopt, false});
        index_.emplace(format_state(problem_.start), 0);
        push(0);

        while (auto current = pop()) {
            std::size_t n = *current;
            nodes_[n].closed = true;
            auto found = expand(n, out.events);
            if (found) {
                out.plan = extract_plan(found->first);
                out.goal_event = found->second;
                break;
            }
        }
        return out;
    }

private:
    using Entry = std::tuple<int, int, std::uint64_t, std::size_t, int>;  // f, t, seq, node, g

    void push(std::size_t n) {
        switch (algorithm_) {
            case Algorithm::astar: {
                int t = heuristic(nodes_[n].state, problem_.goal);
                open_.emplace(nodes_[n].g + t, t, seq_++, n, nodes_[n].g);
                break;
            }
            case Algorithm::bfs:
            case Algorithm::dfs: fifo_.push_back(n); break;
        }
    }

    std::optional<std::size_t> pop() {
        if (algorithm_ == Algorithm::astar) {
            while (!open_.empty()) {
                auto [f, t, s, n, g] = open_.top();
                open_.pop();
                if (nodes_[n].closed || nodes_[n].g != g) continue;
                return n;
            }
            return std::nullopt;
        }
        if (fifo_.empty()) return std::nullopt;
        std::size_t n;
        if (algorithm_ == Algorithm::bfs) {
            n = fifo_.front();
            fifo_.pop_front();
        } else {
            n = fifo_.back();
            fifo_.pop_back();
        }
        return n;
    }

    /// Probes every action from node `n`, records the (possibly capped) events,
    /// pushes new successors. Returns (goal node, goal event) if generated.
    std::optional<std::pair<std::size_t, std::size_t>> expand(std::size_t n,
                                                              std::vector<ExplorationEvent>& events) {
        const State from = nodes_[n].state;
        const int g = nodes_[n].g + 1;
        std::vector<Candidate> cands;
        for (auto& probe : probe_actions(problem_, from)) {
            Candidate c{probe, std::nullopt, std::nullopt, 0, std::nullopt};
            if (probe.result.ok()) {
                c.state = *probe.result.next;
                auto key = format_state(*c.state);
                auto it = index_.find(key);
                bool seen = it != index_.end();
                bool improves = algorithm_ == Algorithm::astar && seen && !nodes_[it->second].closed &&
                                g < nodes_[it->second].g;
                if (seen && !improves) {
                    c.invalid = InvalidReason::already_visited;
                } else if (improves) {
                    c.node = it->second;
                } else {
                    c.node = nodes_.size();
                    nodes_.push_back({*c.state, g, std::nullopt, std::nullopt, std::nullopt, false});
                    index_.emplace(std::move(key), *c.node);
                }
            } else {
                c.invalid = probe.result.reason;
                if (const auto* m = std::get_if<Move>(&probe.action))
                    c.state = State{displace(std::get<MazeState>(from), *m)};
            }
            if (c.state) c.score = heuristic(*c.state, problem_.goal);
            cands.push_back(std::move(c));
        }

        auto keep = select_recorded(cands);
        std::optional<std::pair<std::size_t, std::size_t>> found;
        std::vector<std::size_t> fresh;
        for (std::size_t i = 0; i < cands.size(); ++i) {
            auto& c = cands[i];
            std::optional<std::size_t> event;
            if (keep[i]) {
                ExplorationEvent e;
                e.index = events.size();
                e.parent = nodes_[n].event;
                e.from = from;
                e.action = c.probe.action;
                e.state = c.state;
                e.invalid = c.invalid;
                e.g = g;
                if (algorithm_ == Algorithm::astar && c.state) {
                    e.t = c.score;
                    e.f = g + c.score;
                }
                event = e.index;
                events.push_back(std::move(e));
            }
            if (!c.node) continue;
            Node& node = nodes_[*c.node];
            node.g = g;
            node.parent = n;
            node.action = c.probe.action;
            node.event = event;
            fresh.push_back(*c.node);
            if (!found && node.state == problem_.goal && event) found = {{*c.node, *event}};
        }
        if (algorithm_ == Algorithm::dfs) std::reverse(fresh.begin(), fresh.end());
        for (auto f : fresh) push(f);
        return found;
    }

    /// Uncapped: everything. Capped: the best-scored valid probes (stable on
    /// probe order) and a seeded sample of the invalid ones.
    std::vector<bool> select_recorded(const std::vector<Candidate>& cands) {
        std::vector<bool> keep(cands.size(), !config_.cap.has_value());
        if (!config_.cap) return keep;
        std::vector<std::size_t> valid, invalid;
        for (std::size_t i = 0; i < cands.size(); ++i) (cands[i].invalid ? invalid : valid).push_back(i);
        std::stable_sort(valid.begin(), valid.end(),
                         [&](std::size_t a, std::size_t b) { return cands[a].score < cands[b].score; });
        for (std::size_t k = 0; k < valid.size() && k < static_cast<std::size_t>(config_.cap->valid); ++k)
            keep[valid[k]] = true;
        for (int k = 0; k < config_.cap->invalid && !invalid.empty(); ++k) {
            auto j = uniform_below(rng_, invalid.size());
            keep[invalid[j]] = true;
            invalid.erase(invalid.begin() + static_cast<std::ptrdiff_t>(j));
        }
        return keep;
    }

    Plan extract_plan(std::size_t n) const {
        Plan plan;
        while (nodes_[n].parent) {
            plan.actions.push_back(*nodes_[n].action);
            n = *nodes_[n].parent;
        }
        std::reverse(plan.actions.begin(), plan.actions.end());
        return plan;
    }

    Algorithm algorithm_;
    const PlanningProblem& problem_;
    TraceConfig config_;
    Rng rng_;
    std::vector<Node> nodes_;
    std::unordered_map<std::string, std::size_t> index_;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open_;
    std::deque<std::size_t> fifo_;
    std::uint64_t seq_ = 0;
};

}  // namespace

SearchRun run_search(Algorithm algorithm, const PlanningProblem& problem, const TraceConfig& config) {
    return Search(algorithm, problem, config).run();
}

SearchRun astar(const PlanningProblem& problem, const TraceConfig& config) {
    return run_search(Algorithm::astar, problem, config);
}

SearchRun bfs(const PlanningProblem& problem, const TraceConfig& config) {
    return run_search(Algorithm::bfs, problem, config);
}

SearchRun dfs(const PlanningProblem& problem, const TraceConfig& config) {
    return run_search(Algorithm::dfs, problem, config);
}

SearchRun truncate_run(const SearchRun& run, std::size_t cap) {
    if (cap == 0) throw std::invalid_argument("truncation cap must be at least 1");
    SearchRun out;
    out.problem_id = run.problem_id;
    out.algorithm = run.algorithm;
    auto keep = std::min(cap, run.events.size());
    out.events.assign(run.events.begin(), run.events.begin() + static_cast<std::ptrdiff_t>(keep));
    bool reached = run.success() && (!run.goal_event || *run.goal_event < cap);
    if (reached) {
        out.plan = run.plan;
        out.goal_event = run.goal_event;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Serialization

using nlohmann::json;

namespace {

template <class T>
json opt(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

}  // namespace

json to_json(const SearchRun& run) {
    json events = json::array();
    for (const auto& e : run.events) {
        events.push_back({
            {"i", e.index},
            {"parent", opt(e.parent)},
            {"from", format_state(e.from)},
            {"action", format_action(e.action)},
            {"state", e.state ? json(format_state(*e.state)) : json(nullptr)},
            {"validity", e.invalid ? "invalid:" + std::string(to_string(*e.invalid)) : std::string("valid")},
            {"g", e.g},
            {"t", opt(e.t)},
            {"f", opt(e.f)},
        });
    }
    return {
        {"problem_id", run.problem_id},
        {"algorithm", std::string(to_string(run.algorithm))},
        {"states_explored", run.states_explored()},
        {"success", run.success()},
        {"plan", run.plan ? plan_to_json(*run.plan) : json(nullptr)},
        {"goal_event", opt(run.goal_event)},
        {"events", events},
    };
}

SearchRun search_run_from_json(const json& j) {
    SearchRun run;
    run.problem_id = j.at("problem_id").get<std::string>();
    run.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (!j.at("plan").is_null()) run.plan = plan_from_json(j["plan"]);
    run.goal_event = get_opt<std::size_t>(j, "goal_event");
    for (const auto& je : j.at("events")) {
        ExplorationEvent e;
        e.index = je.at("i").get<std::size_t>();
        e.parent = get_opt<std::size_t>(je, "parent");
        e.from = parse_state(je.at("from").get<std::string>());
        e.action = parse_action(je.at("action").get<std::string>());
        if (!je.at("state").is_null()) e.state = parse_state(je["state"].get<std::string>());
        auto validity = je.at("validity").get<std::string>();
        if (validity != "valid") {
            auto r = validity.rfind("invalid:", 0) == 0 ? parse_invalid_reason(validity.substr(8)) : std::nullopt;
            if (!r) throw ParseError("bad validity tag '" + validity + "'");
            e.invalid = r;
        }
        e.g = je.at("g").get<int>();
        e.t = get_opt<int>(je, "t");
        e.f = get_opt<int>(je, "f");
        run.events.push_back(std::move(e));
    }
    return run;
}

std::string render_trace(const SearchRun& run) {
    std::ostringstream out;
    for (const auto& e : run.events) {
        out << e.index << ' ' << format_action(e.action) << ' '
            << (e.state ? format_state(*e.state) : std::string("-")) << ' '
            << (e.invalid ? "invalid:" + std::string(to_string(*e.invalid)) : std::string("valid"))
            << " g=" << e.g;
        if (e.t) out << " t=" << *e.t;
        if (e.f) out << " f=" << *e.f;
        out << '\n';
    }
    out << (run.success() ? "goal reached" : "no plan") << " after " << run.states_explored() << " states\n";
    return out.str();
}

}  // namespace sysx
