#include "sysx/emitter.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "sysx/problem_io.hpp"
#include "sysx/rng.hpp"

namespace sysx {

TraceText trace_mirror(const SearchRun& run) {
    TraceText t;
    t.plan = run.plan;
    t.lines.reserve(run.events.size());
    for (const auto& e : run.events) t.lines.push_back({e.index, e.from, e.action, e.invalid, e.g, e.t});
    return t;
}

// ---------------------------------------------------------------------------
// Verbalization

std::string verbalize(const Plan& plan) {
    std::string out = "PLAN:\n";
    for (const auto& a : plan.actions) out += format_action(a) + "\n";
    return out;
}

namespace {

std::string plan_block(const std::optional<Plan>& plan) {
    return plan ? verbalize(*plan) : std::string("PLAN: none\n");
}

}  // namespace

std::string verbalize(const TraceText& trace) {
    std::string out;
    for (const auto& l : trace.lines) {
        out += "step " + std::to_string(l.step) + " | from " + format_state(l.from) + " | action " +
               format_action(l.action) + " | " +
               (l.invalid ? "invalid:" + std::string(to_string(*l.invalid)) : std::string("valid")) +
               " | g=" + std::to_string(l.g) + " t=" + (l.t ? std::to_string(*l.t) : std::string("-")) + "\n";
    }
    return out + plan_block(trace.plan);
}

std::string verbalize(const SearchRun& run) {
    return verbalize(trace_mirror(run));
}

std::string verbalize(const MetaPlan& meta_plan) {
    std::string out;
    for (std::size_t k = 0; k < meta_plan.subgoals.size(); ++k) {
        const auto& s = meta_plan.subgoals[k];
        out += "subgoal " + std::to_string(k + 1) + " | " + format_state(s.from) + " -> " + format_state(s.to) +
               " | " + std::string(to_string(s.mode)) + "\n";
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        if (nl == std::string_view::npos) nl = text.size();
        auto line = text.substr(pos, nl - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        pos = nl + 1;
    }
    return lines;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto bar = line.find('|', pos);
        out.push_back(trim(line.substr(pos, bar == std::string_view::npos ? std::string_view::npos : bar - pos)));
        if (bar == std::string_view::npos) break;
        pos = bar + 1;
    }
    return out;
}

[[noreturn]] void fail(std::size_t lineno, std::string_view token, std::string_view what) {
    throw ParseError("line " + std::to_string(lineno) + ": " + std::string(what) + " '" + std::string(token) + "'");
}

template <class T>
T parse_number(std::string_view s, std::size_t lineno) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) fail(lineno, s, "bad number");
    return v;
}

std::string_view strip_prefix(std::string_view s, std::string_view prefix, std::size_t lineno) {
    if (s.substr(0, prefix.size()) != prefix) fail(lineno, s, "expected '" + std::string(prefix) + "' in");
    return s.substr(prefix.size());
}

/// Parses the block starting at lines[header]; returns nullopt for "PLAN: none".
std::optional<Plan> parse_plan_block(const std::vector<std::string_view>& lines, std::size_t header) {
    auto head = trim(lines[header]);
    std::optional<Plan> plan;
    if (head == "PLAN: none") {
        plan = std::nullopt;
    } else {
        plan = Plan{};
    }
    for (std::size_t i = header + 1; i < lines.size(); ++i) {
        auto l = trim(lines[i]);
        if (l.empty()) continue;
        if (!plan) fail(i + 1, l, "unexpected text after empty plan");
        try {
            plan->actions.push_back(parse_action(l));
        } catch (const ParseError&) {
            fail(i + 1, l, "unknown action");
        }
    }
    return plan;
}

std::optional<std::size_t> find_plan_header(const std::vector<std::string_view>& lines) {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        auto l = trim(lines[i]);
        if (l == "PLAN:" || l == "PLAN: none") return i;
    }
    return std::nullopt;
}

State parse_state_at(std::string_view s, std::size_t lineno) {
    try {
        return parse_state(s);
    } catch (const ParseError&) {
        fail(lineno, s, "malformed state");
    }
}

}  // namespace

Plan parse_plan_text(std::string_view text) {
    auto lines = split_lines(text);
    auto header = find_plan_header(lines);
    if (!header) throw ParseError("line " + std::to_string(lines.size() + 1) + ": missing 'PLAN:' header");
    auto plan = parse_plan_block(lines, *header);
    if (!plan) throw ParseError("line " + std::to_string(*header + 1) + ": plan is marked 'none'");
    return *plan;
}

TraceText parse_trace_text(std::string_view text) {
    auto lines = split_lines(text);
    auto header = find_plan_header(lines);
    if (!header) throw ParseError("line " + std::to_string(lines.size() + 1) + ": missing 'PLAN:' header");
    TraceText out;
    for (std::size_t i = 0; i < *header; ++i) {
        const std::size_t lineno = i + 1;
        auto l = trim(lines[i]);
        if (l.empty()) continue;
        auto f = split_fields(l);
        if (f.size() != 5) fail(lineno, l, "expected 5 fields in");
        TraceLine tl;
        tl.step = parse_number<std::size_t>(strip_prefix(f[0], "step ", lineno), lineno);
        tl.from = parse_state_at(strip_prefix(f[1], "from ", lineno), lineno);
        auto action = strip_prefix(f[2], "action ", lineno);
        try {
            tl.action = parse_action(action);
        } catch (const ParseError&) {
            fail(lineno, action, "unknown action");
        }
        if (f[3] != "valid") {
            auto reason = parse_invalid_reason(strip_prefix(f[3], "invalid:", lineno));
            if (!reason) fail(lineno, f[3], "unknown validity");
            tl.invalid = reason;
        }
        auto scores = f[4];
        auto space = scores.find(' ');
        if (space == std::string_view::npos) fail(lineno, scores, "malformed scores");
        tl.g = parse_number<int>(strip_prefix(scores.substr(0, space), "g=", lineno), lineno);
        auto t = strip_prefix(trim(scores.substr(space + 1)), "t=", lineno);
        if (t != "-") tl.t = parse_number<int>(t, lineno);
        out.lines.push_back(std::move(tl));
    }
    out.plan = parse_plan_block(lines, *header);
    return out;
}

MetaPlan parse_meta_plan_text(std::string_view text) {
    auto lines = split_lines(text);
    MetaPlan mp;
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const std::size_t lineno = i + 1;
        auto l = trim(lines[i]);
        if (l.empty()) continue;
        auto f = split_fields(l);
        if (f.size() != 3) fail(lineno, l, "expected 3 fields in");
        auto k = parse_number<std::size_t>(strip_prefix(f[0], "subgoal ", lineno), lineno);
        if (k != mp.subgoals.size() + 1) fail(lineno, f[0], "out-of-order");
        auto arrow = f[1].find(" -> ");
        if (arrow == std::string_view::npos) fail(lineno, f[1], "missing '->' in");
        SubGoal sg;
        sg.from = parse_state_at(f[1].substr(0, arrow), lineno);
        sg.to = parse_state_at(f[1].substr(arrow + 4), lineno);
        if (f[2] == "SYS1")
            sg.mode = Mode::sys1;
        else if (f[2] == "SYS2")
            sg.mode = Mode::sys2;
        else
            fail(lineno, f[2], "unknown mode");
        mp.subgoals.push_back(std::move(sg));
    }
    return mp;
}

std::string render_problem(const PlanningProblem& p) {
    std::string out;
    if (p.domain == Domain::maze) {
        out += "maze " + std::to_string(p.grid.rows) + "x" + std::to_string(p.grid.cols) + "\n";
        out += render_maze(p);
    } else {
        out += "blocks";
        for (char b : p.universe) (out += ' ') += b;
        out += "\n";
    }
    out += "start " + format_state(p.start) + "\n";
    out += "goal " + format_state(p.goal) + "\n";
    return out;
}

nlohmann::json to_json(const TraceText& t) {
    nlohmann::json lines = nlohmann::json::array();
    for (const auto& l : t.lines)
        lines.push_back({{"step", l.step},
                         {"from", format_state(l.from)},
                         {"action", format_action(l.action)},
                         {"validity", l.invalid ? "invalid:" + std::string(to_string(*l.invalid)) : std::string("valid")},
                         {"g", l.g},
                         {"t", l.t ? nlohmann::json(*l.t) : nlohmann::json(nullptr)}});
    return {{"events", lines}, {"plan", t.plan ? plan_to_json(*t.plan) : nlohmann::json(nullptr)}};
}

TraceText trace_text_from_json(const nlohmann::json& j) {
    TraceText t;
    for (const auto& l : j.at("events")) {
        TraceLine tl;
        tl.step = l.at("step").get<std::size_t>();
        tl.from = parse_state(l.at("from").get<std::string>());
        tl.action = parse_action(l.at("action").get<std::string>());
        auto v = l.at("validity").get<std::string>();
        if (v != "valid") {
            tl.invalid = parse_invalid_reason(v.substr(std::min<std::size_t>(8, v.size())));
            if (!tl.invalid) throw ParseError("bad validity '" + v + "'");
        }
        tl.g = l.at("g").get<int>();
        if (!l.at("t").is_null()) tl.t = l["t"].get<int>();
        t.lines.push_back(std::move(tl));
    }
    if (!j.at("plan").is_null()) t.plan = plan_from_json(j["plan"]);
    return t;
}

// ---------------------------------------------------------------------------
// Records

std::string_view to_string(RecordKind k) {
    switch (k) {
        case RecordKind::sys1: return "sys1";
        case RecordKind::sys2: return "sys2";
        case RecordKind::controller: return "controller";
    }
    return "?";
}

nlohmann::json DatasetRecord::to_json() const {
    return {{"id", id},
            {"kind", std::string(sysx::to_string(kind))},
            {"input_text", input_text},
            {"target_text", target_text},
            {"structured", structured},
            {"template_version", std::string(kTemplateVersion)}};
}

DatasetRecord make_sys1_record(const PlanningProblem& problem) {
    if (!problem.gold_plan) throw std::invalid_argument("problem '" + problem.id + "' has no gold plan");
    return {problem.id, RecordKind::sys1, render_problem(problem), verbalize(*problem.gold_plan),
            plan_to_json(*problem.gold_plan)};
}

DatasetRecord make_sys2_record(const PlanningProblem& problem, const SearchRun& run) {
    auto mirror = trace_mirror(run);
    return {problem.id, RecordKind::sys2, render_problem(problem), verbalize(mirror), to_json(mirror)};
}

DatasetRecord make_controller_record(const PlanningProblem& problem, const MetaPlan& meta_plan) {
    return {problem.id, RecordKind::controller, render_problem(problem), verbalize(meta_plan), to_json(meta_plan)};
}

bool round_trips(const DatasetRecord& r) {
    try {
        switch (r.kind) {
            case RecordKind::sys1: return parse_plan_text(r.target_text) == plan_from_json(r.structured);
            case RecordKind::sys2: return parse_trace_text(r.target_text) == trace_text_from_json(r.structured);
            case RecordKind::controller:
                return parse_meta_plan_text(r.target_text) == meta_plan_from_json(r.structured);
        }
    } catch (const ParseError&) {
        return false;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Emission

nlohmann::json Manifest::to_json() const {
    nlohmann::json files_json = nlohmann::json::array();
    for (const auto& f : files) files_json.push_back({{"name", f.name}, {"records", f.records}, {"fnv1a", f.fnv1a}});
    return {{"files", files_json},
            {"template_version", template_version},
            {"seed", seed},
            {"config_hash", config_hash}};
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

Manifest emit_datasets(const std::vector<PlanningProblem>& problems,
                       const std::vector<ControllerRecord>& controller, const EmitConfig& config,
                       const std::filesystem::path& out_dir) {
    std::map<std::string, const PlanningProblem*> by_id;
    for (const auto& p : problems) by_id[p.id] = &p;

    const auto n = static_cast<long>(problems.size());
    std::vector<std::string> sys1_lines(problems.size()), sys2_lines(problems.size());
    std::vector<std::string> errors(problems.size());
#pragma omp parallel for schedule(dynamic, 8)
    for (long i = 0; i < n; ++i) {
        const auto& p = problems[static_cast<std::size_t>(i)];
        try {
            sys1_lines[static_cast<std::size_t>(i)] = make_sys1_record(p).to_json().dump() + "\n";
            TraceConfig trace = config.trace.value_or(TraceConfig::for_domain(p.domain));
            auto run = run_search(config.algorithm, p, trace);
            sys2_lines[static_cast<std::size_t>(i)] = make_sys2_record(p, run).to_json().dump() + "\n";
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = p.id + ": " + e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::invalid_argument(e);

    std::string controller_text;
    for (const auto& rec : controller) {
        auto it = by_id.find(rec.problem_id);
        if (it == by_id.end())
            throw std::invalid_argument("controller record for unknown problem '" + rec.problem_id + "'");
        controller_text += make_controller_record(*it->second, rec.meta_plan).to_json().dump() + "\n";
    }

    auto join = [](const std::vector<std::string>& v) {
        std::string s;
        for (const auto& x : v) s += x;
        return s;
    };
    const std::vector<std::pair<std::string, std::string>> contents{
        {"sys1.jsonl", join(sys1_lines)},
        {"sys2.jsonl", join(sys2_lines)},
        {"controller.jsonl", std::move(controller_text)},
    };

    Manifest m;
    m.template_version = std::string(kTemplateVersion);
    m.seed = config.seed;
    nlohmann::json cfg = {{"algorithm", std::string(to_string(config.algorithm))},
                          {"seed", config.seed},
                          {"settings", config.settings}};
    if (config.trace) {
        cfg["trace_seed"] = config.trace->seed;
        if (config.trace->cap) cfg["cap"] = {config.trace->cap->valid, config.trace->cap->invalid};
    }
    m.config_hash = hex64(fnv1a(cfg.dump()));
    m.files.push_back({"sys1.jsonl", problems.size(), hex64(fnv1a(contents[0].second))});
    m.files.push_back({"sys2.jsonl", problems.size(), hex64(fnv1a(contents[1].second))});
    m.files.push_back({"controller.jsonl", controller.size(), hex64(fnv1a(contents[2].second))});

    std::vector<std::filesystem::path> written;
    try {
        for (const auto& [name, body] : contents) {
            write_file_atomic(out_dir / name, body);
            written.push_back(out_dir / name);
        }
        write_file_atomic(out_dir / "manifest.json", m.to_json().dump(2) + "\n");
    } catch (const std::exception& e) {
        std::error_code ec;
        for (const auto& path : written) std::filesystem::remove(path, ec);
        throw std::runtime_error("writing datasets to '" + out_dir.string() + "': " + e.what());
    }
    return m;
}

}  // namespace sysx
