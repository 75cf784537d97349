#include "sysx/problem_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace sysx {

using nlohmann::json;

json plan_to_json(const Plan& plan) {
    json a = json::array();
    for (const auto& act : plan.actions) a.push_back(format_action(act));
    return a;
}

Plan plan_from_json(const json& j) {
    Plan plan;
    for (const auto& a : j) plan.actions.push_back(parse_action(a.get<std::string>()));
    return plan;
}

json to_json(const PlanningProblem& p) {
    json j;
    j["id"] = p.id;
    j["domain"] = std::string(to_string(p.domain));
    if (p.domain == Domain::maze) {
        json obstacles = json::array();
        for (auto o : p.grid.obstacles) obstacles.push_back({o.row, o.col});
        j["grid"] = {{"rows", p.grid.rows}, {"cols", p.grid.cols}, {"obstacles", obstacles}};
    } else {
        j["universe"] = std::string(p.universe.begin(), p.universe.end());
    }
    j["start"] = format_state(p.start);
    j["goal"] = format_state(p.goal);
    j["gold_plan"] = p.gold_plan ? plan_to_json(*p.gold_plan) : json(nullptr);
    j["optimal_length"] = p.optimal_length ? json(*p.optimal_length) : json(nullptr);
    j["split"] = p.split;
    return j;
}

PlanningProblem problem_from_json(const json& j) {
    PlanningProblem p;
    p.id = j.at("id").get<std::string>();
    p.domain = parse_domain(j.at("domain").get<std::string>());
    if (p.domain == Domain::maze) {
        const auto& g = j.at("grid");
        p.grid.rows = g.at("rows").get<int>();
        p.grid.cols = g.at("cols").get<int>();
        for (const auto& o : g.at("obstacles"))
            p.grid.obstacles.insert({o.at(0).get<int>(), o.at(1).get<int>()});
    } else {
        auto u = j.at("universe").get<std::string>();
        p.universe.assign(u.begin(), u.end());
        std::sort(p.universe.begin(), p.universe.end());
    }
    p.start = parse_state(j.at("start").get<std::string>());
    p.goal = parse_state(j.at("goal").get<std::string>());
    if (p.start.index() != p.goal.index() ||
        (p.domain == Domain::maze) != std::holds_alternative<MazeState>(p.start))
        throw DataError("problem '" + p.id + "': start/goal do not match domain");
    if (p.domain == Domain::maze) {
        for (const auto* s : {&std::get<MazeState>(p.start), &std::get<MazeState>(p.goal)})
            if (!p.grid.is_free(*s))
                throw DataError("problem '" + p.id + "': endpoint is not a free cell");
    } else {
        if (std::get<BlocksState>(p.start).blocks() != p.universe ||
            std::get<BlocksState>(p.goal).blocks() != p.universe)
            throw DataError("problem '" + p.id + "': endpoints do not use the block universe");
    }
    if (j.contains("gold_plan") && !j["gold_plan"].is_null()) p.gold_plan = plan_from_json(j["gold_plan"]);
    if (j.contains("optimal_length") && !j["optimal_length"].is_null())
        p.optimal_length = j["optimal_length"].get<int>();
    if (j.contains("split")) p.split = j["split"].get<std::string>();
    return p;
}

std::string problems_to_jsonl(const std::vector<PlanningProblem>& problems) {
    std::string out;
    for (const auto& p : problems) {
        out += to_json(p).dump();
        out += '\n';
    }
    return out;
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<PlanningProblem> read_problems(const std::filesystem::path& path) {
    std::istringstream in(read_text_file(path));
    std::vector<PlanningProblem> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        try {
            out.push_back(problem_from_json(json::parse(line)));
        } catch (const DataError& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        } catch (const std::exception& e) {
            throw DataError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

std::string render_maze(const PlanningProblem& p) {
    const auto& start = std::get<MazeState>(p.start);
    const auto& goal = std::get<MazeState>(p.goal);
    std::string out;
    for (int r = 0; r < p.grid.rows; ++r) {
        for (int c = 0; c < p.grid.cols; ++c) {
            MazeState s{r, c};
            char ch = '.';
            if (p.grid.is_obstacle(s)) ch = '#';
            if (s == goal) ch = 'G';
            if (s == start) ch = 'S';
            out += ch;
        }
        out += '\n';
    }
    return out;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    try {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
            out << content;
            out.flush();
            if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
        }
        std::filesystem::rename(tmp, path);
    } catch (...) {
        std::error_code ec;
        std::filesystem::remove(tmp, ec);
        throw;
    }
}

}  // namespace sysx
