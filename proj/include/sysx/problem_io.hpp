#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "sysx/domain.hpp"

namespace sysx {

/// Input file is unreadable or its contents are corrupt.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const PlanningProblem& p);
PlanningProblem problem_from_json(const nlohmann::json& j);

nlohmann::json plan_to_json(const Plan& plan);
Plan plan_from_json(const nlohmann::json& j);

/// One problem per line.
std::string problems_to_jsonl(const std::vector<PlanningProblem>& problems);
std::vector<PlanningProblem> read_problems(const std::filesystem::path& path);

/// Rows of `.` free, `#` obstacle, `S` start, `G` goal.
std::string render_maze(const PlanningProblem& p);

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a sibling temporary and renames, so readers never observe a
/// partially written file. The temporary is removed on failure.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace sysx
