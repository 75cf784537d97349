#pragma once

#include <string_view>
#include <vector>

#include "sysx/domain.hpp"

namespace sysx {

enum class HardnessSelector { maze_obstacles, maze_manhattan, blocks_distance };

std::string_view to_string(HardnessSelector s);
HardnessSelector parse_hardness(std::string_view text);
Domain domain_of(HardnessSelector s);
HardnessSelector default_hardness(Domain d);

/// maze-obstacles: obstacles inside the closed rectangle spanned by a and b.
/// maze-manhattan: manhattan(a, b).
/// blocks-distance: +1 per block whose block below or block above differs
/// between a and b, +1 more if that block is not on the table in a.
int hardness(HardnessSelector selector, const PlanningProblem& context, const State& a, const State& b);

/// Stable ascending sort by hardness(start, goal).
std::vector<PlanningProblem> rank_problems(std::vector<PlanningProblem> problems, HardnessSelector selector);

}  // namespace sysx
