#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "sysx/controller.hpp"
#include "sysx/domain.hpp"
#include "sysx/search.hpp"

namespace sysx {

inline constexpr std::string_view kTemplateVersion = "sysx-text-v1";

/// What a verbalized trajectory carries: one line per recorded event plus the
/// final plan. Parent links, probed states and f are derivable and not written.
struct TraceLine {
    std::size_t step = 0;
    State from;
    Action action;
    std::optional<InvalidReason> invalid;
    int g = 0;
    std::optional<int> t;
    bool operator==(const TraceLine&) const = default;
};

struct TraceText {
    std::vector<TraceLine> lines;
    std::optional<Plan> plan;
    bool operator==(const TraceText&) const = default;
};

TraceText trace_mirror(const SearchRun& run);

/// "PLAN:" followed by one action per line ("PLAN: none" when absent).
std::string verbalize(const Plan& plan);
/// "step <i> | from <state> | action <a> | <valid|invalid:reason> | g=<g> t=<t>"
/// per event, then the plan block.
std::string verbalize(const TraceText& trace);
std::string verbalize(const SearchRun& run);
/// "subgoal <k> | <from> -> <to> | <SYS1|SYS2>", k from 1.
std::string verbalize(const MetaPlan& meta_plan);

/// Strict parse of the PLAN: block; lines before the header are ignored. Errors
/// name the 1-based line and the offending token.
Plan parse_plan_text(std::string_view text);
TraceText parse_trace_text(std::string_view text);
MetaPlan parse_meta_plan_text(std::string_view text);

/// Problem description fed to every planner role.
std::string render_problem(const PlanningProblem& problem);

nlohmann::json to_json(const TraceText& t);
TraceText trace_text_from_json(const nlohmann::json& j);

enum class RecordKind { sys1, sys2, controller };
std::string_view to_string(RecordKind k);

struct DatasetRecord {
    std::string id;
    RecordKind kind = RecordKind::sys1;
    std::string input_text;
    std::string target_text;
    nlohmann::json structured;

    nlohmann::json to_json() const;
};

DatasetRecord make_sys1_record(const PlanningProblem& problem);
DatasetRecord make_sys2_record(const PlanningProblem& problem, const SearchRun& run);
DatasetRecord make_controller_record(const PlanningProblem& problem, const MetaPlan& meta_plan);

/// parse(target_text) reproduces `structured`.
bool round_trips(const DatasetRecord& record);

struct EmitConfig {
    Algorithm algorithm = Algorithm::astar;
    /// Defaults to TraceConfig::for_domain (3 valid / 2 invalid for Blocksworld).
    std::optional<TraceConfig> trace;
    std::uint64_t seed = 0;
    /// Free-form generation settings folded into the manifest's config hash.
    nlohmann::json settings = nlohmann::json::object();
};

struct EmittedFile {
    std::string name;
    std::size_t records = 0;
    std::string fnv1a;
};

struct Manifest {
    std::vector<EmittedFile> files;
    std::string template_version;
    std::uint64_t seed = 0;
    std::string config_hash;

    nlohmann::json to_json() const;
};

/// Writes sys1.jsonl, sys2.jsonl, controller.jsonl and manifest.json under
/// `out_dir`. Nothing is left behind if any write fails.
Manifest emit_datasets(const std::vector<PlanningProblem>& problems,
                       const std::vector<ControllerRecord>& controller, const EmitConfig& config,
                       const std::filesystem::path& out_dir);

}  // namespace sysx
