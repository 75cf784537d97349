#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include <unistd.h>

#include "support.hpp"
#include "sysx/emitter.hpp"
#include "sysx/generator.hpp"
#include "sysx/problem_io.hpp"

using namespace sysx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("sysx_emit_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<PlanningProblem> small_mazes() {
    MazeGenConfig c;
    c.train = 160;
    c.val = 16;
    c.test = 16;
    return generate_maze_dataset(5, c).train;
}

std::vector<PlanningProblem> small_blocks() {
    BlocksGenConfig c;
    c.train = 120;
    c.val = 10;
    c.test = 10;
    return generate_blocks_dataset(5, c).all();
}

std::size_t count_lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

}  // namespace

TEST_CASE("plan text") {
    CHECK(verbalize(Plan{}) == "PLAN:\n");
    CHECK(parse_plan_text("PLAN:\n").length() == 0);
    Plan p{{Move::right, Move::down}};
    CHECK(verbalize(p) == "PLAN:\nright\ndown\n");
    CHECK(parse_plan_text("PLAN:\nright\ndown\n") == p);
    CHECK(parse_plan_text("step 0 | whatever\nPLAN:\r\nright\r\n\ndown") == p);

    try {
        parse_plan_text("PLAN:\nright\ndiag\n");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        std::string msg = e.what();
        CHECK(msg.find("line 3") != std::string::npos);
        CHECK(msg.find("diag") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_plan_text("right\ndown\n"), ParseError);
    CHECK_THROWS_AS(parse_plan_text("PLAN: none\n"), ParseError);

    std::mt19937_64 rng(21);
    const std::vector<Action> alphabet{Move::up,         Move::down,         Move::left,
                                       Move::right,      BlocksMove{'A', 'B'}, BlocksMove{'G', kTable}};
    for (int i = 0; i < 500; ++i) {
        Plan r;
        for (std::size_t k = rng() % 12; k > 0; --k) r.actions.push_back(alphabet[rng() % alphabet.size()]);
        CHECK(parse_plan_text(verbalize(r)) == r);
    }
}

TEST_CASE("trace text") {
    auto p = testsupport::maze(3, 3, {}, {0, 0}, {0, 1});
    auto run = astar(p);
    auto text = verbalize(run);
    CHECK(text.find("step 0 | from (0,0) | action up | invalid:out-of-bounds | g=1 t=") == 0);
    CHECK(count_lines(text) == run.events.size() + 1 + run.plan->length());
    CHECK(parse_trace_text(text) == trace_mirror(run));

    TraceText three;
    three.lines = std::vector<TraceLine>(run.events.size() > 3 ? 3 : run.events.size());
    for (std::size_t i = 0; i < three.lines.size(); ++i) three.lines[i] = trace_mirror(run).lines[i];
    three.plan = Plan{{Move::right}};
    CHECK(count_lines(verbalize(three)) == 3 + 2);

    TraceText failed{trace_mirror(run).lines, std::nullopt};
    auto ft = verbalize(failed);
    CHECK(ft.find("PLAN: none\n") != std::string::npos);
    CHECK(parse_trace_text(ft) == failed);

    CHECK_THROWS_AS(parse_trace_text("step 0 | from (0,0) | action up | valid | g=1\nPLAN:\n"), ParseError);
    CHECK_THROWS_AS(parse_trace_text("step 0 | from (0,0) | action up | invalid:lava | g=1 t=2\nPLAN:\n"),
                    ParseError);
    CHECK_THROWS_AS(parse_trace_text("step x | from (0,0) | action up | valid | g=1 t=2\nPLAN:\n"), ParseError);
}

TEST_CASE("meta-plan text") {
    MetaPlan mp{{{MazeState{0, 0}, MazeState{1, 1}, Mode::sys1}, {MazeState{1, 1}, MazeState{2, 3}, Mode::sys2}}};
    auto text = verbalize(mp);
    CHECK(text == "subgoal 1 | (0,0) -> (1,1) | SYS1\nsubgoal 2 | (1,1) -> (2,3) | SYS2\n");
    CHECK(parse_meta_plan_text(text) == mp);
    CHECK_THROWS_AS(parse_meta_plan_text("subgoal 2 | (0,0) -> (1,1) | SYS1\n"), ParseError);
    CHECK_THROWS_AS(parse_meta_plan_text("subgoal 1 | (0,0) -> (1,1) | SYS3\n"), ParseError);
    CHECK_THROWS_AS(parse_meta_plan_text("subgoal 1 | (0,0) (1,1) | SYS1\n"), ParseError);
}

TEST_CASE("records round-trip") {
    ControllerConfig cfg;
    for (const auto& problems : {small_mazes(), small_blocks()}) {
        cfg.hardness = default_hardness(problems.front().domain);
        auto ctl = build_controller_dataset(problems, cfg);
        for (std::size_t i = 0; i < problems.size(); ++i) {
            const auto& p = problems[i];
            auto r1 = make_sys1_record(p);
            auto r2 = make_sys2_record(p, astar(p, TraceConfig::for_domain(p.domain)));
            auto r3 = make_controller_record(p, ctl[i].meta_plan);
            CHECK(round_trips(r1));
            CHECK(round_trips(r2));
            CHECK(round_trips(r3));
            CHECK(r1.to_json().at("template_version") == std::string(kTemplateVersion));
            CHECK(r2.input_text.rfind(p.domain == Domain::maze ? "maze 5x5\n" : "blocks ", 0) == 0);
        }
    }
    auto r = make_sys1_record(small_mazes().front());
    r.target_text += "teleport\n";
    CHECK_FALSE(round_trips(r));
}

TEST_CASE("emit_datasets writes three corpora and a manifest") {
    auto problems = small_mazes();
    ControllerConfig cfg;
    auto ctl = build_controller_dataset(problems, cfg);
    EmitConfig ec;
    ec.seed = 5;
    auto a = scratch("a"), b = scratch("b");
    auto m = emit_datasets(problems, ctl, ec, a);
    emit_datasets(problems, ctl, ec, b);
    REQUIRE(m.files.size() == 3);
    for (const auto& f : m.files) {
        CHECK(f.records == problems.size());
        auto text = read_text_file(a / f.name);
        CHECK(count_lines(text) == problems.size());
        CHECK(text == read_text_file(b / f.name));
    }
    CHECK(read_text_file(a / "manifest.json") == read_text_file(b / "manifest.json"));
    auto manifest = nlohmann::json::parse(read_text_file(a / "manifest.json"));
    CHECK(manifest.at("template_version") == std::string(kTemplateVersion));
    CHECK(manifest.at("seed") == 5);

    ec.settings = {{"x", 0.75}};
    auto other = emit_datasets(problems, ctl, ec, b);
    CHECK(other.config_hash != m.config_hash);

    cfg.x = 0.0;
    auto easy = build_controller_dataset(problems, cfg);
    emit_datasets(problems, easy, ec, b);
    std::ifstream in(b / "controller.jsonl");
    for (std::string line; std::getline(in, line);) {
        auto target = nlohmann::json::parse(line).at("target_text").get<std::string>();
        CHECK(count_lines(target) == 1);
        CHECK(target.find("| SYS1\n") != std::string::npos);
    }
}

TEST_CASE("failed emission leaves nothing behind") {
    auto problems = small_mazes();
    auto ctl = build_controller_dataset(problems, {});
    auto dir = scratch("fail");
    fs::create_directories(dir / "controller.jsonl" / "occupied");
    CHECK_THROWS(emit_datasets(problems, ctl, {}, dir));
    CHECK_FALSE(fs::exists(dir / "sys1.jsonl"));
    CHECK_FALSE(fs::exists(dir / "sys2.jsonl"));
    CHECK_FALSE(fs::exists(dir / "manifest.json"));

    std::vector<ControllerRecord> stray{{"nope", {}}};
    CHECK_THROWS(emit_datasets(problems, stray, {}, scratch("stray")));
}

TEST_CASE("Blocksworld sys2 records respect the recording cap") {
    auto problems = small_blocks();
    auto dir = scratch("blocks");
    emit_datasets(problems, build_controller_dataset(problems, {0.5, 0, ControllerVariant::sliding_window,
                                                                HardnessSelector::blocks_distance, 0}),
                  {}, dir);
    std::ifstream in(dir / "sys2.jsonl");
    std::size_t n = 0;
    for (std::string line; std::getline(in, line); ++n) {
        auto rec = nlohmann::json::parse(line);
        auto trace = parse_trace_text(rec.at("target_text").get<std::string>());
        std::size_t i = 0;
        while (i < trace.lines.size()) {
            std::size_t j = i;
            int valid = 0, invalid = 0;
            while (j < trace.lines.size() && trace.lines[j].from == trace.lines[i].from) {
                (trace.lines[j].invalid ? invalid : valid) += 1;
                ++j;
            }
            CHECK(valid <= 3);
            CHECK(invalid <= 2);
            i = j;
        }
    }
    CHECK(n == problems.size());
}
