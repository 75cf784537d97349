#include <doctest.h>

#include <filesystem>
#include <fstream>

#include <unistd.h>

#include "support.hpp"
#include "sysx/generator.hpp"
#include "sysx/problem_io.hpp"

using namespace sysx;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("sysx_io_" + std::to_string(::getpid()));
    fs::create_directories(dir);
    return dir / name;
}

void write(const fs::path& p, const std::string& s) {
    std::ofstream(p) << s;
}

}  // namespace

TEST_CASE("problems round-trip through JSON lines") {
    MazeGenConfig mc;
    mc.train = 16;
    mc.val = 8;
    mc.test = 8;
    BlocksGenConfig bc;
    bc.train = 10;
    bc.val = 3;
    bc.test = 2;
    for (const auto& set : {generate_maze_dataset(1, mc).all(), generate_blocks_dataset(1, bc).all()}) {
        auto path = scratch("round.jsonl");
        write_file_atomic(path, problems_to_jsonl(set));
        auto back = read_problems(path);
        REQUIRE(back.size() == set.size());
        for (std::size_t i = 0; i < set.size(); ++i) {
            CHECK(back[i].id == set[i].id);
            CHECK(back[i].grid == set[i].grid);
            CHECK(back[i].universe == set[i].universe);
            CHECK(back[i].start == set[i].start);
            CHECK(back[i].goal == set[i].goal);
            CHECK(back[i].gold_plan == set[i].gold_plan);
            CHECK(back[i].optimal_length == set[i].optimal_length);
            CHECK(back[i].split == set[i].split);
        }
        CHECK(problems_to_jsonl(back) == problems_to_jsonl(set));
    }
}

TEST_CASE("corrupt input names the line") {
    auto path = scratch("bad.jsonl");
    auto good = to_json(testsupport::maze(3, 3, {{1, 1}}, {0, 0}, {2, 2})).dump();
    write(path, good + "\n{\"id\": 3}\n");
    try {
        read_problems(path);
        FAIL("expected a data error");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find(":2:") != std::string::npos);
    }
    write(path, good + "\n\n");
    CHECK(read_problems(path).size() == 1);

    auto j = to_json(testsupport::maze(3, 3, {{1, 1}}, {0, 0}, {2, 2}));
    j["start"] = "(1,1)";
    CHECK_THROWS_AS(problem_from_json(j), DataError);
    j["start"] = "(9,0)";
    CHECK_THROWS_AS(problem_from_json(j), DataError);
    CHECK_THROWS_AS(read_problems(scratch("missing.jsonl")), DataError);
}

TEST_CASE("maze rendering") {
    auto p = testsupport::maze(2, 3, {{0, 1}}, {0, 0}, {1, 2});
    CHECK(render_maze(p) == "S#.\n..G\n");
}

TEST_CASE("atomic writes leave no temporaries") {
    auto path = scratch("atomic.txt");
    write_file_atomic(path, "one");
    write_file_atomic(path, "two");
    CHECK(read_text_file(path) == "two");
    for (const auto& e : fs::directory_iterator(path.parent_path()))
        CHECK(e.path().filename().string().find(".tmp") == std::string::npos);
    write_file_atomic(path.parent_path() / "nested" / "dir" / "made.txt", "x");
    CHECK(read_text_file(path.parent_path() / "nested" / "dir" / "made.txt") == "x");
    CHECK_THROWS(write_file_atomic(path / "under_a_file.txt", "x"));
}
