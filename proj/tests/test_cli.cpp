#include <doctest.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <unistd.h>

#include <json.hpp>

#ifndef SYSX_BIN
#error "SYSX_BIN must point at the sysx executable"
#endif

namespace fs = std::filesystem;

namespace {

struct Outcome {
    int status;
    std::string out;
};

Outcome run(const std::string& args, const std::string& env = "") {
    std::string cmd = env + " " + std::string(SYSX_BIN) + " " + args + " 2>&1";
    Outcome o{0, ""};
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe);
    std::array<char, 4096> buf{};
    while (auto n = fread(buf.data(), 1, buf.size(), pipe)) o.out.append(buf.data(), n);
    int raw = pclose(pipe);
    o.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return o;
}

fs::path workdir() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("sysx_cli_" + std::to_string(::getpid()));
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::size_t lines(const std::string& s) {
    return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

const fs::path& maze_file() {
    static const fs::path p = [] {
        auto path = workdir() / "maze.jsonl";
        auto o = run("gen-maze --seed 1 --out " + path.string());
        REQUIRE(o.status == 0);
        return path;
    }();
    return p;
}

}  // namespace

TEST_CASE("gen-maze writes 4000 problems and is deterministic") {
    CHECK(lines(slurp(maze_file())) == 4000);
    auto again = workdir() / "maze2.jsonl";
    auto o = run("gen-maze --seed 1 --out " + again.string());
    CHECK(o.status == 0);
    CHECK(o.out.find("4000 problems") != std::string::npos);
    CHECK(slurp(again) == slurp(maze_file()));
}

TEST_CASE("default output directory comes from the environment") {
    auto dir = workdir() / "envout";
    fs::create_directories(dir);
    auto o = run("gen-maze --seed 2", "SYSX_OUT_DIR=" + dir.string());
    CHECK(o.status == 0);
    CHECK(fs::exists(dir / "maze.jsonl"));
}

TEST_CASE("usage errors exit 2 and name the flag") {
    auto o = run("plan --x 1.5");
    CHECK(o.status == 2);
    CHECK(o.out.find("--x") != std::string::npos);
    CHECK(run("").status == 2);
    CHECK(run("frobnicate").status == 2);
    CHECK(run("eval --in " + maze_file().string() + " --sys2 ida").status == 2);
    CHECK(run("sweep --budgets 10,5 --in " + maze_file().string()).status == 2);
    CHECK(run("eval --in " + maze_file().string() + " --hardness blocks-distance").status == 2);
    CHECK(run("--help").status == 0);
}

TEST_CASE("corrupt inputs exit 3") {
    auto bad = workdir() / "bad.jsonl";
    std::ofstream(bad) << "{not json\n";
    auto o = run("eval --in " + bad.string());
    CHECK(o.status == 3);
    CHECK(o.out.find("bad.jsonl:1") != std::string::npos);
}

TEST_CASE("sweep prints one CSV row per budget plus the default") {
    auto o = run("sweep --in " + maze_file().string() + " --planner system1x --x 0.5 --sys2 astar --budgets 5,10,15,20");
    REQUIRE(o.status == 0);
    CHECK(o.out.rfind("planner,budget,avg_se,validity,optimality,n\n", 0) == 0);
    std::size_t rows = 0;
    for (std::size_t pos = 0; (pos = o.out.find("system1.5-astar,", pos)) != std::string::npos; ++pos) ++rows;
    CHECK(rows == 5);
    CHECK(o.out.find("system1.5-astar,default,") != std::string::npos);

    auto out = workdir() / "sweep.md";
    auto plot = workdir() / "plot.json";
    auto m = run("sweep --in " + maze_file().string() + " --planner system1,system2 --budgets 5 --markdown --out " +
                 out.string() + " --plot-out " + plot.string());
    CHECK(m.status == 0);
    CHECK(slurp(out).rfind("| Planner |", 0) == 0);
    auto pd = nlohmann::json::parse(slurp(plot));
    CHECK(pd.contains("system1"));
    CHECK(pd.contains("system2-astar"));
}

TEST_CASE("config file values yield to flags") {
    auto cfg = workdir() / "sweep.ini";
    std::ofstream(cfg) << "[sweep]\nbudgets=[5,10]\nplanner=system2\n";
    auto o = run("--config " + cfg.string() + " sweep --in " + maze_file().string());
    REQUIRE(o.status == 0);
    CHECK(o.out.find("system2-astar,5,") != std::string::npos);
    CHECK(o.out.find("system2-astar,15,") == std::string::npos);

    auto f = run("--config " + cfg.string() + " sweep --in " + maze_file().string() + " --planner system1");
    REQUIRE(f.status == 0);
    CHECK(f.out.find("system1,default,") != std::string::npos);
    CHECK(f.out.find("system2-astar") == std::string::npos);
}

TEST_CASE("plan, eval, controller data and dataset emission") {
    auto p = run("plan --in " + maze_file().string() + " --split test --planner system2");
    CHECK(p.status == 0);
    CHECK(p.out.rfind("PLAN:\n", 0) == 0);
    CHECK(p.out.find("valid=1 optimal=1") != std::string::npos);

    auto e = run("eval --in " + maze_file().string() + " --planner system2 --threads 2");
    CHECK(e.status == 0);
    CHECK(e.out.find("n=400 validity=1.0000 optimality=1.0000") != std::string::npos);

    auto ctl = workdir() / "controller.jsonl";
    auto c = run("build-controller-data --in " + maze_file().string() + " --x 0.5 --out " + ctl.string());
    CHECK(c.status == 0);
    CHECK(lines(slurp(ctl)) == 3200);
    CHECK(c.out.find("1600 sys1-only") != std::string::npos);

    auto d1 = workdir() / "ds1", d2 = workdir() / "ds2";
    CHECK(run("emit-datasets --in " + maze_file().string() + " --split train --out " + d1.string()).status == 0);
    CHECK(run("emit-datasets --in " + maze_file().string() + " --split train --out " + d2.string()).status == 0);
    for (auto name : {"sys1.jsonl", "sys2.jsonl", "controller.jsonl", "manifest.json"}) {
        CHECK(fs::exists(d1 / name));
        CHECK(slurp(d1 / name) == slurp(d2 / name));
    }
    CHECK(lines(slurp(d1 / "sys1.jsonl")) == 3200);
}
