#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sysx/controller.hpp"
#include "sysx/emitter.hpp"
#include "sysx/eval.hpp"
#include "sysx/generator.hpp"
#include "sysx/hardness.hpp"
#include "sysx/problem_io.hpp"

namespace fs = std::filesystem;
using namespace sysx;

namespace {

enum Exit { ok = 0, failure = 1, usage = 2, data = 3, exhausted = 4 };

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

fs::path default_out_dir() {
    const char* env = std::getenv("SYSX_OUT_DIR");
    return env && *env ? fs::path(env) : fs::path(".");
}

struct Options {
    std::uint64_t seed = 1;
    int threads = 0;
    std::string in;
    std::string out;
    std::string split;
    std::string domain;
    std::string planner = "system1x";
    std::string sys2 = "astar";
    std::string hardness;
    std::string variant = "sliding-window";
    std::string format = "csv";
    std::string id;
    std::string plot_out;
    double x = 0.5;
    double bias = 0.0;
    std::optional<std::size_t> budget;
    std::vector<double> budgets{5, 10, 15, 20};
    bool markdown = false;
};

std::vector<PlanningProblem> select_split(const std::vector<PlanningProblem>& all, const std::string& split) {
    if (split.empty() || split == "all") return all;
    std::vector<PlanningProblem> out;
    for (const auto& p : all)
        if (p.split == split) out.push_back(p);
    return out;
}

ControllerConfig controller_config(const Options& o, Domain domain) {
    ControllerConfig c;
    c.x = o.x;
    c.bias = o.bias;
    c.variant = parse_variant(o.variant);
    c.hardness = o.hardness.empty() ? default_hardness(domain) : parse_hardness(o.hardness);
    c.seed = o.seed;
    if (domain_of(c.hardness) != domain)
        throw UsageError("--hardness " + std::string(to_string(c.hardness)) + " does not apply to " +
                         std::string(to_string(domain)) + " problems");
    c.validate();
    return c;
}

std::vector<PlanningProblem> load(const Options& o) {
    auto problems = read_problems(o.in);
    if (problems.empty()) throw DataError(o.in + ": no problems");
    return problems;
}

Domain domain_from(const std::vector<PlanningProblem>& problems) {
    return problems.front().domain;
}

Calibration calibrate(const std::vector<PlanningProblem>& all, HardnessSelector selector) {
    auto train = select_split(all, "train");
    if (train.empty()) throw DataError("input has no train split to calibrate the controller on");
    return Calibration::fit(train, selector);
}

PlannerConfig planner_config(const Options& o, const std::string& planner, const std::vector<PlanningProblem>& all,
                             Domain domain) {
    PlannerConfig pc;
    pc.kind = parse_planner_kind(planner);
    pc.engines.sys2 = parse_algorithm(o.sys2);
    pc.controller = controller_config(o, domain);
    if (pc.kind == PlannerKind::system1x) pc.calibration = calibrate(all, pc.controller.hardness);
    return pc;
}

void write_out(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    write_file_atomic(path, content);
}

fs::path out_path(const Options& o, const std::string& fallback_name) {
    return o.out.empty() ? default_out_dir() / fallback_name : fs::path(o.out);
}

// ---------------------------------------------------------------------------

int gen_maze(const Options& o) {
    auto sets = generate_maze_dataset(o.seed);
    auto path = out_path(o, "maze.jsonl");
    write_out(path, problems_to_jsonl(sets.all()));
    std::printf("gen-maze: %zu problems (train %zu, val %zu, test %zu) -> %s\n",
                sets.train.size() + sets.val.size() + sets.test.size(), sets.train.size(), sets.val.size(),
                sets.test.size(), path.c_str());
    return ok;
}

int gen_blocks(const Options& o) {
    auto sets = generate_blocks_dataset(o.seed);
    auto path = out_path(o, "blocks.jsonl");
    write_out(path, problems_to_jsonl(sets.all()));
    std::printf("gen-blocks: %zu problems (train %zu, val %zu, test %zu) -> %s\n",
                sets.train.size() + sets.val.size() + sets.test.size(), sets.train.size(), sets.val.size(),
                sets.test.size(), path.c_str());
    return ok;
}

int build_controller_data(const Options& o) {
    auto all = load(o);
    auto problems = select_split(all, o.split.empty() ? "train" : o.split);
    if (problems.empty()) throw DataError("split '" + o.split + "' is empty");
    auto cfg = controller_config(o, domain_from(problems));
    auto records = build_controller_dataset(problems, cfg);
    std::string body;
    std::size_t hybrid = 0;
    for (const auto& r : records) {
        hybrid += r.meta_plan.sys2_count();
        body += nlohmann::json{{"problem_id", r.problem_id}, {"meta_plan", to_json(r.meta_plan)}}.dump() + "\n";
    }
    auto path = out_path(o, "controller.jsonl");
    write_out(path, body);
    std::printf("build-controller-data: %zu records (%zu sys1-only, %zu with a sys2 window) -> %s\n",
                records.size(), records.size() - hybrid, hybrid, path.c_str());
    return ok;
}

int emit(const Options& o) {
    auto all = load(o);
    auto problems = select_split(all, o.split);
    if (problems.empty()) throw DataError("split '" + o.split + "' is empty");
    auto cfg = controller_config(o, domain_from(problems));
    auto controller = build_controller_dataset(problems, cfg);

    EmitConfig ec;
    ec.algorithm = parse_algorithm(o.sys2);
    ec.seed = o.seed;
    ec.settings = {{"x", o.x},
                   {"variant", o.variant},
                   {"hardness", std::string(to_string(cfg.hardness))},
                   {"split", o.split},
                   {"input", fs::path(o.in).filename().string()}};
    fs::path dir = o.out.empty() ? default_out_dir() : fs::path(o.out);
    fs::create_directories(dir);
    auto m = emit_datasets(problems, controller, ec, dir);
    std::printf("emit-datasets: sys1 %zu, sys2 %zu, controller %zu records (config %s) -> %s\n", m.files[0].records,
                m.files[1].records, m.files[2].records, m.config_hash.c_str(), dir.c_str());
    return ok;
}

int plan(const Options& o) {
    auto all = load(o);
    const PlanningProblem* problem = nullptr;
    for (const auto& p : all)
        if (o.id.empty() ? p.split == (o.split.empty() ? p.split : o.split) : p.id == o.id) {
            problem = &p;
            break;
        }
    if (!problem) throw DataError("no problem matches --id '" + o.id + "'");
    auto pc = planner_config(o, o.planner, all, problem->domain);
    auto r = run_planner(*problem, pc, o.budget);
    std::string text = r.plan ? verbalize(*r.plan) : std::string("PLAN: none\n");
    if (!o.out.empty()) write_out(o.out, text);
    else std::fputs(text.c_str(), stdout);
    std::printf("plan: %s %s valid=%d optimal=%s states_explored=%zu sys2_subgoals=%zu\n", pc.label().c_str(),
                problem->id.c_str(), r.valid ? 1 : 0, r.optimal ? (*r.optimal ? "1" : "0") : "-", r.states_explored,
                r.sys2_subgoals);
    return ok;
}

int eval(const Options& o) {
    auto all = load(o);
    auto problems = select_split(all, o.split.empty() ? "test" : o.split);
    if (problems.empty()) throw DataError("split '" + o.split + "' is empty");
    auto pc = planner_config(o, o.planner, all, domain_from(problems));
    auto results = evaluate_parallel(problems, pc, o.budget, o.threads);
    if (!o.out.empty()) {
        std::string body;
        for (const auto& r : results)
            body += nlohmann::json{{"problem_id", r.problem_id},
                                   {"plan", r.plan ? plan_to_json(*r.plan) : nlohmann::json(nullptr)},
                                   {"valid", r.valid},
                                   {"optimal", r.optimal ? nlohmann::json(*r.optimal) : nlohmann::json(nullptr)},
                                   {"states_explored", r.states_explored},
                                   {"sys2_subgoals", r.sys2_subgoals}}
                        .dump() +
                    "\n";
        write_out(o.out, body);
    }
    std::size_t errors = 0;
    for (const auto& r : results) errors += r.error.has_value();
    std::vector<std::optional<int>> oracle;
    for (const auto& p : problems) oracle.push_back(p.optimal_length);
    std::printf("eval: %s n=%zu validity=%.4f optimality=%.4f avg_se=%.2f errors=%zu%s%s\n", pc.label().c_str(),
                results.size(), plan_validity_rate(results).value(), plan_optimality_rate(results, oracle).value(),
                average_states_explored(results).value(), errors, o.out.empty() ? "" : " -> ",
                o.out.c_str());
    return ok;
}

int sweep(const Options& o) {
    std::vector<PlanningProblem> all;
    if (!o.in.empty()) {
        all = load(o);
    } else {
        Domain d = parse_domain(o.domain.empty() ? "maze" : o.domain);
        all = d == Domain::maze ? generate_maze_dataset(o.seed).all() : generate_blocks_dataset(o.seed).all();
    }
    if (!o.domain.empty() && parse_domain(o.domain) != domain_from(all))
        throw UsageError("--domain " + o.domain + " does not match the input problems");
    auto problems = select_split(all, o.split.empty() ? "test" : o.split);
    if (problems.empty()) throw DataError("split '" + o.split + "' is empty");

    std::vector<BudgetReport> reports;
    std::stringstream planners(o.planner);
    for (std::string name; std::getline(planners, name, ',');) {
        auto pc = planner_config(o, name, all, domain_from(problems));
        reports.push_back(budget_sweep(problems, pc, o.budgets, o.threads));
    }
    const bool md = o.markdown || o.format == "markdown";
    std::string text = md ? render_markdown(reports) : render_csv(reports);
    if (!o.out.empty()) write_out(o.out, text);
    else std::fputs(text.c_str(), stdout);
    if (!o.plot_out.empty()) write_out(o.plot_out, plot_data(reports).dump(2) + "\n");
    std::size_t rows = 0;
    for (const auto& r : reports) rows += r.rows.size();
    std::printf("sweep: %zu planner(s), %zu rows over %zu problems%s%s\n", reports.size(), rows, problems.size(),
                o.out.empty() ? "" : " -> ", o.out.c_str());
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"System-1.x hybrid planning toolkit: data generation, dataset emission, planning and evaluation"};
    app.set_config("--config", "", "INI/TOML file mirroring the flags; command-line flags win");
    app.require_subcommand(1);
    Options o;

    const std::vector<std::string> algorithms{"astar", "bfs", "dfs"};
    const std::vector<std::string> variants{"sliding-window", "edge-window", "no-subgoal", "random"};
    const std::vector<std::string> selectors{"maze-obstacles", "maze-manhattan", "blocks-distance"};
    const std::vector<std::string> splits{"train", "val", "test", "all"};

    auto common = [&](CLI::App* sub) {
        sub->add_option("--seed", o.seed, "Random seed")->capture_default_str();
        sub->add_option("--out", o.out, "Output path (default under $SYSX_OUT_DIR or .)");
    };
    auto input = [&](CLI::App* sub, bool required) {
        auto* opt = sub->add_option("--in", o.in, "Problem file (JSONL)")->check(CLI::ExistingFile);
        if (required) opt->required();
        sub->add_option("--split", o.split, "Restrict to one split")->check(CLI::IsMember(splits));
    };
    auto controller = [&](CLI::App* sub) {
        sub->add_option("--x", o.x, "Fraction of the plan handed to System-2")
            ->check(CLI::Range(0.0, 1.0))
            ->capture_default_str();
        sub->add_option("--variant", o.variant, "Controller variant")
            ->check(CLI::IsMember(variants))
            ->capture_default_str();
        sub->add_option("--hardness", o.hardness, "Hardness function")->check(CLI::IsMember(selectors));
    };
    auto planner = [&](CLI::App* sub) {
        controller(sub);
        sub->add_option("--bias", o.bias, "Test-time bias added to x")
            ->check(CLI::Range(-1.0, 1.0))
            ->capture_default_str();
        sub->add_option("--sys2", o.sys2, "System-2 search engine")
            ->check(CLI::IsMember(algorithms))
            ->capture_default_str();
        sub->add_option("--threads", o.threads, "Worker threads (0 = runtime default)")->check(CLI::NonNegativeNumber);
    };

    auto* gm = app.add_subcommand("gen-maze", "Generate the 5x5 maze problem set");
    common(gm);
    auto* gb = app.add_subcommand("gen-blocks", "Generate the Blocksworld problem set");
    common(gb);

    auto* bc = app.add_subcommand("build-controller-data", "Label training problems with meta-plans");
    common(bc);
    input(bc, true);
    controller(bc);

    auto* ed = app.add_subcommand("emit-datasets", "Write sys1/sys2/controller corpora and a manifest");
    common(ed);
    input(ed, true);
    controller(ed);
    ed->add_option("--sys2", o.sys2, "Engine producing the search traces")
        ->check(CLI::IsMember(algorithms))
        ->capture_default_str();

    const std::vector<std::string> planner_kinds{"system1", "system2", "system1x"};
    auto* pl = app.add_subcommand("plan", "Solve one problem");
    common(pl);
    input(pl, true);
    planner(pl);
    pl->add_option("--id", o.id, "Problem id (default: first problem of --split)");
    pl->add_option("--planner", o.planner, "Planner")->check(CLI::IsMember(planner_kinds))->capture_default_str();
    pl->add_option("--budget", o.budget, "State budget")->check(CLI::PositiveNumber);

    auto* ev = app.add_subcommand("eval", "Evaluate one planner on a split (default: test)");
    common(ev);
    input(ev, true);
    planner(ev);
    ev->add_option("--planner", o.planner, "Planner")->check(CLI::IsMember(planner_kinds))->capture_default_str();
    ev->add_option("--budget", o.budget, "State budget")->check(CLI::PositiveNumber);

    auto* sw = app.add_subcommand("sweep", "Budget sweep; generates the default data set when --in is absent");
    common(sw);
    input(sw, false);
    planner(sw);
    sw->add_option("--domain", o.domain, "maze or blocks")->check(CLI::IsMember({"maze", "blocks"}));
    sw->add_option("--planner", o.planner, "Comma-separated planners")
        ->check([&](const std::string& v) {
            std::stringstream ss(v);
            for (std::string p; std::getline(ss, p, ',');)
                if (std::find(planner_kinds.begin(), planner_kinds.end(), p) == planner_kinds.end())
                    return "unknown planner '" + p + "'";
            return std::string();
        })
        ->capture_default_str();
    sw->add_option("--budgets", o.budgets, "Ascending budget grid")
        ->delimiter(',')
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sw->add_option("--format", o.format, "csv or markdown")->check(CLI::IsMember({"csv", "markdown"}));
    sw->add_flag("--markdown", o.markdown, "Render a markdown table");
    sw->add_option("--plot-out", o.plot_out, "Write plot-data JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return usage;
    }

    if (o.threads > 0) omp_set_num_threads(o.threads);
    const std::map<CLI::App*, int (*)(const Options&)> dispatch{
        {gm, gen_maze}, {gb, gen_blocks}, {bc, build_controller_data}, {ed, emit},
        {pl, plan},     {ev, eval},       {sw, sweep},
    };
    try {
        if (std::is_sorted(o.budgets.begin(), o.budgets.end()) == false)
            throw UsageError("--budgets must be ascending");
        return dispatch.at(app.get_subcommands().front())(o);
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return usage;
    } catch (const DataError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return data;
    } catch (const ParseError& e) {
        std::fprintf(stderr, "data error: %s\n", e.what());
        return data;
    } catch (const GenerationExhausted& e) {
        std::fprintf(stderr, "generation exhausted: %s\n", e.what());
        return exhausted;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return usage;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return failure;
    }
}
