#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sam/learner.hpp"
#include "sam/pddl.hpp"
#include "sam/planner.hpp"
#include "sam/runtime.hpp"

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

int cmd_run(const std::string& domain_path, const std::string& plans_path,
            const std::string& scenario_path, const std::string& trace_out,
            const std::string& report_out, uint64_t tick_limit, bool no_learning,
            const std::string& safety_path) {
    auto domain = sam::pddl::parse_domain(slurp(domain_path));
    auto plans = sam::bdi::plan_library_from_json(slurp(plans_path));
    auto scenario = sam::sim::scenario_from_json(slurp(scenario_path));

    sam::runtime::RunOptions opts;
    opts.tick_limit = tick_limit;
    opts.learning = !no_learning;
    if (!safety_path.empty())
        opts.safety = sam::runtime::safety_from_json(slurp(safety_path));

    std::string sidecar;
    std::string sidecar_path = domain_path + ".health.json";
    if (std::filesystem::exists(sidecar_path)) sidecar = slurp(sidecar_path);

    auto res = sam::runtime::run_scenario(domain, plans, scenario, opts, sidecar);

    if (!trace_out.empty()) {
        std::ostringstream os;
        for (const auto& line : res.trace_lines) os << line << '\n';
        spit(trace_out, os.str());
    }
    std::string report = sam::runtime::report_to_json(res.report);
    if (!report_out.empty())
        spit(report_out, report);
    else
        std::cout << report;
    return res.exit_code;
}

int cmd_plan(const std::string& domain_path, const std::string& problem_path) {
    auto domain = sam::pddl::parse_domain(slurp(domain_path));
    auto problem = sam::pddl::parse_problem(slurp(problem_path));
    auto model = sam::pddl::model_from_domain(domain);

    sam::planner::PlanningProblem pp;
    pp.init = problem.initial_state();
    pp.goal = problem.goal;
    pp.actions = sam::planner::ground_actions(model, problem.objects);
    try {
        auto res = sam::planner::solve(pp);
        for (const auto& s : res.steps) std::cout << s.str() << '\n';
        std::cout << "; cost " << res.cost << '\n';
        return 0;
    } catch (const sam::planner::Unsolvable&) {
        std::cout << "unsolvable\n";
        return 1;
    }
}

int cmd_replay(const std::string& trace_path) {
    auto res = sam::runtime::replay_trace(slurp(trace_path));
    for (const auto& v : res.regenerated) std::cout << v << '\n';
    if (res.ok) {
        std::cout << "fidelity: ok (" << res.regenerated.size() << " verdicts)\n";
        return 0;
    }
    for (const auto& m : res.mismatches) std::cerr << m << '\n';
    return 1;
}

int cmd_learn(const std::string& domain_path, const std::string& traces_path,
              std::string name) {
    auto domain = sam::pddl::parse_domain(slurp(domain_path));
    auto model = sam::pddl::model_from_domain(domain);
    auto traces = sam::learner::traces_from_jsonl(slurp(traces_path));
    if (name.empty()) {
        if (traces.empty()) throw sam::learner::InsufficientData();
        name = traces.front().name;
    }
    sam::learner::LearnedDescription learned;
    try {
        learned = sam::learner::synthesize_description(name, traces, model);
    } catch (const sam::learner::EmptyEffects& e) {
        std::cerr << e.what() << '\n';
        return 1;
    }
    const auto& d = learned.description;
    nlohmann::json j;
    j["name"] = d.name;
    j["version"] = d.version;
    j["support"] = learned.support;
    nlohmann::json pre = nlohmann::json::array(), adds = nlohmann::json::array(),
                   dels = nlohmann::json::array();
    for (const auto& l : d.pre) pre.push_back(l.str());
    for (const auto& l : d.adds) adds.push_back(l.str());
    for (const auto& l : d.deletes) dels.push_back(l.str());
    j["pre"] = pre;
    j["adds"] = adds;
    j["deletes"] = dels;
    j["d_min"] = d.d_min;
    j["d_max"] = d.d_max;
    j["e_min"] = d.e_min;
    j["e_max"] = d.e_max;
    std::cout << j.dump(2) << '\n';
    return 0;
}

int cmd_check(const std::string& domain_path, const std::string& problem_path,
              const std::string& plan_path, const std::string& safety_path) {
    auto domain = sam::pddl::parse_domain(slurp(domain_path));
    auto problem = sam::pddl::parse_problem(slurp(problem_path));
    auto model = sam::pddl::model_from_domain(domain);
    auto props = sam::runtime::safety_from_json(slurp(safety_path));

    nlohmann::json jp = nlohmann::json::parse(slurp(plan_path));
    std::vector<sam::planner::GroundAction> steps;
    for (const auto& js : jp.at("steps")) {
        std::string name = js.at("name").get<std::string>();
        const sam::ActionDescription* d = model.current(name);
        if (!d) throw std::runtime_error("unknown action in plan: " + name);
        steps.push_back(sam::planner::ground_action(
            *d, js.value("args", std::vector<std::string>{})));
    }
    auto res = sam::planner::check_safety(steps, problem.initial_state(), props);
    if (res.certified) {
        std::cout << "certified (" << (1u << steps.size()) << " outcome vectors)\n";
        return 0;
    }
    std::cout << "counterexample outcome vector:";
    for (bool b : res.outcome_vector) std::cout << ' ' << (b ? "fail" : "ok");
    std::cout << '\n';
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"self-adaptive agent runtime"};
    app.require_subcommand(1);

    std::string domain, plans, scenario, trace_out, report_out, safety, problem, trace,
        traces, plan_file, name;
    uint64_t tick_limit = 10000;
    bool no_learning = false;

    auto* run = app.add_subcommand("run", "execute a scenario");
    run->add_option("--domain", domain)->required();
    run->add_option("--plans", plans)->required();
    run->add_option("--scenario", scenario)->required();
    run->add_option("--trace-out", trace_out);
    run->add_option("--report-out", report_out);
    run->add_option("--tick-limit", tick_limit);
    run->add_flag("--no-learning", no_learning);
    run->add_option("--safety", safety);

    auto* plan = app.add_subcommand("plan", "solve a planning problem");
    plan->add_option("--domain", domain)->required();
    plan->add_option("--problem", problem)->required();

    auto* replay = app.add_subcommand("replay", "re-run the monitor over a trace");
    replay->add_option("--trace", trace)->required();

    auto* learn = app.add_subcommand("learn", "synthesize a description from traces");
    learn->add_option("--domain", domain)->required();
    learn->add_option("--traces", traces)->required();
    learn->add_option("--name", name);

    auto* check = app.add_subcommand("check", "safety-check a plan");
    check->add_option("--domain", domain)->required();
    check->add_option("--problem", problem)->required();
    check->add_option("--plan", plan_file)->required();
    check->add_option("--safety", safety)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(domain, plans, scenario, trace_out, report_out, tick_limit,
                           no_learning, safety);
        if (plan->parsed()) return cmd_plan(domain, problem);
        if (replay->parsed()) return cmd_replay(trace);
        if (learn->parsed()) return cmd_learn(domain, traces, name);
        if (check->parsed()) return cmd_check(domain, problem, plan_file, safety);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 2;
}
