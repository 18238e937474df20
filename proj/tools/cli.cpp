#include "cli.hpp"

#include <bddmp/lp_format.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

namespace bddmp::cli {

namespace {

using Json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start)
{
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

Json bound_json(double value)
{
    if (!std::isfinite(value))
        return nullptr;
    return value;
}

void write_trace(const std::string& path, const DualReport& report, bool timing)
{
    std::ofstream file(path);
    if (!file)
        throw std::runtime_error("cannot write trace file '" + path + "'");
    for (const TraceEntry& e : report.trace) {
        const Json line{{"pass", e.pass},
                        {"direction", to_string(e.direction)},
                        {"lb", bound_json(e.lower_bound)},
                        {"time_ms", timing ? e.time_ms : 0.0}};
        file << line.dump() << '\n';
    }
}

int dump_bdd(const IlpInstance& instance, const SolveOptions& options, std::ostream& err)
{
    const auto j = instance.find_constraint(options.dump_bdd);
    if (!j) {
        err << "error: no constraint named '" << options.dump_bdd << "'\n";
        return usage_error;
    }
    const Decomposition d = decompose(instance, order_variables(instance, options.config.order));
    const Bdd bdd = build_bdd(instance.constraint(*j), d.position, options.config.bdd_options);
    err << to_dot(bdd, instance.var_names());
    return solved;
}

} // namespace

int solve_command(const SolveOptions& options, std::ostream& out, std::ostream& err)
{
    IlpInstance instance;
    try {
        instance = parse_lp_file(options.input);
    } catch (const std::exception& e) {
        err << "error: " << options.input << ": " << e.what() << '\n';
        return usage_error;
    }
    if (!options.dump_bdd.empty())
        if (const int rc = dump_bdd(instance, options, err); rc != solved)
            return rc;

    const auto dual_start = Clock::now();
    std::optional<DualState> state;
    try {
        state.emplace(instance, options.config);
    } catch (const BddBuildError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }
    const DualReport dual = run(*state, options.config);
    const double dual_ms = ms_since(dual_start);

    const auto primal_start = Clock::now();
    std::optional<PrimalResult> primal;
    if (!state->infeasible()) {
        const PrimalScores scores = compute_scores(*state, options.primal_order);
        const std::size_t budget = options.node_budget.value_or(default_node_budget(instance.num_vars()));
        primal = primal_search(instance, *state, scores, budget);
    }
    const double primal_ms = ms_since(primal_start);

    int code = no_primal;
    std::string status = "no_primal";
    double lower_bound = dual.lower_bound;
    if (state->infeasible() || (primal && primal->outcome == PrimalOutcome::infeasible)) {
        code = infeasible;
        status = "infeasible";
        lower_bound = std::numeric_limits<double>::infinity();
    } else if (primal && primal->outcome == PrimalOutcome::solved) {
        code = solved;
        status = "solved";
    }

    Json report;
    report["instance"] = std::filesystem::path(options.input).stem().string();
    report["num_vars"] = instance.num_vars();
    report["num_constraints"] = instance.num_constraints();
    report["status"] = status;
    report["lower_bound"] = bound_json(lower_bound);
    report["upper_bound"] = code == solved ? Json(primal->objective) : Json(nullptr);
    if (code == solved) {
        Json solution = Json::object();
        for (std::size_t i = 0; i < instance.num_vars(); ++i)
            solution[instance.var_name(i)] = primal->solution[i];
        report["solution"] = std::move(solution);
    } else {
        report["solution"] = nullptr;
    }
    report["passes"] = dual.passes;
    report["dual_termination"] = to_string(dual.termination);
    report["primal_outcome"] = primal ? Json(to_string(primal->outcome)) : Json(nullptr);
    report["primal_nodes"] = primal ? primal->nodes : 0;
    report["bdd_nodes"] = state->total_nodes();
    report["dual_time_ms"] = options.timing ? dual_ms : 0.0;
    report["primal_time_ms"] = options.timing ? primal_ms : 0.0;
    out << report.dump(2) << '\n';

    if (!options.trace_path.empty()) {
        try {
            write_trace(options.trace_path, dual, options.timing);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << '\n';
            return usage_error;
        }
    }

    err << "bddmp: " << status << ", lower bound " << report["lower_bound"].dump() << ", upper bound "
        << report["upper_bound"].dump() << ", " << dual.passes << " passes\n";
    return code;
}

int generate_command(const GenerateOptions& options, std::ostream& out, std::ostream& err)
{
    IlpInstance instance;
    try {
        switch (options.kind) {
        case GeneratorKind::random_ilp:
            instance = generate_random_ilp(options.random_ilp, options.seed);
            break;
        case GeneratorKind::mrf:
            instance = generate_mrf(options.mrf, options.seed);
            break;
        case GeneratorKind::graph_matching:
            instance = generate_graph_matching(options.graph_matching, options.seed);
            break;
        case GeneratorKind::tomography:
            instance = generate_tomography(options.tomography, options.seed);
            break;
        case GeneratorKind::cell_tracking:
            instance = generate_cell_tracking(options.cell_tracking, options.seed);
            break;
        }
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }

    if (options.output.empty()) {
        write_lp(out, instance);
        return solved;
    }
    std::ofstream file(options.output, std::ios::binary);
    if (!file) {
        err << "error: cannot write '" << options.output << "'\n";
        return usage_error;
    }
    write_lp(file, instance);
    return solved;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"0-1 ILP solver: BDD decomposition, dual min-marginal averaging, DFS rounding", "bddmp"};
    app.require_subcommand(1);

    SolveOptions solve;
    std::size_t node_budget = 0;
    double smoothing = 0.0;
    bool no_timing = false;
    auto* solve_cmd = app.add_subcommand("solve", "Solve an LP file and print a JSON report");
    solve_cmd->add_option("-i,--input", solve.input, "LP file")->required();
    solve_cmd->add_option("--max-passes", solve.config.max_passes, "Maximum number of dual passes")
        ->capture_default_str();
    solve_cmd->add_option("--tol", solve.config.rel_improvement_tol, "Relative improvement tolerance per round")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    auto* smoothing_opt =
        solve_cmd->add_option("--smoothing", smoothing, "Temperature of the smoothed dual")->check(CLI::PositiveNumber);
    std::string averaging = "uniform";
    std::string order = "input";
    std::string primal_order = "neg-mm";
    solve_cmd->add_option("--averaging", averaging, "Multiplier averaging")
        ->check(CLI::IsMember({"uniform", "srmp"}))
        ->capture_default_str();
    solve_cmd->add_option("--order", order, "Variable order")
        ->check(CLI::IsMember({"input", "cuthill-mckee"}))
        ->capture_default_str();
    solve_cmd->add_option("--primal-order", primal_order, "Primal variable scores")
        ->check(CLI::IsMember({"abs-mm", "neg-mm", "reduction"}))
        ->capture_default_str();
    auto* budget_opt =
        solve_cmd->add_option("--node-budget", node_budget, "Primal search budget, 0 for unlimited (default 10n)");
    solve_cmd->add_option("--trace", solve.trace_path, "Write per-pass bounds as JSON lines");
    solve_cmd->add_option("--dump-bdd", solve.dump_bdd, "Print the BDD of a constraint as DOT to stderr");
    solve_cmd->add_flag("--no-timing", no_timing, "Report zero for every time field");

    GenerateOptions gen;
    std::string kind;
    std::size_t chain_nodes = 0;
    bool unplanted = false;
    auto* gen_cmd = app.add_subcommand("generate", "Write a generated instance as LP text");
    gen_cmd->add_option("kind", kind, "random_ilp | mrf | graph_matching | tomography | cell_tracking")->required();
    gen_cmd->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
    gen_cmd->add_option("-o,--output", gen.output, "Output file (default: stdout)");
    gen_cmd->add_option("--vars", gen.random_ilp.vars, "random_ilp: variables");
    gen_cmd->add_option("--cons", gen.random_ilp.constraints, "random_ilp: constraints");
    gen_cmd->add_option("--density", gen.random_ilp.density, "random_ilp: row density");
    gen_cmd->add_flag("--unplanted", unplanted, "random_ilp: random right-hand sides");
    auto* nodes_opt = gen_cmd->add_option("--nodes", chain_nodes, "mrf: chain length");
    gen_cmd->add_option("--rows", gen.mrf.rows, "mrf/tomography: grid rows")->excludes(nodes_opt);
    gen_cmd->add_option("--cols", gen.mrf.cols, "mrf/tomography: grid columns")->excludes(nodes_opt);
    gen_cmd->add_option("--labels", gen.mrf.labels, "mrf/tomography: labels per node");
    gen_cmd->add_option("--left", gen.graph_matching.left, "graph_matching: left points");
    gen_cmd->add_option("--right", gen.graph_matching.right, "graph_matching: right points");
    gen_cmd->add_option("--pair-density", gen.graph_matching.pair_density, "graph_matching: kept pair terms");
    gen_cmd->add_option("--frames", gen.cell_tracking.frames, "cell_tracking: frames");
    gen_cmd->add_option("--cells", gen.cell_tracking.cells, "cell_tracking: detections per frame");
    gen_cmd->add_option("--transition-density", gen.cell_tracking.transition_density, "cell_tracking");
    gen_cmd->add_option("--division-density", gen.cell_tracking.division_density, "cell_tracking");
    gen_cmd->add_option("--conflicts", gen.cell_tracking.conflicts, "cell_tracking: conflict pairs per frame");

    std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
    std::reverse(rest.begin(), rest.end()); // CLI11 consumes a reversed vector
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        const CLI::App* target = solve_cmd->parsed() ? solve_cmd : gen_cmd->parsed() ? gen_cmd : &app;
        out << target->help();
        return solved;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return usage_error;
    }

    if (solve_cmd->parsed()) {
        if (*smoothing_opt)
            solve.config.smoothing = smoothing;
        if (*budget_opt)
            solve.node_budget = node_budget;
        solve.timing = !no_timing;
        solve.config.averaging = averaging == "srmp" ? Averaging::srmp : Averaging::uniform;
        solve.config.order = order == "cuthill-mckee" ? OrderStrategy::cuthill_mckee : OrderStrategy::input;
        solve.primal_order = primal_order == "abs-mm"      ? ScoreStrategy::abs_mm
                             : primal_order == "reduction" ? ScoreStrategy::reduction_aligned
                                                           : ScoreStrategy::neg_mm;
        return solve_command(solve, out, err);
    }

    const auto parsed = parse_generator_kind(kind);
    if (!parsed) {
        err << "error: unknown generator '" << kind << "'\n";
        return usage_error;
    }
    gen.kind = *parsed;
    gen.random_ilp.planted = !unplanted;
    if (*nodes_opt) {
        gen.mrf.rows = 1;
        gen.mrf.cols = chain_nodes;
    }
    gen.tomography = {gen.mrf.rows, gen.mrf.cols, gen.mrf.labels};
    return generate_command(gen, out, err);
}

} // namespace bddmp::cli
