#pragma once

#include <bddmp/dual_solver.hpp>
#include <bddmp/generators.hpp>
#include <bddmp/primal.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace bddmp::cli {

enum ExitCode : int { solved = 0, usage_error = 1, infeasible = 2, no_primal = 3 };

struct SolveOptions {
    std::string input;
    SolverConfig config;
    ScoreStrategy primal_order = ScoreStrategy::neg_mm;
    std::optional<std::size_t> node_budget; // default: 10 per variable; 0 is unlimited
    std::string trace_path;
    std::string dump_bdd; // constraint name
    bool timing = true;   // false zeroes every time field
};

/// Runs the whole pipeline on an LP file and prints the JSON report to out.
/// Diagnostics and the human summary go to err.
int solve_command(const SolveOptions& options, std::ostream& out, std::ostream& err);

struct GenerateOptions {
    GeneratorKind kind = GeneratorKind::random_ilp;
    std::uint64_t seed = 0;
    std::string output; // empty: standard output
    RandomIlpParams random_ilp;
    MrfParams mrf;
    GraphMatchingParams graph_matching;
    TomographyParams tomography;
    CellTrackingParams cell_tracking;
};

int generate_command(const GenerateOptions& options, std::ostream& out, std::ostream& err);

/// Parses argv (argv[0] is the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace bddmp::cli
