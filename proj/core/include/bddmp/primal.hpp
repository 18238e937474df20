#pragma once

#include "bddmp/algebra.hpp"
#include "bddmp/bdd.hpp"
#include "bddmp/decomposition.hpp"
#include "bddmp/dual_solver.hpp"
#include "bddmp/ilp.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace bddmp {

enum class ScoreStrategy { abs_mm, neg_mm, reduction_aligned };
std::string_view to_string(ScoreStrategy strategy);

struct PrimalScores {
    ScoreStrategy strategy = ScoreStrategy::neg_mm;
    std::vector<double> total_difference; // M: sum over subproblems of m1 - m0
    std::vector<Count> reduction;         // R: sum over subproblems of |X_j & x=1| - |X_j & x=0|
    std::vector<std::uint8_t> preferred;  // 1 iff M <= 0
    std::vector<double> score;
};

/// Scores from the min-marginals of the current multipliers and the solution
/// counts of the unrestricted diagrams. Free variables get M = 0.
PrimalScores compute_scores(const DualState& state, ScoreStrategy strategy);
PrimalScores compute_scores(const Decomposition& decomposition, std::span<const Bdd> bdds,
                            std::span<const std::vector<double>> lambdas, ScoreStrategy strategy);

using Literal = std::pair<std::size_t, std::uint8_t>;

struct PropagationResult {
    bool feasible = true;
    /// Newly assigned literals, starting with the propagated one.
    std::vector<Literal> fixed;
};

/// Sets var = value in every diagram containing it and follows the literals
/// forced by the restricted diagrams to a fixed point. assignment holds -1
/// for open variables and is updated in place. Every diagram that may be
/// touched must have an open checkpoint; on infeasibility the caller rolls
/// them back.
PropagationResult restriction_propagation(std::span<Bdd> bdds, const Decomposition& decomposition,
                                          std::span<std::int8_t> assignment, std::size_t var, std::uint8_t value);

enum class PrimalOutcome { solved, infeasible, budget_exhausted };
std::string_view to_string(PrimalOutcome outcome);

struct PrimalResult {
    PrimalOutcome outcome = PrimalOutcome::infeasible;
    std::vector<std::uint8_t> solution;
    double objective = 0.0;
    std::size_t nodes = 0; // propagation calls made
};

/// Depth-first search over the open variables in descending score order,
/// trying the preferred value first and backtracking chronologically.
/// node_budget == 0 means unlimited. Every diagram is restored to its state
/// at entry before returning.
PrimalResult primal_search(const IlpInstance& instance, const Decomposition& decomposition, std::span<Bdd> bdds,
                           const PrimalScores& scores, std::size_t node_budget);
PrimalResult primal_search(const IlpInstance& instance, DualState& state, const PrimalScores& scores,
                           std::size_t node_budget);

/// Default budget: ten propagation calls per variable.
inline std::size_t default_node_budget(std::size_t num_vars) { return 10 * num_vars; }

} // namespace bddmp
