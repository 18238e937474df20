#pragma once

#include "bddmp/ilp.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace bddmp {

/// Exhaustive reference results. Nothing here shares code with the solver.
struct OracleResult {
    bool feasible = false;
    double optimum = 0.0; // includes the objective offset
    std::vector<std::uint8_t> assignment;
    std::uint64_t num_feasible = 0;
};

inline constexpr std::size_t oracle_max_vars = 22;
inline constexpr std::size_t oracle_max_support = 20;

/// Enumerates all 2^n assignments in Gray-code order. Throws
/// std::length_error above oracle_max_vars variables.
OracleResult brute_force_solve(const IlpInstance& instance);

/// Satisfying assignments of a constraint over the given support order.
/// Bit l of each mask is the value of support[l].
std::vector<std::uint32_t> feasible_points(const LinearConstraint& constraint, std::span<const std::size_t> support);

struct MarginalPair {
    double zero;
    double one;
};

/// Min-marginals of each support position under costs lambda (one per
/// position), or marginal log-sum-exp values when alpha is given. An empty
/// restricted set yields +infinity.
std::vector<MarginalPair> brute_force_marginals(const LinearConstraint& constraint, std::span<const std::size_t> support,
                                                std::span<const double> lambda, std::optional<double> alpha = {});

struct CountPair {
    std::uint64_t zero;
    std::uint64_t one;
};

/// Number of satisfying assignments with each support position at 0 and 1.
std::vector<CountPair> brute_force_counts(const LinearConstraint& constraint, std::span<const std::size_t> support);

} // namespace bddmp
