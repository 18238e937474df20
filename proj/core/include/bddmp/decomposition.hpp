#pragma once

#include "bddmp/ilp.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace bddmp {

/// Occurrence of a variable in a subproblem: which subproblem, and the
/// position (BDD level) of the variable within that subproblem's support.
struct Incidence {
    std::size_t subproblem;
    std::size_t level;

    friend bool operator==(const Incidence&, const Incidence&) = default;
};

/// One subproblem per constraint row. subproblem_vars[j] is the row support
/// sorted by the global variable order; var_subproblems[i] lists the
/// subproblems containing i in ascending subproblem index.
struct Decomposition {
    std::vector<std::vector<std::size_t>> subproblem_vars;
    std::vector<std::vector<Incidence>> var_subproblems;
    std::vector<std::size_t> order;    // position -> variable
    std::vector<std::size_t> position; // variable -> position

    std::size_t num_vars() const { return var_subproblems.size(); }
    std::size_t num_subproblems() const { return subproblem_vars.size(); }
    bool is_free(std::size_t i) const { return var_subproblems[i].empty(); }
    std::vector<std::size_t> free_variables() const;
};

enum class OrderStrategy { input, cuthill_mckee };

/// Permutation of [n] listing variables in processing order.
std::vector<std::size_t> order_variables(const IlpInstance& instance, OrderStrategy strategy);

Decomposition decompose(const IlpInstance& instance);
Decomposition decompose(const IlpInstance& instance, std::vector<std::size_t> order);

/// Bandwidth of the variable adjacency matrix under the given order.
std::size_t adjacency_bandwidth(const IlpInstance& instance, std::span<const std::size_t> order);

struct FreePresolve {
    std::vector<std::pair<std::size_t, std::uint8_t>> fixed;
    double contribution = 0.0;
};

/// Variables without any constraint take 1 iff their cost is negative.
FreePresolve presolve_free(const IlpInstance& instance, const Decomposition& decomposition);

} // namespace bddmp
