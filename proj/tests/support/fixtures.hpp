#pragma once

#include <bddmp/bdd.hpp>
#include <bddmp/ilp.hpp>

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

namespace bddmp::test {

/// min x1 + 2 x3 + 3 x7 s.t. x1 + x3 + x7 = 1, variables in that order.
inline IlpInstance simplex_instance(double c1 = 1, double c3 = 2, double c7 = 3)
{
    IlpInstance inst;
    inst.add_variable("x1", c1);
    inst.add_variable("x3", c3);
    inst.add_variable("x7", c7);
    inst.add_constraint({"s", {{0, 1}, {1, 1}, {2, 1}}, Relation::equal, 1});
    return inst;
}

inline IlpInstance make_instance(std::vector<double> costs, std::vector<LinearConstraint> rows)
{
    IlpInstance inst;
    for (std::size_t i = 0; i < costs.size(); ++i)
        inst.add_variable("x" + std::to_string(i + 1), costs[i]);
    for (auto& r : rows)
        inst.add_constraint(std::move(r));
    return inst;
}

/// Random row over a random support of the given variables. The right-hand
/// side ranges one past the attainable activities so that tautologies and
/// infeasible rows both occur.
inline LinearConstraint random_row(std::mt19937_64& rng, std::size_t num_vars, std::size_t max_support,
                                   std::string name = "r")
{
    std::vector<std::size_t> vars(num_vars);
    std::iota(vars.begin(), vars.end(), std::size_t{0});
    std::shuffle(vars.begin(), vars.end(), rng);
    const std::size_t k =
        std::uniform_int_distribution<std::size_t>(1, std::min(max_support, num_vars))(rng);
    LinearConstraint c;
    c.name = std::move(name);
    std::int64_t lo = 0, hi = 0;
    for (std::size_t t = 0; t < k; ++t) {
        std::int64_t a = std::uniform_int_distribution<std::int64_t>(-3, 2)(rng);
        if (a >= 0)
            ++a;
        c.terms.push_back({vars[t], a});
        (a < 0 ? lo : hi) += a;
    }
    c.relation = static_cast<Relation>(std::uniform_int_distribution<int>(0, 2)(rng));
    c.rhs = std::uniform_int_distribution<std::int64_t>(lo - 1, hi + 1)(rng);
    return c;
}

/// Support of a row sorted by variable index, the order build_bdd(c) uses.
inline std::vector<std::size_t> sorted_support(const LinearConstraint& c)
{
    std::vector<std::size_t> s;
    for (const Term& t : c.terms)
        s.push_back(t.var);
    std::sort(s.begin(), s.end());
    return s;
}

/// Enumerated solutions as bitmasks (bit l = level l), sorted.
inline std::vector<std::uint32_t> solution_masks(const Bdd& bdd)
{
    std::vector<std::uint32_t> out;
    for (const auto& sol : enumerate_solutions(bdd)) {
        std::uint32_t m = 0;
        for (std::size_t l = 0; l < sol.size(); ++l)
            m |= static_cast<std::uint32_t>(sol[l]) << l;
        out.push_back(m);
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace bddmp::test
