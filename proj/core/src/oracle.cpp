#include "bddmp/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bddmp {

OracleResult brute_force_solve(const IlpInstance& instance)
{
    const std::size_t n = instance.num_vars();
    if (n > oracle_max_vars)
        throw std::length_error("brute force is limited to " + std::to_string(oracle_max_vars) + " variables");

    const auto& rows = instance.constraints();
    std::vector<std::vector<std::pair<std::size_t, std::int64_t>>> columns(n);
    for (std::size_t j = 0; j < rows.size(); ++j)
        for (const Term& t : rows[j].terms)
            columns[t.var].emplace_back(j, t.coeff);

    std::vector<std::uint8_t> x(n, 0);
    std::vector<std::int64_t> activity(rows.size(), 0);
    std::size_t violated = 0;
    for (std::size_t j = 0; j < rows.size(); ++j)
        violated += !rows[j].holds(0);

    OracleResult out;
    double running = 0.0;
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t step = 0; step < total; ++step) {
        if (step > 0) {
            // Gray code: flip the lowest set bit of the step counter.
            const std::size_t i = static_cast<std::size_t>(std::countr_zero(step));
            const std::int64_t sign = x[i] ? -1 : 1;
            x[i] ^= 1;
            running += sign * instance.cost(i);
            for (const auto& [j, a] : columns[i]) {
                const bool before = rows[j].holds(activity[j]);
                activity[j] += sign * a;
                const bool after = rows[j].holds(activity[j]);
                violated += static_cast<std::size_t>(before && !after);
                violated -= static_cast<std::size_t>(!before && after);
            }
        }
        if (violated != 0)
            continue;
        ++out.num_feasible;
        // The running sum only screens candidates; the exact value decides.
        if (out.feasible && running > out.optimum - instance.objective_offset() + 1e-6)
            continue;
        const double value = instance.evaluate(x);
        if (!out.feasible || value < out.optimum) {
            out.feasible = true;
            out.optimum = value;
            out.assignment = x;
        }
    }
    return out;
}

std::vector<std::uint32_t> feasible_points(const LinearConstraint& constraint, std::span<const std::size_t> support)
{
    const std::size_t k = support.size();
    if (k > oracle_max_support)
        throw std::length_error("support too large for enumeration");
    std::vector<std::int64_t> coeff(k, 0);
    for (const Term& t : constraint.terms) {
        const auto it = std::find(support.begin(), support.end(), t.var);
        if (it == support.end())
            throw std::invalid_argument("support does not cover the constraint");
        coeff[static_cast<std::size_t>(it - support.begin())] = t.coeff;
    }
    std::vector<std::uint32_t> out;
    for (std::uint32_t mask = 0; mask < (std::uint32_t{1} << k); ++mask) {
        std::int64_t lhs = 0;
        for (std::size_t l = 0; l < k; ++l)
            if (mask >> l & 1u)
                lhs += coeff[l];
        if (constraint.holds(lhs))
            out.push_back(mask);
    }
    return out;
}

std::vector<MarginalPair> brute_force_marginals(const LinearConstraint& constraint, std::span<const std::size_t> support,
                                                std::span<const double> lambda, std::optional<double> alpha)
{
    const std::size_t k = support.size();
    if (lambda.size() != k)
        throw std::invalid_argument("one cost per support position expected");
    const std::vector<std::uint32_t> points = feasible_points(constraint, support);
    std::vector<double> cost;
    cost.reserve(points.size());
    for (std::uint32_t mask : points) {
        double c = 0.0;
        for (std::size_t l = 0; l < k; ++l)
            if (mask >> l & 1u)
                c += lambda[l];
        cost.push_back(c);
    }

    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<MarginalPair> out(k, MarginalPair{inf, inf});
    for (std::size_t l = 0; l < k; ++l) {
        for (int beta = 0; beta < 2; ++beta) {
            double& target = beta ? out[l].one : out[l].zero;
            double best = inf;
            for (std::size_t p = 0; p < points.size(); ++p)
                if ((points[p] >> l & 1u) == static_cast<std::uint32_t>(beta))
                    best = std::min(best, cost[p]);
            if (!alpha || best == inf) {
                target = best;
                continue;
            }
            // -alpha log sum exp(-c/alpha), shifted by the minimum cost.
            double sum = 0.0;
            for (std::size_t p = 0; p < points.size(); ++p)
                if ((points[p] >> l & 1u) == static_cast<std::uint32_t>(beta))
                    sum += std::exp(-(cost[p] - best) / *alpha);
            target = best - *alpha * std::log(sum);
        }
    }
    return out;
}

std::vector<CountPair> brute_force_counts(const LinearConstraint& constraint, std::span<const std::size_t> support)
{
    const std::vector<std::uint32_t> points = feasible_points(constraint, support);
    std::vector<CountPair> out(support.size(), CountPair{0, 0});
    for (std::uint32_t mask : points)
        for (std::size_t l = 0; l < support.size(); ++l)
            ++(mask >> l & 1u ? out[l].one : out[l].zero);
    return out;
}

} // namespace bddmp
