#include "bddmp/decomposition.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <stdexcept>

namespace bddmp {

std::vector<std::size_t> Decomposition::free_variables() const
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < var_subproblems.size(); ++i)
        if (var_subproblems[i].empty())
            out.push_back(i);
    return out;
}

namespace {

std::vector<std::vector<std::size_t>> variable_adjacency(const IlpInstance& instance)
{
    std::vector<std::vector<std::size_t>> adj(instance.num_vars());
    for (const LinearConstraint& c : instance.constraints())
        for (const Term& a : c.terms)
            for (const Term& b : c.terms)
                if (a.var != b.var)
                    adj[a.var].push_back(b.var);
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }
    return adj;
}

// Breadth-first Cuthill-McKee. Each component starts at its vertex of
// minimum degree; neighbours are enqueued by ascending degree, then index.
std::vector<std::size_t> cuthill_mckee(const std::vector<std::vector<std::size_t>>& adj)
{
    const std::size_t n = adj.size();
    auto by_degree = [&](std::size_t a, std::size_t b) {
        return adj[a].size() != adj[b].size() ? adj[a].size() < adj[b].size() : a < b;
    };
    std::vector<std::size_t> seeds(n);
    std::iota(seeds.begin(), seeds.end(), 0);
    std::sort(seeds.begin(), seeds.end(), by_degree);

    std::vector<std::size_t> order;
    order.reserve(n);
    std::vector<char> visited(n, 0);
    std::vector<std::size_t> frontier;
    for (std::size_t seed : seeds) {
        if (visited[seed])
            continue;
        visited[seed] = 1;
        std::size_t head = order.size();
        order.push_back(seed);
        while (head < order.size()) {
            const std::size_t v = order[head++];
            frontier.clear();
            for (std::size_t w : adj[v])
                if (!visited[w]) {
                    visited[w] = 1;
                    frontier.push_back(w);
                }
            std::sort(frontier.begin(), frontier.end(), by_degree);
            order.insert(order.end(), frontier.begin(), frontier.end());
        }
    }
    return order;
}

} // namespace

std::vector<std::size_t> order_variables(const IlpInstance& instance, OrderStrategy strategy)
{
    if (strategy == OrderStrategy::cuthill_mckee)
        return cuthill_mckee(variable_adjacency(instance));
    std::vector<std::size_t> order(instance.num_vars());
    std::iota(order.begin(), order.end(), 0);
    return order;
}

std::size_t adjacency_bandwidth(const IlpInstance& instance, std::span<const std::size_t> order)
{
    std::vector<std::size_t> pos(order.size());
    for (std::size_t p = 0; p < order.size(); ++p)
        pos[order[p]] = p;
    std::size_t width = 0;
    for (const LinearConstraint& c : instance.constraints()) {
        if (c.terms.empty())
            continue;
        const auto [lo, hi] = std::minmax_element(c.terms.begin(), c.terms.end(),
                                                  [&](const Term& a, const Term& b) { return pos[a.var] < pos[b.var]; });
        width = std::max(width, pos[hi->var] - pos[lo->var]);
    }
    return width;
}

Decomposition decompose(const IlpInstance& instance)
{
    return decompose(instance, order_variables(instance, OrderStrategy::input));
}

Decomposition decompose(const IlpInstance& instance, std::vector<std::size_t> order)
{
    const std::size_t n = instance.num_vars();
    if (order.size() != n)
        throw std::invalid_argument("variable order has wrong length");
    Decomposition d;
    d.position.assign(n, n);
    for (std::size_t p = 0; p < n; ++p) {
        if (order[p] >= n || d.position[order[p]] != n)
            throw std::invalid_argument("variable order is not a permutation");
        d.position[order[p]] = p;
    }
    d.order = std::move(order);

    d.var_subproblems.resize(n);
    d.subproblem_vars.reserve(instance.num_constraints());
    for (std::size_t j = 0; j < instance.num_constraints(); ++j) {
        std::vector<std::size_t> support;
        for (const Term& t : instance.constraint(j).terms)
            support.push_back(t.var);
        std::sort(support.begin(), support.end(),
                  [&](std::size_t a, std::size_t b) { return d.position[a] < d.position[b]; });
        for (std::size_t level = 0; level < support.size(); ++level)
            d.var_subproblems[support[level]].push_back({j, level});
        d.subproblem_vars.push_back(std::move(support));
    }
    return d;
}

FreePresolve presolve_free(const IlpInstance& instance, const Decomposition& decomposition)
{
    FreePresolve out;
    for (std::size_t i : decomposition.free_variables()) {
        const double c = instance.cost(i);
        const std::uint8_t value = c < 0.0 ? 1 : 0;
        out.fixed.emplace_back(i, value);
        if (value)
            out.contribution += c;
    }
    return out;
}

} // namespace bddmp
