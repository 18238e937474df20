#pragma once

#include "bddmp/algebra.hpp"
#include "bddmp/bdd.hpp"

#include <algorithm>
#include <cassert>
#include <span>
#include <utility>
#include <vector>

namespace bddmp {

/// Forward/backward dynamic-program values of one BDD under one algebra.
///
/// Validity is tracked per level with two watermarks: forward values are
/// current on levels [0, fw_levels) and backward values on [bw_from, L).
/// A multiplier change at level l invalidates forward values below it and
/// backward values from l upwards.
template <typename V>
struct MessageStore {
    std::vector<V> fw;
    std::vector<V> bw;
    std::size_t fw_levels = 0;
    std::size_t bw_from = 0;

    void invalidate(std::size_t level)
    {
        fw_levels = std::min(fw_levels, level + 1);
        bw_from = std::max(bw_from, level + 1);
    }
};

template <typename V>
struct RawMarginals {
    V zero;
    V one;
};

template <MarginalAlgebra A>
MessageStore<typename A::value_type> make_store(const Bdd& bdd, const A& alg)
{
    MessageStore<typename A::value_type> store;
    store.fw.assign(bdd.node_capacity(), alg.merge_identity());
    store.bw.assign(bdd.node_capacity(), alg.merge_identity());
    store.bw[Bdd::top] = alg.combine_identity();
    store.bw[Bdd::bot] = alg.merge_identity();
    store.fw_levels = 0;
    store.bw_from = bdd.num_levels();
    return store;
}

/// Computes forward values of the nodes at `level` by pushing from the level
/// above. theta holds one multiplier per level of this BDD.
template <MarginalAlgebra A>
void forward_step(const Bdd& bdd, MessageStore<typename A::value_type>& store, const A& alg, std::size_t level,
                  std::span<const double> theta)
{
    assert(store.fw_levels >= level);
    const Bdd::NodeRange here = bdd.nodes_at(level);
    if (level == 0) {
        if (!bdd.empty())
            store.fw[bdd.root()] = alg.combine_identity();
    } else {
        for (NodeId v = here.first; v < here.last; ++v)
            store.fw[v] = alg.merge_identity();
        const Bdd::NodeRange above = bdd.nodes_at(level - 1);
        const auto w = alg.weight(theta[level - 1]);
        for (NodeId u = above.first; u < above.last; ++u) {
            if (!bdd.alive(u))
                continue;
            const NodeId lo = bdd.lo(u);
            const NodeId hi = bdd.hi(u);
            if (lo >= Bdd::first_internal)
                store.fw[lo] = alg.merge(store.fw[lo], store.fw[u]);
            if (hi >= Bdd::first_internal)
                store.fw[hi] = alg.merge(store.fw[hi], alg.combine(store.fw[u], w));
        }
    }
    store.fw_levels = level + 1;
}

template <MarginalAlgebra A>
void backward_step(const Bdd& bdd, MessageStore<typename A::value_type>& store, const A& alg, std::size_t level,
                   std::span<const double> theta)
{
    assert(store.bw_from <= level + 1);
    const Bdd::NodeRange here = bdd.nodes_at(level);
    const auto w = alg.weight(theta[level]);
    for (NodeId v = here.first; v < here.last; ++v) {
        if (!bdd.alive(v))
            continue;
        store.bw[v] = alg.merge(store.bw[bdd.lo(v)], alg.combine(store.bw[bdd.hi(v)], w));
    }
    store.bw_from = std::min(store.bw_from, level);
}

/// Unfinalized marginals of the variable at `level`.
template <MarginalAlgebra A>
RawMarginals<typename A::value_type> aggregate_raw(const Bdd& bdd, const MessageStore<typename A::value_type>& store,
                                                   const A& alg, std::size_t level, std::span<const double> theta)
{
    assert(store.fw_levels > level && store.bw_from <= level + 1);
    RawMarginals<typename A::value_type> out{alg.merge_identity(), alg.merge_identity()};
    if (bdd.empty())
        return out;
    const Bdd::NodeRange here = bdd.nodes_at(level);
    const auto w = alg.weight(theta[level]);
    for (NodeId v = here.first; v < here.last; ++v) {
        if (!bdd.alive(v))
            continue;
        out.zero = alg.merge(out.zero, alg.combine(store.fw[v], store.bw[bdd.lo(v)]));
        out.one = alg.merge(out.one, alg.combine(alg.combine(store.fw[v], store.bw[bdd.hi(v)]), w));
    }
    return out;
}

/// Marginals (m0, m1) of the variable at `level`.
template <MarginalAlgebra A>
std::pair<typename A::result_type, typename A::result_type>
aggregate_marginals(const Bdd& bdd, const MessageStore<typename A::value_type>& store, const A& alg, std::size_t level,
                    std::span<const double> theta)
{
    const auto raw = aggregate_raw(bdd, store, alg, level, theta);
    return {alg.finalize(raw.zero), alg.finalize(raw.one)};
}

template <MarginalAlgebra A>
void forward_sweep(const Bdd& bdd, MessageStore<typename A::value_type>& store, const A& alg,
                   std::span<const double> theta)
{
    store.fw_levels = 0;
    for (std::size_t l = 0; l < bdd.num_levels(); ++l)
        forward_step(bdd, store, alg, l, theta);
}

template <MarginalAlgebra A>
void backward_sweep(const Bdd& bdd, MessageStore<typename A::value_type>& store, const A& alg,
                    std::span<const double> theta)
{
    store.bw_from = bdd.num_levels();
    for (std::size_t l = bdd.num_levels(); l-- > 0;)
        backward_step(bdd, store, alg, l, theta);
}

/// Minimum energy, smoothed energy or solution count, depending on the
/// algebra. Requires valid backward values at the root.
template <MarginalAlgebra A>
typename A::result_type subproblem_energy(const Bdd& bdd, const MessageStore<typename A::value_type>& store,
                                          const A& alg)
{
    if (bdd.empty())
        return alg.finalize(alg.merge_identity());
    if (bdd.num_levels() == 0)
        return alg.finalize(alg.combine_identity());
    assert(store.bw_from == 0);
    return alg.finalize(store.bw[bdd.root()]);
}

/// From-scratch marginals of every level, by two full sweeps on a fresh store.
template <MarginalAlgebra A>
std::vector<std::pair<typename A::result_type, typename A::result_type>>
compute_marginals(const Bdd& bdd, const A& alg, std::span<const double> theta)
{
    auto store = make_store(bdd, alg);
    forward_sweep(bdd, store, alg, theta);
    backward_sweep(bdd, store, alg, theta);
    std::vector<std::pair<typename A::result_type, typename A::result_type>> out;
    out.reserve(bdd.num_levels());
    for (std::size_t l = 0; l < bdd.num_levels(); ++l)
        out.push_back(aggregate_marginals(bdd, store, alg, l, theta));
    return out;
}

/// From-scratch subproblem energy.
template <MarginalAlgebra A>
typename A::result_type compute_energy(const Bdd& bdd, const A& alg, std::span<const double> theta)
{
    auto store = make_store(bdd, alg);
    backward_sweep(bdd, store, alg, theta);
    return subproblem_energy(bdd, store, alg);
}

} // namespace bddmp
