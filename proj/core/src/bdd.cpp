#include "bddmp/bdd.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <sstream>
#include <unordered_map>

namespace bddmp {

namespace {

struct PairHash {
    std::size_t operator()(std::pair<NodeId, NodeId> p) const noexcept
    {
        return std::hash<std::uint64_t>{}((std::uint64_t{p.first} << 32) | p.second);
    }
};

std::vector<std::pair<std::size_t, std::size_t>> make_var_levels(std::span<const std::size_t> support)
{
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(support.size());
    for (std::size_t l = 0; l < support.size(); ++l)
        out.emplace_back(support[l], l);
    std::sort(out.begin(), out.end());
    for (std::size_t k = 1; k < out.size(); ++k)
        if (out[k].first == out[k - 1].first)
            throw std::invalid_argument("BDD support contains a repeated variable");
    return out;
}

} // namespace

Bdd Bdd::infeasible(std::vector<std::size_t> support)
{
    Bdd b;
    b.var_levels_ = make_var_levels(support);
    b.support_ = std::move(support);
    b.level_begin_.assign(b.support_.size() + 1, first_internal);
    b.live_per_level_.assign(b.support_.size(), 0);
    b.parent_begin_.assign(first_internal + 1, 0);
    b.sentinel_ = true;
    return b;
}

Bdd Bdd::from_levels(std::vector<std::size_t> support, const std::vector<std::vector<LevelNode>>& levels)
{
    const std::size_t num_levels = support.size();
    if (levels.size() != num_levels)
        throw std::invalid_argument("level count does not match support size");
    if (num_levels == 0)
        return Bdd{};
    if (levels[0].empty())
        throw std::invalid_argument("leveled graph has no root");

    // Bottom-up canonicalization: canon[l][k] is top, bot, or a provisional
    // id (first_internal + index) among the distinct nodes of level l.
    std::vector<std::vector<NodeId>> canon(num_levels);
    std::vector<std::vector<LevelNode>> unique(num_levels);
    for (std::size_t l = num_levels; l-- > 0;) {
        canon[l].resize(levels[l].size());
        std::unordered_map<std::pair<NodeId, NodeId>, NodeId, PairHash> seen;
        auto map_child = [&](NodeId c) -> NodeId {
            if (c == top || c == bot)
                return c;
            if (l + 1 >= num_levels)
                throw std::invalid_argument("last level must point to terminals");
            return canon[l + 1].at(c - first_internal);
        };
        for (std::size_t k = 0; k < levels[l].size(); ++k) {
            const NodeId lo = map_child(levels[l][k].lo);
            const NodeId hi = map_child(levels[l][k].hi);
            if (lo == bot && hi == bot) {
                canon[l][k] = bot;
                continue;
            }
            auto [it, inserted] = seen.try_emplace({lo, hi}, static_cast<NodeId>(first_internal + unique[l].size()));
            if (inserted)
                unique[l].push_back({lo, hi});
            canon[l][k] = it->second;
        }
    }

    const NodeId root = canon[0][0];
    if (root == bot)
        return infeasible(std::move(support));

    // Top-down renumbering of reachable nodes.
    std::vector<std::vector<NodeId>> final_id(num_levels);
    for (std::size_t l = 0; l < num_levels; ++l)
        final_id[l].assign(unique[l].size(), bot);
    Bdd b;
    b.var_levels_ = make_var_levels(support);
    b.support_ = std::move(support);
    b.level_begin_.assign(1, first_internal);
    final_id[0][root - first_internal] = first_internal;
    NodeId next = first_internal;
    for (std::size_t l = 0; l < num_levels; ++l) {
        std::vector<std::pair<NodeId, NodeId>> members; // (final id, provisional index)
        for (NodeId k = 0; k < unique[l].size(); ++k)
            if (final_id[l][k] != bot)
                members.emplace_back(final_id[l][k], k);
        std::sort(members.begin(), members.end());
        for (auto [id, k] : members) {
            assert(id == next);
            (void)id;
            ++next;
            b.lo_.push_back(unique[l][k].lo);
            b.hi_.push_back(unique[l][k].hi);
            b.level_.push_back(static_cast<std::uint32_t>(l));
        }
        b.level_begin_.push_back(next);
        if (l + 1 < num_levels) {
            // Assign next-level ids in order of first reference from this level.
            NodeId id = next;
            for (NodeId v = b.level_begin_[l]; v < next; ++v)
                for (NodeId c : {b.lo_[v], b.hi_[v]}) {
                    if (c == top || c == bot)
                        continue;
                    NodeId& slot = final_id[l + 1][c - first_internal];
                    if (slot == bot)
                        slot = id++;
                }
        }
    }
    // Rewrite child references from provisional to final ids.
    for (NodeId v = first_internal; v < next; ++v) {
        const std::size_t l = b.level_[v];
        for (NodeId* c : {&b.lo_[v], &b.hi_[v]})
            if (*c != top && *c != bot)
                *c = final_id[l + 1][*c - first_internal];
    }

    const std::size_t slots = next;
    b.alive_.assign(slots, 1);
    b.indeg_.assign(slots, 0);
    b.live_per_level_.resize(num_levels);
    for (std::size_t l = 0; l < num_levels; ++l)
        b.live_per_level_[l] = b.level_begin_[l + 1] - b.level_begin_[l];

    std::vector<NodeId> counts(slots + 1, 0);
    for (NodeId v = first_internal; v < slots; ++v)
        for (NodeId c : {b.lo_[v], b.hi_[v]}) {
            if (c != bot)
                ++b.indeg_[c];
            ++counts[c + 1];
        }
    for (std::size_t k = 1; k <= slots; ++k)
        counts[k] += counts[k - 1];
    b.parent_begin_ = counts;
    b.parents_.resize(counts[slots]);
    for (NodeId v = first_internal; v < slots; ++v) {
        b.parents_[counts[b.lo_[v]]++] = v << 1;
        b.parents_[counts[b.hi_[v]]++] = (v << 1) | 1u;
    }
    return b;
}

Bdd Bdd::from_solutions(std::vector<std::size_t> support, std::span<const std::vector<std::uint8_t>> solutions)
{
    const std::size_t num_levels = support.size();
    if (num_levels == 0)
        return solutions.empty() ? infeasible({}) : Bdd{};
    if (solutions.empty())
        return infeasible(std::move(support));

    // Prefix trie: level l holds one node per distinct prefix of length l.
    std::vector<std::vector<LevelNode>> levels(num_levels);
    levels[0].push_back({bot, bot});
    for (const auto& x : solutions) {
        if (x.size() != num_levels)
            throw std::invalid_argument("solution length does not match support");
        std::size_t node = 0;
        for (std::size_t l = 0; l < num_levels; ++l) {
            NodeId& arc = x[l] ? levels[l][node].hi : levels[l][node].lo;
            if (l + 1 == num_levels) {
                arc = top;
                break;
            }
            if (arc == bot) {
                arc = static_cast<NodeId>(first_internal + levels[l + 1].size());
                levels[l + 1].push_back({bot, bot});
            }
            node = arc - first_internal;
        }
    }
    return from_levels(std::move(support), levels);
}

std::size_t Bdd::level_of_var(std::size_t var) const
{
    const auto it = std::lower_bound(var_levels_.begin(), var_levels_.end(), std::pair<std::size_t, std::size_t>{var, 0});
    if (it == var_levels_.end() || it->first != var)
        throw std::out_of_range("variable " + std::to_string(var) + " is not in the BDD support");
    return it->second;
}

bool Bdd::contains_var(std::size_t var) const
{
    const auto it = std::lower_bound(var_levels_.begin(), var_levels_.end(), std::pair<std::size_t, std::size_t>{var, 0});
    return it != var_levels_.end() && it->first == var;
}

std::size_t Bdd::num_nodes() const
{
    std::size_t n = 0;
    for (std::uint32_t c : live_per_level_)
        n += c;
    return n;
}

Bdd::Checkpoint Bdd::checkpoint()
{
    const std::uint64_t id = next_checkpoint_++;
    checkpoints_.emplace_back(id, journal_.size());
    return {id};
}

void Bdd::rollback(Checkpoint cp)
{
    auto it = std::find_if(checkpoints_.rbegin(), checkpoints_.rend(), [&](const auto& e) { return e.first == cp.id; });
    if (it == checkpoints_.rend())
        throw std::invalid_argument("unknown or expired BDD checkpoint");
    const std::size_t mark = it->second;
    while (journal_.size() > mark) {
        undo(journal_.back());
        journal_.pop_back();
    }
    checkpoints_.erase(std::prev(it.base()), checkpoints_.end());
}

void Bdd::undo(const JournalEntry& e)
{
    switch (e.kind) {
    case JournalKind::redirect:
        (e.bit ? hi_ : lo_)[e.node] = e.previous;
        ++indeg_[e.previous];
        break;
    case JournalKind::deactivate:
        alive_[e.node] = 1;
        ++live_per_level_[level_[e.node]];
        for (NodeId c : {lo_[e.node], hi_[e.node]})
            if (c != bot)
                ++indeg_[c];
        break;
    }
}

void Bdd::redirect_to_bot(NodeId v, std::uint8_t bit)
{
    NodeId& arc = bit ? hi_[v] : lo_[v];
    assert(arc != bot);
    journal_.push_back({JournalKind::redirect, bit, v, arc});
    --indeg_[arc];
    arc = bot;
}

void Bdd::deactivate(NodeId v)
{
    journal_.push_back({JournalKind::deactivate, 0, v, 0});
    alive_[v] = 0;
    --live_per_level_[level_[v]];
    for (NodeId c : {lo_[v], hi_[v]})
        if (c != bot)
            --indeg_[c];
}

// Removes v, no longer reachable from the root, and every descendant that
// loses its last incoming arc.
void Bdd::remove_forward(NodeId v)
{
    std::vector<NodeId> stack{v};
    while (!stack.empty()) {
        const NodeId x = stack.back();
        stack.pop_back();
        if (!alive_[x])
            continue;
        deactivate(x);
        for (NodeId c : {lo_[x], hi_[x]})
            if (c >= first_internal && indeg_[c] == 0 && alive_[c])
                stack.push_back(c);
    }
}

// Removes v, whose arcs both lead to bot, redirecting its incoming arcs to bot
// and recursing into parents that end up with both arcs at bot.
void Bdd::remove_backward(NodeId v)
{
    std::vector<NodeId> stack{v};
    while (!stack.empty()) {
        const NodeId x = stack.back();
        stack.pop_back();
        if (!alive_[x])
            continue;
        for (NodeId k = parent_begin_[x]; k < parent_begin_[x + 1]; ++k) {
            const NodeId u = parents_[k] >> 1;
            const std::uint8_t bit = parents_[k] & 1u;
            if (!alive_[u] || child(u, bit) != x)
                continue;
            redirect_to_bot(u, bit);
            if (lo_[u] == bot && hi_[u] == bot)
                stack.push_back(u);
        }
        deactivate(x);
    }
}

FixResult Bdd::fix_variable(std::size_t var, std::uint8_t value) { return fix_level(level_of_var(var), value); }

FixResult Bdd::fix_level(std::size_t level, std::uint8_t value)
{
    if (level >= num_levels())
        throw std::out_of_range("BDD level out of range");
    if (checkpoints_.empty())
        throw std::logic_error("fix_level requires an open checkpoint");
    if (empty())
        return FixResult::infeasible;
    const std::uint8_t banned = value ? 0 : 1;
    const NodeRange range = nodes_at(level);
    for (NodeId v = range.first; v < range.last; ++v) {
        if (!alive_[v])
            continue;
        const NodeId target = child(v, banned);
        if (target != bot) {
            redirect_to_bot(v, banned);
            if (target >= first_internal && indeg_[target] == 0 && alive_[target])
                remove_forward(target);
        }
        if (alive_[v] && lo_[v] == bot && hi_[v] == bot)
            remove_backward(v);
    }
    return empty() ? FixResult::infeasible : FixResult::feasible;
}

std::vector<std::pair<std::size_t, std::uint8_t>> Bdd::forced_literals() const
{
    if (empty())
        throw std::logic_error("forced_literals on an empty BDD");
    std::vector<std::pair<std::size_t, std::uint8_t>> out;
    for (std::size_t l = 0; l < num_levels(); ++l) {
        bool zero_possible = false;
        bool one_possible = false;
        const NodeRange range = nodes_at(l);
        for (NodeId v = range.first; v < range.last && !(zero_possible && one_possible); ++v) {
            if (!alive_[v])
                continue;
            zero_possible |= lo_[v] != bot;
            one_possible |= hi_[v] != bot;
        }
        if (!zero_possible)
            out.emplace_back(support_[l], 1);
        else if (!one_possible)
            out.emplace_back(support_[l], 0);
    }
    return out;
}

std::string Bdd::check_invariants(bool require_reduced) const
{
    std::ostringstream err;
    if (sentinel_) {
        if (level_begin_.back() != first_internal)
            return "sentinel BDD owns nodes";
        return {};
    }
    if (support_.empty())
        return {};
    if (empty())
        return {};
    // Consecutive levels: every live arc points to the next level or to a terminal.
    for (std::size_t l = 0; l < num_levels(); ++l) {
        const NodeRange r = nodes_at(l);
        for (NodeId v = r.first; v < r.last; ++v) {
            if (!alive_[v])
                continue;
            if (level_[v] != l)
                return "node level mismatch";
            for (NodeId c : {lo_[v], hi_[v]}) {
                if (c == top && l + 1 != num_levels())
                    return "arc to top skips levels at node " + std::to_string(v);
                if (c >= first_internal) {
                    if (level_[c] != l + 1)
                        return "arc skips levels at node " + std::to_string(v);
                    if (!alive_[c])
                        return "arc into removed node at node " + std::to_string(v);
                }
            }
        }
    }
    // Reachability from the root and to top.
    std::vector<char> from_root(node_capacity(), 0), to_top(node_capacity(), 0);
    from_root[root()] = 1;
    for (std::size_t l = 0; l < num_levels(); ++l) {
        const NodeRange r = nodes_at(l);
        for (NodeId v = r.first; v < r.last; ++v)
            if (alive_[v] && from_root[v])
                for (NodeId c : {lo_[v], hi_[v]})
                    from_root[c] = 1;
    }
    to_top[top] = 1;
    for (std::size_t l = num_levels(); l-- > 0;) {
        const NodeRange r = nodes_at(l);
        for (NodeId v = r.first; v < r.last; ++v)
            if (alive_[v])
                to_top[v] = to_top[lo_[v]] || to_top[hi_[v]];
    }
    std::size_t live_total = 0;
    for (std::size_t l = 0; l < num_levels(); ++l) {
        const NodeRange r = nodes_at(l);
        std::size_t live = 0;
        std::map<std::pair<NodeId, NodeId>, NodeId> pairs;
        for (NodeId v = r.first; v < r.last; ++v) {
            if (!alive_[v])
                continue;
            ++live;
            if (!from_root[v])
                return "node " + std::to_string(v) + " unreachable from root";
            if (!to_top[v])
                return "node " + std::to_string(v) + " does not reach top";
            if (require_reduced && !pairs.emplace(std::pair{lo_[v], hi_[v]}, v).second)
                return "isomorphic nodes at level " + std::to_string(l);
        }
        if (live != live_per_level_[l])
            return "live count mismatch at level " + std::to_string(l);
        if (live == 0)
            return "level " + std::to_string(l) + " has no live node";
        live_total += live;
    }
    // In-degrees count live incoming arcs.
    std::vector<std::uint32_t> indeg(node_capacity(), 0);
    for (NodeId v = first_internal; v < node_capacity(); ++v)
        if (alive_[v])
            for (NodeId c : {lo_[v], hi_[v]})
                if (c != bot)
                    ++indeg[c];
    for (NodeId v = first_internal; v < node_capacity(); ++v)
        if (alive_[v] && indeg[v] != indeg_[v])
            return "in-degree mismatch at node " + std::to_string(v);
    if (indeg[top] != indeg_[top])
        return "in-degree mismatch at top";
    (void)live_total;
    return {};
}

bool operator==(const Bdd& a, const Bdd& b)
{
    return a.sentinel_ == b.sentinel_ && a.support_ == b.support_ && a.level_begin_ == b.level_begin_ &&
           a.lo_ == b.lo_ && a.hi_ == b.hi_ && a.alive_ == b.alive_ && a.indeg_ == b.indeg_ &&
           a.live_per_level_ == b.live_per_level_;
}

std::vector<std::vector<std::uint8_t>> enumerate_solutions(const Bdd& bdd, std::size_t cap)
{
    if (bdd.num_levels() > cap)
        throw std::length_error("BDD support exceeds the enumeration cap of " + std::to_string(cap));
    std::vector<std::vector<std::uint8_t>> out;
    if (bdd.empty())
        return out;
    const std::size_t levels = bdd.num_levels();
    if (levels == 0) {
        out.emplace_back();
        return out;
    }
    std::vector<std::uint8_t> path(levels, 0);
    // Iterative DFS over (node, next bit to try).
    std::vector<std::pair<NodeId, std::uint8_t>> stack{{bdd.root(), 0}};
    while (!stack.empty()) {
        auto& [v, bit] = stack.back();
        if (bit > 1) {
            stack.pop_back();
            continue;
        }
        const std::size_t l = stack.size() - 1;
        const NodeId c = bdd.child(v, bit);
        path[l] = bit;
        ++bit;
        if (c == Bdd::top)
            out.push_back(path);
        else if (c != Bdd::bot)
            stack.emplace_back(c, 0);
    }
    return out;
}

std::string to_dot(const Bdd& bdd, std::span<const std::string> var_names)
{
    std::ostringstream out;
    out << "digraph bdd {\n";
    out << "  top [label=\"T\", shape=box];\n";
    out << "  bot [label=\"F\", shape=box];\n";
    auto name = [](NodeId v) -> std::string {
        if (v == Bdd::top)
            return "top";
        if (v == Bdd::bot)
            return "bot";
        return "n" + std::to_string(v);
    };
    for (std::size_t l = 0; l < bdd.num_levels(); ++l) {
        const std::size_t var = bdd.var_at(l);
        const std::string label = var < var_names.size() ? var_names[var] : "x" + std::to_string(var);
        const auto r = bdd.nodes_at(l);
        for (NodeId v = r.first; v < r.last; ++v)
            if (bdd.alive(v))
                out << "  " << name(v) << " [label=\"" << label << "\", shape=circle];\n";
    }
    for (std::size_t l = 0; l < bdd.num_levels(); ++l) {
        const auto r = bdd.nodes_at(l);
        for (NodeId v = r.first; v < r.last; ++v) {
            if (!bdd.alive(v))
                continue;
            out << "  " << name(v) << " -> " << name(bdd.lo(v)) << " [style=dotted];\n";
            out << "  " << name(v) << " -> " << name(bdd.hi(v)) << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

} // namespace bddmp
