#include "bddmp/bdd.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <unordered_map>

namespace bddmp {

namespace {

// Partial-sum state after some prefix of the support. Prefixes whose every
// completion satisfies a <=-row collapse into one "free" state; prefixes
// that no completion can satisfy are never materialized.
constexpr std::int64_t free_state = std::numeric_limits<std::int64_t>::min();

class LevelBuilder {
public:
    LevelBuilder(const LinearConstraint& c, std::vector<std::size_t> support, std::span<const std::int64_t> coeffs,
                 const BddBuildOptions& options)
        : constraint_(c), support_(std::move(support)), options_(options)
    {
        // Equalities are kept as one row; >= is mirrored into <=.
        equality_ = c.relation == Relation::equal;
        const std::int64_t sign = c.relation == Relation::greater_equal ? -1 : 1;
        rhs_ = sign * c.rhs;
        coeffs_.reserve(coeffs.size());
        for (std::int64_t a : coeffs)
            coeffs_.push_back(sign * a);
        const std::size_t n = coeffs_.size();
        neg_tail_.assign(n + 1, 0);
        pos_tail_.assign(n + 1, 0);
        for (std::size_t l = n; l-- > 0;) {
            neg_tail_[l] = neg_tail_[l + 1] + std::min<std::int64_t>(0, coeffs_[l]);
            pos_tail_[l] = pos_tail_[l + 1] + std::max<std::int64_t>(0, coeffs_[l]);
        }
    }

    Bdd build()
    {
        const std::size_t n = coeffs_.size();
        if (n == 0)
            return classify(0, 0) == Bdd::bot ? Bdd::infeasible({}) : Bdd{};

        std::vector<std::vector<Bdd::LevelNode>> levels(n);
        std::vector<std::int64_t> states{0};
        if (classify(0, 0) == Bdd::bot)
            return Bdd::infeasible(std::move(support_));
        std::vector<std::int64_t> next_states;
        for (std::size_t l = 0; l < n; ++l) {
            std::unordered_map<std::int64_t, NodeId> index;
            next_states.clear();
            levels[l].reserve(states.size());
            for (std::int64_t s : states) {
                Bdd::LevelNode node{};
                for (std::uint8_t bit : {std::uint8_t{0}, std::uint8_t{1}}) {
                    const std::int64_t child = s == free_state ? free_state : s + (bit ? coeffs_[l] : 0);
                    NodeId ref = classify(l + 1, child);
                    if (ref == internal) {
                        const std::int64_t key = collapse(l + 1, child);
                        auto [it, inserted] =
                            index.try_emplace(key, static_cast<NodeId>(Bdd::first_internal + next_states.size()));
                        if (inserted) {
                            next_states.push_back(key);
                            if (next_states.size() > options_.max_states_per_level)
                                throw BddBuildError("constraint '" + constraint_.name + "' exceeds the BDD state budget of " +
                                                    std::to_string(options_.max_states_per_level) +
                                                    " states per level; it needs coefficient splitting");
                        }
                        ref = it->second;
                    }
                    (bit ? node.hi : node.lo) = ref;
                }
                levels[l].push_back(node);
            }
            states.swap(next_states);
        }
        return Bdd::from_levels(std::move(support_), levels);
    }

private:
    static constexpr NodeId internal = std::numeric_limits<NodeId>::max();

    // Terminal reached by a prefix sum at the given level, or `internal`.
    NodeId classify(std::size_t level, std::int64_t s) const
    {
        const bool last = level == coeffs_.size();
        if (s == free_state)
            return last ? Bdd::top : internal;
        if (s + neg_tail_[level] > rhs_)
            return Bdd::bot;
        if (equality_ && s + pos_tail_[level] < rhs_)
            return Bdd::bot;
        if (last)
            return Bdd::top;
        return internal;
    }

    std::int64_t collapse(std::size_t level, std::int64_t s) const
    {
        if (s == free_state)
            return s;
        if (!equality_ && s + pos_tail_[level] <= rhs_)
            return free_state;
        return s;
    }

    const LinearConstraint& constraint_;
    std::vector<std::size_t> support_;
    const BddBuildOptions& options_;
    bool equality_ = false;
    std::int64_t rhs_ = 0;
    std::vector<std::int64_t> coeffs_;
    std::vector<std::int64_t> neg_tail_;
    std::vector<std::int64_t> pos_tail_;
};

Bdd build_ordered(const LinearConstraint& c, std::vector<Term> terms, const BddBuildOptions& options)
{
    std::vector<std::size_t> support;
    std::vector<std::int64_t> coeffs;
    support.reserve(terms.size());
    coeffs.reserve(terms.size());
    for (const Term& t : terms) {
        if (t.coeff == 0)
            continue;
        if (std::abs(t.coeff) > max_abs_coefficient)
            throw BddBuildError("coefficient out of range in constraint '" + c.name + "'");
        support.push_back(t.var);
        coeffs.push_back(t.coeff);
    }
    if (std::abs(c.rhs) > max_abs_rhs)
        throw BddBuildError("right-hand side out of range in constraint '" + c.name + "'");
    return LevelBuilder(c, std::move(support), coeffs, options).build();
}

} // namespace

Bdd build_bdd(const LinearConstraint& constraint, std::span<const std::size_t> position, const BddBuildOptions& options)
{
    std::vector<Term> terms = constraint.terms;
    for (const Term& t : terms)
        if (t.var >= position.size())
            throw std::invalid_argument("variable order does not cover constraint '" + constraint.name + "'");
    std::stable_sort(terms.begin(), terms.end(),
                     [&](const Term& a, const Term& b) { return position[a.var] < position[b.var]; });
    return build_ordered(constraint, std::move(terms), options);
}

Bdd build_bdd(const LinearConstraint& constraint, const BddBuildOptions& options)
{
    std::vector<Term> terms = constraint.terms;
    std::stable_sort(terms.begin(), terms.end(), [](const Term& a, const Term& b) { return a.var < b.var; });
    return build_ordered(constraint, std::move(terms), options);
}

} // namespace bddmp
