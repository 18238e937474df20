#include "bddmp/primal.hpp"

#include "bddmp/messages.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace bddmp {

std::string_view to_string(ScoreStrategy strategy)
{
    switch (strategy) {
    case ScoreStrategy::abs_mm:
        return "abs-mm";
    case ScoreStrategy::neg_mm:
        return "neg-mm";
    case ScoreStrategy::reduction_aligned:
        return "reduction";
    }
    return "?";
}

std::string_view to_string(PrimalOutcome outcome)
{
    switch (outcome) {
    case PrimalOutcome::solved:
        return "solved";
    case PrimalOutcome::infeasible:
        return "infeasible";
    case PrimalOutcome::budget_exhausted:
        return "budget_exhausted";
    }
    return "?";
}

PrimalScores compute_scores(const Decomposition& decomposition, std::span<const Bdd> bdds,
                            std::span<const std::vector<double>> lambdas, ScoreStrategy strategy)
{
    const std::size_t n = decomposition.num_vars();
    PrimalScores out;
    out.strategy = strategy;
    out.total_difference.assign(n, 0.0);
    out.reduction.assign(n, Count{0});

    for (std::size_t j = 0; j < bdds.size(); ++j) {
        const std::span<const double> theta = lambdas[j];
        const auto mm = compute_marginals(bdds[j], MinSumAlgebra{}, theta);
        const auto counts = compute_marginals(bdds[j], CountingAlgebra{}, theta);
        for (std::size_t l = 0; l < bdds[j].num_levels(); ++l) {
            const std::size_t i = bdds[j].var_at(l);
            out.total_difference[i] += mm[l].second - mm[l].first;
            out.reduction[i] += counts[l].second - counts[l].first;
        }
    }

    out.preferred.resize(n);
    out.score.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double& m = out.total_difference[i];
        // Opposite exclusions in two subproblems cancel to no preference.
        if (std::isnan(m))
            m = 0.0;
        out.preferred[i] = m <= 0.0 ? 1 : 0;
        switch (strategy) {
        case ScoreStrategy::abs_mm:
            out.score[i] = std::abs(m);
            break;
        case ScoreStrategy::neg_mm:
            out.score[i] = -m;
            break;
        case ScoreStrategy::reduction_aligned:
            out.score[i] = static_cast<double>(out.reduction[i].sign()) * m;
            break;
        }
        if (std::isnan(out.score[i]))
            out.score[i] = 0.0;
    }
    return out;
}

PrimalScores compute_scores(const DualState& state, ScoreStrategy strategy)
{
    std::vector<std::vector<double>> lambdas;
    lambdas.reserve(state.num_subproblems());
    for (std::size_t j = 0; j < state.num_subproblems(); ++j)
        lambdas.emplace_back(state.lambdas(j).begin(), state.lambdas(j).end());
    return compute_scores(state.decomposition(), state.bdds(), lambdas, strategy);
}

namespace {

template <typename Touch>
PropagationResult propagate(std::span<Bdd> bdds, const Decomposition& decomposition,
                            std::span<std::int8_t> assignment, std::size_t var, std::uint8_t value, Touch&& touch)
{
    PropagationResult result;
    if (assignment[var] >= 0) {
        result.feasible = assignment[var] == value;
        return result;
    }
    std::deque<Literal> queue{{var, value}};
    assignment[var] = static_cast<std::int8_t>(value);
    result.fixed.emplace_back(var, value);

    while (!queue.empty()) {
        const auto [i, b] = queue.front();
        queue.pop_front();
        for (const Incidence& slot : decomposition.var_subproblems[i]) {
            Bdd& bdd = bdds[slot.subproblem];
            touch(slot.subproblem);
            if (bdd.fix_level(slot.level, b) == FixResult::infeasible) {
                result.feasible = false;
                return result;
            }
            for (const auto& [k, forced] : bdd.forced_literals()) {
                if (assignment[k] < 0) {
                    assignment[k] = static_cast<std::int8_t>(forced);
                    result.fixed.emplace_back(k, forced);
                    queue.emplace_back(k, forced);
                } else if (static_cast<std::uint8_t>(assignment[k]) != forced) {
                    result.feasible = false;
                    return result;
                }
            }
        }
    }
    return result;
}

// Assignment and diagram restrictions with frame-wise undo. Diagrams are
// checkpointed lazily, the first time a frame touches them.
class Trail {
public:
    Trail(std::span<Bdd> bdds, const Decomposition& decomposition)
        : bdds_(bdds), decomposition_(decomposition), assignment_(decomposition.num_vars(), -1),
          stamp_(bdds.size(), 0)
    {
    }

    struct Mark {
        std::size_t checkpoints;
        std::size_t literals;
    };

    Mark mark()
    {
        ++frame_;
        return {checkpoints_.size(), literals_.size()};
    }

    void undo(Mark m)
    {
        while (checkpoints_.size() > m.checkpoints) {
            const auto [j, cp] = checkpoints_.back();
            checkpoints_.pop_back();
            bdds_[j].rollback(cp);
            stamp_[j] = 0;
        }
        while (literals_.size() > m.literals) {
            assignment_[literals_.back()] = -1;
            literals_.pop_back();
        }
        ++frame_;
    }

    bool propagate(std::size_t var, std::uint8_t value)
    {
        const auto touch = [this](std::size_t j) {
            if (stamp_[j] != frame_) {
                stamp_[j] = frame_;
                checkpoints_.emplace_back(j, bdds_[j].checkpoint());
            }
        };
        const PropagationResult r = bddmp::propagate(bdds_, decomposition_, assignment_, var, value, touch);
        for (const Literal& lit : r.fixed)
            literals_.push_back(lit.first);
        return r.feasible;
    }

    bool assigned(std::size_t var) const { return assignment_[var] >= 0; }
    std::uint8_t value(std::size_t var) const { return static_cast<std::uint8_t>(assignment_[var]); }

private:
    std::span<Bdd> bdds_;
    const Decomposition& decomposition_;
    std::vector<std::int8_t> assignment_;
    std::vector<std::uint64_t> stamp_;
    std::uint64_t frame_ = 1;
    std::vector<std::pair<std::size_t, Bdd::Checkpoint>> checkpoints_;
    std::vector<std::size_t> literals_;
};

} // namespace

PropagationResult restriction_propagation(std::span<Bdd> bdds, const Decomposition& decomposition,
                                          std::span<std::int8_t> assignment, std::size_t var, std::uint8_t value)
{
    return propagate(bdds, decomposition, assignment, var, value, [](std::size_t) {});
}

PrimalResult primal_search(const IlpInstance& instance, const Decomposition& decomposition, std::span<Bdd> bdds,
                           const PrimalScores& scores, std::size_t node_budget)
{
    const std::size_t n = decomposition.num_vars();
    if (scores.score.size() != n || scores.preferred.size() != n)
        throw std::invalid_argument("scores do not match the decomposition");

    PrimalResult result;
    if (std::any_of(bdds.begin(), bdds.end(), [](const Bdd& b) { return b.empty(); }))
        return result;

    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i)
        if (!decomposition.is_free(i))
            order.push_back(i);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scores.score[a] > scores.score[b]; });

    Trail trail(bdds, decomposition);
    const Trail::Mark origin = trail.mark();

    struct Frame {
        std::size_t index; // into order
        int tried = 0;
        Trail::Mark mark{};
    };
    auto next_open = [&](std::size_t from) {
        while (from < order.size() && trail.assigned(order[from]))
            ++from;
        return from;
    };

    std::vector<Frame> stack;
    bool found = false;
    if (const std::size_t first = next_open(0); first == order.size())
        found = true;
    else
        stack.push_back({first});

    while (!found && !stack.empty()) {
        Frame& frame = stack.back();
        if (frame.tried == 2) {
            stack.pop_back();
            if (!stack.empty())
                trail.undo(stack.back().mark);
            continue;
        }
        if (node_budget != 0 && result.nodes >= node_budget) {
            result.outcome = PrimalOutcome::budget_exhausted;
            trail.undo(origin);
            return result;
        }
        const std::size_t var = order[frame.index];
        const std::uint8_t value = frame.tried == 0 ? scores.preferred[var] : 1 - scores.preferred[var];
        ++frame.tried;
        ++result.nodes;
        frame.mark = trail.mark();
        if (!trail.propagate(var, value)) {
            trail.undo(frame.mark);
            continue;
        }
        const std::size_t next = next_open(frame.index + 1);
        if (next == order.size())
            found = true;
        else
            stack.push_back({next});
    }

    if (found) {
        result.solution.assign(n, 0);
        for (std::size_t i : order)
            result.solution[i] = trail.value(i);
        for (std::size_t i = 0; i < n; ++i)
            if (decomposition.is_free(i))
                result.solution[i] = instance.cost(i) < 0.0 ? 1 : 0;
        if (!instance.feasible(result.solution))
            throw std::logic_error("primal search produced an assignment violating a constraint");
        result.objective = instance.evaluate(result.solution);
        result.outcome = PrimalOutcome::solved;
    }
    trail.undo(origin);
    return result;
}

PrimalResult primal_search(const IlpInstance& instance, DualState& state, const PrimalScores& scores,
                           std::size_t node_budget)
{
    return primal_search(instance, state.decomposition(), state.mutable_bdds(), scores, node_budget);
}

} // namespace bddmp
