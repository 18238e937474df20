#include "fixtures.hpp"

#include <bddmp/generators.hpp>
#include <bddmp/oracle.hpp>
#include <bddmp/primal.hpp>

#include <doctest.h>

using namespace bddmp;

namespace {

std::vector<Bdd> build_all(const IlpInstance& inst, const Decomposition& d)
{
    std::vector<Bdd> out;
    for (const auto& c : inst.constraints())
        out.push_back(build_bdd(c, d.position));
    return out;
}

void checkpoint_all(std::vector<Bdd>& bdds)
{
    for (Bdd& b : bdds)
        b.checkpoint();
}

// x1 + x2 = 1, x2 + x3 = 1, x1 + x3 = 1: every row is satisfiable, the
// odd cycle is not.
IlpInstance odd_cycle()
{
    return test::make_instance({0, 0, 0}, {{"a", {{0, 1}, {1, 1}}, Relation::equal, 1},
                                           {"b", {{1, 1}, {2, 1}}, Relation::equal, 1},
                                           {"c", {{0, 1}, {2, 1}}, Relation::equal, 1}});
}

} // namespace

TEST_SUITE("primal")
{
    TEST_CASE("scores on the simplex program")
    {
        const IlpInstance inst = test::simplex_instance();
        const DualState state(inst, decompose(inst));
        const PrimalScores s = compute_scores(state, ScoreStrategy::neg_mm);
        // m1 - m0 at lambda = (1, 2, 3): x1: 1 - 2, x3: 2 - 1, x7: 3 - 1
        CHECK(s.total_difference == std::vector<double>{-1, 1, 2});
        CHECK(s.preferred == std::vector<std::uint8_t>{1, 0, 0});
        CHECK(s.score == std::vector<double>{1, -1, -2});
        CHECK(s.reduction == std::vector<Count>{-1, -1, -1});

        CHECK(compute_scores(state, ScoreStrategy::abs_mm).score == std::vector<double>{1, 1, 2});
        CHECK(compute_scores(state, ScoreStrategy::reduction_aligned).score == std::vector<double>{1, -1, -2});
    }

    TEST_CASE("zero difference prefers one")
    {
        const IlpInstance inst = test::simplex_instance(0, 0, 0);
        const DualState state(inst, decompose(inst));
        const PrimalScores s = compute_scores(state, ScoreStrategy::neg_mm);
        CHECK(s.total_difference == std::vector<double>{0, 0, 0});
        CHECK(s.preferred == std::vector<std::uint8_t>{1, 1, 1});
    }

    TEST_CASE("propagation through one row")
    {
        const IlpInstance inst = test::simplex_instance();
        const Decomposition d = decompose(inst);
        auto bdds = build_all(inst, d);
        checkpoint_all(bdds);
        std::vector<std::int8_t> assignment(3, -1);
        const PropagationResult r = restriction_propagation(bdds, d, assignment, 0, 1);
        CHECK(r.feasible);
        CHECK(r.fixed == std::vector<Literal>{{0, 1}, {1, 0}, {2, 0}});
        CHECK(assignment == std::vector<std::int8_t>{1, 0, 0});

        const PropagationResult again = restriction_propagation(bdds, d, assignment, 1, 0);
        CHECK(again.feasible);
        CHECK(again.fixed.empty());
        CHECK(!restriction_propagation(bdds, d, assignment, 1, 1).feasible);
    }

    TEST_CASE("propagation along a chain")
    {
        const IlpInstance inst = test::make_instance({0, 0, 0}, {{"a", {{0, 1}, {1, 1}}, Relation::equal, 1},
                                                                {"b", {{1, 1}, {2, 1}}, Relation::equal, 1}});
        const Decomposition d = decompose(inst);
        auto bdds = build_all(inst, d);
        checkpoint_all(bdds);
        std::vector<std::int8_t> assignment(3, -1);
        const PropagationResult r = restriction_propagation(bdds, d, assignment, 0, 1);
        CHECK(r.feasible);
        CHECK(r.fixed == std::vector<Literal>{{0, 1}, {1, 0}, {2, 1}});
    }

    TEST_CASE("propagation detects a conflict")
    {
        const IlpInstance inst = odd_cycle();
        const Decomposition d = decompose(inst);
        auto bdds = build_all(inst, d);
        const auto original = bdds;
        std::vector<Bdd::Checkpoint> cps;
        for (Bdd& b : bdds)
            cps.push_back(b.checkpoint());
        std::vector<std::int8_t> assignment(3, -1);
        CHECK(!restriction_propagation(bdds, d, assignment, 0, 0).feasible);
        for (std::size_t j = 0; j < bdds.size(); ++j)
            bdds[j].rollback(cps[j]);
        CHECK(bdds == original);
    }

    TEST_CASE("search on the simplex program")
    {
        const IlpInstance inst = test::simplex_instance();
        DualState state(inst, decompose(inst));
        const auto before = std::vector<Bdd>(state.bdds().begin(), state.bdds().end());
        const PrimalResult r = primal_search(inst, state, compute_scores(state, ScoreStrategy::neg_mm), 0);
        CHECK(r.outcome == PrimalOutcome::solved);
        CHECK(r.solution == std::vector<std::uint8_t>{1, 0, 0});
        CHECK(r.objective == 1.0);
        CHECK(r.nodes == 1);
        CHECK(std::equal(before.begin(), before.end(), state.bdds().begin(), state.bdds().end()));
    }

    TEST_CASE("odd cycle is refuted after both values of the first variable")
    {
        const IlpInstance inst = odd_cycle();
        DualState state(inst, decompose(inst));
        const PrimalScores scores = compute_scores(state, ScoreStrategy::neg_mm);
        const PrimalResult r = primal_search(inst, state, scores, 0);
        CHECK(r.outcome == PrimalOutcome::infeasible);
        CHECK(r.nodes == 2);
        CHECK(primal_search(inst, state, scores, 1).outcome == PrimalOutcome::budget_exhausted);
        for (std::size_t j = 0; j < state.num_subproblems(); ++j) {
            CHECK(state.bdd(j).open_checkpoints() == 0);
            CHECK(state.bdd(j) == build_bdd(inst.constraint(j), state.decomposition().position));
        }
    }

    TEST_CASE("free variables follow the sign of their cost")
    {
        const IlpInstance inst = test::make_instance({-1, 1, 2}, {{"a", {{1, 1}, {2, 1}}, Relation::greater_equal, 1}});
        DualState state(inst, decompose(inst));
        const PrimalResult r = primal_search(inst, state, compute_scores(state, ScoreStrategy::neg_mm), 0);
        CHECK(r.outcome == PrimalOutcome::solved);
        CHECK(r.solution == std::vector<std::uint8_t>{1, 1, 0});
        CHECK(r.objective == 0.0);
    }

    TEST_CASE("mismatched scores are rejected")
    {
        const IlpInstance inst = test::simplex_instance();
        DualState state(inst, decompose(inst));
        PrimalScores scores = compute_scores(state, ScoreStrategy::neg_mm);
        scores.score.pop_back();
        CHECK_THROWS_AS(primal_search(inst, state, scores, 0), std::invalid_argument);
    }

    TEST_CASE("unlimited search is complete and restores every diagram")
    {
        for (ScoreStrategy strategy : {ScoreStrategy::abs_mm, ScoreStrategy::neg_mm, ScoreStrategy::reduction_aligned}) {
            for (std::uint64_t seed = 0; seed < 40; ++seed) {
                const IlpInstance inst = generate_random_ilp({12, 6, 0.4, seed % 2 == 0}, seed);
                const OracleResult oracle = brute_force_solve(inst);
                DualState state(inst, decompose(inst));
                SolverConfig config;
                config.max_passes = 10;
                const DualReport report = run(state, config);
                const std::vector<Bdd> before(state.bdds().begin(), state.bdds().end());

                const PrimalResult r = primal_search(inst, state, compute_scores(state, strategy), 0);
                CHECK((r.outcome == PrimalOutcome::solved) == oracle.feasible);
                if (oracle.feasible) {
                    CHECK(inst.feasible(r.solution));
                    CHECK(r.objective >= oracle.optimum - 1e-9);
                    CHECK(r.objective >= report.lower_bound - 1e-6);
                } else {
                    CHECK(r.outcome == PrimalOutcome::infeasible);
                }
                CHECK(std::equal(before.begin(), before.end(), state.bdds().begin(), state.bdds().end()));
            }
        }
    }

    TEST_CASE("default budget")
    {
        CHECK(default_node_budget(7) == 70);
        CHECK(to_string(ScoreStrategy::reduction_aligned) == "reduction");
        CHECK(to_string(PrimalOutcome::budget_exhausted) == "budget_exhausted");
    }
}
