#include "fixtures.hpp"
#include "observers.hpp"

#include <bddmp/dual_solver.hpp>
#include <bddmp/generators.hpp>
#include <bddmp/oracle.hpp>

#include <doctest.h>

#include <cmath>

using namespace bddmp;

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

// x1 appears in a: x1 + x2 = 1 and b: x1 + x3 = 1. With costs (0, -2, 3)
// the initial differences at x1 are 2 in a and -3 in b.
IlpInstance two_row_instance()
{
    return test::make_instance({0, -2, 3}, {{"a", {{0, 1}, {1, 1}}, Relation::equal, 1},
                                            {"b", {{0, 1}, {2, 1}}, Relation::equal, 1}});
}

double oracle_optimum(const IlpInstance& inst) { return brute_force_solve(inst).optimum; }

} // namespace

TEST_SUITE("dual-solver")
{
    TEST_CASE("costs are split evenly at initialization")
    {
        const IlpInstance inst = test::make_instance(
            {6, 0}, {{"a", {{0, 1}}, Relation::less_equal, 1},
                     {"b", {{0, 1}, {1, 1}}, Relation::less_equal, 2},
                     {"c", {{0, 1}, {1, -1}}, Relation::less_equal, 1}});
        const DualState state(inst, decompose(inst));
        for (const Incidence& s : state.decomposition().var_subproblems[0])
            CHECK(state.lambda(s) == 2.0);
        for (const Incidence& s : state.decomposition().var_subproblems[1])
            CHECK(state.lambda(s) == 0.0);
    }

    TEST_CASE("a single subproblem is solved exactly at initialization")
    {
        for (std::uint64_t seed = 0; seed < 30; ++seed) {
            const IlpInstance inst = generate_random_ilp({10, 1, 0.8, true}, seed);
            DualState state(inst, decompose(inst));
            CHECK(state.lower_bound() == doctest::Approx(oracle_optimum(inst)).epsilon(1e-12));
            const double before = state.lower_bound();
            for (std::size_t i = 0; i < inst.num_vars(); ++i)
                CHECK(state.mma_update(i, Direction::forward) == 0.0);
            CHECK(state.forward_pass() == doctest::Approx(before).epsilon(1e-12));
        }
    }

    TEST_CASE("update with differences 2 and -3")
    {
        const IlpInstance inst = two_row_instance();
        DualState state(inst, decompose(inst));
        const double before = state.minsum_bound();

        struct Capture : UpdateObserver {
            std::vector<double> d;
            void after_update(const DualState&, const UpdateEvent& e) override
            {
                d.assign(e.differences.begin(), e.differences.end());
            }
        } capture;
        const double increase = state.mma_update(0, Direction::forward, &capture);
        CHECK(capture.d == std::vector<double>{2.0, -3.0});
        CHECK(increase == 2.0);
        CHECK(state.minsum_bound() - before == doctest::Approx(2.0));
        CHECK(state.lambda({0, 0}) == -2.5);
        CHECK(state.lambda({1, 0}) == 2.5);
        CHECK(state.lambda_sum(0) == 0.0);
    }

    TEST_CASE("zero differences leave the multipliers alone")
    {
        const IlpInstance inst = test::make_instance({0, 0, 0}, {{"a", {{0, 1}, {1, 1}}, Relation::equal, 1},
                                                                {"b", {{0, 1}, {2, 1}}, Relation::equal, 1}});
        DualState state(inst, decompose(inst));
        CHECK(state.mma_update(0, Direction::forward) == 0.0);
        CHECK(state.lambda({0, 0}) == 0.0);
        CHECK(state.lambda({1, 0}) == 0.0);
    }

    TEST_CASE("disjoint rows are already optimal")
    {
        const IlpInstance inst = test::make_instance(
            {1, -2, 3, -1}, {{"a", {{0, 1}, {1, 1}}, Relation::equal, 1}, {"b", {{2, 1}, {3, 2}}, Relation::less_equal, 2}});
        DualState state(inst, decompose(inst));
        const double opt = oracle_optimum(inst);
        CHECK(state.lower_bound() == doctest::Approx(opt));
        const DualReport report = run(state, SolverConfig{});
        CHECK(report.lower_bound == doctest::Approx(opt));
        CHECK(report.termination == Termination::converged);
        CHECK(report.passes == 2);
    }

    TEST_CASE("chain of two equalities")
    {
        const IlpInstance inst = test::make_instance({1, 0, 1}, {{"a", {{0, 1}, {1, 1}}, Relation::equal, 1},
                                                                {"b", {{1, 1}, {2, 1}}, Relation::equal, 1}});
        DualState state(inst, decompose(inst));
        const DualReport report = run(state, SolverConfig{});
        CHECK(report.termination == Termination::converged);
        CHECK(report.lower_bound <= oracle_optimum(inst) + 1e-9);
        CHECK(report.lower_bound == doctest::Approx(0.0).epsilon(1e-6));
    }

    TEST_CASE("an empty diagram makes the dual infinite")
    {
        const IlpInstance inst =
            test::make_instance({1, 1}, {{"a", {{0, 1}, {1, 1}}, Relation::less_equal, 1}, {"b", {{0, 1}}, Relation::greater_equal, 2}});
        DualState state(inst, decompose(inst));
        CHECK(state.infeasible());
        CHECK(state.lower_bound() == inf);
        const DualReport report = run(state, SolverConfig{});
        CHECK(report.termination == Termination::infeasible);
        CHECK(report.lower_bound == inf);
        CHECK(report.passes == 0);
    }

    TEST_CASE("conflicting rows stall at a coordinate-wise fixed point")
    {
        // Each row is satisfiable on its own, together they are not. The dual
        // is unbounded, but only along both multipliers of row a at once.
        const IlpInstance inst = test::make_instance({0, 0}, {{"a", {{0, 1}, {1, 1}}, Relation::equal, 1},
                                                             {"b", {{0, 1}, {1, 1}}, Relation::equal, 0}});
        DualState state(inst, decompose(inst));
        test::IncreaseChecker checker;
        const DualReport report = run(state, SolverConfig{}, &checker);
        CHECK(report.termination == Termination::converged);
        CHECK(report.lower_bound == 0.0);
        CHECK(checker.infinite_updates > 0);
        CHECK(checker.max_error <= 1e-9);
    }

    TEST_CASE("values excluded in different subproblems raise the bound")
    {
        // x1 = 1 in a, x1 = 0 in b.
        const IlpInstance inst = test::make_instance({0}, {{"a", {{0, 1}}, Relation::equal, 1},
                                                          {"b", {{0, 1}}, Relation::equal, 0}});
        DualState state(inst, decompose(inst));
        test::IncreaseChecker checker;
        double previous = state.lower_bound();
        for (int pass = 0; pass < 10; ++pass) {
            const double lb = pass % 2 == 0 ? state.forward_pass(&checker) : state.backward_pass(&checker);
            CHECK(lb > previous);
            previous = lb;
        }
        CHECK(checker.undefined_updates == checker.updates);
        CHECK(checker.max_event_error <= 1e-9);
        CHECK(test::dual_feasibility_error(state, inst.objective()) == 0.0);
    }

    TEST_CASE("excluded values move multipliers only as far as needed")
    {
        // x1 is forced to 0 by b; a and c keep finite differences.
        const IlpInstance inst = test::make_instance(
            {4, 1, -1}, {{"a", {{0, 1}, {1, 1}}, Relation::equal, 1}, {"b", {{0, 1}, {2, 1}}, Relation::less_equal, 0},
                         {"c", {{0, 1}, {2, 1}}, Relation::less_equal, 1}});
        DualState state(inst, decompose(inst));
        test::IncreaseChecker checker;
        for (int pass = 0; pass < 20; ++pass)
            pass % 2 == 0 ? state.forward_pass(&checker) : state.backward_pass(&checker);
        double largest = 0.0;
        for (std::size_t j = 0; j < state.num_subproblems(); ++j)
            for (double x : state.lambdas(j))
                largest = std::max(largest, std::abs(x));
        CHECK(largest <= 10.0);
        CHECK(checker.max_error <= 1e-9);
        CHECK(state.lower_bound() <= oracle_optimum(inst) + 1e-9);
    }

    TEST_CASE("maximum passes of zero keeps the initial bound")
    {
        const IlpInstance inst = two_row_instance();
        DualState state(inst, decompose(inst));
        const double initial = state.lower_bound();
        SolverConfig config;
        config.max_passes = 0;
        const DualReport report = run(state, config);
        CHECK(report.passes == 0);
        CHECK(report.lower_bound == initial);
        CHECK(report.trace.empty());
        config.rel_improvement_tol = 0.0;
        CHECK_THROWS_AS(run(state, config), std::invalid_argument);
    }

    TEST_CASE("monotonicity, increase identity, dual feasibility and soundness")
    {
        for (Averaging averaging : {Averaging::uniform, Averaging::srmp}) {
            for (std::uint64_t seed = 0; seed < 25; ++seed) {
                const IlpInstance inst = generate_random_ilp({12, 5, 0.5, seed % 3 != 0}, seed);
                const OracleResult oracle = brute_force_solve(inst);
                DualState state(inst, decompose(inst, order_variables(inst, OrderStrategy::cuthill_mckee)),
                                std::nullopt, averaging);
                if (state.infeasible())
                    continue;
                test::IncreaseChecker checker;
                double previous = state.lower_bound();
                for (int pass = 0; pass < 6; ++pass) {
                    const double lb = pass % 2 == 0 ? state.forward_pass(&checker) : state.backward_pass(&checker);
                    CHECK(lb >= previous - 1e-9);
                    CHECK(lb == doctest::Approx(state.minsum_bound()).epsilon(1e-12));
                    CHECK(test::dual_feasibility_error(state, inst.objective()) <= 1e-9);
                    if (oracle.feasible)
                        CHECK(lb <= oracle.optimum + 1e-9);
                    previous = lb;
                }
                CHECK(checker.max_error <= 1e-9);
                CHECK(checker.max_event_error <= 1e-9);
                CHECK(checker.min_increase >= -1e-9);
            }
        }
    }

    TEST_CASE("cached marginals equal recomputed ones")
    {
        for (std::optional<double> alpha : {std::optional<double>{}, std::optional<double>{0.1}}) {
            for (std::uint64_t seed = 0; seed < 10; ++seed) {
                const IlpInstance inst = generate_random_ilp({10, 5, 0.5, true}, seed);
                DualState state(inst, decompose(inst), alpha);
                test::CacheChecker checker;
                for (int pass = 0; pass < 4; ++pass)
                    pass % 2 == 0 ? state.forward_pass(&checker) : state.backward_pass(&checker);
                CHECK(checker.comparisons > 0);
                CHECK(checker.max_error <= 1e-9);
            }
        }
    }

    TEST_CASE("srmp shares only with subproblems that continue in the pass direction")
    {
        const IlpInstance inst = two_row_instance();
        DualState state(inst, decompose(inst), std::nullopt, Averaging::srmp);
        struct Capture : UpdateObserver {
            std::vector<std::uint8_t> share;
            void after_update(const DualState&, const UpdateEvent& e) override
            {
                share.assign(e.receives_share.begin(), e.receives_share.end());
            }
        } capture;
        // x1 is the first level of both rows: both continue forward, neither backward.
        state.mma_update(0, Direction::forward, &capture);
        CHECK(capture.share == std::vector<std::uint8_t>{1, 1});
        state.mma_update(0, Direction::backward, &capture);
        CHECK(capture.share == std::vector<std::uint8_t>{1, 1}); // fallback to all
        CHECK(test::dual_feasibility_error(state, inst.objective()) <= 1e-12);
    }

    TEST_CASE("smoothed objective rises and stays close to the dual")
    {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const IlpInstance inst = generate_random_ilp({10, 4, 0.5, true}, seed);
            for (double alpha : {1.0, 0.1, 0.01}) {
                DualState state(inst, decompose(inst), alpha);
                test::SmoothedChecker checker(alpha);
                for (int pass = 0; pass < 6; ++pass) {
                    const double lb = pass % 2 == 0 ? state.forward_pass(&checker) : state.backward_pass(&checker);
                    CHECK(lb == doctest::Approx(state.smoothed_bound(alpha)).epsilon(1e-12));
                    CHECK(test::dual_feasibility_error(state, inst.objective()) <= 1e-9);
                }
                CHECK(checker.min_increase >= -1e-9);

                // sandwich per subproblem under the final multipliers
                double slack = 0.0;
                for (std::size_t j = 0; j < state.num_subproblems(); ++j)
                    slack += alpha * std::log(static_cast<double>(
                                         compute_energy(state.bdd(j), CountingAlgebra{}, state.lambdas(j))));
                const double hard = state.minsum_bound();
                CHECK(state.lower_bound() <= hard + 1e-9);
                CHECK(state.lower_bound() >= hard - slack - 1e-9);
            }
        }
    }

    TEST_CASE("run reports a trace with one entry per pass")
    {
        const IlpInstance inst = generate_random_ilp({12, 6, 0.5, true}, 4);
        DualState state(inst, decompose(inst));
        SolverConfig config;
        config.max_passes = 7;
        config.rel_improvement_tol = 1e-300;
        const DualReport report = run(state, config);
        REQUIRE(report.trace.size() == report.passes);
        for (std::size_t p = 0; p < report.trace.size(); ++p) {
            CHECK(report.trace[p].pass == p + 1);
            CHECK(report.trace[p].direction == (p % 2 == 0 ? Direction::forward : Direction::backward));
        }
        CHECK(report.lower_bound == report.trace.back().lower_bound);
    }

    TEST_CASE("free variables enter the bound through presolve")
    {
        const IlpInstance inst =
            test::make_instance({-3, 2, 1}, {{"a", {{1, 1}, {2, 1}}, Relation::greater_equal, 1}});
        DualState state(inst, decompose(inst));
        CHECK(state.constant() == -3.0);
        CHECK(state.lower_bound() == doctest::Approx(oracle_optimum(inst)));
    }
}
