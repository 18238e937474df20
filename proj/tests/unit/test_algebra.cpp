#include "fixtures.hpp"

#include <bddmp/messages.hpp>
#include <bddmp/oracle.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace bddmp;

namespace {

LinearConstraint simplex_row() { return {"s", {{0, 1}, {1, 1}, {2, 1}}, Relation::equal, 1}; }

// Node ids of the simplex diagram by level. The x3 level holds 3a (reached
// by x1 = 0) and 3b (x1 = 1); the x7 level holds 7a (nothing chosen yet)
// and 7b (one variable chosen).
struct SimplexNodes {
    NodeId n3a, n3b, n7a, n7b;
};

SimplexNodes name_nodes(const Bdd& bdd)
{
    const NodeId root = bdd.root();
    SimplexNodes s{bdd.lo(root), bdd.hi(root), bdd.lo(bdd.lo(root)), bdd.hi(bdd.lo(root))};
    REQUIRE(bdd.lo(s.n3b) == s.n7b);
    return s;
}

constexpr double inf = std::numeric_limits<double>::infinity();

bool close(double got, double want) { return want == inf ? got == inf : std::abs(got - want) <= 1e-9; }

} // namespace

TEST_SUITE("marginal-algebra")
{
    TEST_CASE("algebra laws on random values")
    {
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-20.0, 20.0);
        const MinSumAlgebra ms;
        const LogSumExpAlgebra lse(0.1);
        for (int k = 0; k < 500; ++k) {
            const double a = u(rng), b = u(rng), c = u(rng);
            CHECK(ms.merge(a, b) == ms.merge(b, a));
            CHECK(ms.merge(ms.merge(a, b), c) == ms.merge(a, ms.merge(b, c)));
            CHECK(ms.merge(a, ms.merge_identity()) == a);
            CHECK(ms.combine(a, ms.combine_identity()) == a);
            CHECK(lse.merge(a, b) == doctest::Approx(lse.merge(b, a)).epsilon(1e-14));
            CHECK(lse.merge(lse.merge(a, b), c) == doctest::Approx(lse.merge(a, lse.merge(b, c))).epsilon(1e-13));
            CHECK(lse.merge(a, lse.merge_identity()) == a);
            CHECK(lse.combine(a, lse.combine_identity()) == a);
            CHECK(lse.merge(a, b) == doctest::Approx(std::log(std::exp(a) + std::exp(b))).epsilon(1e-12));
        }
        const CountingAlgebra cnt;
        CHECK(cnt.merge(Count{3}, Count{4}) == 7);
        CHECK(cnt.combine(Count{3}, Count{4}) == 12);
        CHECK(cnt.merge(Count{5}, cnt.merge_identity()) == 5);
        CHECK(cnt.combine(Count{5}, cnt.combine_identity()) == 5);
        CHECK_THROWS_AS(LogSumExpAlgebra(0.0), std::invalid_argument);
    }

    TEST_CASE("forward and backward values on the simplex diagram")
    {
        const Bdd bdd = build_bdd(simplex_row());
        const SimplexNodes n = name_nodes(bdd);
        const std::vector<double> lambda{1, 2, 3};
        const MinSumAlgebra alg;
        auto store = make_store(bdd, alg);

        forward_sweep(bdd, store, alg, std::span<const double>(lambda));
        CHECK(store.fw[n.n3a] == 0);
        CHECK(store.fw[n.n3b] == 1);
        CHECK(store.fw[n.n7a] == 0);
        CHECK(store.fw[n.n7b] == 1);

        backward_sweep(bdd, store, alg, std::span<const double>(lambda));
        CHECK(store.bw[n.n7a] == 3);
        CHECK(store.bw[n.n7b] == 0);
        CHECK(store.bw[bdd.root()] == 1);
        CHECK(store.bw[Bdd::top] == 0);
        CHECK(store.bw[Bdd::bot] == inf);
        CHECK(subproblem_energy(bdd, store, alg) == 1);

        const auto m = aggregate_marginals(bdd, store, alg, 0, std::span<const double>(lambda));
        CHECK(m.first == 2);
        CHECK(m.second == 1);
    }

    TEST_CASE("counting on the simplex diagram")
    {
        const Bdd bdd = build_bdd(simplex_row());
        const SimplexNodes n = name_nodes(bdd);
        const std::vector<double> lambda{1, 2, 3};
        const CountingAlgebra alg;
        auto store = make_store(bdd, alg);
        forward_sweep(bdd, store, alg, std::span<const double>(lambda));
        backward_sweep(bdd, store, alg, std::span<const double>(lambda));
        CHECK(store.fw[n.n7b] == 2);
        CHECK(store.bw[n.n7a] == 1);
        CHECK(subproblem_energy(bdd, store, alg) == 3);
        const auto m = aggregate_marginals(bdd, store, alg, 0, std::span<const double>(lambda));
        CHECK(m.first == 2);
        CHECK(m.second == 1);
    }

    TEST_CASE("log-sum-exp at zero cost counts solutions")
    {
        const Bdd bdd = build_bdd(simplex_row());
        const std::vector<double> lambda{0, 0, 0};
        const LogSumExpAlgebra alg(1.0);
        const auto marg = compute_marginals(bdd, alg, std::span<const double>(lambda));
        for (const auto& [m0, m1] : marg) {
            CHECK(m0 == doctest::Approx(-std::log(2.0)).epsilon(1e-15));
            CHECK(m1 == doctest::Approx(0.0));
        }
        CHECK(compute_energy(bdd, alg, std::span<const double>(lambda)) == doctest::Approx(-std::log(3.0)));
    }

    TEST_CASE("log-domain values agree with the exp-domain recursion")
    {
        // Exp-domain semiring (*, +, 1, 0, exp(-lambda/alpha)) evaluated
        // directly on a tiny diagram where nothing underflows.
        const Bdd bdd = build_bdd({"r", {{0, 2}, {1, -1}, {2, 1}, {3, 1}}, Relation::less_equal, 1});
        const std::vector<double> lambda{0.3, -0.7, 1.1, 0.4};
        const double alpha = 0.5;
        std::vector<double> bw(bdd.node_capacity(), 0.0);
        bw[Bdd::top] = 1.0;
        for (std::size_t l = bdd.num_levels(); l-- > 0;)
            for (NodeId v = bdd.nodes_at(l).first; v < bdd.nodes_at(l).last; ++v)
                bw[v] = bw[bdd.lo(v)] + bw[bdd.hi(v)] * std::exp(-lambda[l] / alpha);
        const double expected = -alpha * std::log(bw[bdd.root()]);
        CHECK(compute_energy(bdd, LogSumExpAlgebra(alpha), std::span<const double>(lambda)) ==
              doctest::Approx(expected).epsilon(1e-14));
    }

    TEST_CASE("empty diagram energies")
    {
        const Bdd bdd = build_bdd({"r", {{0, 1}}, Relation::greater_equal, 2});
        const std::vector<double> lambda{1.0};
        CHECK(compute_energy(bdd, MinSumAlgebra{}, std::span<const double>(lambda)) == inf);
        CHECK(compute_energy(bdd, LogSumExpAlgebra(1.0), std::span<const double>(lambda)) == inf);
        CHECK(compute_energy(bdd, CountingAlgebra{}, std::span<const double>(lambda)) == 0);
    }

    TEST_CASE("marginals match enumeration on random rows")
    {
        std::mt19937_64 rng(31);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int k = 0; k < 150; ++k) {
            const auto c = test::random_row(rng, 12, 12);
            const auto support = test::sorted_support(c);
            const Bdd bdd = build_bdd(c);
            std::vector<double> lambda(support.size());
            for (double& x : lambda)
                x = u(rng);
            const std::span<const double> theta(lambda);

            const auto ms = compute_marginals(bdd, MinSumAlgebra{}, theta);
            const auto ref = brute_force_marginals(c, support, theta);
            for (std::size_t l = 0; l < ms.size(); ++l) {
                CHECK(close(ms[l].first, ref[l].zero));
                CHECK(close(ms[l].second, ref[l].one));
            }
            for (double alpha : {1.0, 0.1, 0.01}) {
                const auto lse = compute_marginals(bdd, LogSumExpAlgebra(alpha), theta);
                const auto lref = brute_force_marginals(c, support, theta, alpha);
                for (std::size_t l = 0; l < lse.size(); ++l) {
                    CHECK(close(lse[l].first, lref[l].zero));
                    CHECK(close(lse[l].second, lref[l].one));
                }
            }
            const auto counts = compute_marginals(bdd, CountingAlgebra{}, theta);
            const auto cref = brute_force_counts(c, support);
            for (std::size_t l = 0; l < counts.size(); ++l) {
                CHECK(counts[l].first == cref[l].zero);
                CHECK(counts[l].second == cref[l].one);
            }
        }
    }

    TEST_CASE("sandwich and consistency")
    {
        std::mt19937_64 rng(41);
        std::uniform_real_distribution<double> u(-5.0, 5.0);
        for (int k = 0; k < 100; ++k) {
            const auto c = test::random_row(rng, 10, 10);
            const Bdd bdd = build_bdd(c);
            if (bdd.empty())
                continue;
            std::vector<double> lambda(bdd.num_levels());
            for (double& x : lambda)
                x = u(rng);
            const std::span<const double> theta(lambda);
            const double e = compute_energy(bdd, MinSumAlgebra{}, theta);
            const double count = static_cast<double>(compute_energy(bdd, CountingAlgebra{}, theta));
            const auto mm = compute_marginals(bdd, MinSumAlgebra{}, theta);
            for (const auto& [m0, m1] : mm)
                CHECK(std::min(m0, m1) == doctest::Approx(e));
            for (double alpha : {1.0, 0.1, 0.01}) {
                const LogSumExpAlgebra alg(alpha);
                const double ea = compute_energy(bdd, alg, theta);
                CHECK(e >= ea - 1e-9);
                CHECK(ea >= e - alpha * std::log(count) - 1e-9);
                const auto lse = compute_marginals(bdd, alg, theta);
                for (std::size_t l = 0; l < lse.size(); ++l) {
                    const double merged = -alpha * alg.merge(-lse[l].first / alpha, -lse[l].second / alpha);
                    CHECK(merged == doctest::Approx(ea).epsilon(1e-12));
                    for (auto [s, h] : {std::pair{lse[l].first, mm[l].first}, {lse[l].second, mm[l].second}})
                        if (h != inf)
                            CHECK(std::abs(s - h) <= alpha * std::log(count) + 1e-9);
                }
            }
        }
    }
}
