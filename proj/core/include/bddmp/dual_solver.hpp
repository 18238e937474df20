#pragma once

#include "bddmp/algebra.hpp"
#include "bddmp/bdd.hpp"
#include "bddmp/decomposition.hpp"
#include "bddmp/ilp.hpp"
#include "bddmp/messages.hpp"

#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace bddmp {

enum class Averaging { uniform, srmp };
enum class Direction { forward, backward };

std::string_view to_string(Direction direction); // "fw" / "bw"
std::string_view to_string(Averaging averaging);

struct SolverConfig {
    std::size_t max_passes = 1000;
    double rel_improvement_tol = 1e-6;
    std::optional<double> smoothing; // temperature alpha of the smoothed dual
    Averaging averaging = Averaging::uniform;
    OrderStrategy order = OrderStrategy::input;
    BddBuildOptions bdd_options;
};

class DualState;

/// One multiplier update at a variable. Per-slot arrays follow
/// decomposition().var_subproblems[var].
struct UpdateEvent {
    std::size_t var;
    Direction direction;
    std::span<const Incidence> slots;
    std::span<const double> m0; // marginals read from the cached messages
    std::span<const double> m1;
    std::span<const double> differences; // m1 - m0, infinite where a subproblem excludes a value
    std::span<const std::uint8_t> receives_share; // with infinite differences: absorbs the shift
    std::span<const double> deltas;
    /// Objective increase implied by the marginals and deltas.
    double increase;
};

class UpdateObserver {
public:
    virtual ~UpdateObserver() = default;
    virtual void before_update(const DualState&, std::size_t /*var*/, Direction) {}
    virtual void after_update(const DualState&, const UpdateEvent&) {}
};

struct TraceEntry {
    std::size_t pass;
    Direction direction;
    double lower_bound;
    double time_ms;
};

enum class Termination { converged, max_passes, infeasible };
std::string_view to_string(Termination termination);

struct DualReport {
    double lower_bound;
    std::size_t passes;
    Termination termination;
    std::vector<TraceEntry> trace;
};

/// Lagrange multipliers of the row decomposition together with one BDD and
/// one message cache per subproblem.
///
/// lower_bound() tracks the objective being maximized: the Lagrangean dual in
/// min-sum mode, the smoothed dual when a temperature is set. Both include
/// the objective offset and the contribution of presolved free variables.
class DualState {
public:
    DualState(const IlpInstance& instance, Decomposition decomposition, std::optional<double> smoothing = std::nullopt,
              Averaging averaging = Averaging::uniform, const BddBuildOptions& bdd_options = {});
    DualState(const IlpInstance& instance, const SolverConfig& config);

    const Decomposition& decomposition() const { return decomposition_; }
    std::size_t num_vars() const { return decomposition_.num_vars(); }
    std::size_t num_subproblems() const { return bdds_.size(); }
    const Bdd& bdd(std::size_t j) const { return bdds_[j]; }
    std::span<const Bdd> bdds() const { return bdds_; }
    /// For the primal search. Callers must restore every diagram before the
    /// next dual update.
    std::span<Bdd> mutable_bdds() { return bdds_; }
    std::size_t total_nodes() const;

    /// Multipliers of subproblem j, one per level of its BDD.
    std::span<const double> lambdas(std::size_t j) const { return lambdas_[j]; }
    double lambda(Incidence slot) const { return lambdas_[slot.subproblem][slot.level]; }
    /// Sum of the multipliers of a variable over its subproblems.
    double lambda_sum(std::size_t var) const;

    std::optional<double> smoothing() const { return smoothing_; }
    Averaging averaging() const { return averaging_; }
    const FreePresolve& free_presolve() const { return free_; }
    /// Objective offset plus the presolved free-variable contribution.
    double constant() const { return constant_; }

    bool infeasible() const { return infeasible_; }
    double lower_bound() const { return lower_bound_; }
    std::size_t passes() const { return passes_; }

    /// Lagrangean dual value of the current multipliers, recomputed from scratch.
    double minsum_bound() const;
    /// Smoothed dual value at the given temperature, recomputed from scratch.
    double smoothed_bound(double alpha) const;
    std::vector<double> subproblem_energies() const;

    /// Averages the marginals of var across its subproblems. The messages
    /// needed are brought up to date lazily; the direction only matters for
    /// SRMP averaging. Returns the objective increase.
    double mma_update(std::size_t var, Direction direction, UpdateObserver* observer = nullptr);

    double forward_pass(UpdateObserver* observer = nullptr);
    double backward_pass(UpdateObserver* observer = nullptr);

private:
    using Algebra = std::variant<MinSumAlgebra, LogSumExpAlgebra>;

    template <typename A>
    double mma_update_impl(const A& alg, std::size_t var, Direction direction, UpdateObserver* observer);
    template <typename A>
    void ensure_messages(const A& alg, Incidence slot);
    template <typename A>
    double objective_after_pass(const A& alg, Direction direction);

    Decomposition decomposition_;
    std::vector<Bdd> bdds_;
    std::vector<std::vector<double>> lambdas_;
    std::vector<MessageStore<double>> stores_;
    std::optional<double> smoothing_;
    Algebra algebra_;
    Averaging averaging_;
    FreePresolve free_;
    double constant_ = 0.0;
    bool infeasible_ = false;
    double lower_bound_ = 0.0;
    std::size_t passes_ = 0;

    // Scratch for mma_update.
    std::vector<double> m0_, m1_, diff_, delta_;
    std::vector<RawMarginals<double>> raw_;
    std::vector<std::uint8_t> share_;
};

/// Alternates forward and backward passes until the relative improvement over
/// a full round drops below the tolerance or max_passes passes were made.
/// In smoothed mode the trace follows the smoothed objective and the reported
/// bound is the better of it and the Lagrangean dual of the final multipliers.
DualReport run(DualState& state, const SolverConfig& config, UpdateObserver* observer = nullptr);

} // namespace bddmp
