#include "bddmp/dual_solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bddmp {

namespace {

constexpr double infinity = std::numeric_limits<double>::infinity();

} // namespace

std::string_view to_string(Direction direction) { return direction == Direction::forward ? "fw" : "bw"; }

std::string_view to_string(Averaging averaging) { return averaging == Averaging::uniform ? "uniform" : "srmp"; }

std::string_view to_string(Termination termination)
{
    switch (termination) {
    case Termination::converged:
        return "converged";
    case Termination::max_passes:
        return "max_passes";
    case Termination::infeasible:
        return "infeasible";
    }
    return "?";
}

DualState::DualState(const IlpInstance& instance, Decomposition decomposition, std::optional<double> smoothing,
                     Averaging averaging, const BddBuildOptions& bdd_options)
    : decomposition_(std::move(decomposition)),
      smoothing_(smoothing),
      algebra_(smoothing ? Algebra{LogSumExpAlgebra(*smoothing)} : Algebra{MinSumAlgebra{}}),
      averaging_(averaging)
{
    if (decomposition_.num_vars() != instance.num_vars() ||
        decomposition_.num_subproblems() != instance.num_constraints())
        throw std::invalid_argument("decomposition does not match the instance");

    free_ = presolve_free(instance, decomposition_);
    constant_ = instance.objective_offset() + free_.contribution;

    const std::size_t m = decomposition_.num_subproblems();
    bdds_.reserve(m);
    lambdas_.resize(m);
    for (std::size_t j = 0; j < m; ++j) {
        bdds_.push_back(build_bdd(instance.constraint(j), decomposition_.position, bdd_options));
        lambdas_[j].assign(bdds_[j].num_levels(), 0.0);
        infeasible_ |= bdds_[j].empty();
    }
    for (std::size_t i = 0; i < decomposition_.num_vars(); ++i) {
        const auto& slots = decomposition_.var_subproblems[i];
        const double share = instance.cost(i) / static_cast<double>(slots.size());
        for (const Incidence& s : slots)
            lambdas_[s.subproblem][s.level] = share;
    }

    std::visit(
        [&](const auto& alg) {
            stores_.reserve(m);
            double sum = constant_;
            for (std::size_t j = 0; j < m; ++j) {
                stores_.push_back(make_store(bdds_[j], alg));
                backward_sweep(bdds_[j], stores_[j], alg, std::span<const double>(lambdas_[j]));
                sum += subproblem_energy(bdds_[j], stores_[j], alg);
            }
            lower_bound_ = infeasible_ ? infinity : sum;
        },
        algebra_);
}

DualState::DualState(const IlpInstance& instance, const SolverConfig& config)
    : DualState(instance, decompose(instance, order_variables(instance, config.order)), config.smoothing,
                config.averaging, config.bdd_options)
{
}

std::size_t DualState::total_nodes() const
{
    std::size_t n = 0;
    for (const Bdd& b : bdds_)
        n += b.num_nodes();
    return n;
}

double DualState::lambda_sum(std::size_t var) const
{
    double sum = 0.0;
    for (const Incidence& s : decomposition_.var_subproblems[var])
        sum += lambda(s);
    return sum;
}

double DualState::minsum_bound() const
{
    if (infeasible_)
        return infinity;
    double sum = constant_;
    for (std::size_t j = 0; j < bdds_.size(); ++j)
        sum += compute_energy(bdds_[j], MinSumAlgebra{}, std::span<const double>(lambdas_[j]));
    return sum;
}

double DualState::smoothed_bound(double alpha) const
{
    if (infeasible_)
        return infinity;
    const LogSumExpAlgebra alg(alpha);
    double sum = constant_;
    for (std::size_t j = 0; j < bdds_.size(); ++j)
        sum += compute_energy(bdds_[j], alg, std::span<const double>(lambdas_[j]));
    return sum;
}

std::vector<double> DualState::subproblem_energies() const
{
    std::vector<double> out;
    out.reserve(bdds_.size());
    for (std::size_t j = 0; j < bdds_.size(); ++j)
        out.push_back(compute_energy(bdds_[j], MinSumAlgebra{}, std::span<const double>(lambdas_[j])));
    return out;
}

template <typename A>
void DualState::ensure_messages(const A& alg, Incidence slot)
{
    const Bdd& bdd = bdds_[slot.subproblem];
    MessageStore<double>& store = stores_[slot.subproblem];
    const std::span<const double> theta = lambdas_[slot.subproblem];
    while (store.fw_levels <= slot.level)
        forward_step(bdd, store, alg, store.fw_levels, theta);
    while (store.bw_from > slot.level + 1)
        backward_step(bdd, store, alg, store.bw_from - 1, theta);
}

template <typename A>
double DualState::mma_update_impl(const A& alg, std::size_t var, Direction direction, UpdateObserver* observer)
{
    const std::vector<Incidence>& slots = decomposition_.var_subproblems[var];
    const std::size_t k = slots.size();
    if (k == 0)
        return 0.0;
    if (observer)
        observer->before_update(*this, var, direction);

    raw_.resize(k);
    m0_.resize(k);
    m1_.resize(k);
    diff_.resize(k);
    delta_.resize(k);
    share_.resize(k);

    double finite_sum = 0.0;
    double finite_mass = 0.0;
    std::size_t excluded_one = 0;
    std::size_t excluded_zero = 0;
    for (std::size_t s = 0; s < k; ++s) {
        ensure_messages(alg, slots[s]);
        const std::size_t j = slots[s].subproblem;
        raw_[s] = aggregate_raw(bdds_[j], stores_[j], alg, slots[s].level, std::span<const double>(lambdas_[j]));
        m0_[s] = alg.finalize(raw_[s].zero);
        m1_[s] = alg.finalize(raw_[s].one);
        diff_[s] = m1_[s] - m0_[s];
        if (std::isfinite(diff_[s])) {
            finite_sum += diff_[s];
            finite_mass += std::abs(diff_[s]);
        } else {
            ++(diff_[s] > 0 ? excluded_one : excluded_zero);
        }
    }

    if (excluded_one == 0 && excluded_zero == 0) {
        std::size_t receivers = 0;
        for (std::size_t s = 0; s < k; ++s) {
            bool share = true;
            if (averaging_ == Averaging::srmp) {
                const std::size_t levels = bdds_[slots[s].subproblem].num_levels();
                share = direction == Direction::forward ? slots[s].level + 1 < levels : slots[s].level > 0;
            }
            share_[s] = share;
            receivers += share;
        }
        if (receivers == 0) {
            std::fill(share_.begin(), share_.end(), std::uint8_t{1});
            receivers = k;
        }
        const double portion = finite_sum / static_cast<double>(receivers);
        for (std::size_t s = 0; s < k; ++s)
            delta_[s] = -diff_[s] + (share_[s] ? portion : 0.0);
    } else {
        // A subproblem excluding one value is indifferent to its multiplier.
        // The others drop any preference for the excluded value and the
        // excluding subproblems absorb the difference. If both values are
        // excluded somewhere the instance is infeasible; the shift then only
        // moves between excluding subproblems, in the direction that raises
        // the bound.
        const bool zero_allowed = excluded_zero == 0;
        const bool one_allowed = excluded_one == 0;
        double moved = 0.0;
        for (std::size_t s = 0; s < k; ++s) {
            delta_[s] = 0.0;
            if (std::isfinite(diff_[s]) && one_allowed != zero_allowed)
                delta_[s] = zero_allowed ? std::max(0.0, -diff_[s]) : std::min(0.0, -diff_[s]);
            moved += delta_[s];
        }
        double to_one = 0.0, to_zero = 0.0;
        if (zero_allowed) {
            to_one = -moved / static_cast<double>(excluded_one);
        } else if (one_allowed) {
            to_zero = -moved / static_cast<double>(excluded_zero);
        } else {
            to_one = -std::max(1.0, finite_mass);
            to_zero = -static_cast<double>(excluded_one) * to_one / static_cast<double>(excluded_zero);
        }
        for (std::size_t s = 0; s < k; ++s) {
            share_[s] = !std::isfinite(diff_[s]);
            if (!std::isfinite(diff_[s]))
                delta_[s] = diff_[s] > 0 ? to_one : to_zero;
        }
    }

    double increase = 0.0;
    for (std::size_t s = 0; s < k; ++s) {
        const auto& r = raw_[s];
        const double before = alg.finalize(alg.merge(r.zero, r.one));
        const double after = alg.finalize(alg.merge(r.zero, alg.combine(r.one, alg.weight(delta_[s]))));
        increase += after - before;
        lambdas_[slots[s].subproblem][slots[s].level] += delta_[s];
        stores_[slots[s].subproblem].invalidate(slots[s].level);
    }

    if (observer) {
        const UpdateEvent event{var, direction, slots, m0_, m1_, diff_, share_, delta_, increase};
        observer->after_update(*this, event);
    }
    return increase;
}

double DualState::mma_update(std::size_t var, Direction direction, UpdateObserver* observer)
{
    if (infeasible_)
        return 0.0;
    return std::visit([&](const auto& alg) { return mma_update_impl(alg, var, direction, observer); }, algebra_);
}

template <typename A>
double DualState::objective_after_pass(const A& alg, Direction direction)
{
    double sum = constant_;
    for (std::size_t j = 0; j < bdds_.size(); ++j) {
        const Bdd& bdd = bdds_[j];
        MessageStore<double>& store = stores_[j];
        const std::span<const double> theta = lambdas_[j];
        const std::size_t levels = bdd.num_levels();
        if (levels == 0) {
            sum += subproblem_energy(bdd, store, alg);
        } else if (direction == Direction::forward) {
            // Forward values are current everywhere; close with the last level.
            ensure_messages(alg, Incidence{j, levels - 1});
            const auto r = aggregate_raw(bdd, store, alg, levels - 1, theta);
            sum += alg.finalize(alg.merge(r.zero, r.one));
        } else {
            while (store.bw_from > 0)
                backward_step(bdd, store, alg, store.bw_from - 1, theta);
            sum += subproblem_energy(bdd, store, alg);
        }
    }
    return sum;
}

double DualState::forward_pass(UpdateObserver* observer)
{
    if (infeasible_)
        return lower_bound_;
    for (std::size_t i : decomposition_.order)
        mma_update(i, Direction::forward, observer);
    ++passes_;
    lower_bound_ = std::visit([&](const auto& alg) { return objective_after_pass(alg, Direction::forward); }, algebra_);
    return lower_bound_;
}

double DualState::backward_pass(UpdateObserver* observer)
{
    if (infeasible_)
        return lower_bound_;
    for (auto it = decomposition_.order.rbegin(); it != decomposition_.order.rend(); ++it)
        mma_update(*it, Direction::backward, observer);
    ++passes_;
    lower_bound_ = std::visit([&](const auto& alg) { return objective_after_pass(alg, Direction::backward); }, algebra_);
    return lower_bound_;
}

DualReport run(DualState& state, const SolverConfig& config, UpdateObserver* observer)
{
    if (!(config.rel_improvement_tol > 0.0))
        throw std::invalid_argument("relative improvement tolerance must be positive");

    DualReport report{state.lower_bound(), 0, Termination::max_passes, {}};
    if (state.infeasible()) {
        report.termination = Termination::infeasible;
        return report;
    }

    const auto start = std::chrono::steady_clock::now();
    auto record = [&](Direction direction, double lb) {
        const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
        report.trace.push_back({report.passes, direction, lb, elapsed.count()});
    };

    double previous = state.lower_bound();
    while (report.passes < config.max_passes) {
        ++report.passes;
        record(Direction::forward, state.forward_pass(observer));
        if (report.passes == config.max_passes)
            break;
        ++report.passes;
        const double lb = state.backward_pass(observer);
        record(Direction::backward, lb);
        if (std::abs(lb - previous) / std::max(1.0, std::abs(lb)) < config.rel_improvement_tol) {
            report.termination = Termination::converged;
            break;
        }
        previous = lb;
    }

    report.lower_bound = state.lower_bound();
    if (state.smoothing())
        report.lower_bound = std::max(report.lower_bound, state.minsum_bound());
    return report;
}

} // namespace bddmp
