#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <limits>
#include <stdexcept>

namespace bddmp {

/// Abstract algebra driving the BDD dynamic programs:
///   combine  accumulates weights along a path (neutral: combine_identity),
///   merge    aggregates alternative paths     (neutral: merge_identity),
///   weight   turns a multiplier into the arc weight of a 1-arc,
///   finalize converts a message value into a marginal/energy.
template <typename A>
concept MarginalAlgebra = requires(const A a, typename A::value_type x, double lambda) {
    typename A::result_type;
    { a.combine(x, x) } -> std::convertible_to<typename A::value_type>;
    { a.merge(x, x) } -> std::convertible_to<typename A::value_type>;
    { a.combine_identity() } -> std::convertible_to<typename A::value_type>;
    { a.merge_identity() } -> std::convertible_to<typename A::value_type>;
    { a.weight(lambda) } -> std::convertible_to<typename A::value_type>;
    { a.finalize(x) } -> std::convertible_to<typename A::result_type>;
};

/// (+, min, 0, inf, lambda): min-marginals and subproblem minima.
struct MinSumAlgebra {
    using value_type = double;
    using result_type = double;

    static constexpr double infinity = std::numeric_limits<double>::infinity();

    double combine(double a, double b) const { return a + b; }
    double merge(double a, double b) const { return std::min(a, b); }
    double combine_identity() const { return 0.0; }
    double merge_identity() const { return infinity; }
    double weight(double lambda) const { return lambda; }
    double finalize(double v) const { return v; }
};

/// Marginal log-sum-exp with temperature alpha.
///
/// The exp-domain algebra (*, +, 1, 0, exp(-lambda/alpha)) is carried in the
/// log domain: a value v stands for exp(v), so combine is addition, merge is
/// a max-shifted log-add and finalize maps v to -alpha * v.
class LogSumExpAlgebra {
public:
    using value_type = double;
    using result_type = double;

    explicit LogSumExpAlgebra(double alpha) : alpha_(alpha)
    {
        if (!(alpha > 0.0) || !std::isfinite(alpha))
            throw std::invalid_argument("smoothing parameter must be positive");
    }

    double alpha() const { return alpha_; }

    double combine(double a, double b) const { return a + b; }
    double merge(double a, double b) const
    {
        if (a < b)
            std::swap(a, b);
        if (b == -std::numeric_limits<double>::infinity())
            return a;
        return a + std::log1p(std::exp(b - a));
    }
    double combine_identity() const { return 0.0; }
    double merge_identity() const { return -std::numeric_limits<double>::infinity(); }
    double weight(double lambda) const { return -lambda / alpha_; }
    double finalize(double v) const { return -alpha_ * v; }

private:
    double alpha_;
};

using Count = boost::multiprecision::cpp_int;

/// (*, +, 1, 0, 1): number of solutions.
struct CountingAlgebra {
    using value_type = Count;
    using result_type = Count;

    Count combine(const Count& a, const Count& b) const { return a * b; }
    Count merge(const Count& a, const Count& b) const { return a + b; }
    Count combine_identity() const { return 1; }
    Count merge_identity() const { return 0; }
    Count weight(double) const { return 1; }
    Count finalize(const Count& v) const { return v; }
};

static_assert(MarginalAlgebra<MinSumAlgebra>);
static_assert(MarginalAlgebra<LogSumExpAlgebra>);
static_assert(MarginalAlgebra<CountingAlgebra>);

} // namespace bddmp
