#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace bddmp {

enum class Relation { less_equal, greater_equal, equal };

std::string_view to_string(Relation rel);

struct Term {
    std::size_t var;
    std::int64_t coeff;

    friend bool operator==(const Term&, const Term&) = default;
};

struct LinearConstraint {
    std::string name;
    std::vector<Term> terms;
    Relation relation = Relation::less_equal;
    std::int64_t rhs = 0;

    /// Left-hand side value of a full 0/1 assignment.
    std::int64_t activity(std::span<const std::uint8_t> x) const;
    bool holds(std::int64_t lhs) const;
    bool satisfied_by(std::span<const std::uint8_t> x) const { return holds(activity(x)); }

    friend bool operator==(const LinearConstraint&, const LinearConstraint&) = default;
};

// Coefficient bounds keep per-level BDD state counts moderate.
inline constexpr std::int64_t max_abs_coefficient = std::int64_t{1} << 20;
inline constexpr std::int64_t max_abs_rhs = std::int64_t{1} << 40;

/// A 0-1 integer linear program: minimize c^T x + offset subject to linear rows.
class IlpInstance {
public:
    /// Appends a variable; throws std::invalid_argument on a duplicate name.
    std::size_t add_variable(std::string name, double cost = 0.0);

    /// Adds a row. Zero coefficients are dropped; throws std::invalid_argument
    /// on an unknown or repeated variable and on out-of-range coefficients.
    std::size_t add_constraint(LinearConstraint constraint);

    std::size_t num_vars() const { return var_names_.size(); }
    std::size_t num_constraints() const { return constraints_.size(); }

    const std::vector<std::string>& var_names() const { return var_names_; }
    const std::string& var_name(std::size_t i) const { return var_names_.at(i); }
    std::optional<std::size_t> find_variable(std::string_view name) const;
    std::optional<std::size_t> find_constraint(std::string_view name) const;

    std::span<const double> objective() const { return objective_; }
    double cost(std::size_t i) const { return objective_.at(i); }
    void set_cost(std::size_t i, double c) { objective_.at(i) = c; }
    double objective_offset() const { return objective_offset_; }
    void set_objective_offset(double offset) { objective_offset_ = offset; }
    const std::string& objective_name() const { return objective_name_; }
    void set_objective_name(std::string name) { objective_name_ = std::move(name); }

    const std::vector<LinearConstraint>& constraints() const { return constraints_; }
    const LinearConstraint& constraint(std::size_t j) const { return constraints_.at(j); }

    double evaluate(std::span<const std::uint8_t> x) const;
    bool feasible(std::span<const std::uint8_t> x) const;

    friend bool operator==(const IlpInstance& a, const IlpInstance& b)
    {
        return a.objective_name_ == b.objective_name_ && a.var_names_ == b.var_names_ &&
               a.objective_ == b.objective_ && a.objective_offset_ == b.objective_offset_ &&
               a.constraints_ == b.constraints_;
    }

private:
    std::string objective_name_ = "obj";
    std::vector<std::string> var_names_;
    std::vector<double> objective_;
    double objective_offset_ = 0.0;
    std::vector<LinearConstraint> constraints_;
    std::unordered_map<std::string, std::size_t> name_index_;
};

} // namespace bddmp
