#include "bddmp/ilp.hpp"

#include <algorithm>
#include <cassert>
#include <cstdlib>
#include <stdexcept>
#include <unordered_set>

namespace bddmp {

std::string_view to_string(Relation rel)
{
    switch (rel) {
    case Relation::less_equal:
        return "<=";
    case Relation::greater_equal:
        return ">=";
    case Relation::equal:
        return "=";
    }
    return "?";
}

std::int64_t LinearConstraint::activity(std::span<const std::uint8_t> x) const
{
    std::int64_t lhs = 0;
    for (const Term& t : terms)
        if (x[t.var])
            lhs += t.coeff;
    return lhs;
}

bool LinearConstraint::holds(std::int64_t lhs) const
{
    switch (relation) {
    case Relation::less_equal:
        return lhs <= rhs;
    case Relation::greater_equal:
        return lhs >= rhs;
    case Relation::equal:
        return lhs == rhs;
    }
    return false;
}

std::size_t IlpInstance::add_variable(std::string name, double cost)
{
    if (name_index_.contains(name))
        throw std::invalid_argument("duplicate variable '" + name + "'");
    const std::size_t idx = var_names_.size();
    name_index_.emplace(name, idx);
    var_names_.push_back(std::move(name));
    objective_.push_back(cost);
    return idx;
}

std::size_t IlpInstance::add_constraint(LinearConstraint constraint)
{
    if (std::abs(constraint.rhs) > max_abs_rhs)
        throw std::invalid_argument("right-hand side of '" + constraint.name + "' out of range");

    std::unordered_set<std::size_t> seen;
    std::erase_if(constraint.terms, [](const Term& t) { return t.coeff == 0; });
    for (const Term& t : constraint.terms) {
        if (t.var >= num_vars())
            throw std::invalid_argument("constraint '" + constraint.name + "' references unknown variable");
        if (!seen.insert(t.var).second)
            throw std::invalid_argument("variable '" + var_names_[t.var] + "' repeated in constraint '" +
                                        constraint.name + "'");
        if (std::abs(t.coeff) > max_abs_coefficient)
            throw std::invalid_argument("coefficient of '" + var_names_[t.var] + "' in '" + constraint.name +
                                        "' out of range");
    }
    constraints_.push_back(std::move(constraint));
    return constraints_.size() - 1;
}

std::optional<std::size_t> IlpInstance::find_variable(std::string_view name) const
{
    const auto it = name_index_.find(std::string(name));
    if (it == name_index_.end())
        return std::nullopt;
    return it->second;
}

std::optional<std::size_t> IlpInstance::find_constraint(std::string_view name) const
{
    for (std::size_t j = 0; j < constraints_.size(); ++j)
        if (constraints_[j].name == name)
            return j;
    return std::nullopt;
}

double IlpInstance::evaluate(std::span<const std::uint8_t> x) const
{
    assert(x.size() == num_vars());
    double value = objective_offset_;
    for (std::size_t i = 0; i < objective_.size(); ++i)
        if (x[i])
            value += objective_[i];
    return value;
}

bool IlpInstance::feasible(std::span<const std::uint8_t> x) const
{
    if (x.size() != num_vars())
        return false;
    return std::all_of(constraints_.begin(), constraints_.end(),
                       [&](const LinearConstraint& c) { return c.satisfied_by(x); });
}

} // namespace bddmp
