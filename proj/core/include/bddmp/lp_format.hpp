#pragma once

#include "bddmp/ilp.hpp"

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

namespace bddmp {

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, std::size_t column, const std::string& message);

    std::size_t line() const { return line_; }
    std::size_t column() const { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

// Restricted LP text format:
//
//   \ comment
//   Minimize
//    obj: x + 2 y - 3 z + 1.5
//   Subject To
//    c1: x + y >= 1
//   Binary
//    x y z
//   End
//
// Variables are indexed in order of first appearance in the Binary section;
// every variable must be declared there. Constraint coefficients are
// integers, objective coefficients and the objective constant are reals.
IlpInstance parse_lp(std::istream& in);
IlpInstance parse_lp(std::string_view text);
IlpInstance parse_lp_file(const std::string& path);

/// Serializes an instance so that parse_lp(write_lp(x)) == x.
std::string write_lp(const IlpInstance& instance);
void write_lp(std::ostream& out, const IlpInstance& instance);

} // namespace bddmp
