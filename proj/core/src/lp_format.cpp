#include "bddmp/lp_format.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <istream>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace bddmp {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                         message),
      line_(line), column_(column)
{
}

namespace {

enum class TokenKind { identifier, number, plus, minus, colon, relation };

struct Token {
    TokenKind kind;
    std::string text;
    std::size_t line;
    std::size_t column;
};

enum class Section { none, objective, constraints, binary, end };

bool is_identifier_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

bool is_identifier_char(char c)
{
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

void tokenize_line(std::string_view line, std::size_t line_no, std::vector<Token>& out)
{
    std::size_t i = 0;
    while (i < line.size()) {
        const char c = line[i];
        const std::size_t col = i + 1;
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
        } else if (c == '\\') {
            return;
        } else if (is_identifier_start(c)) {
            std::size_t j = i + 1;
            while (j < line.size() && is_identifier_char(line[j]))
                ++j;
            out.push_back({TokenKind::identifier, std::string(line.substr(i, j - i)), line_no, col});
            i = j;
        } else if (is_digit(c) || (c == '.' && i + 1 < line.size() && is_digit(line[i + 1]))) {
            std::size_t j = i;
            while (j < line.size() && is_digit(line[j]))
                ++j;
            if (j < line.size() && line[j] == '.') {
                ++j;
                while (j < line.size() && is_digit(line[j]))
                    ++j;
            }
            if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < line.size() && (line[k] == '+' || line[k] == '-'))
                    ++k;
                if (k < line.size() && is_digit(line[k])) {
                    while (k < line.size() && is_digit(line[k]))
                        ++k;
                    j = k;
                }
            }
            out.push_back({TokenKind::number, std::string(line.substr(i, j - i)), line_no, col});
            i = j;
        } else if (c == '+' || c == '-') {
            out.push_back({c == '+' ? TokenKind::plus : TokenKind::minus, std::string(1, c), line_no, col});
            ++i;
        } else if (c == ':') {
            out.push_back({TokenKind::colon, ":", line_no, col});
            ++i;
        } else if (c == '<' || c == '>' || c == '=') {
            std::size_t j = i + 1;
            if (j < line.size() && (line[j] == '=' || line[j] == '<' || line[j] == '>') && line[j] != c)
                ++j;
            out.push_back({TokenKind::relation, std::string(line.substr(i, j - i)), line_no, col});
            i = j;
        } else {
            throw ParseError(line_no, col, std::string("unexpected character '") + c + "'");
        }
    }
}

std::string normalize_header(std::string_view line)
{
    std::string out;
    bool pending_space = false;
    for (char c : line) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space)
            out.push_back(' ');
        pending_space = false;
        out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
    return out;
}

struct RawTerm {
    std::string var;
    std::int64_t coeff;
    std::size_t line;
    std::size_t column;
};

struct RawObjectiveTerm {
    std::string var;
    double coeff;
    std::size_t line;
    std::size_t column;
};

struct RawConstraint {
    std::string name;
    std::vector<RawTerm> terms;
    Relation relation;
    std::int64_t rhs;
};

class Parser {
public:
    IlpInstance parse(std::istream& in)
    {
        std::string line;
        std::size_t line_no = 0;
        Section section = Section::none;
        bool seen_objective = false;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r')
                line.pop_back();
            const std::string header = normalize_header(line);
            if (header.empty() || header.front() == '\\')
                continue;
            if (section == Section::end)
                continue;
            const std::size_t col = line.find_first_not_of(" \t") + 1;
            if (auto next = header_section(header, line_no, col)) {
                finish_section(section);
                if (*next == Section::objective) {
                    if (seen_objective)
                        throw ParseError(line_no, col, "duplicate Minimize section");
                    seen_objective = true;
                } else if (!seen_objective && *next != Section::end) {
                    throw ParseError(line_no, col, "expected 'Minimize' before this section");
                }
                section = *next;
                continue;
            }
            if (section == Section::none)
                throw ParseError(line_no, col, "expected 'Minimize'");
            tokenize_line(line, line_no, tokens_);
        }
        if (section != Section::end)
            throw ParseError(line_no + 1, 1, "missing 'End'");
        return build();
    }

private:
    std::optional<Section> header_section(const std::string& h, std::size_t line, std::size_t col) const
    {
        if (h == "minimize" || h == "minimise" || h == "minimum" || h == "min")
            return Section::objective;
        if (h == "maximize" || h == "maximise" || h == "maximum" || h == "max")
            throw ParseError(line, col, "only minimization problems are supported");
        if (h == "subject to" || h == "such that" || h == "st" || h == "s.t.")
            return Section::constraints;
        if (h == "binary" || h == "binaries" || h == "bin")
            return Section::binary;
        if (h == "general" || h == "generals" || h == "gen" || h == "integer" || h == "integers" ||
            h == "bounds" || h == "bound" || h == "semi-continuous" || h == "sos")
            throw ParseError(line, col, "unsupported section '" + h + "': only binary programs are accepted");
        if (h == "end")
            return Section::end;
        return std::nullopt;
    }

    void finish_section(Section section)
    {
        switch (section) {
        case Section::objective:
            parse_objective();
            break;
        case Section::constraints:
            parse_constraints();
            break;
        case Section::binary:
            parse_binaries();
            break;
        default:
            break;
        }
        tokens_.clear();
        pos_ = 0;
    }

    const Token* peek(std::size_t ahead = 0) const
    {
        return pos_ + ahead < tokens_.size() ? &tokens_[pos_ + ahead] : nullptr;
    }

    [[noreturn]] void fail(const std::string& msg) const
    {
        if (const Token* t = peek())
            throw ParseError(t->line, t->column, msg + ", found '" + t->text + "'");
        const std::size_t line = tokens_.empty() ? 0 : tokens_.back().line;
        const std::size_t col = tokens_.empty() ? 0 : tokens_.back().column + tokens_.back().text.size();
        throw ParseError(line, col, msg + " at end of section");
    }

    std::optional<std::string> parse_label()
    {
        const Token* a = peek();
        const Token* b = peek(1);
        if (a && b && a->kind == TokenKind::identifier && b->kind == TokenKind::colon) {
            pos_ += 2;
            return a->text;
        }
        return std::nullopt;
    }

    // Consumes a run of '+'/'-'; returns the resulting sign and whether any was seen.
    std::pair<int, bool> parse_signs()
    {
        int sign = 1;
        bool seen = false;
        while (const Token* t = peek()) {
            if (t->kind == TokenKind::plus) {
                seen = true;
            } else if (t->kind == TokenKind::minus) {
                sign = -sign;
                seen = true;
            } else {
                break;
            }
            ++pos_;
        }
        return {sign, seen};
    }

    static std::int64_t to_integer(const Token& t)
    {
        if (t.text.find_first_of(".eE") != std::string::npos)
            throw ParseError(t.line, t.column, "constraint coefficients must be integers, found '" + t.text + "'");
        std::int64_t value = 0;
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec == std::errc::result_out_of_range)
            throw ParseError(t.line, t.column, "integer overflow in '" + t.text + "'");
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size())
            throw ParseError(t.line, t.column, "malformed number '" + t.text + "'");
        return value;
    }

    static double to_real(const Token& t)
    {
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size())
            throw ParseError(t.line, t.column, "malformed number '" + t.text + "'");
        return value;
    }

    void parse_objective()
    {
        if (auto label = parse_label())
            objective_name_ = *label;
        bool first = true;
        while (peek()) {
            const auto [sign, saw_sign] = parse_signs();
            if (!first && !saw_sign)
                fail("expected '+' or '-'");
            first = false;
            const Token* t = peek();
            if (!t)
                fail("expected a term");
            std::optional<double> coeff;
            if (t->kind == TokenKind::number) {
                coeff = to_real(*t);
                ++pos_;
                t = peek();
            }
            if (t && t->kind == TokenKind::identifier) {
                objective_terms_.push_back({t->text, sign * coeff.value_or(1.0), t->line, t->column});
                ++pos_;
            } else if (coeff) {
                objective_offset_ += sign * *coeff;
            } else {
                fail("expected a variable or number");
            }
        }
    }

    void parse_constraints()
    {
        while (peek()) {
            RawConstraint c;
            c.name = parse_label().value_or("R" + std::to_string(constraints_.size() + 1));
            std::int64_t constant = 0;
            std::unordered_set<std::string> seen;
            bool first = true;
            while (true) {
                const Token* t = peek();
                if (t && t->kind == TokenKind::relation) {
                    if (first)
                        fail("expected a term");
                    break;
                }
                const auto [sign, saw_sign] = parse_signs();
                if (!first && !saw_sign)
                    fail("expected '+', '-' or a relation");
                first = false;
                t = peek();
                if (!t)
                    fail("expected a term");
                std::optional<std::int64_t> coeff;
                if (t->kind == TokenKind::number) {
                    coeff = to_integer(*t);
                    ++pos_;
                    t = peek();
                }
                if (t && t->kind == TokenKind::identifier) {
                    const std::int64_t value = sign * coeff.value_or(1);
                    if (std::abs(value) > max_abs_coefficient)
                        throw ParseError(t->line, t->column,
                                         "integer overflow: coefficient of '" + t->text + "' exceeds 2^20");
                    if (!seen.insert(t->text).second)
                        throw ParseError(t->line, t->column,
                                         "duplicate variable '" + t->text + "' in constraint '" + c.name + "'");
                    c.terms.push_back({t->text, value, t->line, t->column});
                    ++pos_;
                } else if (coeff) {
                    constant += sign * *coeff;
                } else {
                    fail("expected a variable or number");
                }
            }
            const Token& rel = *peek();
            if (rel.text == "<=" || rel.text == "=<" || rel.text == "<")
                c.relation = Relation::less_equal;
            else if (rel.text == ">=" || rel.text == "=>" || rel.text == ">")
                c.relation = Relation::greater_equal;
            else if (rel.text == "=")
                c.relation = Relation::equal;
            else
                throw ParseError(rel.line, rel.column, "unknown relation '" + rel.text + "'");
            ++pos_;
            const auto [sign, saw_sign] = parse_signs();
            const Token* t = peek();
            if (!t || t->kind != TokenKind::number)
                fail("expected right-hand side");
            c.rhs = sign * to_integer(*t) - constant;
            if (std::abs(c.rhs) > max_abs_rhs)
                throw ParseError(t->line, t->column, "integer overflow: right-hand side exceeds 2^40");
            ++pos_;
            constraints_.push_back(std::move(c));
        }
    }

    void parse_binaries()
    {
        for (const Token& t : tokens_) {
            if (t.kind != TokenKind::identifier)
                throw ParseError(t.line, t.column, "expected a variable name, found '" + t.text + "'");
            if (declared_.insert(t.text).second)
                binaries_.push_back(t.text);
        }
    }

    std::size_t resolve(const IlpInstance& inst, const std::string& var, std::size_t line, std::size_t col) const
    {
        if (auto idx = inst.find_variable(var))
            return *idx;
        throw ParseError(line, col, "variable '" + var + "' is not declared in the Binary section");
    }

    IlpInstance build()
    {
        IlpInstance inst;
        inst.set_objective_name(objective_name_);
        for (std::string& name : binaries_)
            inst.add_variable(std::move(name));
        for (const RawObjectiveTerm& t : objective_terms_) {
            const std::size_t i = resolve(inst, t.var, t.line, t.column);
            inst.set_cost(i, inst.cost(i) + t.coeff);
        }
        inst.set_objective_offset(objective_offset_);
        for (RawConstraint& raw : constraints_) {
            LinearConstraint c{std::move(raw.name), {}, raw.relation, raw.rhs};
            for (const RawTerm& t : raw.terms)
                c.terms.push_back({resolve(inst, t.var, t.line, t.column), t.coeff});
            inst.add_constraint(std::move(c));
        }
        return inst;
    }

    std::vector<Token> tokens_;
    std::size_t pos_ = 0;

    std::string objective_name_ = "obj";
    std::vector<RawObjectiveTerm> objective_terms_;
    double objective_offset_ = 0.0;
    std::vector<RawConstraint> constraints_;
    std::vector<std::string> binaries_;
    std::unordered_set<std::string> declared_;
};

std::string format_real(double v)
{
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

template <typename T>
void write_term(std::ostream& out, T coeff, const std::string& var, bool first)
{
    const bool negative = coeff < 0;
    const T magnitude = negative ? -coeff : coeff;
    if (negative)
        out << (first ? "- " : " - ");
    else if (!first)
        out << " + ";
    if (magnitude != T{1}) {
        if constexpr (std::is_floating_point_v<T>)
            out << format_real(magnitude) << ' ';
        else
            out << magnitude << ' ';
    }
    out << var;
}

} // namespace

IlpInstance parse_lp(std::istream& in) { return Parser{}.parse(in); }

IlpInstance parse_lp(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_lp(in);
}

IlpInstance parse_lp_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path + "'");
    return parse_lp(in);
}

void write_lp(std::ostream& out, const IlpInstance& instance)
{
    const auto& names = instance.var_names();
    out << "Minimize\n " << instance.objective_name() << ":";
    bool first = true;
    for (std::size_t i = 0; i < instance.num_vars(); ++i) {
        const double c = instance.cost(i);
        if (c == 0.0)
            continue;
        out << (first ? " " : "");
        write_term(out, c, names[i], first);
        first = false;
    }
    const double offset = instance.objective_offset();
    if (offset != 0.0 || first) {
        if (first)
            out << ' ' << format_real(offset);
        else
            out << (offset < 0 ? " - " : " + ") << format_real(std::abs(offset));
    }
    out << "\nSubject To\n";
    for (const LinearConstraint& c : instance.constraints()) {
        out << ' ' << c.name << ":";
        if (c.terms.empty())
            out << " 0";
        for (std::size_t k = 0; k < c.terms.size(); ++k) {
            out << (k == 0 ? " " : "");
            write_term(out, c.terms[k].coeff, names[c.terms[k].var], k == 0);
        }
        out << ' ' << to_string(c.relation) << ' ' << c.rhs << '\n';
    }
    out << "Binary\n";
    for (std::size_t i = 0; i < names.size(); ++i)
        out << ' ' << names[i] << ((i % 10 == 9 || i + 1 == names.size()) ? "\n" : "");
    out << "End\n";
}

std::string write_lp(const IlpInstance& instance)
{
    std::ostringstream out;
    write_lp(out, instance);
    return out.str();
}

} // namespace bddmp
