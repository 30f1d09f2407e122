#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace curvres {

/// A compiled arithmetic expression over a fixed list of named variables.
///
/// The language covers numbers, the constants `pi` and `e`, the operators
/// `+ - * / ^` (right-associative power), parentheses and the functions
/// sin cos tan asin acos atan sinh cosh tanh exp log sqrt abs, plus the
/// two-argument min max pow atan2.  Expressions are compiled once into a
/// postfix program; evaluation does not allocate.
///
/// Parse failures throw InputError with the 1-based column of the offending
/// token.
class Expression {
public:
    Expression() = default;

    static Expression parse(std::string_view text, std::vector<std::string> variables);
    static Expression constant(double value);

    double operator()(std::span<const double> values) const;
    double operator()(std::initializer_list<double> values) const
    {
        return (*this)(std::span<const double>(values.begin(), values.size()));
    }

    bool depends_on(std::string_view variable) const;
    bool is_constant() const;
    const std::string& text() const { return text_; }
    const std::vector<std::string>& variables() const { return variables_; }

private:
    enum class Op : std::uint8_t {
        push_const, push_var, neg, add, sub, mul, div, pow,
        sin, cos, tan, asin, acos, atan, sinh, cosh, tanh, exp, log, sqrt, abs,
        min, max, atan2
    };
    struct Instr {
        Op op;
        std::uint32_t index = 0;  // variable slot
        double value = 0.0;       // constant
    };

    friend class ExprParser;

    std::string text_;
    std::vector<std::string> variables_;
    std::vector<Instr> code_;
    std::size_t max_depth_ = 0;
};

}  // namespace curvres
