#include "curvres/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>
#include <string>

#include "curvres/error.hpp"

namespace curvres {

namespace {

constexpr std::size_t kMaxStack = 64;

}  // namespace

class ExprParser {
public:
    using Op = Expression::Op;

    ExprParser(std::string_view text, const std::vector<std::string>& vars, Expression& out)
        : text_(text), vars_(vars), out_(out)
    {
    }

    void run()
    {
        skip_ws();
        if (pos_ >= text_.size()) fail("empty expression");
        parse_sum();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected character '" + std::string(1, text_[pos_]) + "'");
    }

private:
    [[noreturn]] void fail(const std::string& msg) const
    {
        throw InputError("expression \"" + std::string(text_) + "\": column " + std::to_string(pos_ + 1) +
                         ": " + msg);
    }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void emit(Op op, int stack_delta, std::uint32_t index = 0, double value = 0.0)
    {
        out_.code_.push_back({op, index, value});
        depth_ += stack_delta;
        out_.max_depth_ = std::max<std::size_t>(out_.max_depth_, static_cast<std::size_t>(depth_));
        if (static_cast<std::size_t>(depth_) > kMaxStack) fail("expression nested too deeply");
    }

    void parse_sum()
    {
        parse_product();
        for (;;) {
            if (accept('+')) {
                parse_product();
                emit(Op::add, -1);
            } else if (accept('-')) {
                parse_product();
                emit(Op::sub, -1);
            } else {
                return;
            }
        }
    }

    void parse_product()
    {
        parse_unary();
        for (;;) {
            if (accept('*')) {
                parse_unary();
                emit(Op::mul, -1);
            } else if (accept('/')) {
                parse_unary();
                emit(Op::div, -1);
            } else {
                return;
            }
        }
    }

    void parse_unary()
    {
        if (accept('-')) {
            parse_unary();
            emit(Op::neg, 0);
        } else if (accept('+')) {
            parse_unary();
        } else {
            parse_power();
        }
    }

    void parse_power()
    {
        parse_primary();
        if (accept('^')) {
            parse_unary();  // right associative, binds tighter than unary minus on the left
            emit(Op::pow, -1);
        }
    }

    void parse_primary()
    {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of expression");
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            parse_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            const std::size_t start = pos_;
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                ++pos_;
            const std::string name(text_.substr(start, pos_ - start));
            skip_ws();
            if (pos_ < text_.size() && text_[pos_] == '(') {
                parse_call(name, start);
                return;
            }
            for (std::size_t i = 0; i < vars_.size(); ++i) {
                if (vars_[i] == name) {
                    emit(Op::push_var, +1, static_cast<std::uint32_t>(i));
                    return;
                }
            }
            if (name == "pi") {
                emit(Op::push_const, +1, 0, std::numbers::pi);
                return;
            }
            if (name == "e") {
                emit(Op::push_const, +1, 0, std::numbers::e);
                return;
            }
            pos_ = start;
            fail("unknown identifier '" + name + "'");
        }
        if (accept('(')) {
            parse_sum();
            if (!accept(')')) fail("expected ')'");
            return;
        }
        fail("unexpected character '" + std::string(1, c) + "'");
    }

    void parse_number()
    {
        char* end = nullptr;
        const std::string tmp(text_.substr(pos_));
        const double v = std::strtod(tmp.c_str(), &end);
        const std::size_t used = static_cast<std::size_t>(end - tmp.c_str());
        if (used == 0) fail("malformed number");
        pos_ += used;
        emit(Op::push_const, +1, 0, v);
    }

    void parse_call(const std::string& name, std::size_t name_pos)
    {
        struct Entry {
            std::string_view name;
            Op op;
            int arity;
        };
        static constexpr std::array<Entry, 19> table{{
            {"sin", Op::sin, 1},   {"cos", Op::cos, 1},   {"tan", Op::tan, 1},   {"asin", Op::asin, 1},
            {"acos", Op::acos, 1}, {"atan", Op::atan, 1}, {"sinh", Op::sinh, 1}, {"cosh", Op::cosh, 1},
            {"tanh", Op::tanh, 1}, {"exp", Op::exp, 1},   {"log", Op::log, 1},   {"sqrt", Op::sqrt, 1},
            {"abs", Op::abs, 1},   {"min", Op::min, 2},   {"max", Op::max, 2},   {"pow", Op::pow, 2},
            {"atan2", Op::atan2, 2}, {"ln", Op::log, 1},  {"fabs", Op::abs, 1},
        }};
        const auto it = std::find_if(table.begin(), table.end(), [&](const Entry& e) { return e.name == name; });
        if (it == table.end()) {
            pos_ = name_pos;
            fail("unknown function '" + name + "'");
        }
        accept('(');
        int args = 0;
        if (!accept(')')) {
            do {
                parse_sum();
                ++args;
            } while (accept(','));
            if (!accept(')')) fail("expected ')' after arguments of '" + name + "'");
        }
        if (args != it->arity) {
            pos_ = name_pos;
            fail("function '" + name + "' expects " + std::to_string(it->arity) + " argument(s), got " +
                 std::to_string(args));
        }
        emit(it->op, it->arity == 2 ? -1 : 0);
    }

    std::string_view text_;
    const std::vector<std::string>& vars_;
    Expression& out_;
    std::size_t pos_ = 0;
    int depth_ = 0;
};

Expression Expression::parse(std::string_view text, std::vector<std::string> variables)
{
    Expression e;
    e.text_ = std::string(text);
    e.variables_ = std::move(variables);
    ExprParser parser(e.text_, e.variables_, e);
    parser.run();
    return e;
}

Expression Expression::constant(double value)
{
    Expression e;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    e.text_ = buf;
    e.code_.push_back({Op::push_const, 0, value});
    e.max_depth_ = 1;
    return e;
}

double Expression::operator()(std::span<const double> values) const
{
    if (code_.empty()) return 0.0;
    std::array<double, kMaxStack + 1> st;
    std::size_t sp = 0;
    for (const Instr& in : code_) {
        switch (in.op) {
        case Op::push_const: st[sp++] = in.value; break;
        case Op::push_var: st[sp++] = in.index < values.size() ? values[in.index] : 0.0; break;
        case Op::neg: st[sp - 1] = -st[sp - 1]; break;
        case Op::add: --sp; st[sp - 1] += st[sp]; break;
        case Op::sub: --sp; st[sp - 1] -= st[sp]; break;
        case Op::mul: --sp; st[sp - 1] *= st[sp]; break;
        case Op::div: --sp; st[sp - 1] /= st[sp]; break;
        case Op::pow: --sp; st[sp - 1] = std::pow(st[sp - 1], st[sp]); break;
        case Op::min: --sp; st[sp - 1] = std::min(st[sp - 1], st[sp]); break;
        case Op::max: --sp; st[sp - 1] = std::max(st[sp - 1], st[sp]); break;
        case Op::atan2: --sp; st[sp - 1] = std::atan2(st[sp - 1], st[sp]); break;
        case Op::sin: st[sp - 1] = std::sin(st[sp - 1]); break;
        case Op::cos: st[sp - 1] = std::cos(st[sp - 1]); break;
        case Op::tan: st[sp - 1] = std::tan(st[sp - 1]); break;
        case Op::asin: st[sp - 1] = std::asin(st[sp - 1]); break;
        case Op::acos: st[sp - 1] = std::acos(st[sp - 1]); break;
        case Op::atan: st[sp - 1] = std::atan(st[sp - 1]); break;
        case Op::sinh: st[sp - 1] = std::sinh(st[sp - 1]); break;
        case Op::cosh: st[sp - 1] = std::cosh(st[sp - 1]); break;
        case Op::tanh: st[sp - 1] = std::tanh(st[sp - 1]); break;
        case Op::exp: st[sp - 1] = std::exp(st[sp - 1]); break;
        case Op::log: st[sp - 1] = std::log(st[sp - 1]); break;
        case Op::sqrt: st[sp - 1] = std::sqrt(st[sp - 1]); break;
        case Op::abs: st[sp - 1] = std::abs(st[sp - 1]); break;
        }
    }
    return st[0];
}

bool Expression::depends_on(std::string_view variable) const
{
    for (std::size_t i = 0; i < variables_.size(); ++i) {
        if (variables_[i] != variable) continue;
        for (const Instr& in : code_)
            if (in.op == Op::push_var && in.index == i) return true;
    }
    return false;
}

bool Expression::is_constant() const
{
    return std::none_of(code_.begin(), code_.end(), [](const Instr& in) { return in.op == Op::push_var; });
}

}  // namespace curvres
