#pragma once

#include <cctype>
#include <string>
#include <string_view>
#include <vector>

#include "kdvsym/ratfunc.hpp"

namespace kdvsym {

// Recursive-descent parser shared by polynomials, rational functions, forms
// and closed-form expressions. The Builder gives the grammar its semantics:
//
//   expr  := ['+'|'-'] term (('+'|'-') term)*
//   term  := unary (('*'|'/') unary | unary)*      juxtaposition multiplies
//   unary := '-' unary | power
//   power := atom ['^' unary]
//   atom  := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
template <class Builder>
class ExpressionParser {
public:
    using Value = typename Builder::value_type;

    ExpressionParser(std::string_view source, Builder& builder) : src_(source), b_(builder) {}

    Value parse() {
        Value v = expr();
        skip_ws();
        if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }
    bool accept(char c) {
        if (peek() != c) return false;
        ++pos_;
        return true;
    }
    bool starts_atom() {
        char c = peek();
        return std::isalnum(static_cast<unsigned char>(c)) || c == '(' || c == '.';
    }

    Value expr() {
        bool negative = accept('-');
        if (!negative) accept('+');
        Value acc = negative ? b_.negate(term()) : term();
        for (;;) {
            if (accept('+')) {
                acc = b_.add(acc, term());
            } else if (accept('-')) {
                acc = b_.sub(acc, term());
            } else {
                return acc;
            }
        }
    }

    Value term() {
        Value acc = unary();
        for (;;) {
            std::size_t at = pos_;
            if (accept('*')) {
                acc = b_.mul(acc, unary());
            } else if (accept('/')) {
                at = pos_;
                acc = b_.div(acc, unary(), at);
            } else if (starts_atom()) {
                acc = b_.mul(acc, unary());
            } else {
                return acc;
            }
        }
    }

    Value unary() {
        if (accept('-')) return b_.negate(unary());
        return power();
    }

    Value power() {
        Value base = atom();
        std::size_t at = pos_;
        if (accept('^')) return b_.power(base, unary(), at);
        return base;
    }

    Value atom() {
        char c = peek();
        std::size_t start = pos_;
        if (c == '(') {
            ++pos_;
            Value v = expr();
            if (!accept(')')) fail("expected ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            while (pos_ < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
                ++pos_;
            return b_.number(parse_scalar(src_.substr(start, pos_ - start)), start);
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            std::string name(src_.substr(start, pos_ - start));
            if (accept('(')) {
                std::vector<Value> args;
                args.push_back(expr());
                while (accept(',')) args.push_back(expr());
                if (!accept(')')) fail("expected ')' after arguments");
                return b_.call(name, std::move(args), start);
            }
            return b_.identifier(name, start);
        }
        if (c == '\0') fail("unexpected end of input");
        fail("unexpected '" + std::string(1, c) + "'");
    }

    std::string_view src_;
    Builder& b_;
    std::size_t pos_ = 0;
};

template <class Builder>
typename Builder::value_type parse_with(std::string_view source, Builder builder) {
    ExpressionParser<Builder> parser(source, builder);
    return parser.parse();
}

namespace detail {

inline unsigned small_exponent(const Scalar& e, std::size_t pos, bool allow_negative, int& sign) {
    if (!is_integer(e)) throw ParseError("exponent must be an integer", pos);
    sign = sgn(e) < 0 ? -1 : 1;
    if (sign < 0 && !allow_negative) throw ParseError("negative exponent in a polynomial", pos);
    mpz_class m = abs(e.get_num());
    if (m > 1000) throw ParseError("exponent too large", pos);
    return static_cast<unsigned>(m.get_ui());
}

}  // namespace detail

class PolyBuilder {
public:
    using value_type = Poly;
    explicit PolyBuilder(ChartPtr chart) : chart_(std::move(chart)) {}

    Poly number(const Scalar& q, std::size_t) const { return Poly::constant(chart_, q); }
    Poly identifier(const std::string& name, std::size_t pos) const {
        auto i = chart_->find(name);
        if (!i) throw ParseError("unknown identifier '" + name + "'", pos);
        return Poly::variable(chart_, *i);
    }
    Poly call(const std::string& name, std::vector<Poly>, std::size_t pos) const {
        throw ParseError("function '" + name + "' is not allowed in a polynomial", pos);
    }
    Poly add(const Poly& a, const Poly& b) const { return a + b; }
    Poly sub(const Poly& a, const Poly& b) const { return a - b; }
    Poly mul(const Poly& a, const Poly& b) const { return a * b; }
    Poly negate(const Poly& a) const { return -a; }
    Poly div(const Poly& a, const Poly& b, std::size_t pos) const {
        if (!b.is_constant() || b.is_zero()) throw ParseError("polynomial division by a non-constant or zero", pos);
        return a * (Scalar(1) / b.constant_term());
    }
    Poly power(const Poly& a, const Poly& e, std::size_t pos) const {
        if (!e.is_constant()) throw ParseError("exponent must be a constant", pos);
        int sign = 1;
        return a.pow(detail::small_exponent(e.constant_term(), pos, false, sign));
    }

private:
    ChartPtr chart_;
};

class RatFuncBuilder {
public:
    using value_type = RatFunc;
    explicit RatFuncBuilder(ChartPtr chart) : poly_(chart), chart_(std::move(chart)) {}

    RatFunc number(const Scalar& q, std::size_t pos) const { return poly_.number(q, pos); }
    RatFunc identifier(const std::string& name, std::size_t pos) const { return poly_.identifier(name, pos); }
    RatFunc call(const std::string& name, std::vector<RatFunc>, std::size_t pos) const {
        throw ParseError("function '" + name + "' is not allowed in a rational function", pos);
    }
    RatFunc add(const RatFunc& a, const RatFunc& b) const { return a + b; }
    RatFunc sub(const RatFunc& a, const RatFunc& b) const { return a - b; }
    RatFunc mul(const RatFunc& a, const RatFunc& b) const { return a * b; }
    RatFunc negate(const RatFunc& a) const { return -a; }
    RatFunc div(const RatFunc& a, const RatFunc& b, std::size_t pos) const {
        if (b.is_zero()) throw ParseError("division by zero", pos);
        return a / b;
    }
    RatFunc power(const RatFunc& a, const RatFunc& e, std::size_t pos) const {
        if (!e.is_constant()) throw ParseError("exponent must be a constant", pos);
        int sign = 1;
        unsigned n = detail::small_exponent(e.constant_value(), pos, true, sign);
        if (sign < 0 && a.is_zero()) throw ParseError("negative power of zero", pos);
        return a.pow(sign * static_cast<int>(n));
    }

private:
    PolyBuilder poly_;
    ChartPtr chart_;
};

inline Poly parse_poly(std::string_view source, const ChartPtr& chart) {
    return parse_with(source, PolyBuilder(chart));
}

inline RatFunc parse_ratfunc(std::string_view source, const ChartPtr& chart) {
    return parse_with(source, RatFuncBuilder(chart));
}

}  // namespace kdvsym
