#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kdvsym/error.hpp"
#include "kdvsym/form.hpp"
#include "kdvsym/parser.hpp"
#include "kdvsym/scalar.hpp"

namespace kdvsym {

class SingularPoint : public Error {
public:
    explicit SingularPoint(const std::string& what) : Error("singular point: " + what) {}
};

// Elementary-function expression tree. Nodes are immutable and shared; the
// factory functions keep sums and products flat, sorted and folded.
class Expr {
public:
    enum class Kind { constant, real, variable, add, mul, pow, exp, ln, sqrt, sech, tanh };

    Expr() : Expr(Scalar(0)) {}
    Expr(const Scalar& q) : node_(make(Kind::constant)) { mut().q = q; }  // NOLINT(google-explicit-constructor)
    Expr(int q) : Expr(Scalar(q)) {}                                       // NOLINT(google-explicit-constructor)

    static Expr real(double v) {
        if (!std::isfinite(v)) throw SingularPoint("non-finite constant");
        Expr e(Kind::real);
        e.mut().r = v;
        return e;
    }
    static Expr var(const std::string& name) {
        Expr e(Kind::variable);
        e.mut().name = name;
        return e;
    }

    Kind kind() const noexcept { return node_->kind; }
    bool is_constant() const noexcept { return kind() == Kind::constant; }
    bool is_number() const noexcept { return kind() == Kind::constant || kind() == Kind::real; }
    const Scalar& value() const { return node_->q; }
    double real_value() const { return node_->r; }
    const std::string& name() const { return node_->name; }
    const std::vector<Expr>& args() const noexcept { return node_->args; }
    const Scalar& exponent() const { return node_->q; }  // pow nodes
    bool is_zero() const { return is_constant() && value() == 0; }
    bool is_one() const { return is_constant() && value() == 1; }

    friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
    friend Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
    friend Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
    friend Expr operator/(const Expr& a, const Expr& b) { return product({a, pow(b, -1)}); }
    Expr operator-() const { return product({Expr(-1), *this}); }
    Expr& operator+=(const Expr& o) { return *this = *this + o; }
    Expr& operator-=(const Expr& o) { return *this = *this - o; }
    Expr& operator*=(const Expr& o) { return *this = *this * o; }

    static Expr sum(std::vector<Expr> terms);
    static Expr product(std::vector<Expr> factors);
    friend Expr pow(const Expr& base, const Scalar& e);
    friend Expr exp(const Expr& a) { return unary(Kind::exp, a); }
    friend Expr ln(const Expr& a) { return unary(Kind::ln, a); }
    friend Expr sqrt(const Expr& a) { return unary(Kind::sqrt, a); }
    friend Expr sech(const Expr& a) { return unary(Kind::sech, a); }
    friend Expr tanh(const Expr& a) { return unary(Kind::tanh, a); }

    bool depends_on(const std::string& v) const {
        if (kind() == Kind::variable) return name() == v;
        for (const auto& a : args())
            if (a.depends_on(v)) return true;
        return false;
    }

    std::set<std::string> variables() const {
        std::set<std::string> out;
        collect_vars(out);
        return out;
    }

    Expr diff(const std::string& v) const;
    Expr subst(const std::string& v, const Expr& value) const;
    Expr subst(const std::map<std::string, Expr>& values) const;

    // Double evaluation; throws SingularPoint on a non-finite intermediate.
    double eval(const std::map<std::string, double>& env) const;
    double eval() const { return eval({}); }

    // Bases of negative powers and arguments of ln/sqrt: where the expression may blow up.
    std::vector<Expr> singular_guards() const {
        std::vector<Expr> out;
        collect_guards(out);
        return out;
    }

    std::string to_string() const;

    friend int compare(const Expr& a, const Expr& b);
    friend bool operator==(const Expr& a, const Expr& b) { return compare(a, b) == 0; }
    friend bool operator<(const Expr& a, const Expr& b) { return compare(a, b) < 0; }

private:
    struct Node {
        Kind kind;
        Scalar q;  // constant value or pow exponent
        double r = 0;
        std::string name;
        std::vector<Expr> args;
    };

    explicit Expr(Kind k) : node_(make(k)) {}
    static std::shared_ptr<Node> make(Kind k) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        return n;
    }
    Node& mut() { return const_cast<Node&>(*node_); }

    static Expr unary(Kind k, const Expr& a);
    static Expr node(Kind k, std::vector<Expr> args, const Scalar& q = 0) {
        Expr e(k);
        e.mut().args = std::move(args);
        e.mut().q = q;
        return e;
    }
    // Splits c * rest with c exact.
    std::pair<Scalar, Expr> split_coefficient() const;
    // Splits base^e.
    std::pair<Expr, Scalar> split_power() const;
    void collect_vars(std::set<std::string>& out) const {
        if (kind() == Kind::variable) out.insert(name());
        for (const auto& a : args()) a.collect_vars(out);
    }
    void collect_guards(std::vector<Expr>& out) const {
        if (kind() == Kind::pow && exponent() < 0) out.push_back(args()[0]);
        if (kind() == Kind::ln || kind() == Kind::sqrt) out.push_back(args()[0]);
        if (kind() == Kind::pow && !is_integer(exponent())) out.push_back(args()[0]);
        for (const auto& a : args()) a.collect_guards(out);
    }
    std::string render(int parent_prec) const;

    std::shared_ptr<const Node> node_;
};

namespace detail {

inline int kind_rank(Expr::Kind k) {
    switch (k) {
        case Expr::Kind::constant: return 0;
        case Expr::Kind::real: return 1;
        case Expr::Kind::variable: return 2;
        case Expr::Kind::pow: return 3;
        case Expr::Kind::mul: return 4;
        case Expr::Kind::add: return 5;
        default: return 6 + static_cast<int>(k);
    }
}

inline const char* function_name(Expr::Kind k) {
    switch (k) {
        case Expr::Kind::exp: return "exp";
        case Expr::Kind::ln: return "ln";
        case Expr::Kind::sqrt: return "sqrt";
        case Expr::Kind::sech: return "sech";
        case Expr::Kind::tanh: return "tanh";
        default: return "?";
    }
}

inline std::optional<Scalar> exact_sqrt(const Scalar& q) {
    if (q < 0) return std::nullopt;
    mpz_class n = q.get_num(), d = q.get_den();
    mpz_class rn = sqrt(n), rd = sqrt(d);
    if (rn * rn != n || rd * rd != d) return std::nullopt;
    return Scalar(rn, rd);
}

inline double to_double(const Expr& e) { return e.is_constant() ? e.value().get_d() : e.real_value(); }

}  // namespace detail

inline int compare(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return 0;
    int ra = detail::kind_rank(a.kind()), rb = detail::kind_rank(b.kind());
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (a.kind()) {
        case Expr::Kind::constant: return cmp(a.value(), b.value()) < 0 ? -1 : (cmp(a.value(), b.value()) > 0 ? 1 : 0);
        case Expr::Kind::real: return a.real_value() < b.real_value() ? -1 : (a.real_value() > b.real_value() ? 1 : 0);
        case Expr::Kind::variable: return a.name().compare(b.name()) < 0 ? -1 : (a.name() == b.name() ? 0 : 1);
        default: break;
    }
    if (a.kind() == Expr::Kind::pow && a.exponent() != b.exponent()) return a.exponent() < b.exponent() ? -1 : 1;
    const auto& x = a.args();
    const auto& y = b.args();
    for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
        int c = compare(x[i], y[i]);
        if (c != 0) return c;
    }
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    return 0;
}

inline std::pair<Scalar, Expr> Expr::split_coefficient() const {
    if (is_constant()) return {value(), Expr(1)};
    if (kind() == Kind::mul && args().front().is_constant()) {
        std::vector<Expr> rest(args().begin() + 1, args().end());
        return {args().front().value(), rest.size() == 1 ? rest.front() : node(Kind::mul, std::move(rest))};
    }
    return {Scalar(1), *this};
}

inline std::pair<Expr, Scalar> Expr::split_power() const {
    if (kind() == Kind::pow) return {args()[0], exponent()};
    return {*this, Scalar(1)};
}

inline Expr Expr::sum(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    for (auto& t : terms) {
        if (t.kind() == Kind::add) {
            flat.insert(flat.end(), t.args().begin(), t.args().end());
        } else {
            flat.push_back(std::move(t));
        }
    }
    Scalar exact = 0;
    double inexact = 0;
    bool has_real = false;
    std::map<Expr, Scalar> like;
    for (const auto& t : flat) {
        if (t.is_constant()) {
            exact += t.value();
        } else if (t.kind() == Kind::real) {
            inexact += t.real_value();
            has_real = true;
        } else {
            auto [c, rest] = t.split_coefficient();
            like[rest] += c;
        }
    }
    std::vector<Expr> out;
    if (has_real) {
        double v = inexact + exact.get_d();
        if (v != 0) out.push_back(real(v));
    } else if (exact != 0) {
        out.push_back(Expr(exact));
    }
    for (const auto& [rest, c] : like) {
        if (c == 0) continue;
        out.push_back(c == 1 ? rest : product({Expr(c), rest}));
    }
    if (out.empty()) return Expr(0);
    if (out.size() == 1) return out.front();
    std::sort(out.begin() + ((out.front().is_number()) ? 1 : 0), out.end());
    return node(Kind::add, std::move(out));
}

inline Expr Expr::product(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    for (auto& f : factors) {
        if (f.kind() == Kind::mul) {
            flat.insert(flat.end(), f.args().begin(), f.args().end());
        } else {
            flat.push_back(std::move(f));
        }
    }
    Scalar exact = 1;
    double inexact = 1;
    bool has_real = false;
    std::map<Expr, Scalar> powers;
    for (const auto& f : flat) {
        if (f.is_constant()) {
            exact *= f.value();
        } else if (f.kind() == Kind::real) {
            inexact *= f.real_value();
            has_real = true;
        } else {
            auto [b, e] = f.split_power();
            powers[b] += e;
        }
    }
    if (exact == 0) return Expr(0);
    std::vector<Expr> out;
    for (const auto& [b, e] : powers) {
        Expr p = pow(b, e);
        if (p.is_one()) continue;
        if (p.is_number()) {
            if (p.is_constant()) {
                exact *= p.value();
            } else {
                inexact *= p.real_value();
                has_real = true;
            }
            continue;
        }
        out.push_back(p);
    }
    if (exact == 0) return Expr(0);
    std::sort(out.begin(), out.end());
    // an exact coefficient is absorbed by the first sum factor: 2*a*(b + c) -> a*(2*b + 2*c)
    if (!has_real && exact != 1) {
        for (auto& f : out) {
            if (f.kind() != Kind::add) continue;
            std::vector<Expr> terms;
            for (const auto& t : f.args()) terms.push_back(product({Expr(exact), t}));
            f = sum(std::move(terms));
            exact = 1;
            if (f.kind() != Kind::add) return product(std::move(out));
            std::sort(out.begin(), out.end());
            break;
        }
    }
    if (has_real) {
        out.insert(out.begin(), real(inexact * exact.get_d()));
    } else if (exact != 1 || out.empty()) {
        out.insert(out.begin(), Expr(exact));
    }
    if (out.size() == 1) return out.front();
    return node(Kind::mul, std::move(out));
}

inline Expr pow(const Expr& base, const Scalar& e) {
    using K = Expr::Kind;
    if (e == 0) return Expr(1);
    if (e == 1) return base;
    if (base.is_constant()) {
        const Scalar& b = base.value();
        if (is_integer(e)) {
            if (b == 0 && e < 0) throw SingularPoint("zero to a negative power");
            mpz_class n = abs(e.get_num());
            if (n <= 4096) {
                mpz_class num, den;
                mpz_pow_ui(num.get_mpz_t(), b.get_num().get_mpz_t(), n.get_ui());
                mpz_pow_ui(den.get_mpz_t(), b.get_den().get_mpz_t(), n.get_ui());
                Scalar r(num, den);
                r.canonicalize();
                return e < 0 ? Expr(Scalar(1) / r) : Expr(r);
            }
        }
        if (e == Scalar(1, 2) || e == Scalar(-1, 2)) {
            if (auto r = detail::exact_sqrt(b)) return e > 0 ? Expr(*r) : Expr(Scalar(1) / *r);
        }
    }
    if (base.kind() == K::real) return Expr::real(std::pow(base.real_value(), e.get_d()));
    if (base.kind() == K::pow && is_integer(e)) return pow(base.args()[0], base.exponent() * e);
    if (base.kind() == K::sqrt && is_integer(e) && e.get_num() % 2 == 0) return pow(base.args()[0], e / 2);
    if (base.kind() == K::mul && is_integer(e)) {
        std::vector<Expr> fs;
        for (const auto& f : base.args()) fs.push_back(pow(f, e));
        return Expr::product(std::move(fs));
    }
    return Expr::node(K::pow, {base}, e);
}

inline Expr Expr::unary(Kind k, const Expr& a) {
    if (a.kind() == Kind::real) {
        double v = a.real_value();
        switch (k) {
            case Kind::exp: return real(std::exp(v));
            case Kind::ln: return real(std::log(v));
            case Kind::sqrt: return real(std::sqrt(v));
            case Kind::sech: return real(1.0 / std::cosh(v));
            case Kind::tanh: return real(std::tanh(v));
            default: break;
        }
    }
    if (a.is_constant()) {
        const Scalar& q = a.value();
        if (k == Kind::sqrt) {
            if (auto r = detail::exact_sqrt(q)) return Expr(*r);
        }
        if (q == 0 && (k == Kind::exp || k == Kind::sech)) return Expr(1);
        if (q == 0 && k == Kind::tanh) return Expr(0);
        if (q == 1 && k == Kind::ln) return Expr(0);
        if (q <= 0 && k == Kind::ln) throw SingularPoint("logarithm of a non-positive constant");
        if (q < 0 && k == Kind::sqrt) throw SingularPoint("square root of a negative constant");
    }
    if (k == Kind::ln && a.kind() == Kind::exp) return a.args()[0];
    if (k == Kind::exp && a.kind() == Kind::ln) return a.args()[0];
    // odd/even symmetry keeps -arg forms canonical
    if ((k == Kind::sech || k == Kind::tanh) && a.split_coefficient().first < 0) {
        Expr flipped = -a;
        return k == Kind::sech ? node(k, {flipped}) : -node(k, {flipped});
    }
    return node(k, {a});
}

inline Expr Expr::diff(const std::string& v) const {
    if (!depends_on(v)) return Expr(0);
    switch (kind()) {
        case Kind::variable: return Expr(1);
        case Kind::add: {
            std::vector<Expr> terms;
            for (const auto& t : args()) terms.push_back(t.diff(v));
            return sum(std::move(terms));
        }
        case Kind::mul: {
            std::vector<Expr> terms;
            for (std::size_t i = 0; i < args().size(); ++i) {
                if (!args()[i].depends_on(v)) continue;
                std::vector<Expr> fs = args();
                fs[i] = args()[i].diff(v);
                terms.push_back(product(std::move(fs)));
            }
            return sum(std::move(terms));
        }
        case Kind::pow: {
            const Expr& b = args()[0];
            return product({Expr(exponent()), pow(b, exponent() - 1), b.diff(v)});
        }
        case Kind::exp: return *this * args()[0].diff(v);
        case Kind::ln: return args()[0].diff(v) / args()[0];
        case Kind::sqrt: return product({Expr(Scalar(1, 2)), args()[0].diff(v), pow(*this, -1)});
        case Kind::sech: return product({Expr(-1), *this, tanh(args()[0]), args()[0].diff(v)});
        case Kind::tanh: return (Expr(1) - pow(*this, 2)) * args()[0].diff(v);
        default: return Expr(0);
    }
}

inline Expr Expr::subst(const std::map<std::string, Expr>& values) const {
    switch (kind()) {
        case Kind::constant:
        case Kind::real: return *this;
        case Kind::variable: {
            auto it = values.find(name());
            return it == values.end() ? *this : it->second;
        }
        case Kind::add: {
            std::vector<Expr> terms;
            for (const auto& t : args()) terms.push_back(t.subst(values));
            return sum(std::move(terms));
        }
        case Kind::mul: {
            std::vector<Expr> fs;
            for (const auto& t : args()) fs.push_back(t.subst(values));
            return product(std::move(fs));
        }
        case Kind::pow: return pow(args()[0].subst(values), exponent());
        default: return unary(kind(), args()[0].subst(values));
    }
}

inline Expr Expr::subst(const std::string& v, const Expr& value) const { return subst(std::map<std::string, Expr>{{v, value}}); }

inline double Expr::eval(const std::map<std::string, double>& env) const {
    auto check = [](double v, const char* what) {
        if (!std::isfinite(v)) throw SingularPoint(what);
        return v;
    };
    switch (kind()) {
        case Kind::constant: return value().get_d();
        case Kind::real: return real_value();
        case Kind::variable: {
            auto it = env.find(name());
            if (it == env.end()) throw UnknownCoordinate(name());
            return it->second;
        }
        case Kind::add: {
            double s = 0;
            for (const auto& t : args()) s += t.eval(env);
            return check(s, "sum overflow");
        }
        case Kind::mul: {
            double p = 1;
            for (const auto& t : args()) p *= t.eval(env);
            return check(p, "product overflow");
        }
        case Kind::pow: {
            double b = args()[0].eval(env);
            if (b == 0 && exponent() < 0) throw SingularPoint("division by zero");
            double r = is_integer(exponent()) ? std::pow(b, static_cast<double>(exponent().get_num().get_si()))
                                              : std::pow(b, exponent().get_d());
            return check(r, "power of a negative base or overflow");
        }
        case Kind::exp: return check(std::exp(args()[0].eval(env)), "exp overflow");
        case Kind::ln: {
            double a = args()[0].eval(env);
            if (a <= 0) throw SingularPoint("logarithm of a non-positive value");
            return std::log(a);
        }
        case Kind::sqrt: {
            double a = args()[0].eval(env);
            if (a < 0) throw SingularPoint("square root of a negative value");
            return std::sqrt(a);
        }
        case Kind::sech: return 1.0 / std::cosh(args()[0].eval(env));
        case Kind::tanh: return std::tanh(args()[0].eval(env));
    }
    return 0;
}

// Precedence: 1 sum, 2 product, 3 unary minus, 4 power, 5 atom.
inline std::string Expr::render(int parent) const {
    auto wrap = [parent](std::string s, int prec) { return prec < parent ? "(" + s + ")" : s; };
    switch (kind()) {
        case Kind::constant: {
            std::string s = kdvsym::to_string(value());
            bool composite = value() < 0 || !is_integer(value());
            return composite && parent > 1 ? "(" + s + ")" : s;
        }
        case Kind::real: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", real_value());
            std::string s(buf);
            return real_value() < 0 && parent > 1 ? "(" + s + ")" : s;
        }
        case Kind::variable: return name();
        case Kind::add: {
            std::string out;
            for (const auto& t : args()) {
                auto [c, rest] = t.split_coefficient();
                bool negative = (t.is_number() ? (t.is_constant() ? t.value() < 0 : t.real_value() < 0) : c < 0);
                Expr shown = negative ? -t : t;
                std::string body = shown.render(2);
                if (out.empty()) {
                    out = negative ? "-" + body : body;
                } else {
                    out += (negative ? " - " : " + ") + body;
                }
            }
            return wrap(out, 1);
        }
        case Kind::mul: {
            std::vector<std::string> num, den;
            std::string sign;
            for (const auto& f : args()) {
                if (f.is_constant() && f.value() == -1) {
                    sign = "-";
                    continue;
                }
                if (f.is_constant() && f.value() < 0) {
                    sign = "-";
                    num.push_back(Expr(-f.value()).render(2));
                    continue;
                }
                if (f.kind() == Kind::pow && f.exponent() < 0) {
                    den.push_back(pow(f.args()[0], -f.exponent()).render(4));
                    continue;
                }
                num.push_back(f.render(2));
            }
            std::string out;
            for (const auto& s : num) out += (out.empty() ? "" : "*") + s;
            if (out.empty()) out = "1";
            if (!den.empty()) {
                std::string d;
                for (const auto& s : den) d += (d.empty() ? "" : "*") + s;
                out += "/" + (den.size() > 1 ? "(" + d + ")" : d);
            }
            return sign.empty() ? wrap(out, 2) : wrap(sign + out, 1);
        }
        case Kind::pow: {
            std::string e = kdvsym::to_string(exponent());
            if (!is_integer(exponent()) || exponent() < 0) e = "(" + e + ")";
            return wrap(args()[0].render(5) + "^" + e, 4);
        }
        default: return std::string(detail::function_name(kind())) + "(" + args()[0].render(0) + ")";
    }
}

inline std::string Expr::to_string() const { return render(0); }

inline std::ostream& operator<<(std::ostream& os, const Expr& e) { return os << e.to_string(); }

// Parser builder: the grammar's identifiers become variables (or the
// constant pi), calls map to the elementary functions.
class ExprBuilder {
public:
    using value_type = Expr;

    Expr number(const Scalar& q, std::size_t) const { return Expr(q); }
    Expr identifier(const std::string& name, std::size_t) const {
        if (name == "pi") return Expr::real(M_PI);
        return Expr::var(name);
    }
    Expr call(const std::string& name, std::vector<Expr> args, std::size_t pos) const {
        if (args.size() != 1) throw ParseError("function '" + name + "' takes one argument", pos);
        const Expr& a = args.front();
        if (name == "exp") return exp(a);
        if (name == "ln" || name == "log") return ln(a);
        if (name == "sqrt") return sqrt(a);
        if (name == "sech") return sech(a);
        if (name == "tanh") return tanh(a);
        if (name == "cosh") return pow(sech(a), -1);
        throw ParseError("unknown function '" + name + "'", pos);
    }
    Expr add(const Expr& a, const Expr& b) const { return a + b; }
    Expr sub(const Expr& a, const Expr& b) const { return a - b; }
    Expr mul(const Expr& a, const Expr& b) const { return a * b; }
    Expr negate(const Expr& a) const { return -a; }
    Expr div(const Expr& a, const Expr& b, std::size_t pos) const {
        if (b.is_zero()) throw ParseError("division by zero", pos);
        return a / b;
    }
    Expr power(const Expr& a, const Expr& e, std::size_t pos) const {
        if (!e.is_constant()) throw ParseError("exponent must be a rational constant", pos);
        if (a.is_zero() && e.value() < 0) throw ParseError("negative power of zero", pos);
        return pow(a, e.value());
    }
};

inline Expr parse_expr(std::string_view source) { return parse_with(source, ExprBuilder{}); }

// Rational subtrees convert exactly; transcendental nodes give nullopt.
inline std::optional<RatFunc> to_ratfunc(const Expr& e, const ChartPtr& chart) {
    using K = Expr::Kind;
    switch (e.kind()) {
        case K::constant: return RatFunc::constant(chart, e.value());
        case K::variable: {
            auto i = chart->find(e.name());
            if (!i) return std::nullopt;
            return RatFunc(Poly::variable(chart, *i));
        }
        case K::add:
        case K::mul: {
            std::optional<RatFunc> acc;
            for (const auto& a : e.args()) {
                auto r = to_ratfunc(a, chart);
                if (!r) return std::nullopt;
                acc = !acc ? *r : (e.kind() == K::add ? *acc + *r : *acc * *r);
            }
            return acc;
        }
        case K::pow: {
            if (!is_integer(e.exponent())) return std::nullopt;
            auto b = to_ratfunc(e.args()[0], chart);
            if (!b) return std::nullopt;
            return b->pow(static_cast<int>(e.exponent().get_num().get_si()));
        }
        default: return std::nullopt;
    }
}

inline Expr from_poly(const Poly& p) {
    std::vector<Expr> terms;
    for (const auto& [e, c] : p.terms()) {
        std::vector<Expr> fs{Expr(c)};
        for (std::size_t i = 0; i < e.size(); ++i)
            if (e[i] > 0) fs.push_back(pow(Expr::var(p.chart()->name(i)), e[i]));
        terms.push_back(Expr::product(std::move(fs)));
    }
    return Expr::sum(std::move(terms));
}

inline Expr from_ratfunc(const RatFunc& f) { return from_poly(f.num()) / from_poly(f.den()); }

template <>
struct coefficient_traits<Expr> {
    static Expr zero(const ChartPtr&) { return Expr(0); }
    static Expr one(const ChartPtr&) { return Expr(1); }
    static bool is_zero(const Expr& e) { return e.is_zero(); }
    static Expr partial(const Expr& e, const CoordChart& chart, std::size_t i) { return e.diff(chart.name(i)); }
};

using ExprForm = BasicForm<Expr>;
using ExprField = BasicField<Expr>;

inline ExprForm to_expr_form(const DiffForm& a) {
    return map_coefficients<Expr>(a, [](const RatFunc& c) { return from_ratfunc(c); });
}

inline ExprField to_expr_field(const VectorFieldExpr& v) {
    return map_coefficients<Expr>(v, [](const RatFunc& c) { return from_ratfunc(c); });
}

}  // namespace kdvsym
