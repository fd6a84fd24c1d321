#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "kdvsym/chart.hpp"
#include "kdvsym/scalar.hpp"

namespace kdvsym {

// Dense exponent vector, one entry per chart coordinate.
using Exponents = std::vector<std::uint32_t>;

inline std::uint32_t total_degree(const Exponents& e) {
    return std::accumulate(e.begin(), e.end(), std::uint32_t{0});
}

// Graded order; ties broken at the first coordinate (chart order) where the
// exponents differ, the smaller exponent ranking higher. Terms are rendered
// from the highest monomial down, so `u_x*u_tt - u_t*u_tx` prints in that order.
struct MonomialOrder {
    bool operator()(const Exponents& a, const Exponents& b) const {
        auto da = total_degree(a), db = total_degree(b);
        if (da != db) return da < db;
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i] != b[i]) return a[i] > b[i];
        }
        return false;
    }
};

inline bool divides(const Exponents& a, const Exponents& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > b[i]) return false;
    return true;
}

class Poly {
public:
    using TermMap = std::map<Exponents, Scalar, MonomialOrder>;

    Poly() = default;
    explicit Poly(ChartPtr chart) : chart_(std::move(chart)) {}

    static Poly constant(ChartPtr chart, const Scalar& c) {
        Poly p(std::move(chart));
        p.add_term(Exponents(p.chart_->size(), 0), c);
        return p;
    }
    static Poly variable(ChartPtr chart, std::size_t index) {
        Exponents e(chart->size(), 0);
        e.at(index) = 1;
        return monomial(std::move(chart), std::move(e));
    }
    static Poly variable(ChartPtr chart, const std::string& name) {
        auto i = chart->index(name);
        return variable(std::move(chart), i);
    }
    static Poly monomial(ChartPtr chart, Exponents e, const Scalar& c = 1) {
        Poly p(std::move(chart));
        p.add_term(e, c);
        return p;
    }

    const ChartPtr& chart() const noexcept { return chart_; }
    const TermMap& terms() const noexcept { return terms_; }
    std::size_t size() const noexcept { return terms_.size(); }
    bool is_zero() const noexcept { return terms_.empty(); }
    bool is_constant() const {
        return terms_.empty() || (terms_.size() == 1 && total_degree(terms_.begin()->first) == 0);
    }
    Scalar constant_term() const {
        if (terms_.empty()) return 0;
        const auto& [e, c] = *terms_.begin();
        return total_degree(e) == 0 ? c : Scalar(0);
    }
    int degree() const {
        return terms_.empty() ? -1 : static_cast<int>(total_degree(terms_.rbegin()->first));
    }
    const Exponents& leading_exponents() const { return terms_.rbegin()->first; }
    const Scalar& leading_coefficient() const { return terms_.rbegin()->second; }

    std::uint32_t degree_in(std::size_t var) const {
        std::uint32_t d = 0;
        for (const auto& [e, c] : terms_) d = std::max(d, e[var]);
        return d;
    }
    bool depends_on(std::size_t var) const {
        return std::any_of(terms_.begin(), terms_.end(), [&](const auto& t) { return t.first[var] > 0; });
    }

    // Coefficient of var^k, as a polynomial free of var.
    Poly coefficient_in(std::size_t var, std::uint32_t k) const {
        Poly out(chart_);
        for (const auto& [e, c] : terms_) {
            if (e[var] != k) continue;
            Exponents f = e;
            f[var] = 0;
            out.add_term(f, c);
        }
        return out;
    }

    void add_term(const Exponents& e, const Scalar& c) {
        if (sgn(c) == 0) return;
        auto [it, inserted] = terms_.try_emplace(e, c);
        if (!inserted) {
            it->second += c;
            if (sgn(it->second) == 0) terms_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o) {
        adopt(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        adopt(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }
    Poly& operator*=(const Scalar& s) {
        if (sgn(s) == 0) {
            terms_.clear();
        } else {
            for (auto& [e, c] : terms_) c *= s;
        }
        return *this;
    }
    Poly operator-() const {
        Poly out = *this;
        for (auto& [e, c] : out.terms_) c = -c;
        return out;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
    friend Poly operator*(Poly a, const Scalar& s) { return a *= s; }
    friend Poly operator*(const Scalar& s, Poly a) { return a *= s; }

    friend Poly operator*(const Poly& a, const Poly& b) {
        Poly out(a.chart_ ? a.chart_ : b.chart_);
        if (a.chart_ && b.chart_) require_same_chart(a.chart_, b.chart_);
        Exponents e;
        for (const auto& [ea, ca] : a.terms_) {
            for (const auto& [eb, cb] : b.terms_) {
                e.resize(ea.size());
                for (std::size_t i = 0; i < ea.size(); ++i) e[i] = ea[i] + eb[i];
                out.add_term(e, ca * cb);
            }
        }
        return out;
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly pow(unsigned n) const {
        Poly out = constant(chart_, 1);
        Poly base = *this;
        while (n) {
            if (n & 1u) out *= base;
            n >>= 1u;
            if (n) base *= base;
        }
        return out;
    }

    Poly partial(std::size_t var) const {
        Poly out(chart_);
        for (const auto& [e, c] : terms_) {
            if (e[var] == 0) continue;
            Exponents f = e;
            --f[var];
            out.add_term(f, c * e[var]);
        }
        return out;
    }
    Poly partial(const std::string& name) const { return partial(chart_->index(name)); }

    template <class T>
    T evaluate(std::span<const T> point) const {
        T acc = T(0);
        for (const auto& [e, c] : terms_) {
            T term = convert<T>(c);
            for (std::size_t i = 0; i < e.size(); ++i) {
                for (std::uint32_t k = 0; k < e[i]; ++k) term *= point[i];
            }
            acc += term;
        }
        return acc;
    }

    // Substitutes coordinate `var` by polynomial `value`.
    Poly substitute(std::size_t var, const Poly& value) const {
        Poly out(chart_);
        std::map<std::uint32_t, Poly> powers;
        for (const auto& [e, c] : terms_) {
            Exponents f = e;
            f[var] = 0;
            Poly term = monomial(chart_, f, c);
            if (e[var] > 0) {
                auto it = powers.find(e[var]);
                if (it == powers.end()) it = powers.emplace(e[var], value.pow(e[var])).first;
                term *= it->second;
            }
            out += term;
        }
        return out;
    }

    bool operator==(const Poly& o) const { return terms_ == o.terms_; }

    std::string to_string() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            bool negative = sgn(c) < 0;
            if (first) {
                if (negative) os << '-';
            } else {
                os << (negative ? " - " : " + ");
            }
            first = false;
            Scalar mag = abs(c);
            std::string mono = monomial_string(e);
            if (mono.empty()) {
                os << mag.get_str();
            } else {
                if (mag != 1) os << mag.get_str() << '*';
                os << mono;
            }
        }
        return os.str();
    }

    // Renders a bare monomial such as `u^2*u_x`; empty for the unit monomial.
    std::string monomial_string(const Exponents& e) const {
        std::string out;
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (!out.empty()) out += '*';
            out += chart_->name(i);
            if (e[i] > 1) out += '^' + std::to_string(e[i]);
        }
        return out;
    }

    // Gcd of all exponent vectors (componentwise minimum).
    Exponents monomial_content() const {
        Exponents m;
        for (const auto& [e, c] : terms_) {
            if (m.empty()) {
                m = e;
            } else {
                for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::min(m[i], e[i]);
            }
        }
        return m;
    }

    Poly divide_monomial(const Exponents& m) const {
        Poly out(chart_);
        for (const auto& [e, c] : terms_) {
            Exponents f = e;
            for (std::size_t i = 0; i < f.size(); ++i) f[i] -= m[i];
            out.terms_.emplace_hint(out.terms_.end(), f, c);
        }
        return out;
    }

private:
    template <class T>
    static T convert(const Scalar& c) {
        if constexpr (std::is_same_v<T, double>) {
            return c.get_d();
        } else {
            return T(c);
        }
    }

    void adopt(const Poly& o) {
        if (!chart_) {
            chart_ = o.chart_;
        } else if (o.chart_) {
            require_same_chart(chart_, o.chart_);
        }
    }

    ChartPtr chart_;
    TermMap terms_;
};

inline std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.to_string(); }

// Same polynomial on another chart, matching coordinates by name.
inline Poly rechart(const Poly& p, const ChartPtr& target) {
    if (same_chart(p.chart(), target)) return p;
    std::vector<std::size_t> map(p.chart()->size(), target->size());
    for (std::size_t i = 0; i < p.chart()->size(); ++i)
        if (auto j = target->find(p.chart()->name(i))) map[i] = *j;
    Poly out(target);
    for (const auto& [e, c] : p.terms()) {
        Exponents f(target->size(), 0);
        for (std::size_t i = 0; i < e.size(); ++i) {
            if (e[i] == 0) continue;
            if (map[i] == target->size()) throw UnknownCoordinate(p.chart()->name(i));
            f[map[i]] = e[i];
        }
        out.add_term(f, c);
    }
    return out;
}

// Exact quotient a/b when b divides a, otherwise nullopt. Leading-term
// division by a single polynomial decides principal-ideal membership.
inline std::optional<Poly> divide_exact(const Poly& a, const Poly& b) {
    if (b.is_zero()) throw Error("division by the zero polynomial");
    Poly quotient(a.chart() ? a.chart() : b.chart());
    Poly rest = a;
    const auto& lb = b.leading_exponents();
    const Scalar& cb = b.leading_coefficient();
    while (!rest.is_zero()) {
        const auto& lr = rest.leading_exponents();
        if (!divides(lb, lr)) return std::nullopt;
        Exponents e(lr.size());
        for (std::size_t i = 0; i < e.size(); ++i) e[i] = lr[i] - lb[i];
        Poly t = Poly::monomial(quotient.chart(), e, rest.leading_coefficient() / cb);
        quotient += t;
        rest -= t * b;
    }
    return quotient;
}

}  // namespace kdvsym
