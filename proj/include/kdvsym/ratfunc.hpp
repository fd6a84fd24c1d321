#pragma once

#include <string>

#include "kdvsym/poly.hpp"

namespace kdvsym {

// Quotient of polynomials. Only monomial and scalar content are cancelled
// (plus an opportunistic exact division); equality is by cross-multiplication.
class RatFunc {
public:
    RatFunc() = default;
    explicit RatFunc(ChartPtr chart) : num_(chart), den_(Poly::constant(chart, 1)) {}
    RatFunc(Poly p)  // NOLINT(google-explicit-constructor): polynomials embed as p/1
        : num_(std::move(p)), den_(Poly::constant(num_.chart(), 1)) {}
    RatFunc(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw Error("rational function with zero denominator");
        require_same_chart(num_.chart(), den_.chart());
        normalize();
    }

    static RatFunc constant(ChartPtr chart, const Scalar& c) { return RatFunc(Poly::constant(std::move(chart), c)); }

    const ChartPtr& chart() const noexcept { return num_.chart(); }
    const Poly& num() const noexcept { return num_; }
    const Poly& den() const noexcept { return den_; }

    bool is_zero() const noexcept { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    Scalar constant_value() const { return num_.constant_term() / den_.constant_term(); }

    // Polynomial value; throws if the denominator is not constant.
    Poly as_poly() const {
        if (!is_polynomial()) throw Error("rational function is not a polynomial: " + to_string());
        return num_ * (Scalar(1) / den_.constant_term());
    }

    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc operator-() const { return RatFunc(-num_, den_, raw_tag{}); }

    friend RatFunc operator+(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero()) return b;
        if (b.is_zero()) return a;
        if (a.den_ == b.den_) return RatFunc(a.num_ + b.num_, a.den_);
        return RatFunc(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
    }
    friend RatFunc operator-(const RatFunc& a, const RatFunc& b) { return a + (-b); }
    friend RatFunc operator*(const RatFunc& a, const RatFunc& b) {
        if (a.is_zero() || b.is_zero()) return RatFunc(a.chart() ? a.chart() : b.chart());
        return RatFunc(a.num_ * b.num_, a.den_ * b.den_);
    }
    friend RatFunc operator/(const RatFunc& a, const RatFunc& b) {
        if (b.is_zero()) throw Error("division by the zero rational function");
        return RatFunc(a.num_ * b.den_, a.den_ * b.num_);
    }
    friend RatFunc operator*(const RatFunc& a, const Scalar& s) { return RatFunc(a.num_ * s, a.den_); }

    RatFunc pow(int n) const {
        if (n >= 0) return RatFunc(num_.pow(static_cast<unsigned>(n)), den_.pow(static_cast<unsigned>(n)));
        if (is_zero()) throw Error("negative power of zero");
        return RatFunc(den_.pow(static_cast<unsigned>(-n)), num_.pow(static_cast<unsigned>(-n)));
    }

    RatFunc partial(std::size_t var) const {
        if (!den_.depends_on(var)) return RatFunc(num_.partial(var), den_);
        return RatFunc(num_.partial(var) * den_ - num_ * den_.partial(var), den_ * den_);
    }
    RatFunc partial(const std::string& name) const { return partial(chart()->index(name)); }

    template <class T>
    T evaluate(std::span<const T> point) const {
        T d = den_.evaluate(point);
        if (d == T(0)) throw Error("rational function evaluated at a pole");
        return num_.evaluate(point) / d;
    }

    // Semantic equality: p1*q2 - p2*q1 == 0.
    friend bool operator==(const RatFunc& a, const RatFunc& b) {
        if (a.den_ == b.den_) return a.num_ == b.num_;
        return a.num_ * b.den_ == b.num_ * a.den_;
    }

    std::string to_string() const {
        if (is_polynomial()) return as_poly().to_string();
        auto wrap = [](const Poly& p) {
            std::string s = p.to_string();
            return p.size() > 1 || (!p.is_constant() && sgn(p.leading_coefficient()) < 0) ||
                           (p.size() == 1 && !p.is_constant() && abs(p.leading_coefficient()) != 1)
                       ? "(" + s + ")"
                       : s;
        };
        // a/(y*z), never a/y*z
        std::string den = wrap(den_);
        if (den.front() != '(' && den.find('*') != std::string::npos) den = "(" + den + ")";
        return wrap(num_) + "/" + den;
    }

private:
    struct raw_tag {};
    RatFunc(Poly num, Poly den, raw_tag) : num_(std::move(num)), den_(std::move(den)) {}

    void normalize() {
        if (num_.is_zero()) {
            den_ = Poly::constant(num_.chart(), 1);
            return;
        }
        if (!den_.is_constant()) {
            Exponents m = num_.monomial_content();
            Exponents md = den_.monomial_content();
            for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::min(m[i], md[i]);
            if (total_degree(m) > 0) {
                num_ = num_.divide_monomial(m);
                den_ = den_.divide_monomial(m);
            }
            if (!den_.is_constant()) {
                if (auto q = divide_exact(num_, den_)) {
                    num_ = std::move(*q);
                    den_ = Poly::constant(num_.chart(), 1);
                }
            }
        }
        Scalar lead = den_.leading_coefficient();
        if (lead != 1) {
            Scalar inv = Scalar(1) / lead;
            num_ *= inv;
            den_ *= inv;
        }
    }

    Poly num_;
    Poly den_;
};

// Divides numerator and denominator by `factor` as often as both allow.
inline RatFunc cancel_factor(const RatFunc& f, const Poly& factor) {
    if (factor.is_constant()) return f;
    Poly num = f.num(), den = f.den();
    for (;;) {
        auto n = divide_exact(num, factor);
        if (!n) break;
        auto d = divide_exact(den, factor);
        if (!d) break;
        num = std::move(*n);
        den = std::move(*d);
    }
    return RatFunc(num, den);
}

inline std::ostream& operator<<(std::ostream& os, const RatFunc& r) { return os << r.to_string(); }

inline bool ratfunc_equal(const RatFunc& a, const RatFunc& b) {
    require_same_chart(a.chart(), b.chart());
    return a == b;
}

inline RatFunc rechart(const RatFunc& f, const ChartPtr& target) {
    return RatFunc(rechart(f.num(), target), rechart(f.den(), target));
}

}  // namespace kdvsym
