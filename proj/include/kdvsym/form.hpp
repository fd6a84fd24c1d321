#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdvsym/parampoly.hpp"
#include "kdvsym/parser.hpp"
#include "kdvsym/ratfunc.hpp"

namespace kdvsym {

// Strictly increasing coordinate indices of a basis k-form dz^{i1}^...^dz^{ik}.
using IndexTuple = std::vector<std::size_t>;

// Sorts `idx`, returning the permutation parity (+1/-1), or 0 when an index repeats.
inline int canonicalize(IndexTuple& idx) {
    int sign = 1;
    for (std::size_t i = 1; i < idx.size(); ++i) {
        for (std::size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
            if (idx[j - 1] == idx[j]) return 0;
            std::swap(idx[j - 1], idx[j]);
            sign = -sign;
        }
    }
    return sign;
}

// Coefficient-ring hooks used by the exterior algebra. The primary template
// covers types with chart-carrying members (Poly, RatFunc, ParamPoly).
template <class C>
struct coefficient_traits {
    static C zero(const ChartPtr& chart) { return C(chart); }
    static C one(const ChartPtr& chart) { return C(Poly::constant(chart, 1)); }
    static bool is_zero(const C& c) { return c.is_zero(); }
    static C partial(const C& c, const CoordChart&, std::size_t i) { return c.partial(i); }
};

template <class C>
class BasicForm {
public:
    using coefficient_type = C;
    using traits = coefficient_traits<C>;

    BasicForm(ChartPtr chart, unsigned grade) : chart_(std::move(chart)), grade_(grade) {}

    static BasicForm function(ChartPtr chart, C f) {
        BasicForm out(std::move(chart), 0);
        out.add_term({}, std::move(f));
        return out;
    }
    static BasicForm differential(ChartPtr chart, std::size_t i) {
        BasicForm out(chart, 1);
        out.add_term({i}, traits::one(chart));
        return out;
    }
    static BasicForm differential(const ChartPtr& chart, const std::string& name) {
        return differential(chart, chart->index(name));
    }

    const ChartPtr& chart() const noexcept { return chart_; }
    unsigned grade() const noexcept { return grade_; }
    const std::map<IndexTuple, C>& components() const noexcept { return comps_; }
    bool is_zero() const noexcept { return comps_.empty(); }

    // Adds coeff * dz^{idx} for an index list in any order.
    void add_term(IndexTuple idx, const C& coeff) {
        if (idx.size() != grade_) throw Error("index tuple does not match form grade");
        int sign = canonicalize(idx);
        if (sign == 0 || traits::is_zero(coeff)) return;
        auto it = comps_.find(idx);
        if (it == comps_.end()) {
            comps_.emplace(std::move(idx), sign > 0 ? coeff : C(-coeff));
            return;
        }
        if (sign > 0) {
            it->second = it->second + coeff;
        } else {
            it->second = it->second - coeff;
        }
        if (traits::is_zero(it->second)) comps_.erase(it);
    }

    C component(IndexTuple idx) const {
        int sign = canonicalize(idx);
        if (sign == 0) return traits::zero(chart_);
        auto it = comps_.find(idx);
        if (it == comps_.end()) return traits::zero(chart_);
        return sign > 0 ? it->second : C(-it->second);
    }

    // Coefficient of a grade-0 form.
    C scalar() const {
        if (grade_ != 0) throw Error("form is not a function");
        return component({});
    }

    BasicForm& operator+=(const BasicForm& o) {
        check(o);
        for (const auto& [idx, c] : o.comps_) add_term(idx, c);
        return *this;
    }
    BasicForm& operator-=(const BasicForm& o) {
        check(o);
        for (const auto& [idx, c] : o.comps_) add_term(idx, C(-c));
        return *this;
    }
    BasicForm operator-() const {
        BasicForm out(chart_, grade_);
        for (const auto& [idx, c] : comps_) out.comps_.emplace(idx, C(-c));
        return out;
    }
    friend BasicForm operator+(BasicForm a, const BasicForm& b) { return a += b; }
    friend BasicForm operator-(BasicForm a, const BasicForm& b) { return a -= b; }

    friend BasicForm operator*(const C& f, const BasicForm& a) {
        BasicForm out(a.chart_, a.grade_);
        if (traits::is_zero(f)) return out;
        for (const auto& [idx, c] : a.comps_) {
            C p = f * c;
            if (!traits::is_zero(p)) out.comps_.emplace(idx, std::move(p));
        }
        return out;
    }

    bool operator==(const BasicForm& o) const {
        if (grade_ != o.grade_ || comps_.size() != o.comps_.size()) return false;
        for (const auto& [idx, c] : comps_) {
            auto it = o.comps_.find(idx);
            if (it == o.comps_.end() || !(c == it->second)) return false;
        }
        return true;
    }

private:
    void check(const BasicForm& o) const {
        require_same_chart(chart_, o.chart_);
        if (grade_ != o.grade_) throw Error("adding forms of different grade");
    }

    ChartPtr chart_;
    unsigned grade_;
    std::map<IndexTuple, C> comps_;
};

template <class C>
class BasicField {
public:
    using traits = coefficient_traits<C>;

    explicit BasicField(ChartPtr chart) : chart_(std::move(chart)) {}

    const ChartPtr& chart() const noexcept { return chart_; }
    const std::map<std::size_t, C>& components() const noexcept { return comps_; }
    bool is_zero() const noexcept { return comps_.empty(); }

    void set(std::size_t i, C c) {
        if (i >= chart_->size()) throw Error("vector field component out of range");
        if (traits::is_zero(c)) {
            comps_.erase(i);
        } else {
            comps_[i] = std::move(c);
        }
    }
    void set(const std::string& name, C c) { set(chart_->index(name), std::move(c)); }

    C component(std::size_t i) const {
        auto it = comps_.find(i);
        return it == comps_.end() ? traits::zero(chart_) : it->second;
    }

    // v(f) = sum_i v^i df/dz^i
    C apply(const C& f) const {
        C out = traits::zero(chart_);
        for (const auto& [i, vi] : comps_) {
            C d = traits::partial(f, *chart_, i);
            if (!traits::is_zero(d)) out = out + vi * d;
        }
        return out;
    }

    BasicField& operator+=(const BasicField& o) {
        require_same_chart(chart_, o.chart_);
        for (const auto& [i, c] : o.comps_) set(i, component(i) + c);
        return *this;
    }
    BasicField& operator-=(const BasicField& o) {
        require_same_chart(chart_, o.chart_);
        for (const auto& [i, c] : o.comps_) set(i, component(i) - c);
        return *this;
    }
    friend BasicField operator+(BasicField a, const BasicField& b) { return a += b; }
    friend BasicField operator-(BasicField a, const BasicField& b) { return a -= b; }
    friend BasicField operator*(const C& f, const BasicField& a) {
        BasicField out(a.chart_);
        for (const auto& [i, c] : a.comps_) out.set(i, f * c);
        return out;
    }

    bool operator==(const BasicField& o) const {
        if (comps_.size() != o.comps_.size()) return false;
        for (const auto& [i, c] : comps_) {
            auto it = o.comps_.find(i);
            if (it == o.comps_.end() || !(c == it->second)) return false;
        }
        return true;
    }

private:
    ChartPtr chart_;
    std::map<std::size_t, C> comps_;
};

using DiffForm = BasicForm<RatFunc>;
using VectorFieldExpr = BasicField<RatFunc>;
using ParamForm = BasicForm<ParamPoly>;
using ParamField = BasicField<ParamPoly>;

template <class To, class From, class Fn>
BasicForm<To> map_coefficients(const BasicForm<From>& a, Fn fn) {
    BasicForm<To> out(a.chart(), a.grade());
    for (const auto& [idx, c] : a.components()) out.add_term(idx, fn(c));
    return out;
}

template <class To, class From, class Fn>
BasicField<To> map_coefficients(const BasicField<From>& a, Fn fn) {
    BasicField<To> out(a.chart());
    for (const auto& [i, c] : a.components()) out.set(i, fn(c));
    return out;
}

// Moves a form or field to another chart, matching coordinates by name.
inline DiffForm rechart(const DiffForm& a, const ChartPtr& target) {
    DiffForm out(target, a.grade());
    for (const auto& [idx, c] : a.components()) {
        IndexTuple moved;
        for (std::size_t i : idx) moved.push_back(target->index(a.chart()->name(i)));
        out.add_term(moved, rechart(c, target));
    }
    return out;
}

inline VectorFieldExpr rechart(const VectorFieldExpr& v, const ChartPtr& target) {
    VectorFieldExpr out(target);
    for (const auto& [i, c] : v.components()) out.set(target->index(v.chart()->name(i)), rechart(c, target));
    return out;
}

// Polynomial-coefficient form lifted to parameter-free ParamPoly coefficients.
inline ParamForm to_param_form(const DiffForm& a) {
    return map_coefficients<ParamPoly>(a, [](const RatFunc& c) { return ParamPoly(c.as_poly()); });
}

template <class C>
BasicForm<C> wedge(const BasicForm<C>& a, const BasicForm<C>& b) {
    require_same_chart(a.chart(), b.chart());
    BasicForm<C> out(a.chart(), a.grade() + b.grade());
    if (a.grade() + b.grade() > a.chart()->size()) return out;
    for (const auto& [ia, ca] : a.components()) {
        for (const auto& [ib, cb] : b.components()) {
            IndexTuple idx = ia;
            idx.insert(idx.end(), ib.begin(), ib.end());
            out.add_term(std::move(idx), ca * cb);
        }
    }
    return out;
}

template <class C>
BasicForm<C> ext_d(const BasicForm<C>& a) {
    using traits = coefficient_traits<C>;
    const auto& chart = *a.chart();
    BasicForm<C> out(a.chart(), a.grade() + 1);
    for (const auto& [idx, c] : a.components()) {
        for (std::size_t j = 0; j < chart.size(); ++j) {
            if (std::find(idx.begin(), idx.end(), j) != idx.end()) continue;
            C dc = traits::partial(c, chart, j);
            if (traits::is_zero(dc)) continue;
            IndexTuple k;
            k.reserve(idx.size() + 1);
            k.push_back(j);
            k.insert(k.end(), idx.begin(), idx.end());
            out.add_term(std::move(k), dc);
        }
    }
    return out;
}

namespace detail {

template <class C>
BasicForm<C> contract(const BasicField<C>& v, const BasicForm<C>& a) {
    BasicForm<C> out(a.chart(), a.grade() == 0 ? 0 : a.grade() - 1);
    if (a.grade() == 0) return out;
    for (const auto& [idx, c] : a.components()) {
        for (std::size_t pos = 0; pos < idx.size(); ++pos) {
            const auto& comps = v.components();
            auto it = comps.find(idx[pos]);
            if (it == comps.end()) continue;
            IndexTuple rest = idx;
            rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(pos));
            C term = it->second * c;
            out.add_term(std::move(rest), pos % 2 == 0 ? term : C(-term));
        }
    }
    return out;
}

}  // namespace detail

template <class C>
BasicForm<C> interior(const BasicField<C>& v, const BasicForm<C>& a) {
    require_same_chart(v.chart(), a.chart());
    if (a.grade() == 0) throw Error("interior product of a function");
    return detail::contract(v, a);
}

// Pairing of a 1-form with a vector field.
template <class C>
C evaluate_one_form(const BasicForm<C>& w, const BasicField<C>& v) {
    if (w.grade() != 1) throw Error("expected a 1-form");
    return detail::contract(v, w).scalar();
}

// L_v a = i_v da + d(i_v a)
template <class C>
BasicForm<C> lie_derivative(const BasicField<C>& v, const BasicForm<C>& a) {
    require_same_chart(v.chart(), a.chart());
    BasicForm<C> out = detail::contract(v, ext_d(a));
    if (a.grade() > 0) out += ext_d(detail::contract(v, a));
    return out;
}

// Component formula: L_v(f dz^I) = v(f) dz^I + f sum_k dz^{i1}^..^d(v^{ik})^..^dz^{in}.
template <class C>
BasicForm<C> lie_derivative_transport(const BasicField<C>& v, const BasicForm<C>& a) {
    using traits = coefficient_traits<C>;
    require_same_chart(v.chart(), a.chart());
    const auto& chart = *a.chart();
    BasicForm<C> out(a.chart(), a.grade());
    for (const auto& [idx, f] : a.components()) {
        out.add_term(idx, v.apply(f));
        for (std::size_t pos = 0; pos < idx.size(); ++pos) {
            C vi = v.component(idx[pos]);
            for (std::size_t j = 0; j < chart.size(); ++j) {
                C dvi = traits::partial(vi, chart, j);
                if (traits::is_zero(dvi)) continue;
                IndexTuple k = idx;
                k[pos] = j;
                out.add_term(std::move(k), f * dvi);
            }
        }
    }
    return out;
}

// Replaces each listed coordinate differential dz^i by a 1-form image.
template <class C>
BasicForm<C> substitute_differentials(const BasicForm<C>& a, const std::map<std::size_t, BasicForm<C>>& images) {
    BasicForm<C> out(a.chart(), a.grade());
    for (const auto& [idx, f] : a.components()) {
        BasicForm<C> term = BasicForm<C>::function(a.chart(), f);
        for (std::size_t i : idx) {
            auto it = images.find(i);
            term = wedge(term, it == images.end() ? BasicForm<C>::differential(a.chart(), i) : it->second);
            if (term.is_zero()) break;
        }
        out += term;
    }
    return out;
}

// lambda with beta = lambda * alpha, if one exists. beta = 0 gives lambda = 0.
inline std::optional<RatFunc> proportionality_test(const DiffForm& beta, const DiffForm& alpha) {
    require_same_chart(beta.chart(), alpha.chart());
    if (beta.grade() != alpha.grade()) throw Error("proportionality test on forms of different grade");
    if (beta.is_zero()) return RatFunc(beta.chart());
    if (alpha.is_zero()) return std::nullopt;
    for (const auto& [idx, b] : beta.components())
        if (!alpha.components().count(idx)) return std::nullopt;
    const auto& [i0, a0] = *alpha.components().begin();
    RatFunc lambda = beta.component(i0) / a0;
    for (const auto& [idx, a] : alpha.components()) {
        if (!(beta.component(idx) == lambda * a)) return std::nullopt;
    }
    return lambda;
}

// ---------------------------------------------------------------- rendering

namespace detail {

// Splits a coefficient into (negative?, body) where body is empty for +-1.
inline std::pair<bool, std::string> coefficient_text(const RatFunc& c) {
    if (c.is_polynomial()) {
        Poly p = c.as_poly();
        if (p.size() == 1) {
            bool neg = sgn(p.leading_coefficient()) < 0;
            Poly mag = neg ? -p : p;
            if (mag.is_constant() && mag.constant_term() == 1) return {neg, ""};
            return {neg, mag.to_string()};
        }
        return {false, "(" + p.to_string() + ")"};
    }
    return {false, "(" + c.to_string() + ")"};
}

}  // namespace detail

// Basis element names for a layout entry, e.g. {"x", "t"} for dx^dt.
using FormLayout = std::vector<std::vector<std::string>>;

// Renders `coef dz^dw + ...`. Terms listed in `layout` come first, in that
// order and orientation; the rest follow in chart order.
inline std::string render_form(const DiffForm& a, const FormLayout& layout = {}) {
    const auto& chart = *a.chart();
    if (a.grade() == 0) return a.is_zero() ? "0" : a.scalar().to_string();
    std::vector<std::pair<RatFunc, std::vector<std::size_t>>> terms;
    std::map<IndexTuple, bool> used;
    for (const auto& names : layout) {
        IndexTuple raw;
        for (const auto& n : names) raw.push_back(chart.index(n));
        IndexTuple sorted = raw;
        int sign = canonicalize(sorted);
        auto it = a.components().find(sorted);
        if (sign == 0 || it == a.components().end() || used[sorted]) continue;
        used[sorted] = true;
        terms.emplace_back(sign > 0 ? it->second : -it->second, raw);
    }
    for (const auto& [idx, c] : a.components())
        if (!used[idx]) terms.emplace_back(c, idx);
    if (terms.empty()) return "0";
    std::string out;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        auto [neg, body] = detail::coefficient_text(terms[k].first);
        std::string basis;
        for (std::size_t i : terms[k].second) basis += (basis.empty() ? "d" : "^d") + chart.name(i);
        if (k == 0) {
            out += neg ? "-" : "";
        } else {
            out += neg ? " - " : " + ";
        }
        out += body.empty() ? basis : body + " " + basis;
    }
    return out;
}

inline std::string render_field(const VectorFieldExpr& v) {
    if (v.is_zero()) return "0";
    std::string out;
    for (const auto& [i, c] : v.components()) {
        auto [neg, body] = detail::coefficient_text(c);
        std::string basis = "D_" + v.chart()->name(i);
        if (out.empty()) {
            out += neg ? "-" : "";
        } else {
            out += neg ? " - " : " + ";
        }
        out += body.empty() ? basis : body + " " + basis;
    }
    return out;
}

inline std::ostream& operator<<(std::ostream& os, const DiffForm& a) { return os << render_form(a); }
inline std::ostream& operator<<(std::ostream& os, const VectorFieldExpr& v) { return os << render_field(v); }

// ------------------------------------------------------------------ parsing

// Forms use the expression grammar with `d<coord>` differentials; `*`,
// juxtaposition and `^` between forms all wedge, `^` with an integer exponent
// on a function is a power.
class FormBuilder {
public:
    using value_type = DiffForm;
    explicit FormBuilder(ChartPtr chart) : chart_(std::move(chart)), rf_(chart_) {}

    DiffForm number(const Scalar& q, std::size_t pos) const { return fn(rf_.number(q, pos)); }
    DiffForm identifier(const std::string& name, std::size_t pos) const {
        if (chart_->find(name)) return fn(rf_.identifier(name, pos));
        if (name.size() > 1 && name[0] == 'd') {
            if (auto i = chart_->find(name.substr(1))) return DiffForm::differential(chart_, *i);
        }
        throw ParseError("unknown identifier '" + name + "'", pos);
    }
    DiffForm call(const std::string& name, std::vector<DiffForm>, std::size_t pos) const {
        throw ParseError("function '" + name + "' is not allowed in a form", pos);
    }
    DiffForm add(const DiffForm& a, const DiffForm& b) const { return a + b; }
    DiffForm sub(const DiffForm& a, const DiffForm& b) const { return a - b; }
    DiffForm mul(const DiffForm& a, const DiffForm& b) const { return wedge(a, b); }
    DiffForm negate(const DiffForm& a) const { return -a; }
    DiffForm div(const DiffForm& a, const DiffForm& b, std::size_t pos) const {
        if (b.grade() != 0) throw ParseError("division by a form of positive grade", pos);
        RatFunc inverse = rf_.div(RatFunc::constant(chart_, 1), b.scalar(), pos);
        return inverse * a;
    }
    DiffForm power(const DiffForm& a, const DiffForm& e, std::size_t pos) const {
        if (a.grade() == 0 && e.grade() == 0) return fn(rf_.power(a.scalar(), e.scalar(), pos));
        if (a.grade() > 0 && e.grade() > 0) return wedge(a, e);
        throw ParseError("'^' mixes a function and a form", pos);
    }

private:
    DiffForm fn(const RatFunc& f) const { return DiffForm::function(chart_, f); }
    ChartPtr chart_;
    RatFuncBuilder rf_;
};

inline DiffForm parse_form(std::string_view source, const ChartPtr& chart) {
    return parse_with(source, FormBuilder(chart));
}

// Vector fields are written `coord: coefficient; coord: coefficient`.
inline VectorFieldExpr parse_field(std::string_view source, const ChartPtr& chart) {
    VectorFieldExpr v(chart);
    std::string text(source);
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find(';', start);
        if (end == std::string::npos) end = text.size();
        std::string part = text.substr(start, end - start);
        auto first = part.find_first_not_of(" \t\r\n");
        if (first != std::string::npos) {
            auto colon = part.find(':');
            if (colon == std::string::npos) throw ParseError("expected 'coord: coefficient'", start);
            std::string name = part.substr(0, colon);
            name.erase(0, name.find_first_not_of(" \t\r\n"));
            name.erase(name.find_last_not_of(" \t\r\n") + 1);
            auto idx = chart->find(name);
            if (!idx) throw ParseError("unknown coordinate '" + name + "'", start);
            try {
                v.set(*idx, v.component(*idx) + parse_ratfunc(part.substr(colon + 1), chart));
            } catch (const ParseError& e) {
                throw ParseError(std::string("in component '") + name + "': " + e.what(), start + colon + 1);
            }
        }
        start = end + 1;
    }
    return v;
}

}  // namespace kdvsym
