#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "kdvsym/form.hpp"

namespace kdvsym {

class OrderOverflow : public Error {
public:
    explicit OrderOverflow(const std::string& what) : Error("jet order overflow: " + what) {}
};

using MultiIndex = std::vector<unsigned>;  // derivative count per independent variable

// Jet chart: independents, dependents, then derivatives by order. Within one
// order the multi-indices run from the first independent down (tt, tx, xx).
class JetSpec {
public:
    struct Coordinate {
        CoordKind kind;
        std::size_t dependent = 0;  // for dependent/derivative coordinates
        MultiIndex multi;           // zero multi-index for a dependent variable
    };

    JetSpec(std::vector<std::string> independents, std::vector<std::string> dependents, unsigned order)
        : independents_(std::move(independents)), dependents_(std::move(dependents)), order_(order) {
        if (independents_.empty() || dependents_.empty()) throw Error("jet space needs variables");
        std::vector<std::string> names;
        std::vector<CoordKind> kinds;
        const std::size_t p = independents_.size();
        for (std::size_t i = 0; i < p; ++i) {
            names.push_back(independents_[i]);
            kinds.push_back(CoordKind::independent);
            MultiIndex m(p, 0);
            m[i] = 1;
            coords_.push_back({CoordKind::independent, 0, m});
        }
        for (std::size_t a = 0; a < dependents_.size(); ++a) {
            names.push_back(dependents_[a]);
            kinds.push_back(CoordKind::dependent);
            coords_.push_back({CoordKind::dependent, a, MultiIndex(p, 0)});
        }
        for (unsigned k = 1; k <= order_; ++k) {
            for (std::size_t a = 0; a < dependents_.size(); ++a) {
                for (const auto& m : multi_indices(k)) {
                    names.push_back(derivative_name(a, m));
                    kinds.push_back(CoordKind::derivative);
                    coords_.push_back({CoordKind::derivative, a, m});
                }
            }
        }
        for (std::size_t i = 0; i < coords_.size(); ++i) {
            if (coords_[i].kind != CoordKind::independent) lookup_.emplace(key(coords_[i].dependent, coords_[i].multi), i);
        }
        chart_ = make_chart(std::move(names), std::move(kinds));
    }

    const ChartPtr& chart() const noexcept { return chart_; }
    std::size_t p() const noexcept { return independents_.size(); }
    std::size_t q() const noexcept { return dependents_.size(); }
    unsigned order() const noexcept { return order_; }
    const std::vector<std::string>& independents() const noexcept { return independents_; }
    const std::vector<std::string>& dependents() const noexcept { return dependents_; }
    const Coordinate& coordinate(std::size_t i) const { return coords_.at(i); }

    std::size_t dependent_index(std::size_t a) const { return p() + a; }
    bool is_base(std::size_t i) const { return coords_.at(i).kind != CoordKind::derivative; }

    std::optional<std::size_t> find(std::size_t dependent, const MultiIndex& m) const {
        auto it = lookup_.find(key(dependent, m));
        if (it == lookup_.end()) return std::nullopt;
        return it->second;
    }

    std::string derivative_name(std::size_t a, const MultiIndex& m) const {
        std::string letters;
        for (std::size_t i = 0; i < m.size(); ++i)
            for (unsigned k = 0; k < m[i]; ++k) letters += independents_[i];
        return letters.empty() ? dependents_[a] : dependents_[a] + "_" + letters;
    }

    // Multi-indices of total order k, first independent's count descending.
    std::vector<MultiIndex> multi_indices(unsigned k) const {
        std::vector<MultiIndex> out;
        MultiIndex m(p(), 0);
        auto rec = [&](auto&& self, std::size_t pos, unsigned remaining) -> void {
            if (pos + 1 == p()) {
                m[pos] = remaining;
                out.push_back(m);
                return;
            }
            for (unsigned c = remaining + 1; c-- > 0;) {
                m[pos] = c;
                self(self, pos + 1, remaining - c);
            }
        };
        rec(rec, 0, k);
        return out;
    }

    static unsigned weight(const MultiIndex& m) {
        unsigned s = 0;
        for (unsigned c : m) s += c;
        return s;
    }

private:
    static std::string key(std::size_t a, const MultiIndex& m) {
        std::string k = std::to_string(a);
        for (unsigned c : m) k += "," + std::to_string(c);
        return k;
    }

    std::vector<std::string> independents_;
    std::vector<std::string> dependents_;
    unsigned order_;
    std::vector<Coordinate> coords_;
    std::map<std::string, std::size_t> lookup_;
    ChartPtr chart_;
};

// Contact forms du_J - sum_i u_{J,i} dx^i for every |J| < order.
inline std::vector<DiffForm> contact_forms(const JetSpec& spec) {
    if (spec.order() < 1) throw Error("contact forms need order >= 1");
    const auto& chart = spec.chart();
    std::vector<DiffForm> out;
    for (std::size_t c = 0; c < chart->size(); ++c) {
        const auto& co = spec.coordinate(c);
        if (co.kind == CoordKind::independent || JetSpec::weight(co.multi) >= spec.order()) continue;
        DiffForm theta = DiffForm::differential(chart, c);
        for (std::size_t i = 0; i < spec.p(); ++i) {
            MultiIndex m = co.multi;
            ++m[i];
            auto next = spec.find(co.dependent, m);
            theta -= RatFunc(Poly::variable(chart, *next)) * DiffForm::differential(chart, i);
        }
        out.push_back(std::move(theta));
    }
    return out;
}

// D_i f = df/dx^i + sum_{alpha,J} u^alpha_{J,i} df/du^alpha_J
template <class C>
C total_derivative(const C& f, std::size_t independent, const JetSpec& spec) {
    using traits = coefficient_traits<C>;
    const auto& chart = spec.chart();
    if (independent >= spec.p()) throw Error("total derivative with respect to a non-independent coordinate");
    C out = traits::partial(f, *chart, independent);
    for (std::size_t c = spec.p(); c < chart->size(); ++c) {
        C df = traits::partial(f, *chart, c);
        if (traits::is_zero(df)) continue;
        const auto& co = spec.coordinate(c);
        MultiIndex m = co.multi;
        ++m[independent];
        auto next = spec.find(co.dependent, m);
        if (!next) throw OrderOverflow("D_" + spec.independents()[independent] + " of " + chart->name(c));
        out = out + df * Poly::variable(chart, *next);
    }
    return out;
}

template <class C>
C total_derivative(const C& f, const std::string& independent, const JetSpec& spec) {
    for (std::size_t i = 0; i < spec.p(); ++i)
        if (spec.independents()[i] == independent) return total_derivative(f, i, spec);
    throw UnknownCoordinate(independent);
}

// Prolongation of a point field: phi_{J,i} = D_i phi_J - sum_j u_{J,j} D_i xi^j.
template <class C>
BasicField<C> prolong(const BasicField<C>& field, unsigned order, const JetSpec& spec) {
    using traits = coefficient_traits<C>;
    require_same_chart(field.chart(), spec.chart());
    if (order > spec.order()) throw OrderOverflow("prolongation order exceeds the jet chart");
    const auto& chart = spec.chart();
    for (const auto& [i, c] : field.components()) {
        if (!spec.is_base(i)) throw Error("prolong expects a point field; component on " + chart->name(i));
        for (std::size_t j = 0; j < chart->size(); ++j) {
            if (!spec.is_base(j) && !traits::is_zero(traits::partial(c, *chart, j)))
                throw Error("prolong expects a point field; coefficient depends on " + chart->name(j));
        }
    }
    BasicField<C> out(chart);
    for (const auto& [i, c] : field.components()) out.set(i, c);
    std::vector<C> xi;
    for (std::size_t j = 0; j < spec.p(); ++j) xi.push_back(field.component(j));
    std::vector<std::vector<C>> dxi(spec.p());  // dxi[i][j] = D_i xi^j
    for (std::size_t i = 0; i < spec.p(); ++i)
        for (std::size_t j = 0; j < spec.p(); ++j) dxi[i].push_back(total_derivative(xi[j], i, spec));

    for (unsigned k = 1; k <= order; ++k) {
        for (std::size_t a = 0; a < spec.q(); ++a) {
            for (const auto& m : spec.multi_indices(k)) {
                std::size_t i = spec.p();
                while (i-- > 0)
                    if (m[i] > 0) break;
                MultiIndex prev = m;
                --prev[i];
                std::size_t prev_idx = *spec.find(a, prev);
                C phi = total_derivative(out.component(prev_idx), i, spec);
                for (std::size_t j = 0; j < spec.p(); ++j) {
                    if (traits::is_zero(dxi[i][j])) continue;
                    MultiIndex up = prev;
                    ++up[j];
                    phi = phi - dxi[i][j] * Poly::variable(chart, *spec.find(a, up));
                }
                out.set(*spec.find(a, m), phi);
            }
        }
    }
    return out;
}

// Polynomial differential equation with a designated leading derivative.
struct PdeSpec {
    std::string name;
    JetSpec jet;
    Poly delta;
    std::size_t lead;
    // Verbatim 2-form for the equation when a source prints one (used by the ideal builder).
    std::optional<std::string> printed_equation_form;

    PdeSpec(std::string n, JetSpec j, const std::string& equation, const std::string& leading,
            std::optional<std::string> printed = std::nullopt)
        : name(std::move(n)), jet(std::move(j)), delta(parse_poly(equation, jet.chart())),
          lead(jet.chart()->index(leading)), printed_equation_form(std::move(printed)) {
        if (!delta.depends_on(lead)) throw Error("equation does not contain its leading derivative");
    }
};

namespace detail {

inline std::uint32_t degree_in(const Poly& p, std::size_t v) { return p.degree_in(v); }
inline std::uint32_t degree_in(const ParamPoly& p, std::size_t v) { return p.degree_in(v); }
inline Poly coefficient_in(const Poly& p, std::size_t v, std::uint32_t k) { return p.coefficient_in(v, k); }
inline ParamPoly coefficient_in(const ParamPoly& p, std::size_t v, std::uint32_t k) { return p.coefficient_in(v, k); }

}  // namespace detail

// Pseudo-remainder of expr by divisor with `var` as main variable.
template <class P>
P pseudo_remainder(P expr, const Poly& divisor, std::size_t var) {
    const std::uint32_t d = divisor.degree_in(var);
    if (d == 0) throw Error("pseudo-division: divisor free of the main variable");
    const Poly lc = divisor.coefficient_in(var, d);
    const ChartPtr& chart = divisor.chart();
    for (;;) {
        std::uint32_t m = detail::degree_in(expr, var);
        if (m < d || expr.is_zero()) return expr;
        P top = detail::coefficient_in(expr, var, m);
        Exponents shift(chart->size(), 0);
        shift[var] = m - d;
        P top_term = top * Poly::monomial(chart, shift);
        // remove the var^m part of expr before scaling
        expr = expr * lc - top_term * divisor;
    }
}

template <class P>
struct Reduction {
    P remainder;
    bool vanishes = false;
    std::optional<Poly> cofactor;  // expr = cofactor * delta, when that exact division succeeds
};

namespace detail {

struct Reducer {
    Poly poly;
    std::size_t lead;
};

inline std::vector<Reducer> reducers_for(const PdeSpec& pde) {
    const auto& spec = pde.jet;
    const auto& lead = spec.coordinate(pde.lead);
    std::vector<Reducer> out;
    for (std::size_t c = 0; c < spec.chart()->size(); ++c) {
        const auto& co = spec.coordinate(c);
        if (co.kind == CoordKind::independent || co.dependent != lead.dependent || c == pde.lead) continue;
        bool above = true;
        for (std::size_t i = 0; i < spec.p(); ++i) above = above && co.multi[i] >= lead.multi[i];
        if (!above) continue;
        Poly p = pde.delta;
        try {
            for (std::size_t i = 0; i < spec.p(); ++i)
                for (unsigned k = lead.multi[i]; k < co.multi[i]; ++k) p = total_derivative(p, i, spec);
        } catch (const OrderOverflow&) {
            continue;
        }
        out.push_back({std::move(p), c});
    }
    std::sort(out.begin(), out.end(), [](const Reducer& a, const Reducer& b) { return a.lead > b.lead; });
    out.push_back({pde.delta, pde.lead});
    return out;
}

}  // namespace detail

// Reduces expr modulo the equation (and the total derivatives of the equation
// whose leading coordinates exist on the chart) by iterated pseudo-division.
template <class P>
Reduction<P> on_solution_reduce(const P& expr, const PdeSpec& pde) {
    require_same_chart(expr.chart() ? expr.chart() : pde.jet.chart(), pde.jet.chart());
    auto reducers = detail::reducers_for(pde);
    P r = expr;
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& red : reducers) {
            if (detail::degree_in(r, red.lead) >= red.poly.degree_in(red.lead)) {
                r = pseudo_remainder(r, red.poly, red.lead);
                changed = true;
            }
        }
    }
    Reduction<P> out{r, r.is_zero(), std::nullopt};
    if constexpr (std::is_same_v<P, Poly>) {
        if (out.vanishes) out.cofactor = divide_exact(expr, pde.delta);
    }
    return out;
}

inline Reduction<Poly> on_solution_reduce(const RatFunc& expr, const PdeSpec& pde) {
    return on_solution_reduce(expr.num(), pde);
}

}  // namespace kdvsym
