#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "kdvsym/form.hpp"
#include "kdvsym/jet.hpp"
#include "kdvsym/linalg.hpp"
#include "kdvsym/parampoly.hpp"

namespace kdvsym {

// Which 2-form encodes the equation: the source's display or the generic encoder.
enum class IdealVariant { printed, corrected };

// How L_v alpha^i is tied back to the ideal.
//   span           L_v alpha^i = sum_k f_ik alpha^k for every listed i
//   paper          lambda_i alpha^i for i <= 3, span membership for i >= 4
//   proportional   lambda_i alpha^i for every listed i
//   modulo_contact span membership after setting the contact 1-forms to zero
enum class ConditionRule { span, paper, proportional, modulo_contact };

inline std::string to_string(ConditionRule r) {
    switch (r) {
        case ConditionRule::span: return "span";
        case ConditionRule::paper: return "paper";
        case ConditionRule::proportional: return "proportional";
        case ConditionRule::modulo_contact: return "modulo-contact";
    }
    return "?";
}

inline ConditionRule parse_condition_rule(const std::string& s) {
    if (s == "span") return ConditionRule::span;
    if (s == "paper") return ConditionRule::paper;
    if (s == "proportional") return ConditionRule::proportional;
    if (s == "modulo-contact" || s == "contact") return ConditionRule::modulo_contact;
    throw Error("unknown condition rule '" + s + "'");
}

struct ContactIdeal {
    JetSpec jet;
    std::vector<DiffForm> thetas;
    std::vector<std::size_t> theta_leads;  // coordinate whose differential leads each theta
    std::vector<DiffForm> generators;      // alpha^1 ... alpha^n
    std::vector<FormLayout> layouts;
    IdealVariant variant = IdealVariant::printed;

    std::size_t size() const noexcept { return generators.size(); }
    const DiffForm& alpha(std::size_t i) const { return generators.at(i - 1); }
    std::string render(std::size_t i) const { return render_form(alpha(i), layouts.at(i - 1)); }
    std::string render_theta(std::size_t j) const {
        FormLayout layout{{jet.chart()->name(theta_leads.at(j))}};
        for (const auto& name : jet.independents()) layout.push_back({name});
        return render_form(thetas.at(j), layout);
    }

    // Sets every theta to zero: du_J -> sum_i u_{J,i} dx^i.
    template <class C>
    BasicForm<C> modulo_contact(const BasicForm<C>& a) const {
        std::map<std::size_t, BasicForm<C>> images;
        for (std::size_t j = 0; j < thetas.size(); ++j) {
            DiffForm image = DiffForm::differential(jet.chart(), theta_leads[j]) - thetas[j];
            if constexpr (std::is_same_v<C, RatFunc>) {
                images.emplace(theta_leads[j], image);
            } else {
                images.emplace(theta_leads[j], to_param_form(image));
            }
        }
        return substitute_differentials(a, images);
    }
};

namespace detail {

// Generic encoder for p = 2: every term c * rest * u_K of the equation becomes
// rest dz0^du_{K-e1} (K has a z1 index) or -rest dz1^du_{K-e0}, so that the
// form pulls back to delta dz0^dz1 on solutions.
inline DiffForm encode_equation(const PdeSpec& pde, const JetSpec& jet) {
    const auto& src = pde.jet;
    const auto& chart = jet.chart();
    DiffForm out(chart, 2);
    for (const auto& [e, c] : pde.delta.terms()) {
        std::optional<std::size_t> factor;
        unsigned best = 0;
        for (std::size_t v = 0; v < e.size(); ++v) {
            if (e[v] == 0) continue;
            const auto& co = src.coordinate(v);
            if (co.kind != CoordKind::derivative) continue;
            unsigned w = JetSpec::weight(co.multi);
            bool better = !factor || w > best || (w == best && co.multi[1] > 0 && src.coordinate(*factor).multi[1] == 0);
            if (better) {
                factor = v;
                best = w;
            }
        }
        Exponents rest = e;
        DiffForm piece(chart, 2);
        if (!factor) {
            piece = wedge(DiffForm::differential(chart, 0), DiffForm::differential(chart, 1));
        } else {
            --rest[*factor];
            const auto& co = src.coordinate(*factor);
            std::size_t dir = co.multi[1] > 0 ? 1 : 0;
            MultiIndex lower = co.multi;
            --lower[dir];
            auto target = jet.find(co.dependent, lower);
            if (!target) throw Error("equation term does not fit the ideal's jet chart");
            DiffForm dlow = DiffForm::differential(chart, *target);
            piece = dir == 1 ? wedge(DiffForm::differential(chart, 0), dlow) : -wedge(DiffForm::differential(chart, 1), dlow);
        }
        Poly coef = rechart(Poly::monomial(src.chart(), rest, c), chart);
        out += RatFunc(coef) * piece;
    }
    return out;
}

inline FormLayout wedge_layout(const JetSpec& jet, std::size_t a, std::size_t b) {
    const auto& c = jet.chart();
    const std::string t = c->name(0), x = c->name(1), na = c->name(a), nb = c->name(b);
    return {{x, t}, {x, na}, {x, nb}, {t, na}, {t, nb}, {na, nb}};
}

inline FormLayout d_theta_layout(const JetSpec& jet, std::size_t lead) {
    const auto& co = jet.coordinate(lead);
    FormLayout out;
    for (std::size_t i = jet.p(); i-- > 0;) {
        MultiIndex m = co.multi;
        ++m[i];
        out.push_back({jet.chart()->name(i), jet.chart()->name(*jet.find(co.dependent, m))});
    }
    return out;
}

}  // namespace detail

// Contact ideal of an equation with two independent variables: the pairwise
// wedges of the contact forms, their differentials and the equation 2-form,
// on the jet chart one order below the equation.
inline ContactIdeal build_ideal(const PdeSpec& pde, IdealVariant variant = IdealVariant::printed) {
    if (pde.jet.p() != 2 || pde.jet.order() < 2) throw Error("ideal builder supports two independent variables and order >= 2");
    ContactIdeal ideal{JetSpec(pde.jet.independents(), pde.jet.dependents(), pde.jet.order() - 1), {}, {}, {}, {}, variant};
    const auto& jet = ideal.jet;
    ideal.thetas = contact_forms(jet);
    for (std::size_t c = 0; c < jet.chart()->size(); ++c) {
        const auto& co = jet.coordinate(c);
        if (co.kind != CoordKind::independent && JetSpec::weight(co.multi) < jet.order()) ideal.theta_leads.push_back(c);
    }
    const auto& th = ideal.thetas;
    for (std::size_t a = 0; a < th.size(); ++a) {
        for (std::size_t b = a + 1; b < th.size(); ++b) {
            ideal.generators.push_back(wedge(th[a], th[b]));
            ideal.layouts.push_back(detail::wedge_layout(jet, ideal.theta_leads[a], ideal.theta_leads[b]));
        }
    }
    for (std::size_t a = 0; a < th.size(); ++a) {
        ideal.generators.push_back(ext_d(th[a]));
        ideal.layouts.push_back(detail::d_theta_layout(jet, ideal.theta_leads[a]));
    }
    if (variant == IdealVariant::printed && pde.printed_equation_form) {
        ideal.generators.push_back(parse_form(*pde.printed_equation_form, jet.chart()));
    } else {
        ideal.variant = IdealVariant::corrected;
        ideal.generators.push_back(detail::encode_equation(pde, jet));
    }
    ideal.layouts.push_back({});
    return ideal;
}

// Coefficient of dz0^dz1 after pulling the equation generator back along a
// solution, expressed on the equation's jet chart.
inline RatFunc pulled_back_equation(const ContactIdeal& ideal, const PdeSpec& pde) {
    const auto& chart = pde.jet.chart();
    DiffForm a = rechart(ideal.generators.back(), chart);
    std::map<std::size_t, DiffForm> images;
    for (std::size_t c = 0; c < chart->size(); ++c) {
        const auto& co = pde.jet.coordinate(c);
        if (co.kind == CoordKind::independent || JetSpec::weight(co.multi) >= pde.jet.order()) continue;
        DiffForm image(chart, 1);
        for (std::size_t i = 0; i < pde.jet.p(); ++i) {
            MultiIndex m = co.multi;
            ++m[i];
            image += RatFunc(Poly::variable(chart, *pde.jet.find(co.dependent, m))) * DiffForm::differential(chart, i);
        }
        images.emplace(c, image);
    }
    return substitute_differentials(a, images).component({0, 1});
}

// One unknown of a determining system: which ansatz it belongs to and the
// monomial it multiplies.
struct ParamInfo {
    std::string group;
    Exponents monomial;
    std::optional<std::size_t> field_coordinate;  // set for vector-field coefficients
};

struct RowTag {
    std::string source;  // generator label or equation name
    IndexTuple component;
    Exponents monomial;
};

enum class SystemMode { harrison, classical };

inline std::string to_string(SystemMode m) { return m == SystemMode::harrison ? "harrison" : "classical"; }

struct DeterminingSystem {
    SystemMode mode = SystemMode::harrison;
    ChartPtr chart;
    ParamRegistry registry;
    std::vector<ParamInfo> params;
    std::size_t n_field_params = 0;  // field unknowns are ids [0, n_field_params)
    MatrixQ matrix;                  // last column holds the constant terms
    std::vector<RowTag> provenance;
    std::vector<std::pair<std::string, ParamForm>> residuals;
    std::vector<std::size_t> conditions;
    ConditionRule rule = ConditionRule::span;
    unsigned degree_field = 0, degree_mult = 0;

    std::size_t unknowns() const noexcept { return registry.size(); }
};

struct HarrisonOptions {
    std::vector<std::size_t> conditions{1, 2, 3, 4, 5, 6, 7};
    unsigned degree_a = 1;
    unsigned degree_mult = 1;
    ConditionRule rule = ConditionRule::span;
    std::size_t max_unknowns = 20000;
    // Known field: only the multipliers are unknown.
    std::optional<VectorFieldExpr> fixed_field;
};

namespace detail {

inline void add_param_group(DeterminingSystem& sys, const std::string& group, unsigned degree, ParamPoly& out,
                            std::optional<std::size_t> coordinate, const std::vector<std::size_t>& vars) {
    const std::size_t before = sys.registry.size();
    out = make_ansatz(sys.chart, sys.registry, group, vars, degree);
    auto monos = monomials_up_to(sys.chart->size(), vars, degree);
    for (std::size_t k = 0; k < monos.size(); ++k) sys.params.push_back({group, monos[k], coordinate});
    if (sys.registry.size() != before + monos.size()) throw Error("ansatz bookkeeping mismatch");
}

inline void emit_rows(DeterminingSystem& sys, const std::string& source, const ParamForm& residual) {
    const std::size_t n = sys.registry.size();
    for (const auto& [idx, coef] : residual.components()) {
        for (const auto& [mono, affine] : coef.by_monomial()) {
            SparseRow row;
            for (const auto& [id, c] : affine.coefficients)
                if (c != 0) row.emplace_back(id, c);
            if (affine.constant != 0) row.emplace_back(n, affine.constant);
            if (row.empty()) continue;
            sys.matrix.push_row(std::move(row));
            sys.provenance.push_back({source, idx, mono});
        }
    }
    sys.residuals.emplace_back(source, residual);
}

inline void check_cap(std::size_t unknowns, std::size_t cap) {
    if (unknowns > cap)
        throw Error("determining system needs " + std::to_string(unknowns) + " unknowns, above the cap of " +
                    std::to_string(cap));
}

inline std::size_t count_monomials(std::size_t vars, unsigned degree) {
    // binomial(vars + degree, degree)
    std::size_t r = 1;
    for (unsigned k = 1; k <= degree; ++k) r = r * (vars + k) / k;
    return r;
}

}  // namespace detail

// Linear conditions on a polynomial ansatz for v so that L_v maps the listed
// generators back into the ideal (rule decides how).
inline DeterminingSystem assemble_harrison(const ContactIdeal& ideal, const HarrisonOptions& opt = {}) {
    DeterminingSystem sys;
    sys.mode = SystemMode::harrison;
    sys.chart = ideal.jet.chart();
    sys.conditions = opt.conditions;
    sys.rule = opt.rule;
    sys.degree_field = opt.degree_a;
    sys.degree_mult = opt.degree_mult;
    const auto& chart = sys.chart;
    const std::size_t n = chart->size();
    const std::size_t m = ideal.size();
    for (std::size_t i : opt.conditions)
        if (i < 1 || i > m) throw Error("condition index " + std::to_string(i) + " outside 1.." + std::to_string(m));

    std::size_t mono_a = detail::count_monomials(n, opt.degree_a);
    std::size_t mono_f = detail::count_monomials(n, opt.degree_mult);
    std::size_t estimate = opt.fixed_field ? 0 : n * mono_a;
    for (std::size_t i : opt.conditions) {
        bool prop = opt.rule == ConditionRule::proportional || (opt.rule == ConditionRule::paper && i <= 3);
        estimate += (prop ? 1 : m) * mono_f;
    }
    detail::check_cap(estimate, opt.max_unknowns);

    std::vector<std::size_t> all(n);
    for (std::size_t k = 0; k < n; ++k) all[k] = k;

    ParamField v(chart);
    if (opt.fixed_field) {
        require_same_chart(opt.fixed_field->chart(), chart);
        for (const auto& [i, c] : opt.fixed_field->components()) v.set(i, ParamPoly(c.as_poly()));
    } else {
        for (std::size_t k = 0; k < n; ++k) {
            ParamPoly a;
            detail::add_param_group(sys, "A" + std::to_string(k + 1), opt.degree_a, a, k, all);
            v.set(k, a);
        }
    }
    sys.n_field_params = sys.registry.size();

    std::vector<ParamForm> gens;
    for (const auto& g : ideal.generators) gens.push_back(to_param_form(g));
    std::vector<ParamForm> projected;
    if (opt.rule == ConditionRule::modulo_contact)
        for (const auto& g : gens) projected.push_back(ideal.modulo_contact(g));

    // Multipliers are created up front so every row has its final width.
    struct Pending {
        std::size_t i;
        ParamForm residual;
    };
    std::vector<Pending> pending;
    for (std::size_t i : opt.conditions) {
        ParamForm lie = lie_derivative(v, gens[i - 1]);
        std::string tag = std::to_string(i);
        bool prop = opt.rule == ConditionRule::proportional || (opt.rule == ConditionRule::paper && i <= 3);
        if (prop) {
            ParamPoly lam;
            detail::add_param_group(sys, "lambda" + tag, opt.degree_mult, lam, std::nullopt, all);
            pending.push_back({i, lie - lam * gens[i - 1]});
        } else {
            const auto& base = opt.rule == ConditionRule::modulo_contact ? projected : gens;
            ParamForm r = opt.rule == ConditionRule::modulo_contact ? ideal.modulo_contact(lie) : lie;
            for (std::size_t k = 1; k <= m; ++k) {
                if (base[k - 1].is_zero()) continue;
                ParamPoly f;
                detail::add_param_group(sys, "f" + tag + "_" + std::to_string(k), opt.degree_mult, f, std::nullopt,
                                        all);
                r = r - f * base[k - 1];
            }
            pending.push_back({i, r});
        }
    }
    sys.matrix = MatrixQ(0, sys.registry.size() + 1);
    for (const auto& p : pending) detail::emit_rows(sys, "alpha" + std::to_string(p.i), p.residual);
    return sys;
}

// Point-symmetry conditions: pr^(k) X (delta) reduced on solutions must vanish
// identically, with X polynomial of bounded degree in the base coordinates.
inline DeterminingSystem assemble_classical(const PdeSpec& pde, unsigned prolong_order, unsigned degree,
                                            std::size_t max_unknowns = 20000) {
    DeterminingSystem sys;
    sys.mode = SystemMode::classical;
    sys.chart = pde.jet.chart();
    sys.degree_field = degree;
    const auto& jet = pde.jet;
    std::vector<std::size_t> base;
    for (std::size_t c = 0; c < sys.chart->size(); ++c)
        if (jet.is_base(c)) base.push_back(c);
    detail::check_cap(base.size() * detail::count_monomials(base.size(), degree), max_unknowns);

    ParamField x(sys.chart);
    for (std::size_t c : base) {
        ParamPoly a;
        std::string group = (jet.coordinate(c).kind == CoordKind::independent ? "xi_" : "phi_") + sys.chart->name(c);
        detail::add_param_group(sys, group, degree, a, c, base);
        x.set(c, a);
    }
    sys.n_field_params = sys.registry.size();
    ParamField pr = prolong(x, prolong_order, jet);
    auto red = on_solution_reduce(pr.apply(ParamPoly(pde.delta)), pde);
    sys.matrix = MatrixQ(0, sys.registry.size() + 1);
    detail::emit_rows(sys, pde.name, ParamForm::function(sys.chart, red.remainder));
    return sys;
}

struct SymmetryBasis {
    SystemMode mode = SystemMode::harrison;
    ChartPtr chart;
    bool consistent = true;
    std::vector<VectorFieldExpr> fields;
    // Multiplier polynomials (by ansatz group) that witness each field.
    std::vector<std::map<std::string, Poly>> witnesses;
    // Solution of an inhomogeneous system (fixed-field mode).
    std::optional<std::map<std::string, Poly>> particular;
    std::size_t nullity = 0;
    std::size_t gauge_dimension = 0;  // solutions with zero field part
};

namespace detail {

inline std::map<std::string, Poly> multiplier_polys(const DeterminingSystem& sys, const VectorQ& x) {
    std::map<std::string, Poly> out;
    for (std::size_t id = sys.n_field_params; id < sys.params.size(); ++id) {
        if (x[id] == 0) continue;
        const auto& info = sys.params[id];
        auto [it, inserted] = out.try_emplace(info.group, sys.chart);
        it->second += Poly::monomial(sys.chart, info.monomial, x[id]);
    }
    return out;
}

}  // namespace detail

// Exact nullspace, projected to vector fields in reduced echelon form.
inline SymmetryBasis solve_system(const DeterminingSystem& sys) {
    SymmetryBasis out;
    out.mode = sys.mode;
    out.chart = sys.chart;
    const std::size_t n = sys.unknowns();
    EchelonBuilder eb(n + 1);
    for (const auto& r : sys.matrix.rows()) eb.add(r);
    if (eb.pivot_rows().count(n)) {
        out.consistent = false;
        return out;
    }
    std::vector<VectorQ> homogeneous;
    for (auto& v : eb.nullspace()) {
        if (v[n] != 0) {
            VectorQ p(v.begin(), v.end() - 1);
            for (auto& c : p) c /= v[n];
            bool nonzero = std::any_of(p.begin(), p.end(), [](const Scalar& c) { return c != 0; });
            if (nonzero || sys.n_field_params == 0) out.particular = detail::multiplier_polys(sys, p);
            continue;
        }
        v.pop_back();
        homogeneous.push_back(std::move(v));
    }
    out.nullity = homogeneous.size();
    EchelonBuilder reduced(n);
    for (const auto& v : homogeneous) {
        SparseRow r;
        for (std::size_t k = 0; k < n; ++k)
            if (v[k] != 0) r.emplace_back(k, v[k]);
        reduced.add(std::move(r));
    }
    for (const auto& [pivot, row] : reduced.pivot_rows()) {
        if (pivot >= sys.n_field_params) {
            ++out.gauge_dimension;
            continue;
        }
        VectorQ x(n, 0);
        for (const auto& [k, c] : row) x[k] = c;
        VectorFieldExpr field(sys.chart);
        std::map<std::size_t, Poly> comps;
        for (std::size_t id = 0; id < sys.n_field_params; ++id) {
            if (x[id] == 0) continue;
            const auto& info = sys.params[id];
            auto [it, inserted] = comps.try_emplace(*info.field_coordinate, sys.chart);
            it->second += Poly::monomial(sys.chart, info.monomial, x[id]);
        }
        for (auto& [c, p] : comps) field.set(c, RatFunc(std::move(p)));
        out.fields.push_back(std::move(field));
        out.witnesses.push_back(detail::multiplier_polys(sys, x));
    }
    return out;
}

// Coefficient vectors of fields over the union of their monomial supports.
inline std::vector<VectorQ> field_coordinates(const std::vector<VectorFieldExpr>& fields) {
    std::map<std::pair<std::size_t, Exponents>, std::size_t> frame;
    for (const auto& f : fields)
        for (const auto& [i, c] : f.components()) {
            Poly p = c.as_poly();
            for (const auto& [e, s] : p.terms()) frame.try_emplace({i, e}, 0);
        }
    std::size_t k = 0;
    for (auto& [key, pos] : frame) pos = k++;
    std::vector<VectorQ> out;
    for (const auto& f : fields) {
        VectorQ v(frame.size(), 0);
        for (const auto& [i, c] : f.components()) {
            Poly p = c.as_poly();
            for (const auto& [e, s] : p.terms()) v[frame.at({i, e})] = s;
        }
        out.push_back(std::move(v));
    }
    return out;
}

// True when both lists of polynomial fields span the same rational space.
inline bool same_field_span(const std::vector<VectorFieldExpr>& a, const std::vector<VectorFieldExpr>& b) {
    std::vector<VectorFieldExpr> all(a);
    all.insert(all.end(), b.begin(), b.end());
    auto coords = field_coordinates(all);
    if (coords.empty()) return true;
    std::vector<VectorQ> va(coords.begin(), coords.begin() + static_cast<std::ptrdiff_t>(a.size()));
    std::vector<VectorQ> vb(coords.begin() + static_cast<std::ptrdiff_t>(a.size()), coords.end());
    const std::size_t dim = coords.front().size();
    return rank_of(va, dim) == rank_of(coords, dim) && rank_of(vb, dim) == rank_of(coords, dim);
}

struct GeneratorVerdict {
    std::size_t index = 0;  // 1-based
    std::optional<RatFunc> lambda;
    std::optional<std::vector<RatFunc>> multipliers;  // L_v alpha^i = sum_k f_k alpha^k
    bool pass = false;
};

struct SymmetryReport {
    ConditionRule rule = ConditionRule::span;
    std::vector<GeneratorVerdict> generators;
    bool pass() const {
        return std::all_of(generators.begin(), generators.end(), [](const GeneratorVerdict& g) { return g.pass; });
    }
};

namespace detail {

inline std::optional<std::vector<RatFunc>> ideal_coordinates(const DiffForm& target, const std::vector<DiffForm>& gens) {
    const auto& chart = target.chart();
    std::set<IndexTuple> keys;
    for (const auto& [idx, c] : target.components()) keys.insert(idx);
    for (const auto& g : gens)
        for (const auto& [idx, c] : g.components()) keys.insert(idx);
    RatFunc zero = RatFunc::constant(chart, 0);
    std::vector<std::vector<RatFunc>> columns;
    for (const auto& g : gens) {
        std::vector<RatFunc> col;
        for (const auto& k : keys) col.push_back(g.component(k));
        columns.push_back(std::move(col));
    }
    std::vector<RatFunc> rhs;
    for (const auto& k : keys) rhs.push_back(target.component(k));
    if (keys.empty()) return std::vector<RatFunc>(gens.size(), zero);
    return field_solve<RatFunc>(columns, rhs, zero, [](const RatFunc& f) { return f.is_zero(); });
}

}  // namespace detail

// Checks L_v alpha^i against the ideal for every generator, with exact
// witnesses: lambda_i where proportional, f_k where L_v alpha^i = sum f_k alpha^k.
inline SymmetryReport verify_symmetry(const VectorFieldExpr& field, const ContactIdeal& ideal,
                                      ConditionRule rule = ConditionRule::span) {
    require_same_chart(field.chart(), ideal.jet.chart());
    SymmetryReport report;
    report.rule = rule;
    std::vector<DiffForm> projected;
    for (const auto& g : ideal.generators) projected.push_back(ideal.modulo_contact(g));
    for (std::size_t i = 1; i <= ideal.size(); ++i) {
        GeneratorVerdict g;
        g.index = i;
        DiffForm lie = lie_derivative(field, ideal.alpha(i));
        g.lambda = proportionality_test(lie, ideal.alpha(i));
        switch (rule) {
            case ConditionRule::span:
                g.multipliers = detail::ideal_coordinates(lie, ideal.generators);
                g.pass = g.multipliers.has_value();
                break;
            case ConditionRule::proportional: g.pass = g.lambda.has_value(); break;
            case ConditionRule::paper:
                if (i <= 3) {
                    g.pass = g.lambda.has_value();
                } else {
                    g.multipliers = detail::ideal_coordinates(lie, ideal.generators);
                    g.pass = g.multipliers.has_value();
                }
                break;
            case ConditionRule::modulo_contact:
                g.multipliers = detail::ideal_coordinates(ideal.modulo_contact(lie), projected);
                g.pass = g.multipliers.has_value();
                break;
        }
        report.generators.push_back(std::move(g));
    }
    return report;
}

}  // namespace kdvsym
