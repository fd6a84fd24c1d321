#include <gtest/gtest.h>

#include <random>

#include "kdvsym/builtins.hpp"
#include "kdvsym/detsolve.hpp"

using namespace kdvsym;

namespace {

const ContactIdeal& kdv_ideal() {
    static const ContactIdeal ideal = build_ideal(builtin::kdv3());
    return ideal;
}

std::vector<VectorFieldExpr> fields(std::initializer_list<const char*> names, const ChartPtr& chart) {
    std::vector<VectorFieldExpr> out;
    for (const char* n : names) out.push_back(builtin::field_on(n, chart));
    return out;
}

std::vector<VectorFieldExpr> paper_v() { return fields({"v1", "v2", "v3", "v4"}, kdv_ideal().jet.chart()); }

std::size_t dimension(std::vector<std::size_t> conditions, ConditionRule rule) {
    HarrisonOptions opt;
    opt.conditions = std::move(conditions);
    opt.rule = rule;
    return solve_system(assemble_harrison(kdv_ideal(), opt)).fields.size();
}

}  // namespace

TEST(BuildIdeal, RendersThePaperDisplays) {
    const auto& I = kdv_ideal();
    ASSERT_EQ(I.size(), 7u);
    EXPECT_EQ(I.render(1),
              "(u_x*u_tt - u_t*u_tx) dx^dt + u_tx dx^du - u_x dx^du_t + u_tt dt^du - u_t dt^du_t + du^du_t");
    EXPECT_EQ(I.render(2),
              "(u_x*u_tx - u_t*u_xx) dx^dt + u_xx dx^du - u_x dx^du_x + u_tx dt^du - u_t dt^du_x + du^du_x");
    EXPECT_EQ(I.render(3),
              "(u_tx^2 - u_tt*u_xx) dx^dt + u_xx dx^du_t - u_tx dx^du_x + u_tx dt^du_t - u_tt dt^du_x + du_t^du_x");
    EXPECT_EQ(I.render(4), "dx^du_x + dt^du_t");
    EXPECT_EQ(I.render(5), "dx^du_tx + dt^du_tt");
    EXPECT_EQ(I.render(6), "dx^du_xx + dt^du_tx");
    EXPECT_EQ(I.render(7), "u dt^du - dt^du_xx - dx^du");
    EXPECT_EQ(I.render_theta(0), "du - u_t dt - u_x dx");
    EXPECT_EQ(I.render_theta(1), "du_t - u_tt dt - u_tx dx");
    EXPECT_EQ(I.render_theta(2), "du_x - u_tx dt - u_xx dx");
}

TEST(BuildIdeal, DifferentialsOfThetas) {
    const auto& I = kdv_ideal();
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(I.alpha(4 + j), ext_d(I.thetas[j]));
    for (std::size_t j = 0; j < 3; ++j) EXPECT_TRUE(ext_d(I.alpha(4 + j)).is_zero());
}

// The printed equation form pulls back with the sign of u_xxx flipped; the
// generic encoder reproduces delta itself.
TEST(BuildIdeal, EquationFormPullback) {
    const auto& pde = builtin::kdv3();
    const auto& c = pde.jet.chart();
    EXPECT_EQ(pulled_back_equation(kdv_ideal(), pde), parse_ratfunc("u_t + u*u_x - u_xxx", c));
    auto corrected = build_ideal(pde, IdealVariant::corrected);
    EXPECT_EQ(corrected.variant, IdealVariant::corrected);
    EXPECT_EQ(corrected.alpha(7), parse_form("dt^du_xx + u dt^du - dx^du", corrected.jet.chart()));
    EXPECT_EQ(pulled_back_equation(corrected, pde), RatFunc(pde.delta));
}

TEST(BuildIdeal, GenericEncoderOnOtherEquations) {
    JetSpec j({"t", "x"}, {"u"}, 2);
    PdeSpec heat("heat", j, "u_t - u_xx", "u_xx");
    auto I = build_ideal(heat);
    EXPECT_EQ(I.size(), 2u);  // d(theta) and the equation form
    EXPECT_EQ(pulled_back_equation(I, heat), RatFunc(heat.delta));
    JetSpec o({"x"}, {"u"}, 2);
    EXPECT_THROW(build_ideal(PdeSpec("ode", o, "u_xx + u", "u_xx")), Error);
}

TEST(Harrison, DefaultConditionsGiveThePaperFamily) {
    auto sys = assemble_harrison(kdv_ideal());
    EXPECT_EQ(sys.unknowns(), 513u);
    EXPECT_EQ(sys.n_field_params, 72u);
    auto basis = solve_system(sys);
    ASSERT_TRUE(basis.consistent);
    EXPECT_EQ(basis.fields.size(), 4u);
    EXPECT_EQ(basis.gauge_dimension, 0u);
    EXPECT_TRUE(same_field_span(basis.fields, paper_v()));
    for (const auto& f : basis.fields) EXPECT_TRUE(verify_symmetry(f, kdv_ideal()).pass()) << render_field(f);
}

// Dimensions frozen from the independent sympy prototype of the same
// assembly (tests/oracles/harrison_oracle.py).
TEST(Harrison, ConditionSetAndRuleVariants) {
    EXPECT_EQ(dimension({1, 2, 3}, ConditionRule::proportional), 8u);
    EXPECT_EQ(dimension({1, 2, 3, 4, 5, 6, 7}, ConditionRule::proportional), 3u);
    EXPECT_EQ(dimension({1, 2, 3}, ConditionRule::span), 10u);
    EXPECT_EQ(dimension({1, 2, 3, 4, 5, 6, 7}, ConditionRule::paper), 3u);
}

TEST(Harrison, PaperRuleLosesTheGalileanBoost) {
    HarrisonOptions opt;
    opt.rule = ConditionRule::paper;
    auto basis = solve_system(assemble_harrison(kdv_ideal(), opt));
    auto v = paper_v();
    EXPECT_TRUE(same_field_span(basis.fields, {v[0], v[1], v[3]}));
}

TEST(Harrison, ModuloContactAdmitsSpuriousFields) {
    HarrisonOptions opt;
    opt.rule = ConditionRule::modulo_contact;
    auto basis = solve_system(assemble_harrison(kdv_ideal(), opt));
    EXPECT_GT(basis.fields.size(), 4u);
    auto dut = parse_field("u_t: 1", kdv_ideal().jet.chart());
    EXPECT_TRUE(verify_symmetry(dut, kdv_ideal(), ConditionRule::modulo_contact).pass());
    EXPECT_FALSE(verify_symmetry(dut, kdv_ideal()).pass());
}

TEST(Harrison, EmptyConditionSetLeavesFullAnsatz) {
    HarrisonOptions opt;
    opt.conditions = {};
    auto sys = assemble_harrison(kdv_ideal(), opt);
    EXPECT_EQ(sys.matrix.row_count(), 0u);
    EXPECT_EQ(solve_system(sys).fields.size(), 72u);
}

TEST(Harrison, FixedTranslationNeedsOnlyZeroMultipliers) {
    HarrisonOptions opt;
    opt.fixed_field = builtin::field("v1");
    auto sys = assemble_harrison(kdv_ideal(), opt);
    EXPECT_EQ(sys.n_field_params, 0u);
    auto basis = solve_system(sys);
    EXPECT_TRUE(basis.consistent);
    ASSERT_TRUE(basis.particular.has_value());
    EXPECT_TRUE(basis.particular->empty());
}

TEST(Harrison, FixedNonSymmetryIsInconsistent) {
    HarrisonOptions opt;
    opt.fixed_field = parse_field("u: 1", kdv_ideal().jet.chart());
    EXPECT_FALSE(solve_system(assemble_harrison(kdv_ideal(), opt)).consistent);
}

TEST(Harrison, UnknownCap) {
    HarrisonOptions opt;
    opt.degree_a = 3;
    opt.max_unknowns = 1000;
    EXPECT_THROW(assemble_harrison(kdv_ideal(), opt), Error);
    opt.conditions = {9};
    opt.max_unknowns = 100000;
    EXPECT_THROW(assemble_harrison(kdv_ideal(), opt), Error);
}

TEST(Harrison, RowProvenanceReproducesResiduals) {
    HarrisonOptions opt;
    opt.conditions = {1, 4, 7};
    auto sys = assemble_harrison(kdv_ideal(), opt);
    std::mt19937 rng(7);
    std::uniform_int_distribution<int> d(-5, 5);
    VectorQ x(sys.unknowns());
    for (auto& s : x) s = d(rng);
    std::map<std::string, const ParamForm*> by_source;
    for (const auto& [src, f] : sys.residuals) by_source[src] = &f;
    for (std::size_t r = 0; r < sys.matrix.row_count(); ++r) {
        Scalar lhs = 0;
        for (const auto& [k, c] : sys.matrix.row(r)) lhs += c * (k < x.size() ? x[k] : Scalar(1));
        const auto& tag = sys.provenance[r];
        Poly spec = by_source.at(tag.source)->component(tag.component).specialize(x);
        Scalar rhs = 0;
        for (const auto& [e, c] : spec.terms())
            if (e == tag.monomial) rhs = c;
        ASSERT_EQ(lhs, rhs) << "row " << r;
    }
}

TEST(Classical, KdvPointSymmetries) {
    const auto& pde = builtin::kdv3();
    auto basis = solve_system(assemble_classical(pde, 3, 2));
    EXPECT_EQ(basis.fields.size(), 4u);
    EXPECT_TRUE(same_field_span(basis.fields, fields({"X1", "X2", "X3", "X4"}, pde.jet.chart())));
    for (const auto& f : basis.fields) {
        auto pr = prolong(f, 3, pde.jet);
        EXPECT_TRUE(on_solution_reduce(pr.apply(RatFunc(pde.delta)), pde).vanishes);
    }
    auto deg1 = solve_system(assemble_classical(pde, 3, 1));
    EXPECT_TRUE(same_field_span(deg1.fields, basis.fields));
}

TEST(Classical, TrivialEquationTranslations) {
    JetSpec j({"t", "x"}, {"u"}, 1);
    PdeSpec pde("trivial", j, "u_x", "u_x");
    auto basis = solve_system(assemble_classical(pde, 1, 0));
    EXPECT_EQ(basis.fields.size(), 3u);
    EXPECT_TRUE(same_field_span(basis.fields, {parse_field("t: 1", j.chart()), parse_field("x: 1", j.chart()),
                                               parse_field("u: 1", j.chart())}));
}

TEST(Classical, ThirdOrderOde) {
    const auto& pde = builtin::ode_1_8();
    auto basis = solve_system(assemble_classical(pde, 3, 1));
    auto with_paper = basis.fields;
    for (const auto& f : fields({"ode8_X1", "ode8_X2"}, pde.jet.chart())) with_paper.push_back(f);
    EXPECT_TRUE(same_field_span(basis.fields, with_paper));
}

TEST(CrossOracle, HarrisonPointPartsMatchClassical) {
    auto harrison = solve_system(assemble_harrison(kdv_ideal()));
    const auto& pde = builtin::kdv3();
    std::vector<VectorFieldExpr> points;
    for (const auto& f : harrison.fields) {
        VectorFieldExpr p(pde.jet.chart());
        for (const auto& [i, c] : f.components())
            if (kdv_ideal().jet.is_base(i)) p.set(pde.jet.chart()->index(f.chart()->name(i)), rechart(c, pde.jet.chart()));
        points.push_back(p);
    }
    EXPECT_TRUE(same_field_span(points, solve_system(assemble_classical(pde, 3, 2)).fields));
}

TEST(VerifySymmetry, TranslationHasZeroWitnesses) {
    auto rep = verify_symmetry(builtin::field("v1"), kdv_ideal());
    ASSERT_EQ(rep.generators.size(), 7u);
    EXPECT_TRUE(rep.pass());
    for (const auto& g : rep.generators) {
        ASSERT_TRUE(g.lambda.has_value());
        EXPECT_TRUE(g.lambda->is_zero());
        ASSERT_TRUE(g.multipliers.has_value());
        for (const auto& f : *g.multipliers) EXPECT_TRUE(f.is_zero());
    }
}

TEST(VerifySymmetry, ScalingWitnesses) {
    auto rep = verify_symmetry(builtin::field("v4"), kdv_ideal());
    EXPECT_TRUE(rep.pass());
    const auto& c = kdv_ideal().jet.chart();
    EXPECT_EQ(*rep.generators[0].lambda, RatFunc::constant(c, -7));
    EXPECT_EQ(*rep.generators[1].lambda, RatFunc::constant(c, -5));
    EXPECT_EQ(*rep.generators[2].lambda, RatFunc::constant(c, -8));
}

TEST(VerifySymmetry, GalileanNeedsSpanMembership) {
    auto v3 = builtin::field("v3");
    EXPECT_TRUE(verify_symmetry(v3, kdv_ideal()).pass());
    auto paper = verify_symmetry(v3, kdv_ideal(), ConditionRule::paper);
    EXPECT_FALSE(paper.pass());
    EXPECT_FALSE(paper.generators[0].pass);
    EXPECT_TRUE(paper.generators[1].pass);
}

TEST(VerifySymmetry, NonSymmetryFails) {
    auto rep = verify_symmetry(parse_field("u: 1", kdv_ideal().jet.chart()), kdv_ideal());
    EXPECT_FALSE(rep.pass());
}
