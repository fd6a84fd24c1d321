// Randomized identities with a fixed seed per property; every property runs kCases cases.
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "kdvsym/builtins.hpp"
#include "kdvsym/detsolve.hpp"
#include "kdvsym/expr.hpp"
#include "kdvsym/integrable.hpp"
#include "kdvsym/liealg.hpp"
#include "random_gen.hpp"

using namespace kdvsym;
using kdvsym::proptest::Gen;

namespace {

constexpr int kCases = 120;

ChartPtr xyzw() {
    static const ChartPtr c = make_chart({"x", "y", "z", "w"});
    return c;
}

ChartPtr xyz() {
    static const ChartPtr c = make_chart({"x", "y", "z"});
    return c;
}

int sign_pow(unsigned p) { return p % 2 == 0 ? 1 : -1; }

DiffForm scaled(const DiffForm& a, int s) { return s > 0 ? a : -a; }

}  // namespace

// ------------------------------------------------------------------ symkernel

TEST(Property, PolyRingAxioms) {
    Gen g(101);
    for (int k = 0; k < kCases; ++k) {
        Poly a = g.poly(xyz(), 3), b = g.poly(xyz(), 3), c = g.poly(xyz(), 3);
        EXPECT_EQ(a + b, b + a);
        EXPECT_EQ(a * b, b * a);
        EXPECT_EQ((a + b) + c, a + (b + c));
        EXPECT_EQ((a * b) * c, a * (b * c));
        EXPECT_EQ(a * (b + c), a * b + a * c);
        EXPECT_TRUE((a - a).is_zero());
        EXPECT_EQ(a * Poly::constant(xyz(), 1), a);
    }
}

TEST(Property, PartialDerivativesCommuteAndObeyLeibniz) {
    Gen g(102);
    for (int k = 0; k < kCases; ++k) {
        Poly a = g.poly(xyz(), 3), b = g.poly(xyz(), 3);
        std::size_t i = static_cast<std::size_t>(g.integer(0, 2)), j = static_cast<std::size_t>(g.integer(0, 2));
        EXPECT_EQ(a.partial(i).partial(j), a.partial(j).partial(i));
        EXPECT_EQ((a * b).partial(i), a.partial(i) * b + a * b.partial(i));
    }
}

TEST(Property, PolyAndRatFuncParserRoundTrip) {
    Gen g(103);
    for (int k = 0; k < kCases; ++k) {
        Poly a = g.poly(xyz(), 3, 5, 4);
        EXPECT_EQ(parse_poly(a.to_string(), xyz()), a) << a.to_string();
        Poly d = g.poly(xyz(), 3, 3, 2);
        if (d.is_zero()) d = Poly::constant(xyz(), 2);
        RatFunc r(a, d);
        EXPECT_EQ(parse_ratfunc(r.to_string(), xyz()), r) << r.to_string();
    }
}

TEST(Property, ParamPolySpecializationIsAHomomorphism) {
    Gen g(104);
    for (int k = 0; k < kCases; ++k) {
        ParamRegistry reg;
        ParamPoly a = make_ansatz(xyz(), reg, "a", {0, 1, 2}, 2);
        std::vector<Scalar> values(reg.size());
        for (auto& v : values) v = g.scalar();
        Poly m = g.poly(xyz(), 3, 3, 2);
        std::size_t i = static_cast<std::size_t>(g.integer(0, 2));
        EXPECT_EQ((a * m).specialize(values), a.specialize(values) * m);
        EXPECT_EQ(a.partial(i).specialize(values), a.specialize(values).partial(i));
        EXPECT_EQ((a + a).specialize(values), a.specialize(values) * Scalar(2));
    }
}

// ------------------------------------------------------------------ exterior

TEST(Property, WedgeIsGradedCommutativeAndAssociative) {
    Gen g(201);
    for (int k = 0; k < kCases; ++k) {
        unsigned p = static_cast<unsigned>(g.integer(0, 2)), q = static_cast<unsigned>(g.integer(0, 2));
        DiffForm a = g.form(xyzw(), p), b = g.form(xyzw(), q), c = g.form(xyzw(), 1);
        EXPECT_EQ(wedge(a, b), scaled(wedge(b, a), sign_pow(p * q)));
        EXPECT_EQ(wedge(wedge(a, b), c), wedge(a, wedge(b, c)));
        DiffForm one = g.form(xyzw(), 1);
        EXPECT_TRUE(wedge(one, one).is_zero());
    }
}

TEST(Property, ExteriorDerivativeSquaresToZero) {
    Gen g(202);
    for (int k = 0; k < kCases; ++k) {
        unsigned p = static_cast<unsigned>(g.integer(0, 2));
        DiffForm a = g.form(xyzw(), p);
        EXPECT_TRUE(ext_d(ext_d(a)).is_zero());
    }
}

TEST(Property, ExteriorDerivativeLeibniz) {
    Gen g(203);
    for (int k = 0; k < kCases; ++k) {
        unsigned p = static_cast<unsigned>(g.integer(0, 2)), q = static_cast<unsigned>(g.integer(0, 1));
        DiffForm a = g.form(xyzw(), p), b = g.form(xyzw(), q);
        EXPECT_EQ(ext_d(wedge(a, b)), wedge(ext_d(a), b) + scaled(wedge(a, ext_d(b)), sign_pow(p)));
    }
}

TEST(Property, CartanFormulaMatchesComponentTransport) {
    Gen g(204);
    for (int k = 0; k < kCases; ++k) {
        unsigned p = static_cast<unsigned>(g.integer(0, 3));
        DiffForm a = g.form(xyzw(), p);
        VectorFieldExpr v = g.field(xyzw(), 4);
        EXPECT_EQ(lie_derivative(v, a), lie_derivative_transport(v, a));
        EXPECT_EQ(ext_d(lie_derivative(v, a)), lie_derivative(v, ext_d(a)));
    }
}

TEST(Property, InteriorProductsAnticommute) {
    Gen g(205);
    for (int k = 0; k < kCases; ++k) {
        DiffForm a = g.form(xyzw(), static_cast<unsigned>(g.integer(2, 3)));
        VectorFieldExpr v = g.field(xyzw(), 4), w = g.field(xyzw(), 4);
        EXPECT_EQ(interior(v, interior(w, a)), -interior(w, interior(v, a)));
        EXPECT_TRUE(interior(v, interior(v, a)).is_zero());
    }
}

TEST(Property, FormParserRoundTrip) {
    Gen g(206);
    for (int checked = 0; checked < kCases;) {
        DiffForm a = g.form(xyzw(), static_cast<unsigned>(g.integer(1, 3)));
        if (a.is_zero()) continue;  // "0" carries no grade
        ++checked;
        EXPECT_EQ(parse_form(render_form(a), xyzw()), a) << render_form(a);
    }
}

// ------------------------------------------------------------------ jetspace

TEST(Property, TotalDerivativesCommute) {
    Gen g(301);
    const JetSpec& jet = builtin::kdv_jet3();
    const ChartPtr& chart = jet.chart();
    for (int k = 0; k < kCases; ++k) {
        // order <= 1 so both second total derivatives stay on the chart
        Poly f = g.poly(chart, 5, 4, 3);
        Poly dtx = total_derivative(total_derivative(f, "x", jet), "t", jet);
        Poly dxt = total_derivative(total_derivative(f, "t", jet), "x", jet);
        EXPECT_EQ(dtx, dxt);
    }
}

TEST(Property, ProlongationIsALieAlgebraMorphism) {
    Gen g(302);
    const JetSpec& jet = builtin::kdv_jet2();
    const ChartPtr& chart = jet.chart();
    for (int k = 0; k < kCases; ++k) {
        VectorFieldExpr a = g.field(chart, 3, 1), b = g.field(chart, 3, 1);
        EXPECT_EQ(prolong(bracket(a, b), 2, jet), bracket(prolong(a, 2, jet), prolong(b, 2, jet)));
    }
}

TEST(Property, ProlongationPreservesTheContactIdeal) {
    Gen g(303);
    const JetSpec& jet = builtin::kdv_jet2();
    auto thetas = contact_forms(jet);
    for (int k = 0; k < kCases; ++k) {
        VectorFieldExpr pr = prolong(g.field(jet.chart(), 3, 2), 2, jet);
        // L_pr theta is a combination of the thetas of the same order or lower
        for (std::size_t i = 0; i < 1; ++i) {
            DiffForm lie = lie_derivative(pr, thetas[i]);
            EXPECT_TRUE(detail::ideal_coordinates(lie, thetas).has_value());
        }
    }
}

// ------------------------------------------------------------------ ratlinalg

TEST(Property, NullspaceIsExactAndRankNullity) {
    Gen g(401);
    for (int k = 0; k < kCases; ++k) {
        std::size_t rows = static_cast<std::size_t>(g.integer(1, 6)), cols = static_cast<std::size_t>(g.integer(1, 7));
        std::vector<VectorQ> dense;
        for (std::size_t r = 0; r < rows; ++r) dense.push_back(g.vector(cols));
        if (g.coin(0.3) && rows > 1) dense[rows - 1] = dense[0];  // force a dependent row
        MatrixQ m = MatrixQ::from_dense(dense, cols);
        auto ns = nullspace(m);
        for (const auto& v : ns)
            for (const auto& s : m.multiply(v)) EXPECT_EQ(s, 0);
        auto r = rref(m);
        EXPECT_EQ(r.rank + ns.size(), cols);
        EXPECT_EQ(rank_of(ns, cols), ns.size());
        EXPECT_EQ(rank_of(dense, cols), r.rank);
    }
}

TEST(Property, RrefIsIdempotent) {
    Gen g(402);
    for (int k = 0; k < kCases; ++k) {
        std::size_t rows = static_cast<std::size_t>(g.integer(1, 5)), cols = static_cast<std::size_t>(g.integer(1, 6));
        std::vector<VectorQ> dense;
        for (std::size_t r = 0; r < rows; ++r) dense.push_back(g.vector(cols));
        auto once = rref(MatrixQ::from_dense(dense, cols));
        auto twice = rref(once.reduced);
        ASSERT_EQ(once.reduced.row_count(), twice.reduced.row_count());
        EXPECT_EQ(once.pivots, twice.pivots);
        for (std::size_t r = 0; r < once.reduced.row_count(); ++r)
            for (std::size_t c = 0; c < cols; ++c) EXPECT_EQ(once.reduced.at(r, c), twice.reduced.at(r, c));
    }
}

TEST(Property, SolveInSpanReconstructs) {
    Gen g(403);
    for (int k = 0; k < kCases; ++k) {
        std::size_t n = static_cast<std::size_t>(g.integer(2, 6));
        std::vector<VectorQ> basis;
        for (int b = 0; b < g.integer(1, 4); ++b) basis.push_back(g.vector(n));
        VectorQ target(n, 0);
        for (const auto& b : basis) {
            Scalar c = g.scalar();
            for (std::size_t i = 0; i < n; ++i) target[i] += c * b[i];
        }
        auto sol = solve_in_span(basis, target);
        ASSERT_TRUE(sol.has_value());
        VectorQ back(n, 0);
        for (std::size_t b = 0; b < basis.size(); ++b)
            for (std::size_t i = 0; i < n; ++i) back[i] += (*sol)[b] * basis[b][i];
        EXPECT_EQ(back, target);
    }
}

// ------------------------------------------------------------------ liealg

TEST(Property, BracketJacobiAndAntisymmetry) {
    Gen g(501);
    for (int k = 0; k < kCases; ++k) {
        VectorFieldExpr a = g.field(xyz(), 3), b = g.field(xyz(), 3), c = g.field(xyz(), 3);
        EXPECT_TRUE((bracket(a, b) + bracket(b, a)).is_zero());
        auto jac = bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
        EXPECT_TRUE(jac.is_zero());
        RatFunc f(g.poly(xyz(), 3));
        EXPECT_EQ(bracket(a, b).apply(f), a.apply(b.apply(f)) - b.apply(a.apply(f)));
    }
}

TEST(Property, RandomStructureConstantsSatisfyJacobi) {
    Gen g(502);
    int checked = 0;
    for (int k = 0; k < kCases; ++k) {
        // closed span: affine fields on the line span at most {d/dx, x d/dx, x^2 d/dx}
        std::vector<VectorFieldExpr> basis;
        ChartPtr line = make_chart({"x"});
        for (int e = 0; e < 3; ++e)
            basis.push_back(parse_field("x: " + to_string(g.nonzero_scalar()) + "*x^" + std::to_string(e), line));
        auto table = structure_constants(basis);
        EXPECT_TRUE(jacobi_check(table));
        auto series = derived_series(table);
        EXPECT_EQ(series.dims, (std::vector<std::size_t>{3, 3}));
        ++checked;
    }
    EXPECT_EQ(checked, kCases);
}

// ------------------------------------------------------------------ closedform

TEST(Property, ExprDerivativeMatchesFiniteDifferences) {
    Gen g(601);
    const double h = 1e-5;
    for (int k = 0; k < kCases; ++k) {
        Expr e = g.expr(3);
        Expr de = e.diff("x");
        double x = g.real(-1, 1);
        double fd = (e.eval({{"x", x + h}}) - e.eval({{"x", x - h}})) / (2 * h);
        double exact = de.eval({{"x", x}});
        EXPECT_LE(std::abs(fd - exact), 1e-6 * std::max(1.0, std::abs(exact))) << e << " at " << x;
    }
}

TEST(Property, ExprParserRoundTrip) {
    Gen g(602);
    for (int k = 0; k < kCases; ++k) {
        Expr e = g.expr(3);
        Expr back = parse_expr(e.to_string());
        EXPECT_EQ(back, e) << e.to_string() << " vs " << back.to_string();
    }
}

TEST(Property, ExprSimplificationPreservesValues) {
    Gen g(603);
    for (int k = 0; k < kCases; ++k) {
        Expr a = g.expr(2), b = g.expr(2);
        double x = g.real(-1, 1);
        std::map<std::string, double> env{{"x", x}};
        double va = a.eval(env), vb = b.eval(env);
        EXPECT_NEAR((a + b).eval(env), va + vb, 1e-9 * (1 + std::abs(va) + std::abs(vb)));
        EXPECT_NEAR((a * b).eval(env), va * vb, 1e-9 * (1 + std::abs(va * vb)));
        EXPECT_NEAR((a - a).eval(env), 0.0, 1e-12);
    }
}

TEST(Property, SolitonFlowsStaySolutions) {
    Gen g(604);
    Grid grid;
    grid.ts = {-1, 0, 1};
    grid.xs = {-3, -1, 0, 1, 3};
    for (int k = 0; k < kCases; ++k) {
        Scalar c(g.integer(1, 9), g.integer(1, 2));
        Expr u = soliton(Expr(c), Expr(Scalar(g.integer(-2, 2), 2))).u;
        Expr s(Scalar(g.integer(-4, 4), 4));
        Flow f = static_cast<Flow>(g.integer(0, 3));
        EXPECT_LT(residual_numeric(apply_flow(u, f, s), grid).max_abs, 1e-7);
    }
}

// ------------------------------------------------------------------ integrable

TEST(Property, FirstIntegralOfExactFormIsPathIndependent) {
    Gen g(701);
    ChartPtr xy = make_chart({"x", "y"});
    for (int k = 0; k < kCases; ++k) {
        Poly f = g.poly(xy, 2, 4, 3);
        DiffForm df = ext_d(DiffForm::function(xy, RatFunc(f)));
        if (df.is_zero()) continue;
        FirstIntegralSpec spec{to_expr_form(df), {g.real(-1, 1), g.real(-1, 1)}, {}, 1e-12};
        std::vector<double> p{g.real(-1, 1), g.real(-1, 1)};
        double direct = first_integral_numeric(spec, p);
        FirstIntegralSpec detour = spec;
        detour.waypoints = {{g.real(-1, 1), g.real(-1, 1)}, {g.real(-1, 1), g.real(-1, 1)}};
        EXPECT_NEAR(first_integral_numeric(detour, p), direct, 1e-9);
        std::array<double, 2> a{p[0], p[1]}, b{spec.base[0], spec.base[1]};
        double expect = f.evaluate<double>(a) - f.evaluate<double>(b);
        EXPECT_NEAR(direct, expect, 1e-9 * (1 + std::abs(expect)));
    }
}

TEST(Property, OneFormsOnThePlaneAreIntegrable) {
    Gen g(702);
    ChartPtr xy = make_chart({"x", "y"});
    for (int k = 0; k < kCases; ++k) {
        Poly f = g.poly(xy, 2);
        DiffForm w = DiffForm::differential(xy, 1) - RatFunc(f) * DiffForm::differential(xy, 0);
        EXPECT_TRUE(frobenius_1form(w).integrable);
        DiffForm h = RatFunc(g.poly(xy, 2)) * w;
        EXPECT_TRUE(frobenius_1form(h).integrable);
    }
}
