#include <gtest/gtest.h>

#include "kdvsym/parampoly.hpp"
#include "kdvsym/parser.hpp"

using namespace kdvsym;

namespace {

ChartPtr kdv_chart() {
    return make_chart({"t", "x", "u", "u_t", "u_x", "u_tt", "u_tx", "u_xx"});
}

Poly P(const char* s, const ChartPtr& c) { return parse_poly(s, c); }

}  // namespace

TEST(PolyArith, Distributivity) {
    auto c = kdv_chart();
    EXPECT_EQ(P("u_x", c) * P("u_t + u", c), P("u_x*u_t + u*u_x", c));
    EXPECT_EQ(P("u - 1", c) * P("u + 1", c), P("u^2 - 1", c));
}

TEST(PolyArith, CancellationLeavesAlphaOneCoefficient) {
    auto c = kdv_chart();
    Poly sum = P("u_x*u_tt - u_t*u_tx", c) + P("u_t*u_tx", c);
    EXPECT_EQ(sum, P("u_x*u_tt", c));
    EXPECT_EQ(sum.size(), 1u);
}

TEST(PolyArith, ChartMismatchThrows) {
    auto a = P("u", kdv_chart());
    auto b = P("x", make_chart({"x", "y"}));
    EXPECT_THROW(a + b, ChartMismatch);
    EXPECT_THROW(a * b, ChartMismatch);
}

TEST(PolyPartial, Examples) {
    auto c = kdv_chart();
    EXPECT_EQ(P("u*u_x + u_t", c).partial("u_x"), P("u", c));
    EXPECT_EQ(P("t*u_x", c).partial("t"), P("u_x", c));
    EXPECT_EQ(P("u_x*u_tt - u_t*u_tx", c).partial("u_tt"), P("u_x", c));
    EXPECT_THROW(P("u", c).partial("w"), UnknownCoordinate);
}

TEST(RatFunc, SemanticEquality) {
    auto c = make_chart({"u", "u_t", "u_x"});
    EXPECT_TRUE(ratfunc_equal(parse_ratfunc("(u^2 - 1)/(u - 1)", c), parse_ratfunc("u + 1", c)));
    EXPECT_TRUE(ratfunc_equal(parse_ratfunc("u_x", c), parse_ratfunc("(u_x*u)/u", c)));
    EXPECT_FALSE(ratfunc_equal(parse_ratfunc("1/u", c), parse_ratfunc("1/u_t", c)));
}

TEST(RatFunc, ZeroDenominatorRejected) {
    auto c = make_chart({"u"});
    EXPECT_THROW(RatFunc(P("u", c), Poly(c)), Error);
    EXPECT_THROW(parse_ratfunc("u/(u - u)", c), ParseError);
}

TEST(RatFunc, QuotientRule) {
    auto c = make_chart({"x", "y"});
    RatFunc f = parse_ratfunc("x/y", c);
    EXPECT_EQ(f.partial("y"), parse_ratfunc("-x/y^2", c));
    EXPECT_EQ(f.partial("x"), parse_ratfunc("1/y", c));
}

TEST(ParsePoly, KdvEquation) {
    auto c = make_chart({"t", "x", "u", "u_t", "u_x", "u_xxx"});
    Poly delta = P("u_xxx + u*u_x + u_t", c);
    EXPECT_EQ(delta.size(), 3u);
    EXPECT_EQ(P(delta.to_string().c_str(), c), delta);
}

TEST(ParsePoly, ZeroAndRationalCoefficients) {
    auto c = kdv_chart();
    EXPECT_TRUE(P("0", c).is_zero());
    Poly p = P("(1/3)*x", c);
    ASSERT_EQ(p.size(), 1u);
    EXPECT_EQ(p.terms().begin()->second, Scalar(1, 3));
    EXPECT_EQ(p.to_string(), "1/3*x");
    EXPECT_EQ(P("x/3", c), p);
    EXPECT_EQ(P("0.5*x", c), P("1/2*x", c));
}

TEST(ParsePoly, Errors) {
    auto c = kdv_chart();
    try {
        P("u + * 2", c);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.position(), 4u);
    }
    EXPECT_THROW(P("u + w", c), ParseError);
    EXPECT_THROW(P("u/u_x", c), ParseError);
    EXPECT_THROW(P("u^(-1)", c), ParseError);
    EXPECT_THROW(P("(u + 1", c), ParseError);
    EXPECT_THROW(P("sin(u)", c), ParseError);
}

TEST(PolyRender, DescendingGradedOrder) {
    auto c = kdv_chart();
    EXPECT_EQ(P("-u_t*u_tx + u_x*u_tt", c).to_string(), "u_x*u_tt - u_t*u_tx");
    EXPECT_EQ(P("u_tx^2 - u_tt*u_xx", c).to_string(), "u_tx^2 - u_tt*u_xx");
    EXPECT_EQ(P("1 - u^2", c).to_string(), "-u^2 + 1");
}

TEST(DivideExact, PrincipalIdealMembership) {
    auto c = make_chart({"x", "y"});
    auto q = divide_exact(P("x^2 - y^2", c), P("x + y", c));
    ASSERT_TRUE(q.has_value());
    EXPECT_EQ(*q, P("x - y", c));
    EXPECT_FALSE(divide_exact(P("x^2 + y", c), P("x + y", c)).has_value());
}

TEST(ParamPoly, SpecializeAndAffineRows) {
    auto c = make_chart({"t", "x"});
    ParamRegistry reg;
    ParamPoly a = make_ansatz(c, reg, "A", {0, 1}, 1);
    EXPECT_EQ(reg.size(), 3u);
    std::vector<Scalar> vals = {Scalar(2), Scalar(-1), Scalar(1, 3)};
    Poly s = a.specialize(vals);
    // ansatz order follows the monomial order: 1, t, x
    EXPECT_EQ(s, P("2 - t + x/3", c));
    auto rows = (a * P("x", c)).by_monomial();
    EXPECT_EQ(rows.size(), 3u);
}

TEST(ParamPoly, NonlinearProductRejected) {
    auto c = make_chart({"t"});
    ParamRegistry reg;
    ParamPoly a = make_ansatz(c, reg, "a", {0}, 1);
    ParamPoly b = make_ansatz(c, reg, "b", {0}, 1);
    EXPECT_THROW(a * b, NonlinearParameters);
    EXPECT_NO_THROW(a * ParamPoly(P("t", c)));
}
