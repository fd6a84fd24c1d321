#include <gtest/gtest.h>

#include "kdvsym/linalg.hpp"
#include "kdvsym/ratfunc.hpp"
#include "kdvsym/parser.hpp"

using namespace kdvsym;

namespace {

MatrixQ M(std::initializer_list<std::initializer_list<int>> rows) {
    std::vector<VectorQ> dense;
    std::size_t cols = 0;
    for (const auto& r : rows) {
        VectorQ v;
        for (int x : r) v.emplace_back(x);
        cols = v.size();
        dense.push_back(v);
    }
    return MatrixQ::from_dense(dense, cols);
}

VectorQ V(std::initializer_list<Scalar> xs) { return VectorQ(xs); }

}  // namespace

TEST(Rref, AlreadyReduced) {
    auto r = rref(M({{1, 1, 0}, {0, 0, 1}}));
    EXPECT_EQ(r.rank, 2u);
    EXPECT_EQ(r.pivots, (std::vector<std::size_t>{0, 2}));
    EXPECT_EQ(r.reduced, M({{1, 1, 0}, {0, 0, 1}}));
}

TEST(Rref, DependentRows) {
    auto r = rref(M({{2, 4}, {1, 2}}));
    EXPECT_EQ(r.rank, 1u);
    EXPECT_EQ(r.reduced.at(0, 0), 1);
    EXPECT_EQ(r.reduced.at(0, 1), 2);
    EXPECT_EQ(r.reduced.at(1, 0), 0);
    EXPECT_EQ(r.reduced.at(1, 1), 0);
}

TEST(Rref, ZeroMatrix) {
    auto r = rref(M({{0, 0}, {0, 0}}));
    EXPECT_EQ(r.rank, 0u);
    EXPECT_TRUE(r.pivots.empty());
}

TEST(Rref, RationalPivots) {
    auto r = rref(M({{3, 1}, {1, 2}}));
    EXPECT_EQ(r.rank, 2u);
    EXPECT_EQ(r.reduced.at(0, 0), 1);
    EXPECT_EQ(r.reduced.at(0, 1), 0);
}

TEST(Nullspace, CanonicalBasis) {
    auto ns = nullspace(M({{1, 1, 0}, {0, 0, 1}}));
    ASSERT_EQ(ns.size(), 1u);
    EXPECT_EQ(ns[0], V({-1, 1, 0}));
    EXPECT_TRUE(nullspace(M({{1, 0}, {0, 1}})).empty());
    EXPECT_EQ(nullspace(M({{0, 0, 0}})).size(), 3u);
}

TEST(Nullspace, FractionalEntries) {
    auto ns = nullspace(M({{2, 3, 0}}));
    ASSERT_EQ(ns.size(), 2u);
    EXPECT_EQ(ns[0], V({Scalar(-3, 2), 1, 0}));
    EXPECT_EQ(ns[1], V({0, 0, 1}));
}

TEST(SpanEqual, Examples) {
    EXPECT_TRUE(span_equal({V({1, 0}), V({0, 1})}, {V({1, 1}), V({1, -1})}));
    EXPECT_FALSE(span_equal({V({1, 0})}, {V({0, 1})}));
    EXPECT_TRUE(span_equal({V({2, 4}), V({1, 2})}, {V({-1, -2})}));
    EXPECT_THROW(span_equal({V({1, 0})}, {V({1, 0, 0})}), Error);
}

TEST(SolveInSpan, Coordinates) {
    auto x = solve_in_span({V({1, 0, 1}), V({0, 1, 1})}, V({2, 3, 5}));
    ASSERT_TRUE(x.has_value());
    EXPECT_EQ(*x, V({2, 3}));
    EXPECT_FALSE(solve_in_span({V({1, 0, 1})}, V({0, 1, 0})).has_value());
}

TEST(RankOf, Vectors) {
    EXPECT_EQ(rank_of({V({1, 2}), V({2, 4})}, 2), 1u);
    EXPECT_EQ(rank_of({}, 3), 0u);
}

TEST(FieldSolve, RationalFunctionCoefficients) {
    auto c = make_chart({"x"});
    auto R = [&](const char* s) { return parse_ratfunc(s, c); };
    RatFunc zero = RatFunc::constant(c, 0);
    auto is_zero = [](const RatFunc& f) { return f.is_zero(); };
    // a*(1, x) + b*(x, 1) = (2x, 1 + x^2)  ->  a = x, b = 1
    auto sol = field_solve<RatFunc>({{R("1"), R("x")}, {R("x"), R("1")}}, {R("2*x"), R("1 + x^2")}, zero, is_zero);
    ASSERT_TRUE(sol.has_value());
    EXPECT_EQ((*sol)[0], R("x"));
    EXPECT_EQ((*sol)[1], R("1"));
    auto none = field_solve<RatFunc>({{R("1"), R("x")}}, {R("1"), R("1")}, zero, is_zero);
    EXPECT_FALSE(none.has_value());
}
