#include <gtest/gtest.h>

#include "cline/error.hpp"
#include "cline/line.hpp"
#include "cline/rational.hpp"
#include "cline/term.hpp"

using namespace cline;

namespace {

LinePoint P(const char* s) { return parse_point(s); }

std::vector<Term> corpus()
{
    return {
        Term::single(),
        Term::chain(4),
        parse_term("(omega-up single single)"),
        parse_term("(rev (omega-up single single))"),
        parse_term("(concat (chain 2) (omega-up single single) single)"),
        term_b(),
        term_b_n(2),
        term_b_n(3),
        parse_term("(ordinal w^2)"),
        parse_term("(ordinal w^2.2+3)"),
        term_double(parse_term("(ordinal w)")),
        parse_term("(omega-up (omega-up single (chain 2)) (chain 2))"),
        parse_term("(lexsum (chain 3) :default (omega-up single single) :at i1 single)"),
        term_bigode_l(),
    };
}

// Value of a point of B: c_k -> -1/(k+1), T.T -> 0, T.c_k -> 1/(k+1).
Rational b_value(const LinePoint& p)
{
    const auto& s = p.steps();
    if (s[0].kind == StepKind::Copy)
        return Rational(-1, s[0].n + 1);
    if (s[1].kind == StepKind::Top)
        return 0;
    return Rational(1, s[1].n + 1);
}

}  // namespace

TEST(Line, CompareExamples)
{
    Term w = parse_term("(omega-up single single)");
    EXPECT_TRUE(compare(w, P("c2"), P("c5")) < 0);
    Term r = parse_term("(rev (chain 3))");
    EXPECT_TRUE(compare(r, P("i0"), P("i2")) > 0);
    Term b2 = term_b_n(2);
    EXPECT_TRUE(compare(b2, P("L(c0).c0"), P("L(c0).T.T")) < 0);
}

// Lexicographic order of value pairs on a sample of B_2 as the oracle.
TEST(Line, B2OrderMatchesLexicographicOracle)
{
    Term b2 = term_b_n(2);
    auto pts = enumerate(b2, 80);
    ASSERT_GT(pts.size(), 20u);
    auto key = [](const LinePoint& p) {
        LinePoint base = *p.steps()[0].base;
        Rational bv = b_value(base);
        Rational fv = p.size() > 1 ? b_value(p.suffix(1)) : Rational(0);
        return std::pair<Rational, Rational>(bv, fv);
    };
    for (const auto& a : pts)
        for (const auto& b : pts) {
            auto ka = key(a);
            auto kb = key(b);
            int want = ka < kb ? -1 : (kb < ka ? 1 : 0);
            auto got = compare(b2, a, b);
            EXPECT_EQ(got < 0 ? -1 : (got > 0 ? 1 : 0), want) << a.to_string() << " " << b.to_string();
        }
}

TEST(Line, MinMaxExamples)
{
    Term c4 = Term::chain(4);
    EXPECT_EQ(min_point(c4), P("i0"));
    EXPECT_EQ(max_point(c4), P("i3"));
    Term w = parse_term("(omega-up single single)");
    EXPECT_EQ(min_point(w), P("c0"));
    EXPECT_EQ(max_point(w), P("T"));
    Term rw = parse_term("(rev (omega-up single single))");
    EXPECT_EQ(min_point(rw), P("T"));
    EXPECT_EQ(max_point(rw), P("c0"));
}

TEST(Line, NeighborExamples)
{
    Term w = parse_term("(ordinal w)");
    LinePoint five = ordinal_point(w, Ordinal::finite(5));
    Neighbor r = right_neighbor(w, five);
    ASSERT_EQ(r.kind, Neighbor::Kind::Point);
    EXPECT_EQ(point_ordinal(w, r.point), Ordinal::finite(6));
    EXPECT_EQ(left_neighbor(w, ordinal_point(w, Ordinal::omega())).kind, Neighbor::Kind::Limit);
    Term b = term_b();
    EXPECT_EQ(left_neighbor(b, b_zero()).kind, Neighbor::Kind::Limit);
    EXPECT_EQ(right_neighbor(b, b_zero()).kind, Neighbor::Kind::Limit);
}

TEST(Line, ClassifyExamples)
{
    Term w = parse_term("(ordinal w)");
    EXPECT_EQ(classify(w, ordinal_point(w, Ordinal::omega())), PointClass::LeftLimit);
    EXPECT_EQ(classify(term_b(), b_zero()), PointClass::TwoSidedLimit);
    EXPECT_EQ(classify(Term::chain(2), P("i0")), PointClass::Isolated);
}

TEST(Line, ClopenExamples)
{
    Term w = parse_term("(ordinal w)");
    auto o = [&](std::uint64_t n) { return ordinal_point(w, Ordinal::finite(n)); };
    LinePoint top = ordinal_point(w, Ordinal::omega());
    EXPECT_TRUE(is_clopen_interval(w, o(0), o(5)));
    EXPECT_TRUE(is_clopen_interval(w, o(0), top));
    EXPECT_TRUE(is_clopen_interval(w, o(3), o(9)));
    Term w2 = parse_term("(ordinal w^2)");
    EXPECT_TRUE(is_clopen_interval(w2, ordinal_point(w2, Ordinal()), ordinal_point(w2, Ordinal::omega())));
    EXPECT_FALSE(is_clopen_interval(w2, ordinal_point(w2, Ordinal::power(1, 2)), ordinal_point(w2, Ordinal::power(2))));
    EXPECT_FALSE(is_clopen_interval(w2, ordinal_point(w2, Ordinal::omega()), ordinal_point(w2, Ordinal::power(2))));
}

TEST(Line, FindJumpExamples)
{
    Term w = parse_term("(ordinal w)");
    Jump j = find_jump_in(w, ordinal_point(w, Ordinal()), ordinal_point(w, Ordinal::omega()));
    EXPECT_EQ(point_ordinal(w, j.left), Ordinal());
    EXPECT_EQ(point_ordinal(w, j.right), Ordinal::finite(1));
    Term b = term_b();
    Jump jb = find_jump_in(b, P("c0"), P("T.c0"));
    EXPECT_EQ(jb.left, P("c0"));
    EXPECT_EQ(jb.right, P("c1"));
    Jump jc = find_jump_in(Term::chain(2), P("i0"), P("i1"));
    EXPECT_EQ(jc.left, P("i0"));
    EXPECT_EQ(jc.right, P("i1"));
}

TEST(Line, EnumerateExamples)
{
    EXPECT_EQ(enumerate(Term::chain(3), 10).size(), 3u);
    Term w = parse_term("(ordinal w)");
    std::vector<Ordinal> got;
    for (const auto& p : enumerate(w, 5))
        got.push_back(point_ordinal(w, p));
    std::vector<Ordinal> want{Ordinal::finite(0), Ordinal::finite(1), Ordinal::finite(2), Ordinal::finite(3),
                              Ordinal::omega()};
    EXPECT_EQ(got, want);
    EXPECT_EQ(enumerate(w, 5).size(), enumerate(w, 5).size());
    Term lx = parse_term("(lexsum (chain 3) :default (omega-up single single) :at i1 single)");
    auto pts = enumerate(lx, 40);
    EXPECT_NE(std::find(pts.begin(), pts.end(), P("L(i1)")), pts.end());
}

TEST(Line, OrderIsTotalOnCorpus)
{
    for (const auto& t : corpus()) {
        auto pts = enumerate(t, 30);
        for (const auto& a : pts)
            for (const auto& b : pts) {
                auto ab = compare(t, a, b);
                EXPECT_EQ(ab == 0, a == b);
                EXPECT_EQ(ab < 0, compare(t, b, a) > 0);
                for (const auto& c : pts)
                    if (ab < 0 && less(t, b, c))
                        EXPECT_TRUE(less(t, a, c)) << t.to_sexpr();
            }
    }
}

TEST(Line, EnumerateIsAscendingWithEndpoints)
{
    for (const auto& t : corpus()) {
        auto pts = enumerate(t, 50);
        ASSERT_FALSE(pts.empty());
        EXPECT_EQ(pts.front(), min_point(t));
        if (pts.size() >= 2)
            EXPECT_EQ(pts.back(), max_point(t));
        for (std::size_t i = 1; i < pts.size(); ++i)
            EXPECT_TRUE(less(t, pts[i - 1], pts[i])) << t.to_sexpr();
        for (const auto& p : pts)
            EXPECT_TRUE(is_valid_point(t, p));
    }
}

TEST(Line, EveryIntervalHasAJump)
{
    for (const auto& t : corpus()) {
        auto pts = enumerate(t, 16);
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t k = i + 1; k < pts.size(); ++k) {
                Jump j = find_jump_in(t, pts[i], pts[k]);
                EXPECT_TRUE(compare(t, pts[i], j.left) <= 0);
                EXPECT_TRUE(less(t, j.left, j.right));
                EXPECT_TRUE(compare(t, j.right, pts[k]) <= 0);
                Neighbor r = right_neighbor(t, j.left);
                ASSERT_EQ(r.kind, Neighbor::Kind::Point) << t.to_sexpr() << " " << j.left.to_string();
                EXPECT_EQ(r.point, j.right);
            }
    }
}

TEST(Line, ClassifyMatchesNeighbors)
{
    for (const auto& t : corpus()) {
        LinePoint lo = min_point(t);
        LinePoint hi = max_point(t);
        for (const auto& p : enumerate(t, 40)) {
            PointClass c = classify(t, p);
            bool left = c == PointClass::LeftLimit || c == PointClass::TwoSidedLimit;
            bool right = c == PointClass::RightLimit || c == PointClass::TwoSidedLimit;
            EXPECT_EQ(left, !(p == lo) && left_neighbor(t, p).kind != Neighbor::Kind::Point);
            EXPECT_EQ(right, !(p == hi) && right_neighbor(t, p).kind != Neighbor::Kind::Point);
            Neighbor r = right_neighbor(t, p);
            if (r.kind == Neighbor::Kind::Point) {
                Neighbor back = left_neighbor(t, r.point);
                ASSERT_EQ(back.kind, Neighbor::Kind::Point);
                EXPECT_EQ(back.point, p);
            }
        }
    }
}

TEST(Line, OrdinalSegmentMatchesOrdinalOrder)
{
    for (const char* a : {"w", "w^2", "w^2.2+w+3", "w^3"}) {
        Term seg = parse_term(std::string("(ordinal ") + a + ")");
        auto pts = enumerate(seg, 200);
        for (std::size_t i = 1; i < pts.size(); ++i)
            EXPECT_LT(point_ordinal(seg, pts[i - 1]), point_ordinal(seg, pts[i]));
        for (const auto& p : pts)
            EXPECT_EQ(ordinal_point(seg, point_ordinal(seg, p)), p);
    }
}

TEST(Line, TermPrintParseRoundTrip)
{
    for (const auto& t : corpus())
        EXPECT_EQ(parse_term(t.to_sexpr()), t) << t.to_sexpr();
    EXPECT_THROW(parse_term("(omega-up single"), ParseError);
    EXPECT_THROW(parse_term("(frob single)"), ParseError);
}

TEST(Line, InvalidPointsAreRejected)
{
    Term c = Term::chain(3);
    EXPECT_THROW(validate_point(c, P("i3")), ValidationError);
    EXPECT_FALSE(is_valid_point(parse_term("(omega-up single single)"), P("p0")));
}
