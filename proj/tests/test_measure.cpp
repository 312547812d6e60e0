#include <gtest/gtest.h>

#include <random>

#include "cline/error.hpp"
#include "cline/map.hpp"
#include "cline/measure.hpp"

using namespace cline;

namespace {

LinePoint P(const char* s) { return parse_point(s); }

Rational random_weight(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 6);
    int a = 0;
    while (a == 0)
        a = num(rng);
    Rational r(a, den(rng));
    r.canonicalize();
    return r;
}

Measure random_measure(std::mt19937_64& rng, const Term& t, const std::vector<LinePoint>& pts, bool balanced)
{
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    std::uniform_int_distribution<int> count(1, 6);
    Measure m(t);
    int c = count(rng);
    for (int i = 0; i < c; ++i)
        m.add_atom(pts[pick(rng)], random_weight(rng));
    if (balanced && m.total() != 0)
        m.add_atom(pts[pick(rng)], -m.total());
    return m;
}

// Pieces cut right after randomly chosen points that have an immediate successor.
SimpleFunction random_simple(std::mt19937_64& rng, const Term& t, const std::vector<LinePoint>& pts)
{
    std::vector<LinePoint> cuts;
    for (const auto& p : pts)
        if (right_neighbor(t, p).kind == Neighbor::Kind::Point && rng() % 3 == 0)
            cuts.push_back(p);
    std::vector<SimplePiece> pieces;
    LinePoint lo = min_point(t);
    for (const auto& c : cuts) {
        pieces.push_back({{lo, c}, random_weight(rng)});
        lo = right_neighbor(t, c).point;
    }
    pieces.push_back({{lo, max_point(t)}, random_weight(rng)});
    return SimpleFunction(t, pieces);
}

std::vector<Term> spaces()
{
    return {parse_term("(ordinal w^2)"), term_b_n(2), term_double(parse_term("(ordinal w)")),
            parse_term("(concat (chain 3) (rev (omega-up single single)))")};
}

}  // namespace

TEST(Measure, NormAndTotalExamples)
{
    Term w = parse_term("(ordinal w)");
    Measure m = dirac(w, P("c1")) - dirac(w, P("c4"));
    EXPECT_EQ(m.tv_norm(), 2);
    EXPECT_EQ(m.total(), 0);
    EXPECT_EQ(Measure(w).tv_norm(), 0);
    Measure v = dirac(w, P("c3"), Rational(1, 2)) + dirac(w, P("c4"), Rational(-1, 2));
    EXPECT_EQ(v.tv_norm(), 1);
    Measure s = dirac(w, P("c0"), 3) - dirac(w, P("c1")) + dirac(w, P("T"));
    EXPECT_EQ(s.total(), 3);
    EXPECT_EQ(dirac(w, P("T")).total(), 1);
}

TEST(Measure, ZeroWeightsAreDropped)
{
    Term w = parse_term("(ordinal w)");
    Measure m = dirac(w, P("c1")) - dirac(w, P("c1"));
    EXPECT_TRUE(m.is_zero());
    EXPECT_THROW(m.add_atom(P("p0"), 1), ValidationError);
}

TEST(Measure, RestrictExamples)
{
    Term w = parse_term("(ordinal w)");
    Measure m = dirac(w, P("c1")) - dirac(w, P("c4"));
    EXPECT_EQ(restrict(m, Interval{P("c0"), P("c2")}), dirac(w, P("c1")));
    EXPECT_EQ(restrict(m, Interval{min_point(w), max_point(w)}), m);
    EXPECT_TRUE(restrict(m, Region::empty()).is_zero());
    EXPECT_EQ(restrict(m, Region::full()), m);
}

TEST(Measure, PushforwardExamples)
{
    Term w = parse_term("(ordinal w)");
    Term k = term_double(w);
    CollapseMap pi(k, w);
    EXPECT_EQ(pushforward(pi, dirac(k, P("L(c5).i0"))), dirac(w, P("c5")));
    EXPECT_TRUE(pushforward(pi, dirac(k, P("L(c5).i0")) - dirac(k, P("L(c5).i1"))).is_zero());
    Measure m = dirac(k, P("L(c3).i1")) + dirac(k, P("L(c7).i0"), 2);
    EXPECT_EQ(pushforward(pi, m), dirac(w, P("c3")) + dirac(w, P("c7"), 2));
}

TEST(Measure, IntegrateExamples)
{
    Term w = parse_term("(ordinal w)");
    Measure m = dirac(w, P("c1")) - dirac(w, P("c4"));
    EXPECT_EQ(integrate(SimpleFunction::constant(w, 1), m), 0);
    auto chi = SimpleFunction::indicator(w, Interval{P("c0"), P("c2")});
    EXPECT_EQ(integrate(chi, dirac(w, P("c1"))), 1);
    EXPECT_EQ(integrate(SimpleFunction::indicator(w, std::nullopt), m), 0);
}

TEST(Measure, SimpleFunctionRejectsBadPieces)
{
    Term w2 = parse_term("(ordinal w^2)");
    LinePoint om = ordinal_point(w2, Ordinal::omega());
    LinePoint after = right_neighbor(w2, om).point;
    EXPECT_NO_THROW(SimpleFunction(w2, {{{min_point(w2), om}, 1}, {{after, max_point(w2)}, 2}}));
    EXPECT_THROW(SimpleFunction(w2, {{{min_point(w2), P("c0.c3")}, 1}}), ValidationError);
    LinePoint om2 = ordinal_point(w2, Ordinal::power(1, 2));
    EXPECT_THROW(SimpleFunction(w2, {{{min_point(w2), om}, 1}, {{om2, max_point(w2)}, 2}}), ValidationError);
}

TEST(Measure, IntegralInequalityRandom)
{
    std::mt19937_64 rng(20261016);
    int checked = 0;
    for (const auto& t : spaces()) {
        auto pts = enumerate(t, 60);
        for (int i = 0; i < 250; ++i) {
            Measure m = random_measure(rng, t, pts, true);
            ASSERT_EQ(m.total(), 0);
            SimpleFunction f = random_simple(rng, t, pts);
            Rational hi = f.pieces().front().value;
            Rational lo = hi;
            for (const auto& pc : f.pieces()) {
                if (pc.value > hi)
                    hi = pc.value;
                if (pc.value < lo)
                    lo = pc.value;
            }
            EXPECT_LE(rabs(integrate(f, m)), (hi - lo) * m.tv_norm() / 2);
            ++checked;
        }
    }
    EXPECT_GE(checked, 1000);
}

TEST(Measure, IntegrateIsBilinear)
{
    std::mt19937_64 rng(5);
    for (const auto& t : spaces()) {
        auto pts = enumerate(t, 60);
        for (int i = 0; i < 100; ++i) {
            Measure a = random_measure(rng, t, pts, false);
            Measure b = random_measure(rng, t, pts, false);
            Rational c = random_weight(rng);
            SimpleFunction f = random_simple(rng, t, pts);
            EXPECT_EQ(integrate(f, a + b.scaled(c)), integrate(f, a) + c * integrate(f, b));
            // scaling the piece values scales the integral
            std::vector<SimplePiece> scaled = f.pieces();
            for (auto& pc : scaled)
                pc.value *= c;
            EXPECT_EQ(integrate(SimpleFunction(t, scaled), a), c * integrate(f, a));
            // direct sum over atoms as the oracle
            Rational direct = 0;
            for (const auto& [p, w] : a.atoms())
                direct += w * f(p);
            EXPECT_EQ(integrate(f, a), direct);
        }
    }
}

TEST(Measure, RestrictionsOverClopenCoverReassemble)
{
    std::mt19937_64 rng(9);
    for (const auto& t : spaces()) {
        auto pts = enumerate(t, 60);
        for (int i = 0; i < 100; ++i) {
            Measure m = random_measure(rng, t, pts, false);
            SimpleFunction f = random_simple(rng, t, pts);
            Measure sum(t);
            Rational norm = 0;
            for (const auto& pc : f.pieces()) {
                Measure r = restrict(m, pc.interval);
                EXPECT_EQ(r, restrict(m, interval_region(t, pc.interval)));
                sum.add(r);
                norm += r.tv_norm();
            }
            EXPECT_EQ(sum, m);
            EXPECT_EQ(norm, m.tv_norm());
        }
    }
}

TEST(Measure, PushforwardDoesNotIncreaseNorm)
{
    std::mt19937_64 rng(13);
    Term w = parse_term("(ordinal w^2)");
    Term b2 = term_b_n(2);
    Term kk = parse_term("(concat (omega-up single single) (omega-up single single))");
    std::vector<std::shared_ptr<MapDescriptor>> maps{
        std::make_shared<CollapseMap>(term_double(w), w), std::make_shared<CollapseMap>(term_double(b2), b2),
        std::make_shared<InterleaveMap>(kk, parse_term("(ordinal w)"))};
    for (const auto& phi : maps) {
        auto pts = enumerate(phi->domain(), 80);
        for (int i = 0; i < 200; ++i) {
            Measure m = random_measure(rng, phi->domain(), pts, false);
            Measure pm = pushforward(*phi, m);
            EXPECT_LE(pm.tv_norm(), m.tv_norm());
            EXPECT_EQ(pm.total(), m.total());
            std::set<LinePoint> images;
            for (const auto& [p, wt] : m.atoms())
                images.insert(phi->eval(p));
            if (images.size() == m.support_size())
                EXPECT_EQ(pm.tv_norm(), m.tv_norm());
        }
    }
}

TEST(Measure, SequenceNormProfile)
{
    Term w = parse_term("(ordinal w)");
    MeasureSequence s(w, [w](std::uint64_t n) { return dirac(w, LinePoint({Step::copy(n)}), Rational(1, n)); });
    auto prof = norm_profile(s, 5);
    ASSERT_EQ(prof.size(), 5u);
    for (std::uint64_t n = 1; n <= 5; ++n)
        EXPECT_EQ(prof[n - 1], Rational(1, n));
    EXPECT_THROW(s(0), ValidationError);
}
