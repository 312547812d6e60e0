#include <gtest/gtest.h>

#include <random>

#include "cline/error.hpp"
#include "cline/extension.hpp"
#include "cline/order_analysis.hpp"
#include "cline/witnesses.hpp"

using namespace cline;

namespace {

LinePoint P(const char* s) { return parse_point(s); }

Rational R(long a, long b = 1)
{
    Rational r(a, b);
    r.canonicalize();
    return r;
}

DAMeasure random_da_measure(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> den(1, 12);
    std::uniform_int_distribution<int> wt(-5, 5);
    DAMeasure mu;
    int atoms = 1 + static_cast<int>(rng() % 6);
    for (int i = 0; i < atoms; ++i) {
        int d = den(rng);
        Rational t(static_cast<long>(rng() % (d + 1)), d);
        t.canonicalize();
        int w = wt(rng);
        if (w != 0)
            mu[DAPoint{t, static_cast<int>(rng() % 2)}] += w;
    }
    std::erase_if(mu, [](const auto& kv) { return kv.second == 0; });
    return mu;
}

}  // namespace

TEST(Witnesses, FMuExamples)
{
    DAMeasure mu{{DAPoint{R(1, 2), 0}, R(1)}};
    EXPECT_EQ(f_mu(mu, R(1, 2)), 1);
    EXPECT_EQ(f_mu(mu, R(1, 4)), 0);
    EXPECT_EQ(f_mu({}, R(1, 3)), 0);
    DAMeasure hi{{DAPoint{R(1, 2), 1}, R(1)}};
    EXPECT_EQ(f_mu(hi, R(1, 2)), 0);
    EXPECT_EQ(f_mu_right(hi, R(1, 2)), 1);
    EXPECT_THROW(validate_da_point(DAPoint{R(3, 2), 0}), ValidationError);
    EXPECT_THROW(validate_da_point(DAPoint{R(1, 2), 2}), ValidationError);
}

TEST(Witnesses, GNuExamples)
{
    RealMeasure nu{{R(1, 4), R(1)}, {R(3, 4), R(-1)}};
    for (const auto& t : rational_grid(101))
        EXPECT_EQ(g_nu(nu, t), (t >= R(1, 4) && t < R(3, 4)) ? 1 : 0) << t.get_str();
    EXPECT_EQ(g_nu({}, R(1, 2)), 0);
    RealMeasure m{{R(1, 3), R(2)}, {R(1, 2), R(-5)}};
    EXPECT_EQ(g_nu(m, R(1)), R(-3));
}

TEST(Witnesses, ShrinkingWitnessIsIndicator)
{
    DAWitness w = shrinking_witness();
    auto grid = rational_grid(100);
    for (std::uint64_t n = 1; n <= 100; ++n) {
        RealMeasure nu = w(n);
        EXPECT_EQ(w.tv_norm(n), 2);
        for (const auto& t : grid)
            EXPECT_EQ(g_nu(nu, t), (t < R(1, n)) ? 1 : 0);
    }
    EXPECT_EQ(w.width_modulus(R(1, 10)), std::optional<std::uint64_t>(11));
}

TEST(Witnesses, DyadicRotationHitsEveryGridPointLate)
{
    DAWitness w = dyadic_rotation_witness();
    auto grid = rational_grid(100);
    for (std::uint64_t n = 1; n <= 100; ++n) {
        auto [a, b] = w.interval(n);
        RealMeasure nu = w(n);
        for (const auto& t : grid)
            EXPECT_EQ(g_nu(nu, t), (t >= a && t < b) ? 1 : 0);
    }
    // the last full sweep inside n <= 255 covers [0, 1)
    for (const auto& t : grid) {
        if (t == 1)
            continue;
        bool hit = false;
        for (std::uint64_t n = 128; n < 256; ++n)
            hit = hit || g_nu(w(n), t) == 1;
        EXPECT_TRUE(hit) << t.get_str();
    }
}

TEST(Witnesses, WitnessSequenceRejectsBadModulus)
{
    auto fixed = [](std::uint64_t) { return std::pair<Rational, Rational>(R(0), R(1, 2)); };
    auto claims = [](const Rational&) { return std::optional<std::uint64_t>(1); };
    EXPECT_THROW(da_witness_sequence(fixed, claims), ValidationError);
    EXPECT_THROW(da_witness_sequence(fixed, nullptr), ValidationError);
    auto none = [](const Rational&) { return std::optional<std::uint64_t>(); };
    EXPECT_THROW(da_witness_sequence(fixed, none), ValidationError);
}

TEST(Witnesses, RightLimitOfFMuIsGNu)
{
    std::mt19937_64 rng(20261016);
    auto grid = rational_grid(100);
    for (int i = 0; i < 200; ++i) {
        DAMeasure mu = random_da_measure(rng);
        RealMeasure nu = project_da(mu);
        for (const auto& t : grid) {
            if (t < 1)
                EXPECT_EQ(f_mu_right(mu, t), g_nu(nu, t));
            bool atom_here = mu.count(DAPoint{t, 0}) || mu.count(DAPoint{t, 1});
            if (!atom_here)
                EXPECT_EQ(f_mu(mu, t), g_nu(nu, t));
        }
    }
}

TEST(Witnesses, QuotientGaps)
{
    auto grid = rational_grid(11);
    for (const auto& [t, g] : da_quotient_gaps([](const DAPoint&) { return R(3); }, grid))
        EXPECT_EQ(g, 0);
    Rational a(3, 10);
    auto ind = [a](const DAPoint& p) { return p >= DAPoint{a, 1} ? R(1) : R(0); };
    for (const auto& [t, g] : da_quotient_gaps(ind, grid))
        EXPECT_EQ(g, t == a ? 1 : 0);
    auto level_free = [](const DAPoint& p) { return p.t * p.t; };
    for (const auto& [t, g] : da_quotient_gaps(level_free, grid))
        EXPECT_EQ(g, 0);
}

TEST(Witnesses, OptimalitySequence)
{
    OptimalityScenario sc = optimality_scenario();
    for (std::uint64_t n = 1; n <= 50; ++n) {
        Measure v = sc.v(n);
        EXPECT_EQ(v.tv_norm(), 1);
        EXPECT_EQ(v.support_size(), 2u);
        EXPECT_EQ(v.weight(ordinal_point(sc.l, Ordinal::finite(n))), R(1, 2));
        EXPECT_EQ(v.weight(ordinal_point(sc.l, Ordinal::finite(n + 1))), R(-1, 2));
    }
}

TEST(Witnesses, OptimalityBlockMassesFollowV)
{
    OptimalityScenario sc = optimality_scenario();
    for (std::uint64_t n = 1; n <= 40; ++n) {
        Measure mu = point_lift(sc.v(n), *sc.phi);
        for (std::uint64_t i = 0; i < 2; ++i)
            for (std::uint64_t k = 0; k < 25; ++k) {
                LinePoint c({Step::part(i), Step::copy(k)});
                Rational want = sc.v(n).weight(ordinal_point(sc.l, Ordinal::finite(2 * k + i)));
                EXPECT_EQ(mass(mu, {c, c}), want);
            }
    }
}

TEST(Witnesses, OptimalityCertificateExamples)
{
    OptimalityScenario sc = optimality_scenario();
    // v_4 = 1/2 delta_4 - 1/2 delta_5, with 4 in B_0 and 5 in B_1
    Measure balanced(sc.k);
    balanced.add_atom(P("p0.c2"), R(1, 2));
    balanced.add_atom(P("p0.T"), R(-1, 2));
    balanced.add_atom(P("p1.c2"), R(-1, 2));
    balanced.add_atom(P("p1.T"), R(1, 2));
    EXPECT_EQ(lower_bound_certificate(sc, balanced, 4), 2);
    EXPECT_EQ(balanced.tv_norm(), 2);
    Measure lift = point_lift(sc.v(4), *sc.phi);
    EXPECT_EQ(mass(lift, {P("p0.c0"), P("p0.T")}), R(1, 2));
    EXPECT_EQ(lower_bound_certificate(sc, lift, 4), 1);
    EXPECT_LE(lower_bound_certificate(sc, lift, 4), lift.tv_norm());
    EXPECT_THROW(lower_bound_certificate(sc, lift, 5), ValidationError);
}

TEST(Witnesses, OptimalityCertificateNeverExceedsNorm)
{
    OptimalityScenario sc = optimality_scenario();
    std::mt19937_64 rng(29);
    std::uniform_int_distribution<int> num(-6, 6);
    auto pts = enumerate(sc.k, 40);
    for (std::uint64_t n = 1; n <= 200; ++n) {
        Measure mu = point_lift(sc.v(n), *sc.phi);
        // add measures with zero pushforward: dipoles inside one fiber
        for (int j = 0; j < 3; ++j) {
            Rational w(num(rng), 4);
            mu = mu + dirac(sc.k, P("p0.T"), w) - dirac(sc.k, P("p1.T"), w);
            LinePoint p = pts[rng() % pts.size()];
            LinePoint q = sc.phi->section(sc.phi->eval(p));
            if (!(p == q))
                mu = mu + dirac(sc.k, p, w) - dirac(sc.k, q, w);
        }
        ASSERT_EQ(pushforward(*sc.phi, mu), sc.v(n));
        EXPECT_LE(lower_bound_certificate(sc, mu, n), mu.tv_norm());
    }
}

TEST(Witnesses, BigodeSpaces)
{
    BigodeSpaces b = bigode_spaces();
    EXPECT_EQ(io(b.l, Region::full()), InternalOrder::infinity());
    KKReport kk = kk_complemented(*b.phi);
    EXPECT_FALSE(kk.complemented);
    EXPECT_EQ(kk.io, InternalOrder::infinity());
    EXPECT_TRUE(b.phi->increasing());
    MeasureSequence s = bigode_sequence(b.l);
    ExtensionConfig cfg;
    auto out = extend_sequence_main(b.phi, R(1, 10), s, cfg);
    for (std::uint64_t n = 1; n <= 40; ++n) {
        EXPECT_EQ(pushforward(*b.phi, out.measure(n)), s(n));
        EXPECT_LE(out.measure(n).tv_norm(), R(21, 10) * s(n).tv_norm());
    }
}
