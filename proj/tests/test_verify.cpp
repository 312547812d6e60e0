#include <gtest/gtest.h>

#include <set>

#include "cline/extension.hpp"
#include "cline/sequences.hpp"
#include "cline/verify.hpp"

using namespace cline;

namespace {

LinePoint P(const char* s) { return parse_point(s); }

std::vector<Rational> values_on(const SimpleFunction& f, const std::vector<LinePoint>& pts)
{
    std::vector<Rational> out;
    for (const auto& p : pts)
        out.push_back(f(p));
    return out;
}

}  // namespace

TEST(Verify, FamilyOnTwoPointChain)
{
    Term c2 = Term::chain(2);
    auto fam = test_family_clopen(c2, 8);
    ASSERT_EQ(fam.size(), 5u);
    auto pts = enumerate(c2, 8);
    std::set<std::vector<Rational>> seen;
    for (const auto& f : fam)
        seen.insert(values_on(f, pts));
    std::set<std::vector<Rational>> want{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    EXPECT_EQ(seen, want);
    EXPECT_EQ(values_on(fam.back(), pts), (std::vector<Rational>{1, 1}));
}

TEST(Verify, FamilyBudgetOneIsConstant)
{
    auto fam = test_family_clopen(parse_term("(ordinal w)"), 1);
    ASSERT_EQ(fam.size(), 1u);
    EXPECT_EQ(fam[0](P("c3")), 1);
    EXPECT_EQ(fam[0](P("T")), 1);
}

TEST(Verify, FamilyOnOmegaPlusOne)
{
    Term w = parse_term("(ordinal w)");
    auto fam = test_family_clopen(w, 4);
    auto pts = enumerate(w, 12);
    auto o = [&](std::uint64_t n) { return ordinal_point(w, Ordinal::finite(n)); };
    LinePoint top = ordinal_point(w, Ordinal::omega());
    std::set<std::vector<Rational>> seen;
    for (const auto& f : fam)
        seen.insert(values_on(f, pts));
    EXPECT_TRUE(seen.count(values_on(SimpleFunction::indicator(w, Interval{o(0), o(2)}), pts)));
    EXPECT_TRUE(seen.count(values_on(SimpleFunction::indicator(w, Interval{o(3), top}), pts)));
    for (const auto& f : fam)
        for (const auto& pc : f.pieces())
            EXPECT_TRUE(is_clopen_interval(w, pc.interval.lo, pc.interval.hi));
}

TEST(Verify, FamiliesAreWellFormed)
{
    for (const char* s : {"(ordinal w^2)", "(rev (omega-up single single))", "(concat (chain 2) (ordinal w))"}) {
        Term t = parse_term(s);
        auto fam = test_family_clopen(t, 10);
        EXPECT_GE(fam.size(), 3u);
        for (const auto& f : fam) {
            EXPECT_NO_THROW(SimpleFunction(t, f.pieces()));
            for (const auto& p : enumerate(t, 30)) {
                Rational v = f(p);
                EXPECT_TRUE(v == 0 || v == 1);
            }
        }
    }
}

TEST(Verify, DecayReportZeroSequence)
{
    Term w = parse_term("(ordinal w)");
    DecayReport rep = weak_star_decay_report(zero_sequence(w), test_family_clopen(w, 6), 20);
    EXPECT_TRUE(rep.ok());
    EXPECT_TRUE(rep.flags.empty());
    for (const auto& r : rep.rows)
        for (const auto& v : r.values)
            EXPECT_EQ(v, 0);
}

TEST(Verify, DecayReportMovingDipole)
{
    Term w = parse_term("(ordinal w)");
    MeasureSequence s = delta_diff_sequence(w, point_template(w, "{n}"));
    auto fam = test_family_clopen(w, 6);
    DecayReport rep = weak_star_decay_report(s, fam, 30);
    EXPECT_TRUE(rep.ok());
    EXPECT_TRUE(rep.flags.empty()) << rep.flags.front();
    for (const auto& r : rep.rows) {
        ASSERT_EQ(r.values.size(), 30u);
        EXPECT_EQ(r.max_second_half, 0) << r.function;
        ASSERT_TRUE(r.declared_n.has_value());
    }
    // chi[0, 2] sees delta_1 and delta_2 only
    auto o = [&](std::uint64_t n) { return ordinal_point(w, Ordinal::finite(n)); };
    DecayReport one = weak_star_decay_report(s, {SimpleFunction::indicator(w, Interval{o(0), o(2)})}, 5);
    EXPECT_EQ(one.rows[0].values, (std::vector<Rational>{1, 1, 0, 0, 0}));
}

TEST(Verify, DecayReportFlagsConstantSequence)
{
    Term w = parse_term("(ordinal w)");
    MeasureSequence s = constant_sequence(dirac(w, P("c0")));
    DecayReport rep = weak_star_decay_report(s, test_family_clopen(w, 6), 20);
    EXPECT_FALSE(rep.flags.empty());
    bool flagged = false;
    for (const auto& r : rep.rows)
        flagged = flagged || r.flagged;
    EXPECT_TRUE(flagged);
}

TEST(Verify, DecayReportCatchesFalseModulus)
{
    Term w = parse_term("(ordinal w)");
    MeasureSequence::Moduli m;
    m.decay = [](const Interval&, const Rational&) { return std::optional<std::uint64_t>(3); };
    MeasureSequence s(w, [w](std::uint64_t) { return dirac(w, P("c0")); }, m, "liar");
    DecayReport rep = weak_star_decay_report(s, test_family_clopen(w, 6), 10);
    EXPECT_FALSE(rep.ok());
    bool at_three = false;
    for (const auto& r : rep.rows)
        at_three = at_three || r.violation == std::optional<std::uint64_t>(3);
    EXPECT_TRUE(at_three);
}

TEST(Verify, ExtensionCheckPointLift)
{
    Term w = parse_term("(ordinal w)");
    auto phi = std::make_shared<CollapseMap>(term_double(w), w);
    MeasureSequence s = delta_diff_sequence(w, point_template(w, "{n}"));
    ExtensionSequence out = point_lift_sequence(s, phi);
    ExtensionReport rep = extension_check(*phi, s, out, 2, Rational(1, 10), 40);
    EXPECT_TRUE(rep.ok());
    EXPECT_FALSE(rep.first_mismatch.has_value());
    EXPECT_EQ(rep.max_ratio, 1);
    EXPECT_EQ(rep.tail_max_ratio, 1);
    EXPECT_EQ(rep.rows.size(), 40u);
}

TEST(Verify, ExtensionCheckCorruptedOutput)
{
    Term w = parse_term("(ordinal w)");
    Term k = term_double(w);
    auto phi = std::make_shared<CollapseMap>(k, w);
    MeasureSequence s = delta_diff_sequence(w, point_template(w, "{n}"));
    ExtensionSequence good = point_lift_sequence(s, phi);
    ExtensionSequence bad(k, [good, k](std::uint64_t n) {
        ExtendedTerm t = good(n);
        if (n == 7)
            t.measure.add_atom(P("L(c0).i0"), 1);
        return t;
    });
    ExtensionReport rep = extension_check(*phi, s, bad, 2, Rational(1, 10), 20);
    EXPECT_FALSE(rep.ok());
    EXPECT_EQ(rep.first_mismatch, std::optional<std::uint64_t>(7));

    // fiber dipoles keep the pushforward but break the norm bound
    ExtensionSequence heavy(k, [good, k](std::uint64_t n) {
        ExtendedTerm t = good(n);
        if (n == 9)
            t.measure = t.measure + dirac(k, P("L(c2).i0"), 5) - dirac(k, P("L(c2).i1"), 5);
        return t;
    });
    ExtensionReport h = extension_check(*phi, s, heavy, 2, Rational(1, 10), 20);
    EXPECT_TRUE(h.pushforward_ok);
    EXPECT_FALSE(h.certified_ok);
    EXPECT_FALSE(h.bound_ok);
    EXPECT_EQ(h.max_ratio, 6);
}
