#include <gtest/gtest.h>

#include <random>

#include "cline/error.hpp"
#include "cline/extension.hpp"
#include "cline/sequences.hpp"

using namespace cline;

namespace {

LinePoint P(const char* s) { return parse_point(s); }

Rational random_weight(std::mt19937_64& rng)
{
    std::uniform_int_distribution<int> num(-9, 9);
    std::uniform_int_distribution<int> den(1, 5);
    int a = 0;
    while (a == 0)
        a = num(rng);
    Rational r(a, den(rng));
    r.canonicalize();
    return r;
}

// Consecutive clopen pieces covering t, cut after random points with a successor.
std::vector<Interval> random_pieces(std::mt19937_64& rng, const Term& t, const std::vector<LinePoint>& pts)
{
    std::vector<Interval> out;
    LinePoint lo = min_point(t);
    for (const auto& p : pts)
        if (right_neighbor(t, p).kind == Neighbor::Kind::Point && rng() % 3 == 0) {
            out.push_back({lo, p});
            lo = right_neighbor(t, p).point;
        }
    out.push_back({lo, max_point(t)});
    return out;
}

SimpleFunction random_simple(std::mt19937_64& rng, const Term& t, const std::vector<LinePoint>& pts)
{
    std::vector<SimplePiece> pieces;
    for (const auto& iv : random_pieces(rng, t, pts))
        pieces.push_back({iv, random_weight(rng)});
    return SimpleFunction(t, pieces);
}

// Random nonempty family of gap blocks (a proper subset of the pieces) and the sampled
// points lying in them.
struct GapCase {
    std::vector<Interval> blocks;
    ClosedSet f;
};

std::optional<GapCase> random_gaps(std::mt19937_64& rng, const Term& t, const std::vector<LinePoint>& pts)
{
    auto pieces = random_pieces(rng, t, pts);
    if (pieces.size() < 2)
        return std::nullopt;
    GapCase g;
    std::size_t keep = rng() % pieces.size();
    for (std::size_t i = 0; i < pieces.size(); ++i)
        if (i != keep && rng() % 2 == 0)
            g.blocks.push_back(pieces[i]);
    g.f = complement_of_intervals(t, g.blocks);
    return g;
}

std::vector<Term> spaces()
{
    return {parse_term("(ordinal w^2)"), term_b_n(2), term_double(parse_term("(ordinal w)")),
            parse_term("(concat (chain 3) (rev (omega-up single single)) (ordinal w.2))")};
}

Term omega() { return parse_term("(ordinal w)"); }

}  // namespace

TEST(Extension, AnchorGolden)
{
    Term w = omega();
    auto o = [&](std::uint64_t n) { return ordinal_point(w, Ordinal::finite(n)); };
    LinePoint top = max_point(w);
    AnchorMap a = build_anchor_map(make_closed_set(w, {{o(0), o(0)}, {top, top}}), w);
    EXPECT_EQ(a.anchor(o(0)), o(0));
    EXPECT_EQ(a.anchor(top), top);
    EXPECT_EQ(a.anchor(o(1)), o(0));
    for (std::uint64_t k = 2; k < 40; ++k)
        EXPECT_EQ(a.anchor(o(k)), top) << k;
    // chi[5, w] is the indicator of {max F} on F; its extension is the indicator of the basin [2, w]
    SimpleFunction chi_top = SimpleFunction::indicator(w, Interval{o(5), top});
    SimpleFunction e = extend_function(chi_top, a);
    for (std::uint64_t k = 0; k < 40; ++k)
        EXPECT_EQ(e(o(k)), k >= 2 ? 1 : 0);
    EXPECT_EQ(e(top), 1);
    EXPECT_THROW(build_anchor_map(ClosedSet{}, w), ValidationError);
}

TEST(Extension, ExtendFunctionIsUnitalRightInverse)
{
    std::mt19937_64 rng(3);
    for (const auto& t : spaces()) {
        auto pts = enumerate(t, 60);
        for (int i = 0; i < 40; ++i) {
            auto g = random_gaps(rng, t, pts);
            if (!g)
                continue;
            AnchorMap a = build_anchor_map(g->f, t);
            SimpleFunction one = extend_function(SimpleFunction::constant(t, 1), a);
            SimpleFunction f = random_simple(rng, t, pts);
            SimpleFunction ef = extend_function(f, a);
            Rational sup_f = 0;
            Rational sup_ef = 0;
            for (const auto& p : pts) {
                EXPECT_EQ(one(p), 1);
                if (a.in_f(p)) {
                    EXPECT_EQ(a.anchor(p), p);
                    EXPECT_EQ(ef(p), f(p));
                    sup_f = std::max(sup_f, rabs(f(p)));
                } else {
                    EXPECT_TRUE(a.in_f(a.anchor(p)));
                }
                EXPECT_EQ(ef(p), f(a.anchor(p)));
            }
            for (const auto& pc : ef.pieces())
                sup_ef = std::max(sup_ef, rabs(pc.value));
            // every value of E f is taken by f on F, so the sup norm is kept
            for (const auto& pc : ef.pieces())
                EXPECT_EQ(pc.value, f(a.anchor(pc.interval.lo)));
            EXPECT_GE(sup_ef, sup_f);
        }
    }
}

// Lemma checks for P*: total zero, equal to v off F, F-mass bounded by |v|_1, and the
// primal pairing <f - E_F(f|F), v> as the oracle.
TEST(Extension, PStarRandomInstances)
{
    std::mt19937_64 rng(20261016);
    int checked = 0;
    while (checked < 1000) {
        for (const auto& t : spaces()) {
            auto pts = enumerate(t, 60);
            auto g = random_gaps(rng, t, pts);
            if (!g || g->blocks.empty())
                continue;
            AnchorMap a = build_anchor_map(g->f, t);
            std::vector<LinePoint> outside;
            for (const auto& p : pts)
                if (!a.in_f(p))
                    outside.push_back(p);
            if (outside.empty())
                continue;
            std::shuffle(outside.begin(), outside.end(), rng);
            std::size_t m = 1 + rng() % std::min<std::size_t>(outside.size(), 5);
            std::vector<std::pair<LinePoint, Rational>> v;
            Rational l1 = 0;
            Measure off(t);
            for (std::size_t i = 0; i < m; ++i) {
                v.emplace_back(outside[i], random_weight(rng));
                l1 += rabs(v.back().second);
                off.add_atom(outside[i], v.back().second);
            }
            Measure ps = p_star(v, a);
            EXPECT_EQ(ps.total(), 0);
            Measure on_f(t);
            Measure not_f(t);
            for (const auto& [p, w] : ps.atoms())
                (a.in_f(p) ? on_f : not_f).add_atom(p, w);
            EXPECT_EQ(not_f, off);
            EXPECT_LE(on_f.tv_norm(), l1);
            SimpleFunction f = random_simple(rng, t, pts);
            SimpleFunction ef = extend_function(f, a);
            Rational primal = 0;
            for (const auto& [p, w] : v)
                primal += w * (f(p) - ef(p));
            EXPECT_EQ(integrate(f, ps), primal);
            ++checked;
        }
    }
}

TEST(Extension, PStarExamples)
{
    Term w = omega();
    auto o = [&](std::uint64_t n) { return ordinal_point(w, Ordinal::finite(n)); };
    AnchorMap a = build_anchor_map(make_closed_set(w, {{o(0), o(0)}, {max_point(w), max_point(w)}}), w);
    EXPECT_TRUE(p_star({}, a).is_zero());
    Measure unit = p_star({{o(5), Rational(1)}}, a);
    EXPECT_EQ(unit, dirac(w, o(5)) - dirac(w, max_point(w)));
    EXPECT_THROW(p_star({{o(0), Rational(1)}}, a), ValidationError);
    EXPECT_THROW(p_star({{o(3), Rational(1)}, {o(3), Rational(2)}}, a), ValidationError);
}

TEST(Extension, GlueExamples)
{
    Term w = omega();
    auto o = [&](std::uint64_t n) { return ordinal_point(w, Ordinal::finite(n)); };
    Interval blk{o(2), o(6)};
    Measure d = dirac(w, o(3)) - dirac(w, o(5));
    EXPECT_EQ(glue({{blk, d}}, w), d);
    Measure one = dirac(w, o(3));
    Measure g = glue({{blk, one}}, w);
    EXPECT_EQ(g.total(), 0);
    EXPECT_EQ(g.tv_norm(), 2);
    EXPECT_EQ(restrict(g, blk), one);
    EXPECT_TRUE(glue({}, w).is_zero());
    EXPECT_THROW(glue({{{o(0), max_point(w)}, one}}, w), ValidationError);
    EXPECT_THROW(glue({{{o(2), o(6)}, one}, {{o(5), o(8)}, Measure(w)}}, w), ValidationError);
    Term w2 = parse_term("(ordinal w^2)");
    LinePoint lim = ordinal_point(w2, Ordinal::omega());
    EXPECT_THROW(glue({{{lim, ordinal_point(w2, Ordinal::power(1, 2))}, Measure(w2)}}, w2), ValidationError);
}

TEST(Extension, GlueRandomBlocks)
{
    std::mt19937_64 rng(17);
    int checked = 0;
    while (checked < 1000) {
        for (const auto& t : spaces()) {
            auto pts = enumerate(t, 60);
            auto g = random_gaps(rng, t, pts);
            if (!g || g->blocks.empty())
                continue;
            std::vector<GlueBlock> blocks;
            Rational budget = 0;
            for (const auto& iv : g->blocks) {
                Measure nu(t);
                for (const auto& p : pts)
                    if (in_interval(t, iv, p) && rng() % 3 == 0)
                        nu.add_atom(p, random_weight(rng));
                budget += nu.tv_norm() + rabs(nu.total());
                blocks.push_back({iv, nu});
            }
            Measure glued = glue(blocks, t);
            for (const auto& b : blocks)
                EXPECT_EQ(restrict(glued, b.interval), b.nu);
            EXPECT_EQ(glued.total(), 0);
            EXPECT_LE(glued.tv_norm(), budget);
            ++checked;
        }
    }
}

TEST(Extension, SelectPhiFiniteIndexIsEverything)
{
    PhiSelector sel([](std::uint64_t n, std::uint64_t) { return Rational(1, n); }, 3, nullptr, 1000);
    for (std::uint64_t n = 1; n < 50; ++n)
        EXPECT_EQ(select_phi(sel, n), (std::vector<std::uint64_t>{0, 1, 2}));
}

TEST(Extension, SelectPhiZeroFamily)
{
    PhiSelector sel([](std::uint64_t, std::uint64_t) { return Rational(0); }, std::nullopt,
                    [](std::uint64_t) { return std::optional<std::uint64_t>(1); }, 1000);
    for (std::uint64_t k = 1; k < 20; ++k)
        EXPECT_EQ(sel.threshold(k), k);
    for (std::uint64_t n = 1; n < 20; ++n)
        EXPECT_EQ(sel.size(n), n + 1);
    EXPECT_FALSE(sel.heuristic());
}

// r^n_gamma = 1/n for gamma <= 3: sum_{i<=k} r^n_i = min(k+1, 4)/n, so the first n with
// no later violation is k*min(k+1, 4) + 1; thresholds are forced strictly increasing.
TEST(Extension, SelectPhiPostconditions)
{
    auto r = [](std::uint64_t n, std::uint64_t g) { return g <= 3 ? Rational(1, n) : Rational(0); };
    for (bool certified : {true, false}) {
        PhiSelector::TailBound tail;
        if (certified)
            tail = [](std::uint64_t k) { return std::optional<std::uint64_t>(4 * k + 1); };
        PhiSelector sel(r, std::nullopt, tail, 4096);
        std::uint64_t prev = 0;
        for (std::uint64_t k = 1; k <= 30; ++k) {
            std::uint64_t want = std::max(k * std::min<std::uint64_t>(k + 1, 4) + 1, prev + 1);
            EXPECT_EQ(sel.threshold(k), want) << k;
            prev = want;
        }
        EXPECT_EQ(sel.heuristic(), !certified);
        std::uint64_t last_size = 0;
        for (std::uint64_t n = 1; n <= 200; ++n) {
            std::uint64_t s = sel.size(n);
            EXPECT_GE(s, last_size);
            last_size = s;
            std::uint64_t ph = sel.phi(n);
            if (ph >= 1) {
                Rational sum = 0;
                for (auto g : select_phi(sel, n))
                    sum += r(n, g);
                EXPECT_LT(rabs(sum), Rational(1, ph)) << n;
            }
        }
        EXPECT_GE(sel.phi(200), 40u);
    }
}

TEST(Extension, SelectPhiWithoutModulusFails)
{
    PhiSelector sel([](std::uint64_t, std::uint64_t) { return Rational(1); }, std::nullopt, nullptr, 100);
    EXPECT_THROW(sel.threshold(1), ModulusUnknown);
    PhiSelector far([](std::uint64_t n, std::uint64_t) { return Rational(1, n); }, std::nullopt,
                    [](std::uint64_t) { return std::optional<std::uint64_t>(1000); }, 100);
    EXPECT_THROW(far.threshold(1), ModulusUnknown);
}

TEST(Extension, PointLiftIsNormPreservingLift)
{
    std::mt19937_64 rng(23);
    Term w2 = parse_term("(ordinal w^2)");
    Term kk = parse_term("(concat (omega-up single single) (omega-up single single))");
    std::vector<MapPtr> maps{std::make_shared<CollapseMap>(term_double(w2), w2),
                             std::make_shared<CollapseMap>(term_double(term_b_n(3)), term_b_n(3)),
                             std::make_shared<InterleaveMap>(kk, omega())};
    for (const auto& phi : maps) {
        auto pts = enumerate(phi->codomain(), 80);
        EXPECT_TRUE(point_lift(Measure(phi->codomain()), *phi).is_zero());
        EXPECT_EQ(point_lift(dirac(phi->codomain(), pts[3]), *phi), dirac(phi->domain(), phi->section(pts[3])));
        for (int i = 0; i < 200; ++i) {
            Measure mu(phi->codomain());
            for (int j = 0; j < 5; ++j)
                mu.add_atom(pts[rng() % pts.size()], random_weight(rng));
            Measure lift = point_lift(mu, *phi);
            EXPECT_EQ(pushforward(*phi, lift), mu);
            EXPECT_EQ(lift.tv_norm(), mu.tv_norm());
        }
    }
}

TEST(Extension, RescaleBuckets)
{
    Term w = omega();
    MapPtr phi = std::make_shared<CollapseMap>(term_double(w), w);
    ExtensionConfig cfg;
    int calls = 0;
    NormalizedExtender tagging = [&calls, phi](const MeasureSequence& s) {
        ++calls;
        return ExtensionSequence(phi->domain(), [s, phi](std::uint64_t n) {
            Measure m = s(n);
            return ExtendedTerm{point_lift(m, *phi), m.tv_norm(), 0, "delegate"};
        });
    };

    auto zero = rescale_extension(phi, tagging, zero_sequence(w), cfg);
    for (std::uint64_t n = 1; n <= 20; ++n)
        EXPECT_TRUE(zero.measure(n).is_zero());

    MeasureSequence base = delta_diff_sequence(w, point_template(w, "{n}"));
    auto same = rescale_extension(phi, tagging, base, cfg);
    for (std::uint64_t n = 1; n <= 50; ++n) {
        ExtendedTerm t = same(n);
        EXPECT_EQ(t.route, "delegate");
        EXPECT_EQ(t.measure, point_lift(base(n), *phi));
    }

    // norms 2/n: every bucket is a singleton and goes to point_lift
    std::vector<MeasureSequence> parts;
    MeasureSequence shrinking(
        w, [base](std::uint64_t n) { return base(n).scaled(Rational(1, n)); },
        MeasureSequence::Moduli{nullptr, nullptr, Rational(2), std::nullopt}, "shrinking");
    auto sh = rescale_extension(phi, tagging, shrinking, cfg);
    for (std::uint64_t n = 1; n <= 100; ++n) {
        ExtendedTerm t = sh(n);
        EXPECT_EQ(t.route, "point-lift");
        EXPECT_EQ(t.measure.tv_norm(), shrinking(n).tv_norm());
        EXPECT_EQ(pushforward(*phi, t.measure), shrinking(n));
    }
}

TEST(Extension, TrimReplacesViolatingTerms)
{
    Term w = omega();
    auto phi = std::make_shared<CollapseMap>(term_double(w), w);
    MeasureSequence seq = delta_diff_sequence(w, point_template(w, "{n}"));
    // term 1 carries an extra dipole inside one fiber: same pushforward, norm 6
    ExtensionSequence bad(phi->domain(), [seq, phi](std::uint64_t n) {
        Measure m = point_lift(seq(n), *phi);
        if (n == 1)
            m = m + dirac(phi->domain(), P("L(c9).i0"), 2) - dirac(phi->domain(), P("L(c9).i1"), 2);
        return ExtendedTerm{m, m.tv_norm(), 0, "test"};
    });
    Rational bound = Rational(21, 10);
    EXPECT_EQ(pushforward(*phi, bad.measure(1)), seq(1));
    std::uint64_t n0 = detect_n0(bad, seq, bound, 50);
    EXPECT_EQ(n0, 1u);
    auto fixed = trim_to_bound(bad, seq, phi, n0);
    EXPECT_EQ(fixed.measure(1).tv_norm(), seq(1).tv_norm());
    EXPECT_EQ(pushforward(*phi, fixed.measure(1)), seq(1));
    for (std::uint64_t n = 2; n <= 50; ++n)
        EXPECT_EQ(fixed.measure(n), bad.measure(n));
    auto same = trim_to_bound(bad, seq, phi, 0);
    EXPECT_EQ(same.measure(1), bad.measure(1));
    EXPECT_EQ(detect_n0(fixed, seq, bound, 50), 0u);
}

TEST(Extension, SumOverSingletonsOfOmega)
{
    Term w = omega();
    MapPtr phi = std::make_shared<CollapseMap>(term_double(w), w);
    Family fam;
    fam.block = [w](std::uint64_t k) { return ordinal_space(w, Ordinal::finite(k), Ordinal()); };
    fam.locate = [w](const LinePoint& q) -> std::optional<std::uint64_t> {
        Ordinal o = point_ordinal(w, q);
        if (!o.is_finite())
            return std::nullopt;
        return o.finite_value();
    };
    SumPartition part{fam, max_point(w)};
    SubExtender sub = [phi](std::uint64_t, const MeasureSequence& s) { return point_lift_sequence(s, phi); };
    MeasureSequence seq = delta_diff_sequence(w, point_template(w, "{n}"));
    ExtensionConfig cfg;
    auto out = extend_sequence_sum(phi, part, sub, 2, seq, cfg);
    for (std::uint64_t n = 1; n <= 200; ++n) {
        ExtendedTerm t = out(n);
        EXPECT_EQ(pushforward(*phi, t.measure), seq(n)) << n;
        EXPECT_GE(t.certified_bound, t.measure.tv_norm());
        EXPECT_LE(t.measure.tv_norm(), Rational(21, 10) * seq(n).tv_norm());
    }
    auto zero = extend_sequence_sum(phi, part, sub, 2, zero_sequence(w), cfg);
    for (std::uint64_t n = 1; n <= 20; ++n)
        EXPECT_TRUE(zero.measure(n).is_zero());
}

TEST(Extension, SumWithExactCoverIsBlockwise)
{
    Term w = omega();
    MapPtr phi = std::make_shared<CollapseMap>(term_double(w), w);
    Partition p = root_space(w)->decompose();
    ASSERT_EQ(p.kind, Partition::Kind::Pivot);
    // two blocks: [0, 3] and [4, w]
    auto parts = std::make_shared<std::vector<SpacePtr>>(
        std::vector<SpacePtr>{ordinal_space(w, Ordinal(), Ordinal::finite(3)),
                              ordinal_space(w, Ordinal::finite(4), Ordinal::omega())});
    Family fam;
    fam.count = 2;
    fam.block = [parts](std::uint64_t i) { return parts->at(i); };
    fam.locate = [parts](const LinePoint& q) -> std::optional<std::uint64_t> {
        for (std::uint64_t i = 0; i < parts->size(); ++i)
            if ((*parts)[i]->contains(q))
                return i;
        return std::nullopt;
    };
    SubExtender sub = [phi](std::uint64_t, const MeasureSequence& s) { return point_lift_sequence(s, phi); };
    MeasureSequence seq = delta_diff_sequence(w, point_template(w, "{n}"));
    ExtensionConfig cfg;
    auto out = extend_sequence_sum(phi, {fam, std::nullopt}, sub, 2, seq, cfg);
    for (std::uint64_t n = 1; n <= 60; ++n) {
        ExtendedTerm t = out(n);
        EXPECT_EQ(pushforward(*phi, t.measure), seq(n));
        EXPECT_LE(t.measure.tv_norm(), 2 * seq(n).tv_norm());
        EXPECT_GE(t.certified_bound, t.measure.tv_norm());
    }
}

TEST(Extension, MainOnFiniteCodomainIsNormPreserving)
{
    Term c = Term::ordinal_segment(Ordinal::finite(4));
    Term k = term_double(c);
    MapPtr phi = std::make_shared<CollapseMap>(k, c);
    auto pts = enumerate(c, 10);
    MeasureSequence seq(c, [c, pts](std::uint64_t n) {
        return dirac(c, pts[n % pts.size()], Rational(1, n)) - dirac(c, pts[(n + 1) % pts.size()]);
    });
    ExtensionConfig cfg;
    auto out = extend_sequence_main(phi, Rational(1, 10), seq, cfg);
    for (std::uint64_t n = 1; n <= 30; ++n) {
        EXPECT_EQ(out.measure(n).tv_norm(), seq(n).tv_norm());
        EXPECT_EQ(pushforward(*phi, out.measure(n)), seq(n));
    }
}

TEST(Extension, MainOnDoubleOmega)
{
    Term w = omega();
    MapPtr phi = std::make_shared<CollapseMap>(term_double(w), w);
    MeasureSequence seq = delta_diff_sequence(w, point_template(w, "{n}"));
    ExtensionConfig cfg;
    auto out = extend_sequence_main(phi, Rational(1, 10), seq, cfg);
    for (std::uint64_t n = 1; n <= 200; ++n) {
        ExtendedTerm t = out(n);
        EXPECT_EQ(pushforward(*phi, t.measure), seq(n));
        EXPECT_LE(t.measure.tv_norm(), Rational(21, 10) * seq(n).tv_norm());
        EXPECT_GE(t.certified_bound, t.measure.tv_norm());
    }
}

TEST(Extension, FiberEndpoints)
{
    Term w = omega();
    CollapseMap dbl(term_double(w), w);
    EndpointSet e = fiber_endpoint_set(dbl, 30);
    EXPECT_TRUE(e.onto);
    EXPECT_EQ(e.points.size(), 2 * e.sampled);
    for (std::size_t i = 1; i < e.points.size(); ++i)
        EXPECT_TRUE(less(dbl.domain(), e.points[i - 1], e.points[i]));

    Term w2 = parse_term("(ordinal w^2)");
    CollapseMap id(w2, w2);
    EndpointSet ei = fiber_endpoint_set(id, 30);
    EXPECT_TRUE(ei.onto);
    EXPECT_EQ(ei.points.size(), ei.sampled);

    Term l = term_bigode_l();
    CollapseMap big(term_double(l), l);
    EndpointSet eb = fiber_endpoint_set(big, 40);
    EXPECT_TRUE(eb.onto);
    EXPECT_EQ(eb.points.size(), 2 * eb.sampled);
    for (std::size_t i = 0; i + 1 < eb.points.size(); i += 2)
        EXPECT_EQ(big.eval(eb.points[i]), big.eval(eb.points[i + 1]));
}
