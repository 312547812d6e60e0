#include "cline/line.hpp"

#include <algorithm>

#include "cline/error.hpp"

namespace cline {

namespace {

using Steps = std::vector<Step>;

Steps prepend(const Step& s, Steps rest)
{
    rest.insert(rest.begin(), s);
    return rest;
}

bool valid_at(const Term& t0, const Steps& s, std::size_t i)
{
    const Term& t = t0.unwrap();
    switch (t.kind()) {
    case TermKind::Single: return i == s.size();
    case TermKind::Chain:
        return i + 1 == s.size() && s[i].kind == StepKind::Index && s[i].n < t.chain_size();
    case TermKind::Concat:
        if (i >= s.size() || s[i].kind != StepKind::Part || s[i].n >= t.parts().size())
            return false;
        return valid_at(t.parts()[s[i].n], s, i + 1);
    case TermKind::OmegaUp:
    case TermKind::OmegaIter:
        if (i >= s.size())
            return false;
        if (s[i].kind == StepKind::Top)
            return valid_at(t.top(), s, i + 1);
        if (s[i].kind != StepKind::Copy)
            return false;
        if (t.kind() == TermKind::OmegaIter && s[i].n > 100000)
            return false;
        return valid_at(t.block(s[i].n), s, i + 1);
    case TermKind::Rev: return valid_at(t.inner(), s, i);
    case TermKind::LexSum: {
        if (i >= s.size() || s[i].kind != StepKind::Lex)
            return false;
        const LinePoint& b = *s[i].base;
        if (!valid_at(t.base(), b.steps(), 0))
            return false;
        return valid_at(t.fiber_at(b), s, i + 1);
    }
    case TermKind::Ordinal: break;
    }
    return false;
}

std::strong_ordering cmp_at(const Term& t0, const Steps& a, std::size_t i, const Steps& b, std::size_t j)
{
    const Term& t = t0.unwrap();
    switch (t.kind()) {
    case TermKind::Single: return std::strong_ordering::equal;
    case TermKind::Chain: return a[i].n <=> b[j].n;
    case TermKind::Concat:
        if (a[i].n != b[j].n)
            return a[i].n <=> b[j].n;
        return cmp_at(t.parts()[a[i].n], a, i + 1, b, j + 1);
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        bool at = a[i].kind == StepKind::Top;
        bool bt = b[j].kind == StepKind::Top;
        if (at != bt)
            return at ? std::strong_ordering::greater : std::strong_ordering::less;
        if (at)
            return cmp_at(t.top(), a, i + 1, b, j + 1);
        if (a[i].n != b[j].n)
            return a[i].n <=> b[j].n;
        return cmp_at(t.block(a[i].n), a, i + 1, b, j + 1);
    }
    case TermKind::Rev: return 0 <=> cmp_at(t.inner(), a, i, b, j);
    case TermKind::LexSum: {
        const LinePoint& ba = *a[i].base;
        const LinePoint& bb = *b[j].base;
        auto c = cmp_at(t.base(), ba.steps(), 0, bb.steps(), 0);
        if (c != 0)
            return c;
        return cmp_at(t.fiber_at(ba), a, i + 1, b, j + 1);
    }
    case TermKind::Ordinal: break;
    }
    return std::strong_ordering::equal;
}

void append_end(const Term& t0, Steps& out, bool want_max)
{
    const Term& t = t0.unwrap();
    switch (t.kind()) {
    case TermKind::Single: return;
    case TermKind::Chain: out.push_back(Step::index(want_max ? t.chain_size() - 1 : 0)); return;
    case TermKind::Concat: {
        std::uint64_t j = want_max ? t.parts().size() - 1 : 0;
        out.push_back(Step::part(j));
        append_end(t.parts()[j], out, want_max);
        return;
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter:
        if (want_max) {
            out.push_back(Step::top());
            append_end(t.top(), out, true);
        } else {
            out.push_back(Step::copy(0));
            append_end(t.block(0), out, false);
        }
        return;
    case TermKind::Rev: append_end(t.inner(), out, !want_max); return;
    case TermKind::LexSum: {
        Steps b;
        append_end(t.base(), b, want_max);
        LinePoint bp(std::move(b));
        const Term& fiber = t.fiber_at(bp);
        out.push_back(Step::lex(bp));
        append_end(fiber, out, want_max);
        return;
    }
    case TermKind::Ordinal: return;
    }
}

Steps end_steps(const Term& t, bool want_max)
{
    Steps s;
    append_end(t, s, want_max);
    return s;
}

struct RelNeighbor {
    Neighbor::Kind kind;
    Steps steps;
};

RelNeighbor neighbor_at(const Term& t0, const Steps& s, std::size_t i, bool right)
{
    using K = Neighbor::Kind;
    const Term& t = t0.unwrap();
    switch (t.kind()) {
    case TermKind::Single: return {K::Extreme, {}};
    case TermKind::Chain: {
        std::uint64_t x = s[i].n;
        if (right)
            return x + 1 < t.chain_size() ? RelNeighbor{K::Point, {Step::index(x + 1)}} : RelNeighbor{K::Extreme, {}};
        return x > 0 ? RelNeighbor{K::Point, {Step::index(x - 1)}} : RelNeighbor{K::Extreme, {}};
    }
    case TermKind::Concat: {
        std::uint64_t j = s[i].n;
        RelNeighbor sub = neighbor_at(t.parts()[j], s, i + 1, right);
        if (sub.kind == K::Point)
            return {K::Point, prepend(Step::part(j), std::move(sub.steps))};
        if (sub.kind == K::Limit)
            return sub;
        if (right && j + 1 < t.parts().size())
            return {K::Point, prepend(Step::part(j + 1), end_steps(t.parts()[j + 1], false))};
        if (!right && j > 0)
            return {K::Point, prepend(Step::part(j - 1), end_steps(t.parts()[j - 1], true))};
        return {K::Extreme, {}};
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        if (s[i].kind == StepKind::Top) {
            RelNeighbor sub = neighbor_at(t.top(), s, i + 1, right);
            if (sub.kind == K::Point)
                return {K::Point, prepend(Step::top(), std::move(sub.steps))};
            if (sub.kind == K::Limit)
                return sub;
            return right ? RelNeighbor{K::Extreme, {}} : RelNeighbor{K::Limit, {}};
        }
        std::uint64_t k = s[i].n;
        RelNeighbor sub = neighbor_at(t.block(k), s, i + 1, right);
        if (sub.kind == K::Point)
            return {K::Point, prepend(Step::copy(k), std::move(sub.steps))};
        if (sub.kind == K::Limit)
            return sub;
        if (right)
            return {K::Point, prepend(Step::copy(k + 1), end_steps(t.block(k + 1), false))};
        if (k > 0)
            return {K::Point, prepend(Step::copy(k - 1), end_steps(t.block(k - 1), true))};
        return {K::Extreme, {}};
    }
    case TermKind::Rev: return neighbor_at(t.inner(), s, i, !right);
    case TermKind::LexSum: {
        const LinePoint& b = *s[i].base;
        RelNeighbor sub = neighbor_at(t.fiber_at(b), s, i + 1, right);
        if (sub.kind == K::Point)
            return {K::Point, prepend(s[i], std::move(sub.steps))};
        if (sub.kind == K::Limit)
            return sub;
        RelNeighbor nb = neighbor_at(t.base(), b.steps(), 0, right);
        if (nb.kind != K::Point)
            return {nb.kind, {}};
        LinePoint bp(std::move(nb.steps));
        Steps fiber_end = end_steps(t.fiber_at(bp), !right);
        return {K::Point, prepend(Step::lex(bp), std::move(fiber_end))};
    }
    case TermKind::Ordinal: break;
    }
    return {K::Extreme, {}};
}

using RelJump = std::pair<Steps, Steps>;

RelJump jump_in_base(const Term& base, const LinePoint& a, const LinePoint& b, bool leftmost);

// a < b, and neither the immediate-successor rule nor (for rightmost) the predecessor
// rule is being applied at this level.
RelJump jump_div(const Term& t0, const Steps& a, std::size_t i, const Steps& b, std::size_t j, bool leftmost)
{
    const Term& t = t0.unwrap();
    switch (t.kind()) {
    case TermKind::Single: break;
    case TermKind::Chain: {
        std::uint64_t x = leftmost ? a[i].n : b[j].n - 1;
        return {{Step::index(x)}, {Step::index(x + 1)}};
    }
    case TermKind::Concat: {
        std::uint64_t pa = a[i].n;
        std::uint64_t pb = b[j].n;
        if (pa == pb) {
            RelJump r = jump_div(t.parts()[pa], a, i + 1, b, j + 1, leftmost);
            return {prepend(Step::part(pa), std::move(r.first)), prepend(Step::part(pa), std::move(r.second))};
        }
        std::uint64_t x = leftmost ? pa : pb - 1;
        return {prepend(Step::part(x), end_steps(t.parts()[x], true)),
                prepend(Step::part(x + 1), end_steps(t.parts()[x + 1], false))};
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        bool at = a[i].kind == StepKind::Top;
        bool bt = b[j].kind == StepKind::Top;
        if (at && bt) {
            RelJump r = jump_div(t.top(), a, i + 1, b, j + 1, leftmost);
            return {prepend(Step::top(), std::move(r.first)), prepend(Step::top(), std::move(r.second))};
        }
        std::uint64_t ka = a[i].n;
        if (!bt && b[j].n == ka) {
            RelJump r = jump_div(t.block(ka), a, i + 1, b, j + 1, leftmost);
            return {prepend(Step::copy(ka), std::move(r.first)), prepend(Step::copy(ka), std::move(r.second))};
        }
        std::uint64_t x = (leftmost || bt) ? ka : b[j].n - 1;
        return {prepend(Step::copy(x), end_steps(t.block(x), true)),
                prepend(Step::copy(x + 1), end_steps(t.block(x + 1), false))};
    }
    case TermKind::Rev: {
        RelJump r = jump_div(t.inner(), b, j, a, i, !leftmost);
        return {std::move(r.second), std::move(r.first)};
    }
    case TermKind::LexSum: {
        const LinePoint& ba = *a[i].base;
        const LinePoint& bb = *b[j].base;
        if (ba == bb) {
            RelJump r = jump_div(t.fiber_at(ba), a, i + 1, b, j + 1, leftmost);
            return {prepend(a[i], std::move(r.first)), prepend(a[i], std::move(r.second))};
        }
        RelJump bj = jump_in_base(t.base(), ba, bb, leftmost);
        LinePoint u(std::move(bj.first));
        LinePoint v(std::move(bj.second));
        Steps left = prepend(Step::lex(u), end_steps(t.fiber_at(u), true));
        Steps right = prepend(Step::lex(v), end_steps(t.fiber_at(v), false));
        return {std::move(left), std::move(right)};
    }
    case TermKind::Ordinal: break;
    }
    throw InvariantError("find_jump_in: no jump found");
}

RelJump jump_in_base(const Term& base, const LinePoint& a, const LinePoint& b, bool leftmost)
{
    if (leftmost) {
        RelNeighbor r = neighbor_at(base, a.steps(), 0, true);
        if (r.kind == Neighbor::Kind::Point)
            return {a.steps(), std::move(r.steps)};
    } else {
        RelNeighbor l = neighbor_at(base, b.steps(), 0, false);
        if (l.kind == Neighbor::Kind::Point)
            return {std::move(l.steps), b.steps()};
    }
    return jump_div(base, a.steps(), 0, b.steps(), 0, leftmost);
}

using Sample = std::vector<Steps>;

Sample enum_at(const Term& t0, std::size_t budget);

Sample lex_sample(const Term& t, std::size_t budget, std::size_t base_budget)
{
    const Term& base = t.base();
    Sample base_pts = enum_at(base, base_budget);
    for (const auto& e : t.exceptions()) {
        bool present = false;
        for (const auto& b : base_pts)
            if (LinePoint(b) == e.point)
                present = true;
        if (!present)
            base_pts.push_back(e.point.steps());
    }
    std::sort(base_pts.begin(), base_pts.end(),
              [&](const Steps& x, const Steps& y) { return cmp_at(base, x, 0, y, 0) < 0; });
    if (base_pts.size() > budget) {
        Steps last = base_pts.back();
        base_pts.resize(budget - 1);
        base_pts.push_back(std::move(last));
    }
    Sample out;
    std::size_t remaining = budget;
    for (std::size_t idx = 0; idx < base_pts.size() && remaining > 0; ++idx) {
        std::size_t share = std::max<std::size_t>(1, remaining / (base_pts.size() - idx));
        LinePoint b(base_pts[idx]);
        Sample sub = enum_at(t.fiber_at(b), share);
        for (auto& s : sub)
            out.push_back(prepend(Step::lex(b), std::move(s)));
        remaining -= std::min(remaining, sub.size());
    }
    return out;
}

Sample enum_impl(const Term& t, std::size_t budget)
{
    if (budget <= 1)
        return {end_steps(t, false)};
    switch (t.kind()) {
    case TermKind::Single: return {{}};
    case TermKind::Chain: {
        std::uint64_t n = t.chain_size();
        Sample out;
        if (n <= budget) {
            for (std::uint64_t x = 0; x < n; ++x)
                out.push_back({Step::index(x)});
        } else {
            for (std::uint64_t x = 0; x + 1 < budget; ++x)
                out.push_back({Step::index(x)});
            out.push_back({Step::index(n - 1)});
        }
        return out;
    }
    case TermKind::Concat: {
        const auto& parts = t.parts();
        std::size_t m = parts.size();
        Sample out;
        if (budget < m) {
            for (std::size_t j = 0; j + 1 < budget; ++j)
                out.push_back(prepend(Step::part(j), end_steps(parts[j], false)));
            out.push_back(prepend(Step::part(m - 1), end_steps(parts[m - 1], true)));
            return out;
        }
        std::size_t remaining = budget;
        for (std::size_t j = 0; j < m; ++j) {
            std::size_t share = remaining / (m - j);
            Sample sub = enum_at(parts[j], std::max<std::size_t>(1, share));
            for (auto& s : sub)
                out.push_back(prepend(Step::part(j), std::move(s)));
            remaining -= std::min(remaining, sub.size());
        }
        return out;
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        Sample tops = enum_at(t.top(), std::max<std::size_t>(1, budget / 3));
        std::size_t remaining = budget - std::min(budget, tops.size());
        Sample out;
        for (std::uint64_t k = 0; remaining > 0; ++k) {
            std::size_t share = std::max<std::size_t>(1, remaining / 2);
            Sample sub = enum_at(t.block(k), share);
            for (auto& s : sub)
                out.push_back(prepend(Step::copy(k), std::move(s)));
            remaining -= std::min(remaining, sub.size());
        }
        for (auto& s : tops)
            out.push_back(prepend(Step::top(), std::move(s)));
        return out;
    }
    case TermKind::Rev: {
        Sample out = enum_at(t.inner(), budget);
        std::reverse(out.begin(), out.end());
        return out;
    }
    case TermKind::LexSum: {
        // a larger base sample pays off when the fibers are small
        Sample best;
        for (std::size_t bb = std::max<std::size_t>(1, budget / 4);; bb = std::min(budget, bb + std::max<std::size_t>(1, bb / 4))) {
            Sample out = lex_sample(t, budget, bb);
            if (out.size() > best.size())
                best = std::move(out);
            if (best.size() >= budget || bb >= budget)
                break;
        }
        return best;
    }
    case TermKind::Ordinal: break;
    }
    return {};
}

Sample enum_at(const Term& t0, std::size_t budget)
{
    const Term& t = t0.unwrap();
    Sample out = enum_impl(t, budget);
    Steps lo = end_steps(t, false);
    if (out.empty() || LinePoint(out.front()) != LinePoint(lo)) {
        if (out.size() >= budget && !out.empty())
            out.erase(out.begin());
        out.insert(out.begin(), lo);
    }
    if (budget >= 2) {
        Steps hi = end_steps(t, true);
        if (LinePoint(out.back()) != LinePoint(hi)) {
            if (out.size() >= budget)
                out.pop_back();
            out.push_back(hi);
        }
    }
    return out;
}

}  // namespace

bool is_valid_point(const Term& t, const LinePoint& p)
{
    return valid_at(t, p.steps(), 0);
}

void validate_point(const Term& t, const LinePoint& p)
{
    if (!is_valid_point(t, p))
        throw ValidationError("point '" + p.to_string() + "' is not a point of " + t.to_sexpr());
}

std::strong_ordering compare(const Term& t, const LinePoint& a, const LinePoint& b)
{
    return cmp_at(t, a.steps(), 0, b.steps(), 0);
}

bool in_interval(const Term& t, const Interval& iv, const LinePoint& p)
{
    return compare(t, iv.lo, p) <= 0 && compare(t, p, iv.hi) <= 0;
}

std::optional<Interval> intersect_intervals(const Term& t, const Interval& a, const Interval& b)
{
    const LinePoint& lo = less(t, a.lo, b.lo) ? b.lo : a.lo;
    const LinePoint& hi = less(t, a.hi, b.hi) ? a.hi : b.hi;
    if (less(t, hi, lo))
        return std::nullopt;
    return Interval{lo, hi};
}

LinePoint min_point(const Term& t)
{
    return LinePoint(end_steps(t, false));
}

LinePoint max_point(const Term& t)
{
    return LinePoint(end_steps(t, true));
}

bool is_one_point(const Term& t)
{
    return min_point(t) == max_point(t);
}

bool is_finite_term(const Term& t0)
{
    const Term& t = t0.unwrap();
    switch (t.kind()) {
    case TermKind::Single:
    case TermKind::Chain: return true;
    case TermKind::Concat:
        for (const auto& p : t.parts())
            if (!is_finite_term(p))
                return false;
        return true;
    case TermKind::Rev: return is_finite_term(t.inner());
    case TermKind::LexSum:
        if (!is_finite_term(t.base()) || !is_finite_term(t.default_fiber()))
            return false;
        for (const auto& e : t.exceptions())
            if (!is_finite_term(e.fiber))
                return false;
        return true;
    default: return false;
    }
}

Neighbor right_neighbor(const Term& t, const LinePoint& p)
{
    RelNeighbor r = neighbor_at(t, p.steps(), 0, true);
    return {r.kind, LinePoint(std::move(r.steps))};
}

Neighbor left_neighbor(const Term& t, const LinePoint& p)
{
    RelNeighbor r = neighbor_at(t, p.steps(), 0, false);
    return {r.kind, LinePoint(std::move(r.steps))};
}

PointClass classify(const Term& t, const LinePoint& p)
{
    bool l = left_neighbor(t, p).kind == Neighbor::Kind::Limit;
    bool r = right_neighbor(t, p).kind == Neighbor::Kind::Limit;
    if (l && r)
        return PointClass::TwoSidedLimit;
    if (l)
        return PointClass::LeftLimit;
    if (r)
        return PointClass::RightLimit;
    return PointClass::Isolated;
}

bool is_clopen_interval(const Term& t, const LinePoint& lo, const LinePoint& hi)
{
    if (compare(t, lo, hi) > 0)
        return false;
    return left_neighbor(t, lo).kind != Neighbor::Kind::Limit && right_neighbor(t, hi).kind != Neighbor::Kind::Limit;
}

Jump find_jump_in(const Term& t, const LinePoint& a, const LinePoint& b)
{
    if (compare(t, a, b) >= 0)
        throw ValidationError("find_jump_in requires a < b");
    Neighbor r = right_neighbor(t, a);
    if (r.kind == Neighbor::Kind::Point)
        return {a, r.point};
    RelJump j = jump_div(t, a.steps(), 0, b.steps(), 0, true);
    return {LinePoint(std::move(j.first)), LinePoint(std::move(j.second))};
}

std::vector<LinePoint> enumerate(const Term& t, std::size_t budget)
{
    if (budget == 0)
        return {};
    Sample s = enum_at(t, budget);
    std::vector<LinePoint> out;
    out.reserve(s.size());
    for (auto& x : s)
        out.emplace_back(std::move(x));
    return out;
}

namespace {

Term power_segment(std::uint32_t e)
{
    Term block = e == 1 ? Term::single() : power_segment(e - 1);
    return Term::omega_up(block, Term::single());
}

// Point of [0, omega^e] (compiled by power_segment) at xi <= omega^e.
Steps power_point(std::uint32_t e, const Ordinal& xi)
{
    if (xi == Ordinal::power(e))
        return {Step::top()};
    if (e == 1)
        return {Step::copy(xi.finite_value())};
    Ordinal unit = Ordinal::power(e - 1);
    if (compare(xi, unit) <= 0)
        return prepend(Step::copy(0), power_point(e - 1, xi));
    const auto& terms = xi.terms();
    std::uint64_t m = terms.front().coef;
    std::vector<Ordinal::Term> rest(terms.begin() + 1, terms.end());
    Ordinal r = Ordinal::from_terms(std::move(rest));
    if (r.is_zero())
        return prepend(Step::copy(m - 1), power_point(e - 1, unit));
    return prepend(Step::copy(m), power_point(e - 1, left_subtract(Ordinal::finite(1), r)));
}

Ordinal power_ordinal(std::uint32_t e, const Steps& s, std::size_t i)
{
    if (s[i].kind == StepKind::Top)
        return Ordinal::power(e);
    std::uint64_t k = s[i].n;
    if (e == 1)
        return Ordinal::finite(k);
    Ordinal local = power_ordinal(e - 1, s, i + 1);
    if (k == 0)
        return local;
    return add(add(Ordinal::power(e - 1, k), Ordinal::finite(1)), local);
}

struct SegmentPart {
    Ordinal start;  // part covers (start, end], or [0, end] for the first
    Ordinal end;
    std::uint32_t exp;     // power part exponent, 0 for the trailing finite chain
    std::uint64_t length;  // chain length when exp == 0
};

std::vector<SegmentPart> segment_parts(const Ordinal& alpha)
{
    std::vector<SegmentPart> parts;
    Ordinal cur;
    bool first = true;
    for (const auto& term : alpha.terms()) {
        if (term.exp == 0) {
            Ordinal end = add(cur, Ordinal::finite(term.coef));
            parts.push_back({cur, end, 0, term.coef});
            cur = end;
            continue;
        }
        for (std::uint64_t c = 0; c < term.coef; ++c) {
            Ordinal end = first ? Ordinal::power(term.exp) : add(cur, Ordinal::power(term.exp));
            parts.push_back({cur, end, term.exp, 0});
            cur = end;
            first = false;
        }
    }
    return parts;
}

}  // namespace

Term compile_ordinal_segment(const Ordinal& alpha)
{
    if (alpha.is_zero())
        return Term::single();
    if (alpha.is_finite())
        return Term::chain(alpha.finite_value() + 1);
    std::vector<Term> parts;
    for (const auto& p : segment_parts(alpha))
        parts.push_back(p.exp == 0 ? Term::chain(p.length) : power_segment(p.exp));
    if (parts.size() == 1)
        return parts.front();
    return Term::concat(std::move(parts));
}

LinePoint ordinal_point(const Term& segment, const Ordinal& beta)
{
    if (segment.kind() != TermKind::Ordinal)
        throw ValidationError("ordinal_point needs an ordinal segment term");
    const Ordinal& alpha = segment.ordinal();
    if (compare(beta, alpha) > 0)
        throw ValidationError("ordinal " + beta.to_string() + " exceeds " + alpha.to_string());
    if (alpha.is_zero())
        return LinePoint();
    if (alpha.is_finite())
        return LinePoint({Step::index(beta.finite_value())});
    auto parts = segment_parts(alpha);
    for (std::size_t j = 0; j < parts.size(); ++j) {
        const SegmentPart& p = parts[j];
        if (compare(beta, p.end) > 0)
            continue;
        Steps local;
        if (p.exp == 0) {
            local = {Step::index(left_subtract(successor(p.start), beta).finite_value())};
        } else {
            Ordinal xi = j == 0 ? beta : left_subtract(successor(p.start), beta);
            local = power_point(p.exp, xi);
        }
        if (parts.size() > 1)
            local = prepend(Step::part(j), std::move(local));
        return LinePoint(std::move(local));
    }
    throw InvariantError("ordinal_point: no part found");
}

Ordinal point_ordinal(const Term& segment, const LinePoint& p)
{
    if (segment.kind() != TermKind::Ordinal)
        throw ValidationError("point_ordinal needs an ordinal segment term");
    validate_point(segment, p);
    const Ordinal& alpha = segment.ordinal();
    if (alpha.is_zero())
        return Ordinal();
    const Steps& s = p.steps();
    if (alpha.is_finite())
        return Ordinal::finite(s[0].n);
    auto parts = segment_parts(alpha);
    std::size_t j = 0;
    std::size_t i = 0;
    if (parts.size() > 1) {
        j = s[0].n;
        i = 1;
    }
    const SegmentPart& part = parts[j];
    if (part.exp == 0)
        return add(successor(part.start), Ordinal::finite(s[i].n));
    Ordinal local = power_ordinal(part.exp, s, i);
    if (j == 0)
        return local;
    return add(successor(part.start), local);
}

}  // namespace cline
