#include "cline/map.hpp"

#include <algorithm>

#include "cline/error.hpp"
#include "cline/order_analysis.hpp"
#include "region_internal.hpp"

namespace cline {

ClosedSet make_closed_set(const Term& t, std::vector<Interval> intervals)
{
    std::sort(intervals.begin(), intervals.end(),
              [&](const Interval& a, const Interval& b) { return less(t, a.lo, b.lo); });
    ClosedSet out;
    for (auto& iv : intervals) {
        if (!out.components.empty()) {
            Interval& last = out.components.back();
            bool overlap = compare(t, iv.lo, last.hi) <= 0;
            Neighbor nb = right_neighbor(t, last.hi);
            bool adjacent = nb.kind == Neighbor::Kind::Point && nb.point == iv.lo;
            if (overlap || adjacent) {
                if (less(t, last.hi, iv.hi))
                    last.hi = iv.hi;
                continue;
            }
        }
        out.components.push_back(std::move(iv));
    }
    return out;
}

bool contains(const Term& t, const ClosedSet& f, const LinePoint& p)
{
    for (const auto& iv : f.components)
        if (in_interval(t, iv, p))
            return true;
    return false;
}

ClosedSet complement_of_intervals(const Term& t, const std::vector<Interval>& intervals)
{
    ClosedSet blocks = make_closed_set(t, intervals);
    std::vector<Interval> out;
    LinePoint cursor = min_point(t);
    bool open = true;  // cursor is a point not yet covered
    for (const auto& iv : blocks.components) {
        if (open && less(t, cursor, iv.lo)) {
            Neighbor l = left_neighbor(t, iv.lo);
            if (l.kind != Neighbor::Kind::Point)
                throw ValidationError("interval [" + iv.lo.to_string() + ", ...] is not clopen");
            out.push_back({cursor, l.point});
        }
        Neighbor r = right_neighbor(t, iv.hi);
        if (r.kind == Neighbor::Kind::Limit)
            throw ValidationError("interval [..., " + iv.hi.to_string() + "] is not clopen");
        open = r.kind == Neighbor::Kind::Point;
        if (open)
            cursor = r.point;
    }
    if (open)
        out.push_back({cursor, max_point(t)});
    return ClosedSet{std::move(out)};
}

LinePoint MapDescriptor::section(const LinePoint& q) const
{
    ClosedSet f = fiber(q);
    if (f.components.empty())
        throw InvariantError("empty fiber over " + q.to_string());
    return f.components.front().lo;
}

// ---- structural collapse ----

struct CollapseMap::Corr {
    enum class Kind { Identity, Collapse, Project, Same } kind;
    Term k;  // unwrapped
    Term l;  // unwrapped
    std::vector<std::shared_ptr<const Corr>> children;
};

namespace {

using Corr = CollapseMap::Corr;
using Steps = std::vector<Step>;

Steps prepend(const Step& s, Steps rest)
{
    rest.insert(rest.begin(), s);
    return rest;
}

std::shared_ptr<const Corr> build_corr(const Term& k0, const Term& l0)
{
    const Term& k = k0.unwrap();
    const Term& l = l0.unwrap();
    auto c = std::make_shared<Corr>();
    c->k = k;
    c->l = l;
    if (k == l) {
        c->kind = Corr::Kind::Identity;
        return c;
    }
    if (is_one_point(l)) {
        c->kind = Corr::Kind::Collapse;
        return c;
    }
    if (k.kind() == TermKind::LexSum && k.base().unwrap() == l) {
        c->kind = Corr::Kind::Project;
        return c;
    }
    auto fail = [&]() {
        return ValidationError("no structural collapse of " + k.to_sexpr() + " onto " + l.to_sexpr());
    };
    if (k.kind() != l.kind())
        throw fail();
    c->kind = Corr::Kind::Same;
    switch (k.kind()) {
    case TermKind::Concat:
        if (k.parts().size() != l.parts().size())
            throw fail();
        for (std::size_t j = 0; j < k.parts().size(); ++j)
            c->children.push_back(build_corr(k.parts()[j], l.parts()[j]));
        return c;
    case TermKind::OmegaUp:
        c->children.push_back(build_corr(k.block(0), l.block(0)));
        c->children.push_back(build_corr(k.top(), l.top()));
        return c;
    case TermKind::Rev:
        c->children.push_back(build_corr(k.inner(), l.inner()));
        return c;
    case TermKind::LexSum: {
        if (!(k.base() == l.base()) || k.exceptions().size() != l.exceptions().size())
            throw fail();
        c->children.push_back(build_corr(k.default_fiber(), l.default_fiber()));
        for (std::size_t i = 0; i < k.exceptions().size(); ++i) {
            if (!(k.exceptions()[i].point == l.exceptions()[i].point))
                throw fail();
            c->children.push_back(build_corr(k.exceptions()[i].fiber, l.exceptions()[i].fiber));
        }
        return c;
    }
    default: throw fail();
    }
}

const Corr& lex_child(const Corr& c, const LinePoint& b)
{
    int ei = c.k.exception_index(b);
    return *c.children[ei < 0 ? 0 : static_cast<std::size_t>(ei) + 1];
}

Steps eval_at(const Corr& c, const Steps& s, std::size_t i)
{
    switch (c.kind) {
    case Corr::Kind::Identity: return Steps(s.begin() + static_cast<std::ptrdiff_t>(i), s.end());
    case Corr::Kind::Collapse: return min_point(c.l).steps();
    case Corr::Kind::Project: return s[i].base->steps();
    case Corr::Kind::Same: break;
    }
    switch (c.k.kind()) {
    case TermKind::Concat: return prepend(s[i], eval_at(*c.children[s[i].n], s, i + 1));
    case TermKind::OmegaUp:
        return prepend(s[i], eval_at(*c.children[s[i].kind == StepKind::Top ? 1 : 0], s, i + 1));
    case TermKind::Rev: return eval_at(*c.children[0], s, i);
    case TermKind::LexSum: return prepend(s[i], eval_at(lex_child(c, *s[i].base), s, i + 1));
    default: break;
    }
    throw InvariantError("collapse eval: unexpected node");
}

std::pair<Steps, Steps> fiber_at(const Corr& c, const Steps& q, std::size_t i)
{
    switch (c.kind) {
    case Corr::Kind::Identity: {
        Steps rest(q.begin() + static_cast<std::ptrdiff_t>(i), q.end());
        return {rest, rest};
    }
    case Corr::Kind::Collapse: return {min_point(c.k).steps(), max_point(c.k).steps()};
    case Corr::Kind::Project: {
        LinePoint b(Steps(q.begin() + static_cast<std::ptrdiff_t>(i), q.end()));
        const Term& f = c.k.fiber_at(b);
        return {prepend(Step::lex(b), min_point(f).steps()), prepend(Step::lex(b), max_point(f).steps())};
    }
    case Corr::Kind::Same: break;
    }
    auto wrap = [&](const Step& s, std::pair<Steps, Steps> sub) {
        return std::make_pair(prepend(s, std::move(sub.first)), prepend(s, std::move(sub.second)));
    };
    switch (c.k.kind()) {
    case TermKind::Concat: return wrap(q[i], fiber_at(*c.children[q[i].n], q, i + 1));
    case TermKind::OmegaUp: return wrap(q[i], fiber_at(*c.children[q[i].kind == StepKind::Top ? 1 : 0], q, i + 1));
    case TermKind::Rev: {
        auto sub = fiber_at(*c.children[0], q, i);
        return {std::move(sub.second), std::move(sub.first)};
    }
    case TermKind::LexSum: return wrap(q[i], fiber_at(lex_child(c, *q[i].base), q, i + 1));
    default: break;
    }
    throw InvariantError("collapse fiber: unexpected node");
}

Region fat_region(const Corr& c)
{
    switch (c.kind) {
    case Corr::Kind::Identity: return Region::empty();
    case Corr::Kind::Collapse: return is_one_point(c.k) ? Region::empty() : Region::full();
    case Corr::Kind::Project: {
        const Term& base = c.l;
        Region out;
        if (!is_one_point(c.k.default_fiber()))
            out = detail::lex_regular_points(c.k);
        for (const auto& e : c.k.exceptions())
            if (!is_one_point(e.fiber))
                out = unite(base, out, point_region(base, e.point));
        return out;
    }
    case Corr::Kind::Same: break;
    }
    switch (c.l.kind()) {
    case TermKind::Concat: {
        std::vector<Region> parts;
        for (const auto& ch : c.children)
            parts.push_back(fat_region(*ch));
        return make_concat_region(c.l, std::move(parts));
    }
    case TermKind::OmegaUp:
        return make_omega_region(c.l, {}, fat_region(*c.children[0]), 0, fat_region(*c.children[1]));
    case TermKind::Rev: return fat_region(*c.children[0]);
    case TermKind::LexSum: {
        std::vector<LexEntry> entries;
        Region reg = detail::lex_regular_points(c.l);
        if (!reg.is_empty())
            entries.push_back({reg, fat_region(*c.children[0])});
        std::vector<Region> exc;
        for (std::size_t i = 1; i < c.children.size(); ++i)
            exc.push_back(fat_region(*c.children[i]));
        return make_lex_region(c.l, std::move(entries), std::move(exc));
    }
    default: break;
    }
    throw InvariantError("collapse fat fibers: unexpected node");
}

}  // namespace

CollapseMap::CollapseMap(Term k, Term l) : k_(std::move(k)), l_(std::move(l)), corr_(build_corr(k_, l_)) {}

LinePoint CollapseMap::eval(const LinePoint& p) const
{
    return LinePoint(eval_at(*corr_, p.steps(), 0));
}

Interval CollapseMap::fiber_interval(const LinePoint& q) const
{
    auto f = fiber_at(*corr_, q.steps(), 0);
    return {LinePoint(std::move(f.first)), LinePoint(std::move(f.second))};
}

std::vector<Interval> CollapseMap::preimage_interval(const Interval& iv) const
{
    return {{fiber_interval(iv.lo).lo, fiber_interval(iv.hi).hi}};
}

ClosedSet CollapseMap::fiber(const LinePoint& q) const
{
    return ClosedSet{{fiber_interval(q)}};
}

Region CollapseMap::fat_fiber_region() const
{
    return fat_region(*corr_);
}

// ---- interleave ----

InterleaveMap::InterleaveMap(Term k, Term l) : k_(std::move(k)), l_(std::move(l))
{
    const Term& kk = k_.unwrap();
    if (kk.kind() != TermKind::Concat || kk.parts().size() != 2 || kk.parts()[0].unwrap().kind() != TermKind::OmegaUp ||
        kk.parts()[1].unwrap().kind() != TermKind::OmegaUp)
        throw ValidationError("interleave map needs K = concat of two omega-up terms");
    if (!(l_.unwrap() == Term::ordinal_segment(Ordinal::omega()).unwrap()))
        throw ValidationError("interleave map needs L = [0, omega]");
}

LinePoint InterleaveMap::eval(const LinePoint& p) const
{
    const auto& s = p.steps();
    if (s.at(1).kind == StepKind::Top)
        return LinePoint({Step::top()});
    return LinePoint({Step::copy(2 * s[1].n + s[0].n)});
}

Interval InterleaveMap::copy_interval(std::uint64_t part, std::uint64_t k) const
{
    Term blk = k_.unwrap().parts()[part].unwrap().block(k);
    Steps pre{Step::part(part), Step::copy(k)};
    return {min_point(blk).with_prefix(pre), max_point(blk).with_prefix(pre)};
}

Interval InterleaveMap::top_interval(std::uint64_t part) const
{
    const Term& top = k_.unwrap().parts()[part].unwrap().top();
    Steps pre{Step::part(part), Step::top()};
    return {min_point(top).with_prefix(pre), max_point(top).with_prefix(pre)};
}

ClosedSet InterleaveMap::fiber(const LinePoint& q) const
{
    const auto& s = q.steps();
    if (s.at(0).kind == StepKind::Top)
        return ClosedSet{{top_interval(0), top_interval(1)}};
    return ClosedSet{{copy_interval(s[0].n % 2, s[0].n / 2)}};
}

std::vector<Interval> InterleaveMap::preimage_interval(const Interval& iv) const
{
    const auto& a = iv.lo.steps();
    const auto& b = iv.hi.steps();
    std::vector<Interval> pieces;
    if (a.at(0).kind == StepKind::Top) {
        pieces = {top_interval(0), top_interval(1)};
    } else if (b.at(0).kind == StepKind::Top) {
        std::uint64_t x = a[0].n;
        std::uint64_t k0 = (x + 1) / 2;
        std::uint64_t k1 = x / 2;
        pieces.push_back({copy_interval(0, k0).lo, top_interval(0).hi});
        pieces.push_back({copy_interval(1, k1).lo, top_interval(1).hi});
    } else {
        for (std::uint64_t m = a[0].n; m <= b[0].n; ++m)
            pieces.push_back(copy_interval(m % 2, m / 2));
    }
    return make_closed_set(k_, std::move(pieces)).components;
}

Region InterleaveMap::fat_fiber_region() const
{
    return point_region(l_, LinePoint({Step::top()}));
}

// ---- interval table ----

IntervalTableMap::IntervalTableMap(Term k, Term l, std::vector<std::vector<Interval>> table)
    : k_(std::move(k)), l_(std::move(l)), l_points_(finite_points(l_)), table_(std::move(table))
{
    if (table_.size() != l_points_.size())
        throw ValidationError("interval table needs one row per codomain point");
    for (std::size_t j = 0; j < table_.size(); ++j) {
        if (table_[j].empty())
            throw ValidationError("interval table row " + std::to_string(j) + " is empty (map must be onto)");
        for (const auto& iv : table_[j]) {
            validate_point(k_, iv.lo);
            validate_point(k_, iv.hi);
            if (!is_clopen_interval(k_, iv.lo, iv.hi))
                throw ValidationError("interval table entry is not a clopen interval");
            sorted_.push_back({iv, j});
        }
    }
    std::sort(sorted_.begin(), sorted_.end(),
              [&](const auto& x, const auto& y) { return less(k_, x.first.lo, y.first.lo); });
    if (!(sorted_.front().first.lo == min_point(k_)) || !(sorted_.back().first.hi == max_point(k_)))
        throw ValidationError("interval table does not cover the domain");
    for (std::size_t i = 1; i < sorted_.size(); ++i) {
        Neighbor nb = right_neighbor(k_, sorted_[i - 1].first.hi);
        if (nb.kind != Neighbor::Kind::Point || !(nb.point == sorted_[i].first.lo))
            throw ValidationError("interval table entries overlap or leave a gap");
        if (sorted_[i].second < sorted_[i - 1].second)
            increasing_ = false;
    }
}

std::size_t IntervalTableMap::codomain_index(const LinePoint& q) const
{
    for (std::size_t j = 0; j < l_points_.size(); ++j)
        if (l_points_[j] == q)
            return j;
    throw ValidationError("point " + q.to_string() + " is not in the codomain");
}

LinePoint IntervalTableMap::eval(const LinePoint& p) const
{
    std::size_t lo = 0;
    std::size_t hi = sorted_.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (compare(k_, sorted_[mid].first.lo, p) <= 0)
            lo = mid;
        else
            hi = mid;
    }
    return l_points_[sorted_[lo].second];
}

std::vector<Interval> IntervalTableMap::preimage_interval(const Interval& iv) const
{
    std::vector<Interval> all;
    for (std::size_t j = codomain_index(iv.lo); j <= codomain_index(iv.hi); ++j)
        all.insert(all.end(), table_[j].begin(), table_[j].end());
    return make_closed_set(k_, std::move(all)).components;
}

ClosedSet IntervalTableMap::fiber(const LinePoint& q) const
{
    return make_closed_set(k_, table_[codomain_index(q)]);
}

Region IntervalTableMap::fat_fiber_region() const
{
    std::vector<LinePoint> fat;
    for (std::size_t j = 0; j < table_.size(); ++j) {
        ClosedSet f = make_closed_set(k_, table_[j]);
        if (f.components.size() > 1 || !(f.components[0].lo == f.components[0].hi))
            fat.push_back(l_points_[j]);
    }
    return points_region(l_, fat);
}

}  // namespace cline
