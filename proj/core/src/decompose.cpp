#include "cline/decompose.hpp"

#include "cline/error.hpp"
#include "cline/order_analysis.hpp"

namespace cline {

namespace {

using Steps = std::vector<Step>;

Steps concat_steps(Steps a, const Steps& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

bool has_prefix(const Steps& s, const Steps& prefix)
{
    if (s.size() < prefix.size())
        return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
        const Step& x = s[i];
        const Step& y = prefix[i];
        if (x.kind != y.kind || x.n != y.n)
            return false;
        if (x.kind == StepKind::Lex && !(*x.base == *y.base))
            return false;
    }
    return true;
}

Family finite_family(std::vector<SpacePtr> blocks)
{
    auto shared = std::make_shared<const std::vector<SpacePtr>>(std::move(blocks));
    Family f;
    f.count = shared->size();
    f.block = [shared](std::uint64_t i) { return shared->at(i); };
    f.locate = [shared](const LinePoint& q) -> std::optional<std::uint64_t> {
        for (std::size_t i = 0; i < shared->size(); ++i)
            if ((*shared)[i]->contains(q))
                return i;
        return std::nullopt;
    };
    return f;
}

// Finite families first, then the infinite ones interleaved round robin.
Family union_family(const std::vector<Family>& fams)
{
    std::vector<Family> fin;
    std::vector<Family> inf;
    std::uint64_t head = 0;
    for (const auto& f : fams) {
        if (f.count) {
            if (*f.count == 0)
                continue;
            head += *f.count;
            fin.push_back(f);
        } else {
            inf.push_back(f);
        }
    }
    if (fin.size() + inf.size() == 1)
        return fin.empty() ? inf[0] : fin[0];
    Family out;
    if (inf.empty())
        out.count = head;
    out.block = [fin, inf, head](std::uint64_t g) -> SpacePtr {
        if (g < head) {
            for (const auto& f : fin) {
                if (g < *f.count)
                    return f.block(g);
                g -= *f.count;
            }
        }
        if (inf.empty())
            throw InvariantError("family index out of range");
        g -= head;
        return inf[g % inf.size()].block(g / inf.size());
    };
    out.locate = [fin, inf, head](const LinePoint& q) -> std::optional<std::uint64_t> {
        std::uint64_t base = 0;
        for (const auto& f : fin) {
            if (auto i = f.locate(q))
                return base + *i;
            base += *f.count;
        }
        for (std::size_t j = 0; j < inf.size(); ++j)
            if (auto i = inf[j].locate(q))
                return head + *i * inf.size() + j;
        return std::nullopt;
    };
    return out;
}

Family empty_family()
{
    return finite_family({});
}

// ---- ordinal route ----

class OrdinalSpace : public Space {
public:
    OrdinalSpace(Term root, Ordinal offset, Ordinal type)
        : Space(std::move(root)), offset_(std::move(offset)), type_(std::move(type))
    {
    }

    Interval interval() const override
    {
        return {ordinal_point(root_, offset_), ordinal_point(root_, add(offset_, type_))};
    }

    Partition decompose() const override
    {
        Partition p;
        if (type_.is_finite()) {
            p.kind = Partition::Kind::Leaf;
            return p;
        }
        if (type_.is_successor()) {
            // type = lim + m: [0, lim] followed by m singletons
            auto terms = type_.terms();
            std::uint64_t m = terms.back().coef;
            terms.pop_back();
            Ordinal lim = Ordinal::from_terms(terms);
            p.kind = Partition::Kind::Finite;
            p.parts.push_back(std::make_shared<OrdinalSpace>(root_, offset_, lim));
            for (std::uint64_t i = 1; i <= m; ++i)
                p.parts.push_back(std::make_shared<OrdinalSpace>(root_, add(add(offset_, lim), Ordinal::finite(i)), Ordinal()));
            return p;
        }
        p.kind = Partition::Kind::Pivot;
        p.infinity = ordinal_point(root_, add(offset_, type_));
        Term root = root_;
        Ordinal off = offset_;
        Ordinal ty = type_;
        p.family.block = [root, off, ty](std::uint64_t k) -> SpacePtr {
            Ordinal ak = fundamental_sequence(ty, k);
            if (k == 0)
                return std::make_shared<OrdinalSpace>(root, off, ak);
            Ordinal prev = fundamental_sequence(ty, k - 1);
            return std::make_shared<OrdinalSpace>(root, add(add(off, prev), Ordinal::finite(1)), interval_type(prev, ak));
        };
        p.family.locate = [root, off, ty](const LinePoint& q) -> std::optional<std::uint64_t> {
            Ordinal x = point_ordinal(root, q);
            if (compare(x, off) < 0)
                return std::nullopt;
            Ordinal r = left_subtract(off, x);
            if (compare(r, ty) >= 0)
                return std::nullopt;
            // least k with r <= alpha_k
            std::uint64_t hi = 1;
            while (compare(r, fundamental_sequence(ty, hi)) > 0)
                hi *= 2;
            std::uint64_t lo = 0;
            if (compare(r, fundamental_sequence(ty, 0)) <= 0)
                return 0;
            while (hi - lo > 1) {
                std::uint64_t mid = (lo + hi) / 2;
                if (compare(r, fundamental_sequence(ty, mid)) <= 0)
                    hi = mid;
                else
                    lo = mid;
            }
            return hi;
        };
        return p;
    }

    std::string describe() const override
    {
        return "[" + offset_.to_string() + ", " + add(offset_, type_).to_string() + "]";
    }

private:
    Ordinal offset_;
    Ordinal type_;
};

// ---- structural route ----

// A LexSum at `prefix` (in the coordinates of `outer`) whose base coordinates are in use.
struct Lift {
    Term lexsum;
    Steps prefix;
    std::shared_ptr<const Lift> outer;
};
using LiftPtr = std::shared_ptr<const Lift>;

Steps lift_end(const LiftPtr& lift, Steps x, bool want_max)
{
    for (const Lift* l = lift.get(); l; l = l->outer.get()) {
        LinePoint b(std::move(x));
        const Term& fib = l->lexsum.fiber_at(b);
        Steps fp = (want_max ? max_point(fib) : min_point(fib)).steps();
        Steps next = l->prefix;
        next.push_back(Step::lex(b));
        next.insert(next.end(), fp.begin(), fp.end());
        x = std::move(next);
    }
    return x;
}

Steps lift_single(const LiftPtr& lift, Steps x)
{
    for (const Lift* l = lift.get(); l; l = l->outer.get()) {
        LinePoint b(std::move(x));
        const Term& fib = l->lexsum.fiber_at(b);
        if (!is_one_point(fib))
            throw ValidationError("pivot point " + b.to_string() + " has a fiber with more than one point");
        Steps fp = min_point(fib).steps();
        Steps next = l->prefix;
        next.push_back(Step::lex(b));
        next.insert(next.end(), fp.begin(), fp.end());
        x = std::move(next);
    }
    return x;
}

// Coordinates of q inside the base system of `lift`.
std::optional<Steps> project(const LiftPtr& lift, const Steps& q)
{
    if (!lift)
        return q;
    auto o = project(lift->outer, q);
    if (!o || !has_prefix(*o, lift->prefix) || o->size() <= lift->prefix.size())
        return std::nullopt;
    const Step& s = (*o)[lift->prefix.size()];
    if (s.kind != StepKind::Lex)
        return std::nullopt;
    return s.base->steps();
}

class StructSpace : public Space {
public:
    StructSpace(Term root, Term term, Steps prefix, std::uint64_t first_copy, LiftPtr lift)
        : Space(std::move(root)), term_(term.unwrap()), prefix_(std::move(prefix)), first_copy_(first_copy),
          lift_(std::move(lift))
    {
    }

    Interval interval() const override
    {
        return {LinePoint(lift_end(lift_, concat_steps(prefix_, own_min()), false)),
                LinePoint(lift_end(lift_, concat_steps(prefix_, max_point(term_).steps()), true))};
    }

    Partition decompose() const override;

    std::string describe() const override
    {
        std::string s = term_.to_sexpr() + " at " + LinePoint(prefix_).to_string();
        if (first_copy_)
            s += " from copy " + std::to_string(first_copy_);
        if (lift_)
            s += " (lifted)";
        return s;
    }

    // Blocks covering the space minus its min (right) or max (left).
    Family side_family(bool right) const;

private:
    bool is_omega() const { return term_.kind() == TermKind::OmegaUp || term_.kind() == TermKind::OmegaIter; }
    Steps own_min() const
    {
        if (first_copy_ && is_omega())
            return concat_steps({Step::copy(first_copy_)}, min_point(term_.block(first_copy_)).steps());
        return min_point(term_).steps();
    }
    SpacePtr child(const Term& t, const Step& s, std::uint64_t first_copy = 0) const
    {
        return make(root_, t, concat_steps(prefix_, {s}), first_copy, lift_);
    }
    Family copies_family() const;
    LiftPtr base_lift() const { return std::make_shared<const Lift>(Lift{term_, prefix_, lift_}); }

public:
    static SpacePtr make(const Term& root, const Term& t, Steps prefix, std::uint64_t first_copy, LiftPtr lift)
    {
        // a lifted single point is the fiber over it
        while (lift && first_copy == 0 && is_one_point(t.unwrap())) {
            Steps x = concat_steps(prefix, min_point(t).steps());
            LinePoint b(x);
            Term fib = lift->lexsum.fiber_at(b);
            Steps p = lift->prefix;
            p.push_back(Step::lex(b));
            return make(root, fib, std::move(p), 0, lift->outer);
        }
        return std::make_shared<StructSpace>(root, t, std::move(prefix), first_copy, std::move(lift));
    }

private:
    Term term_;
    Steps prefix_;
    std::uint64_t first_copy_;
    LiftPtr lift_;
};

Family StructSpace::copies_family() const
{
    Term root = root_;
    Term t = term_;
    Steps prefix = prefix_;
    std::uint64_t f = first_copy_;
    LiftPtr lift = lift_;
    Family fam;
    fam.block = [=](std::uint64_t k) {
        return StructSpace::make(root, t.block(f + k), concat_steps(prefix, {Step::copy(f + k)}), 0, lift);
    };
    fam.locate = [=](const LinePoint& q) -> std::optional<std::uint64_t> {
        auto own = project(lift, q.steps());
        if (!own || !has_prefix(*own, prefix) || own->size() <= prefix.size())
            return std::nullopt;
        const Step& s = (*own)[prefix.size()];
        if (s.kind != StepKind::Copy || s.n < f)
            return std::nullopt;
        return s.n - f;
    };
    return fam;
}

Family StructSpace::side_family(bool right) const
{
    const Term& t = term_;
    if (first_copy_ == 0 && is_one_point(t))
        return empty_family();
    switch (t.kind()) {
    case TermKind::Chain: {
        std::vector<SpacePtr> blocks;
        std::uint64_t n = t.chain_size();
        for (std::uint64_t i = right ? 1 : 0; i < (right ? n : n - 1); ++i)
            blocks.push_back(child(Term::single(), Step::index(i)));
        return finite_family(std::move(blocks));
    }
    case TermKind::Concat: {
        const auto& parts = t.parts();
        std::size_t end = right ? 0 : parts.size() - 1;
        std::vector<SpacePtr> rest;
        for (std::size_t i = 0; i < parts.size(); ++i)
            if (i != end)
                rest.push_back(child(parts[i], Step::part(i)));
        auto edge = std::dynamic_pointer_cast<const StructSpace>(child(parts[end], Step::part(end)));
        return union_family({finite_family(std::move(rest)), edge->side_family(right)});
    }
    case TermKind::Rev: {
        StructSpace inner(root_, t.inner(), prefix_, 0, lift_);
        return inner.side_family(!right);
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        if (right) {
            auto first = std::dynamic_pointer_cast<const StructSpace>(child(t.block(first_copy_), Step::copy(first_copy_)));
            SpacePtr tail = make(root_, t, prefix_, first_copy_ + 1, lift_);
            return union_family({first->side_family(true), finite_family({tail})});
        }
        if (!is_one_point(t.top()))
            throw ValidationError("no clopen split below the max of " + t.to_sexpr());
        return copies_family();
    }
    case TermKind::LexSum: {
        LinePoint b = right ? min_point(t.base()) : max_point(t.base());
        Steps fp = prefix_;
        fp.push_back(Step::lex(b));
        auto fiber = std::dynamic_pointer_cast<const StructSpace>(make(root_, t.fiber_at(b), fp, 0, lift_));
        StructSpace base(root_, t.base(), {}, 0, base_lift());
        std::vector<Family> fams{base.side_family(right)};
        if (fiber)
            fams.push_back(fiber->side_family(right));
        return union_family(fams);
    }
    default: break;
    }
    throw ValidationError("no clopen split for " + t.to_sexpr());
}

Partition StructSpace::decompose() const
{
    const Term& t = term_;
    Partition p;
    if (first_copy_ == 0 && is_finite_term(t)) {
        if (!lift_) {
            p.kind = Partition::Kind::Leaf;
            return p;
        }
        p.kind = Partition::Kind::Finite;
        for (const auto& x : finite_points(t))
            p.parts.push_back(make(root_, Term::single(), concat_steps(prefix_, x.steps()), 0, lift_));
        return p;
    }
    switch (t.kind()) {
    case TermKind::Concat:
        p.kind = Partition::Kind::Finite;
        for (std::size_t i = 0; i < t.parts().size(); ++i)
            p.parts.push_back(child(t.parts()[i], Step::part(i)));
        return p;
    case TermKind::Rev: return StructSpace(root_, t.inner(), prefix_, 0, lift_).decompose();
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        p.kind = Partition::Kind::Pivot;
        const Term& top = t.top();
        Steps tp = prefix_;
        tp.push_back(Step::top());
        p.infinity = LinePoint(lift_single(lift_, concat_steps(tp, min_point(top).steps())));
        if (is_one_point(top)) {
            p.family = copies_family();
        } else {
            StructSpace top_space(root_, top, tp, 0, lift_);
            p.family = union_family({copies_family(), top_space.side_family(true)});
        }
        return p;
    }
    case TermKind::LexSum: return StructSpace(root_, t.base(), {}, 0, base_lift()).decompose();
    default: break;
    }
    throw ValidationError("no clopen split for " + t.to_sexpr());
}

}  // namespace

SpacePtr ordinal_space(const Term& segment, const Ordinal& offset, const Ordinal& type)
{
    if (segment.kind() != TermKind::Ordinal)
        throw ValidationError("ordinal_space needs an ordinal segment term");
    return std::make_shared<OrdinalSpace>(segment, offset, type);
}

SpacePtr structural_space(const Term& t)
{
    return StructSpace::make(t, t, {}, 0, nullptr);
}

SpacePtr root_space(const Term& t)
{
    if (t.kind() == TermKind::Ordinal)
        return ordinal_space(t, Ordinal(), t.ordinal());
    return structural_space(t);
}

std::optional<std::size_t> locate_part(const Partition& p, const LinePoint& q)
{
    for (std::size_t i = 0; i < p.parts.size(); ++i)
        if (p.parts[i]->contains(q))
            return i;
    return std::nullopt;
}

}  // namespace cline
