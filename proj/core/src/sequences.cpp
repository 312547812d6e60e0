#include "cline/sequences.hpp"

#include <algorithm>
#include <cctype>

#include "cline/error.hpp"

namespace cline {

std::optional<std::uint64_t> first_true(const std::function<bool(std::uint64_t)>& pred, std::uint64_t cap)
{
    if (pred(1))
        return 1;
    std::uint64_t lo = 1;  // pred(lo) false
    std::uint64_t hi = 2;
    while (!pred(hi)) {
        lo = hi;
        if (hi > cap / 2)
            return std::nullopt;
        hi *= 2;
    }
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (pred(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

namespace {

struct Placeholder {
    std::size_t begin = 0;
    std::size_t end = 0;  // one past '}'
    std::int64_t shift = 0;
};

Placeholder find_placeholder(std::string_view text)
{
    auto b = text.find('{');
    auto e = text.find('}');
    if (b == std::string_view::npos || e == std::string_view::npos || e < b)
        throw ParseError("template needs one {n} placeholder", b == std::string_view::npos ? 0 : b);
    if (text.find('{', b + 1) != std::string_view::npos)
        throw ParseError("template has more than one placeholder", b);
    std::string_view body = text.substr(b + 1, e - b - 1);
    Placeholder ph{b, e + 1, 0};
    if (body.empty() || body[0] != 'n')
        throw ParseError("placeholder must start with n", b + 1);
    if (body.size() > 1) {
        if ((body[1] != '+' && body[1] != '-') || body.size() < 3)
            throw ParseError("placeholder must look like {n}, {n+c} or {n-c}", b + 1);
        std::int64_t c = 0;
        for (char ch : body.substr(2)) {
            if (!std::isdigit(static_cast<unsigned char>(ch)))
                throw ParseError("bad placeholder offset", b + 1);
            c = c * 10 + (ch - '0');
        }
        ph.shift = body[1] == '+' ? c : -c;
    }
    return ph;
}

std::uint64_t placeholder_value(const Placeholder& ph, std::uint64_t n, std::string_view text)
{
    std::int64_t v = static_cast<std::int64_t>(n) + ph.shift;
    if (v < 0)
        throw ValidationError("template " + std::string(text) + " is negative at n = " + std::to_string(n));
    return static_cast<std::uint64_t>(v);
}

// Term reached by following the steps of a path from t.
Term subterm_at(Term t, const std::vector<Step>& steps)
{
    std::size_t i = 0;
    for (;;) {
        while (t.kind() == TermKind::Rev || t.kind() == TermKind::Ordinal)
            t = t.kind() == TermKind::Rev ? t.inner() : t.compiled();
        if (i == steps.size())
            return t;
        const Step& s = steps[i++];
        switch (t.kind()) {
        case TermKind::Chain: t = Term::single(); break;
        case TermKind::Concat: t = t.parts().at(s.n); break;
        case TermKind::OmegaUp:
        case TermKind::OmegaIter: t = s.kind == StepKind::Top ? t.top() : t.block(s.n); break;
        case TermKind::LexSum: t = t.fiber_at(*s.base); break;
        default: throw ValidationError("path leaves the term");
        }
    }
}

}  // namespace

PointTemplate ordinal_template(const Term& segment, std::string_view text)
{
    if (segment.kind() != TermKind::Ordinal)
        throw ValidationError("ordinal template on a non-ordinal space");
    Placeholder ph = find_placeholder(text);
    // split into summands, locating the one with the placeholder
    std::vector<std::string> pieces;
    std::size_t var = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= text.size(); ++i) {
        bool in_ph = i > ph.begin && i < ph.end;
        if (i == text.size() || (text[i] == '+' && !in_ph)) {
            if (ph.begin >= start && ph.begin < i)
                var = pieces.size();
            pieces.emplace_back(text.substr(start, i - start));
            start = i + 1;
        }
    }
    std::string vp = pieces[var];
    std::size_t b = vp.find('{');
    std::uint32_t exp = 0;
    std::string head = vp.substr(0, b);
    if (!vp.empty() && vp.back() != '}')
        throw ParseError("placeholder must be the coefficient of its summand", ph.begin);
    if (head == "w.")
        exp = 1;
    else if (head.rfind("w^", 0) == 0 && head.size() > 3 && head.back() == '.')
        exp = static_cast<std::uint32_t>(std::stoul(head.substr(2, head.size() - 3)));
    else if (!head.empty())
        throw ParseError("placeholder must be the coefficient of its summand", ph.begin);
    std::vector<Ordinal::Term> prefix;
    std::vector<Ordinal::Term> suffix;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i == var)
            continue;
        Ordinal o = parse_ordinal(pieces[i]);
        for (const auto& t : o.terms())
            (i < var ? prefix : suffix).push_back(t);
    }
    Ordinal alpha = segment.ordinal();
    std::string owned(text);
    auto value = [prefix, suffix, exp, ph, owned](std::uint64_t n) {
        std::uint64_t c = placeholder_value(ph, n, owned);
        std::vector<Ordinal::Term> ts = prefix;
        if (c > 0)
            ts.push_back({exp, c});
        ts.insert(ts.end(), suffix.begin(), suffix.end());
        Ordinal out;
        for (const auto& t : ts)
            out = out + Ordinal::power(t.exp, t.coef);
        return out;
    };
    Ordinal lim;
    for (const auto& t : prefix)
        lim = lim + Ordinal::power(t.exp, t.coef);
    lim = lim + Ordinal::power(exp + 1);
    if (lim > alpha)
        throw ValidationError("template " + owned + " leaves [0, " + alpha.to_string() + "]");
    PointTemplate out;
    out.text = owned;
    out.limit = ordinal_point(segment, lim);
    out.at = [segment, value](std::uint64_t n) { return ordinal_point(segment, value(n)); };
    return out;
}

PointTemplate path_template(const Term& space, std::string_view text)
{
    Placeholder ph = find_placeholder(text);
    if (ph.begin == 0 || text[ph.begin - 1] != 'c')
        throw ParseError("placeholder must follow a copy step 'c'", ph.begin);
    std::string owned(text);
    std::string before(text.substr(0, ph.begin - 1));
    std::string after(text.substr(ph.end));
    auto at = [space, before, after, ph, owned](std::uint64_t n) {
        std::string s = before + "c" + std::to_string(placeholder_value(ph, n, owned)) + after;
        LinePoint p = parse_point(s);
        validate_point(space, p);
        return p;
    };
    // steps up to the copy step, which sits where the prefix text ends
    std::vector<Step> prefix;
    if (!before.empty()) {
        std::string trimmed = before;
        if (trimmed.back() != '.')
            throw ParseError("copy step with a placeholder must start a path segment", ph.begin - 1);
        trimmed.pop_back();
        prefix = parse_point(trimmed).steps();
    }
    Term node = subterm_at(space, prefix);
    if (node.kind() != TermKind::OmegaUp && node.kind() != TermKind::OmegaIter)
        throw ValidationError("placeholder copy step of " + owned + " is not inside an omega term");
    std::vector<Step> lim = prefix;
    lim.push_back(Step::top());
    LinePoint bottom = min_point(node.top());
    lim.insert(lim.end(), bottom.steps().begin(), bottom.steps().end());
    PointTemplate out;
    out.text = owned;
    out.limit = LinePoint(std::move(lim));
    out.at = at;
    at(1);
    return out;
}

PointTemplate point_template(const Term& space, std::string_view text)
{
    if (space.kind() == TermKind::Ordinal) {
        bool ordinal_like = std::all_of(text.begin(), text.end(), [](char c) {
            return std::isdigit(static_cast<unsigned char>(c)) || c == 'w' || c == '^' || c == '.' || c == '+' ||
                   c == '{' || c == '}' || c == 'n' || c == '-';
        });
        if (ordinal_like && text.find("c{") == std::string_view::npos)
            return ordinal_template(space, text);
    }
    return path_template(space, text);
}

namespace {

// First n from which p(n) stays on the side of iv where the limit lies (limit outside iv).
std::optional<std::uint64_t> leave_index(const Term& space, const PointTemplate& p, const Interval& iv)
{
    bool below = less(space, p.limit, iv.lo);
    return first_true([&](std::uint64_t n) {
        LinePoint q = p.at(n);
        return below ? less(space, q, iv.lo) : less(space, iv.hi, q);
    });
}

// First n from which membership of p(n) in iv agrees with that of the limit.
std::optional<std::uint64_t> settle_index(const Term& space, const PointTemplate& p, const Interval& iv)
{
    if (!in_interval(space, iv, p.limit))
        return leave_index(space, p, iv);
    return first_true([&](std::uint64_t n) { return in_interval(space, iv, p.at(n)); });
}

}  // namespace

MeasureSequence moving_atom_sequence(Term space, std::vector<MovingAtom> moving, std::vector<FixedAtom> fixed,
                                     std::string name)
{
    for (const auto& f : fixed)
        validate_point(space, f.point);
    for (const auto& m : moving)
        validate_point(space, m.point.limit);
    auto mv = std::make_shared<const std::vector<MovingAtom>>(std::move(moving));
    auto fx = std::make_shared<const std::vector<FixedAtom>>(std::move(fixed));
    MeasureSequence::Moduli mod;
    Rational sup = 0;
    for (const auto& m : *mv)
        sup += rabs(m.weight);
    for (const auto& f : *fx)
        sup += rabs(f.weight);
    mod.norm_sup = sup;
    mod.support_vanish = [space, mv, fx](const Interval& iv) -> std::optional<std::uint64_t> {
        std::uint64_t best = 1;
        for (const auto& f : *fx)
            if (in_interval(space, iv, f.point))
                return std::nullopt;
        for (const auto& m : *mv) {
            if (in_interval(space, iv, m.point.limit))
                return std::nullopt;
            auto n = leave_index(space, m.point, iv);
            if (!n)
                return std::nullopt;
            best = std::max(best, *n);
        }
        return best;
    };
    mod.decay = [space, mv, fx](const Interval& iv, const Rational& eps) -> std::optional<std::uint64_t> {
        Rational lim = 0;
        std::uint64_t best = 1;
        for (const auto& f : *fx)
            if (in_interval(space, iv, f.point))
                lim += f.weight;
        for (const auto& m : *mv) {
            if (in_interval(space, iv, m.point.limit))
                lim += m.weight;
            auto n = settle_index(space, m.point, iv);
            if (!n)
                return std::nullopt;
            best = std::max(best, *n);
        }
        if (rabs(lim) >= eps)
            return std::nullopt;
        return best;
    };
    return MeasureSequence(
        space,
        [space, mv, fx](std::uint64_t n) {
            Measure m(space);
            for (const auto& a : *mv)
                m.add_unchecked(a.point.at(n), a.weight);
            for (const auto& f : *fx)
                m.add_unchecked(f.point, f.weight);
            return m;
        },
        std::move(mod), std::move(name));
}

MeasureSequence delta_diff_sequence(const Term& space, PointTemplate p)
{
    LinePoint lim = p.limit;
    std::string name = "delta-diff " + p.text;
    return moving_atom_sequence(space, {{std::move(p), 1}}, {{lim, -1}}, name);
}

MeasureSequence scaled_sequence(const MeasureSequence& s, const Rational& c)
{
    if (c == 0)
        return zero_sequence(s.space());
    const auto& m = s.moduli();
    MeasureSequence::Moduli out;
    out.support_vanish = m.support_vanish;
    out.zero_from = m.zero_from;
    if (m.norm_sup)
        out.norm_sup = *m.norm_sup * rabs(c);
    if (m.decay) {
        auto d = m.decay;
        Rational k = rabs(c);
        out.decay = [d, k](const Interval& iv, const Rational& eps) { return d(iv, eps / k); };
    }
    return MeasureSequence(
        s.space(), [s, c](std::uint64_t n) { return s(n).scaled(c); }, std::move(out),
        "scaled(" + s.name() + ", " + c.get_str() + ")");
}

MeasureSequence sum_sequence(const std::vector<MeasureSequence>& parts)
{
    if (parts.empty())
        throw ValidationError("sum of no sequences");
    const Term& space = parts.front().space();
    for (const auto& p : parts)
        if (!(p.space() == space))
            throw ValidationError("summed sequences live on different spaces");
    MeasureSequence::Moduli out;
    bool all_sup = true;
    bool all_zero = true;
    bool all_sv = true;
    bool all_decay = true;
    Rational sup = 0;
    std::uint64_t zero = 1;
    std::string name = "sum(";
    for (const auto& p : parts) {
        const auto& m = p.moduli();
        all_sup = all_sup && m.norm_sup.has_value();
        all_zero = all_zero && m.zero_from.has_value();
        all_sv = all_sv && static_cast<bool>(m.support_vanish);
        all_decay = all_decay && static_cast<bool>(m.decay);
        if (m.norm_sup)
            sup += *m.norm_sup;
        if (m.zero_from)
            zero = std::max(zero, *m.zero_from);
        name += (name.size() > 4 ? ", " : "") + p.name();
    }
    name += ")";
    if (all_sup)
        out.norm_sup = sup;
    if (all_zero)
        out.zero_from = zero;
    if (all_sv)
        out.support_vanish = [parts](const Interval& iv) -> std::optional<std::uint64_t> {
            std::uint64_t best = 1;
            for (const auto& p : parts) {
                auto n = p.moduli().support_vanish(iv);
                if (!n)
                    return std::nullopt;
                best = std::max(best, *n);
            }
            return best;
        };
    if (all_decay)
        out.decay = [parts](const Interval& iv, const Rational& eps) -> std::optional<std::uint64_t> {
            Rational share = eps / Rational(parts.size());
            std::uint64_t best = 1;
            for (const auto& p : parts) {
                auto n = p.moduli().decay(iv, share);
                if (!n)
                    return std::nullopt;
                best = std::max(best, *n);
            }
            return best;
        };
    return MeasureSequence(
        space,
        [parts, space](std::uint64_t n) {
            Measure m(space);
            for (const auto& p : parts)
                m.add(p(n));
            return m;
        },
        std::move(out), name);
}

MeasureSequence zero_sequence(const Term& space)
{
    MeasureSequence::Moduli m;
    m.norm_sup = Rational(0);
    m.zero_from = 1;
    m.support_vanish = [](const Interval&) -> std::optional<std::uint64_t> { return 1; };
    m.decay = [](const Interval&, const Rational&) -> std::optional<std::uint64_t> { return 1; };
    return MeasureSequence(space, [space](std::uint64_t) { return Measure(space); }, std::move(m), "zero");
}

MeasureSequence constant_sequence(const Measure& c)
{
    if (c.is_zero())
        return zero_sequence(c.space());
    MeasureSequence::Moduli m;
    m.norm_sup = c.tv_norm();
    return MeasureSequence(c.space(), [c](std::uint64_t) { return c; }, std::move(m), "constant");
}

}  // namespace cline
