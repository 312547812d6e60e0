#include "cline/measure.hpp"

#include <algorithm>
#include <mutex>

#include "cline/error.hpp"
#include "cline/map.hpp"

namespace cline {

void Measure::add_atom(const LinePoint& p, const Rational& w)
{
    validate_point(space_, p);
    add_unchecked(p, w);
}

void Measure::add_unchecked(const LinePoint& p, const Rational& w)
{
    if (w == 0)
        return;
    auto it = atoms_.find(p);
    if (it == atoms_.end()) {
        atoms_.emplace(p, w);
        return;
    }
    it->second += w;
    if (it->second == 0)
        atoms_.erase(it);
}

void Measure::add(const Measure& other, const Rational& scale)
{
    for (const auto& [p, w] : other.atoms_)
        add_unchecked(p, w * scale);
}

Rational Measure::weight(const LinePoint& p) const
{
    auto it = atoms_.find(p);
    return it == atoms_.end() ? Rational(0) : it->second;
}

Rational Measure::tv_norm() const
{
    Rational s = 0;
    for (const auto& kv : atoms_)
        s += rabs(kv.second);
    return s;
}

Rational Measure::total() const
{
    Rational s = 0;
    for (const auto& kv : atoms_)
        s += kv.second;
    return s;
}

Measure Measure::scaled(const Rational& c) const
{
    Measure out(space_);
    if (c == 0)
        return out;
    for (const auto& [p, w] : atoms_)
        out.atoms_.emplace(p, w * c);
    return out;
}

std::string Measure::to_string() const
{
    std::vector<std::pair<LinePoint, Rational>> sorted(atoms_.begin(), atoms_.end());
    std::sort(sorted.begin(), sorted.end(),
              [&](const auto& a, const auto& b) { return less(space_, a.first, b.first); });
    std::string out = "{";
    for (std::size_t i = 0; i < sorted.size(); ++i)
        out += (i ? ", " : "") + sorted[i].first.to_string() + ": " + cline::to_string(sorted[i].second);
    return out + "}";
}

Measure operator+(const Measure& a, const Measure& b)
{
    Measure out = a;
    out.add(b);
    return out;
}

Measure operator-(const Measure& a, const Measure& b)
{
    Measure out = a;
    out.add(b, -1);
    return out;
}

Measure dirac(const Term& space, const LinePoint& p, const Rational& w)
{
    Measure m(space);
    m.add_atom(p, w);
    return m;
}

Measure restrict(const Measure& m, const Interval& iv)
{
    Measure out(m.space());
    for (const auto& [p, w] : m.atoms())
        if (in_interval(m.space(), iv, p))
            out.add_unchecked(p, w);
    return out;
}

Measure restrict(const Measure& m, const Region& r)
{
    Measure out(m.space());
    for (const auto& [p, w] : m.atoms())
        if (contains(m.space(), r, p))
            out.add_unchecked(p, w);
    return out;
}

Rational mass(const Measure& m, const Interval& iv)
{
    Rational s = 0;
    for (const auto& [p, w] : m.atoms())
        if (in_interval(m.space(), iv, p))
            s += w;
    return s;
}

Measure pushforward(const MapDescriptor& phi, const Measure& m)
{
    Measure out(phi.codomain());
    for (const auto& [p, w] : m.atoms())
        out.add_unchecked(phi.eval(p), w);
    return out;
}

SimpleFunction::SimpleFunction(Term space, std::vector<SimplePiece> pieces)
    : space_(std::move(space)), pieces_(std::move(pieces))
{
    if (pieces_.empty())
        throw ValidationError("simple function needs at least one piece");
    if (!(pieces_.front().interval.lo == min_point(space_)))
        throw ValidationError("simple function pieces must start at the min");
    if (!(pieces_.back().interval.hi == max_point(space_)))
        throw ValidationError("simple function pieces must end at the max");
    for (std::size_t i = 0; i < pieces_.size(); ++i) {
        const Interval& iv = pieces_[i].interval;
        validate_point(space_, iv.lo);
        validate_point(space_, iv.hi);
        if (!is_clopen_interval(space_, iv.lo, iv.hi))
            throw ValidationError("piece [" + iv.lo.to_string() + ", " + iv.hi.to_string() + "] is not clopen");
        if (i > 0) {
            Neighbor nb = right_neighbor(space_, pieces_[i - 1].interval.hi);
            if (nb.kind != Neighbor::Kind::Point || !(nb.point == iv.lo))
                throw ValidationError("simple function pieces leave a gap or overlap at " + iv.lo.to_string());
        }
    }
}

SimpleFunction SimpleFunction::constant(const Term& space, const Rational& c)
{
    return SimpleFunction(space, {{{min_point(space), max_point(space)}, c}});
}

SimpleFunction SimpleFunction::indicator(const Term& space, const std::optional<Interval>& iv)
{
    if (!iv)
        return constant(space, 0);
    std::vector<SimplePiece> pieces;
    LinePoint lo = min_point(space);
    LinePoint hi = max_point(space);
    if (!(iv->lo == lo)) {
        Neighbor l = left_neighbor(space, iv->lo);
        if (l.kind != Neighbor::Kind::Point)
            throw ValidationError("indicator interval is not clopen");
        pieces.push_back({{lo, l.point}, 0});
    }
    pieces.push_back({*iv, 1});
    if (!(iv->hi == hi)) {
        Neighbor r = right_neighbor(space, iv->hi);
        if (r.kind != Neighbor::Kind::Point)
            throw ValidationError("indicator interval is not clopen");
        pieces.push_back({{r.point, hi}, 0});
    }
    return SimpleFunction(space, std::move(pieces));
}

Rational SimpleFunction::operator()(const LinePoint& p) const
{
    std::size_t lo = 0;
    std::size_t hi = pieces_.size();
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (compare(space_, pieces_[mid].interval.lo, p) <= 0)
            lo = mid;
        else
            hi = mid;
    }
    return pieces_[lo].value;
}

std::string SimpleFunction::describe() const
{
    std::string out;
    for (const auto& pc : pieces_) {
        if (!out.empty())
            out += " ";
        out += "[" + pc.interval.lo.to_string() + "," + pc.interval.hi.to_string() + "]=" + cline::to_string(pc.value);
    }
    return out;
}

Rational integrate(const SimpleFunction& f, const Measure& m)
{
    Rational s = 0;
    for (const auto& [p, w] : m.atoms())
        s += f(p) * w;
    return s;
}

struct MeasureSequence::State {
    Term space;
    Generator gen;
    Moduli moduli;
    std::string name;
    std::mutex mu;
    std::map<std::uint64_t, Measure> cache;
};

MeasureSequence::MeasureSequence(Term space, Generator gen, Moduli moduli, std::string name)
    : state_(std::make_shared<State>())
{
    state_->space = std::move(space);
    state_->gen = std::move(gen);
    state_->moduli = std::move(moduli);
    state_->name = std::move(name);
}

Measure MeasureSequence::operator()(std::uint64_t n) const
{
    if (n == 0)
        throw ValidationError("measure sequences are indexed from 1");
    {
        std::lock_guard<std::mutex> lock(state_->mu);
        auto it = state_->cache.find(n);
        if (it != state_->cache.end())
            return it->second;
    }
    Measure m = state_->gen(n);
    std::lock_guard<std::mutex> lock(state_->mu);
    state_->cache.emplace(n, m);
    return m;
}

const Term& MeasureSequence::space() const { return state_->space; }
const MeasureSequence::Moduli& MeasureSequence::moduli() const { return state_->moduli; }
const std::string& MeasureSequence::name() const { return state_->name; }

MeasureSequence restrict_sequence(const MeasureSequence& s, const Interval& iv)
{
    const Term& space = s.space();
    const MeasureSequence::Moduli& m = s.moduli();
    MeasureSequence::Moduli out;
    out.norm_sup = m.norm_sup;
    if (m.support_vanish) {
        auto sv = m.support_vanish;
        out.support_vanish = [sv, space, iv](const Interval& j) -> std::optional<std::uint64_t> {
            auto x = intersect_intervals(space, iv, j);
            if (!x)
                return 1;
            return sv(*x);
        };
        out.zero_from = sv(iv);
    }
    if (m.zero_from && (!out.zero_from || *m.zero_from < *out.zero_from))
        out.zero_from = m.zero_from;
    if (m.decay) {
        auto dc = m.decay;
        out.decay = [dc, space, iv](const Interval& j, const Rational& eps) -> std::optional<std::uint64_t> {
            auto x = intersect_intervals(space, iv, j);
            if (!x)
                return 1;
            return dc(*x, eps);
        };
    }
    return MeasureSequence(
        space, [s, iv](std::uint64_t n) { return restrict(s(n), iv); }, std::move(out), s.name() + "|" + iv.lo.to_string() + ".." + iv.hi.to_string());
}

std::vector<Rational> norm_profile(const MeasureSequence& s, std::uint64_t window)
{
    std::vector<Rational> out;
    for (std::uint64_t n = 1; n <= window; ++n)
        out.push_back(s(n).tv_norm());
    return out;
}

}  // namespace cline
