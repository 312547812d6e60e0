#include "cline/region.hpp"

#include <algorithm>
#include <map>

#include "cline/error.hpp"
#include "region_internal.hpp"

namespace cline {

struct Region::Node {
    Kind kind = Kind::Empty;
    std::vector<std::uint64_t> indices;
    std::vector<Region> parts;  // Concat parts, Omega prefix
    std::vector<Region> aux;    // Omega: {tail, top}
    std::uint32_t tail_der = 0;
    std::vector<LexEntry> entries;
    std::vector<Region> exceptions;
    std::string key;
};

namespace {

using Node = Region::Node;
using Kind = Region::Kind;

Region wrap(std::shared_ptr<Node> n)
{
    return Region(std::shared_ptr<const Node>(std::move(n)));
}

const Region& empty_instance()
{
    static const Region r = [] {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Empty;
        n->key = "0";
        return wrap(std::move(n));
    }();
    return r;
}

const Region& full_instance()
{
    static const Region r = [] {
        auto n = std::make_shared<Node>();
        n->kind = Kind::Full;
        n->key = "1";
        return wrap(std::move(n));
    }();
    return r;
}

std::string join_keys(const std::vector<Region>& rs)
{
    std::string out;
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (i)
            out += ',';
        out += rs[i].key();
    }
    return out;
}

std::string tail_key(const Region& tail, std::uint32_t der)
{
    return der > 0 ? "D" + std::to_string(der) : tail.key();
}

bool is_iter(const Term& t)
{
    return t.kind() == TermKind::OmegaIter;
}

void require(bool ok, const char* what)
{
    if (!ok)
        throw ValidationError(std::string("region does not match term: ") + what);
}

Region tail_instance(const Term& t, const Region& tail, std::uint32_t der, std::uint64_t k)
{
    if (der == 0)
        return tail;
    return detail::der_tail_instance(t, k, der);
}

}  // namespace

namespace detail {

const Term& strip(const Term& t)
{
    const Term* p = &t;
    for (;;) {
        if (p->kind() == TermKind::Ordinal)
            p = &p->compiled();
        else if (p->kind() == TermKind::Rev)
            p = &p->inner();
        else
            return *p;
    }
}

Region lex_regular_points(const Term& lex)
{
    std::vector<LinePoint> pts;
    for (const auto& e : lex.exceptions())
        pts.push_back(e.point);
    if (pts.empty())
        return Region::full();
    return subtract(lex.base(), Region::full(), points_region(lex.base(), pts));
}

}  // namespace detail

using detail::strip;

Region::Region() : node_(empty_instance().node_) {}
Region Region::empty() { return empty_instance(); }
Region Region::full() { return full_instance(); }
Region::Kind Region::kind() const { return node_->kind; }
const std::string& Region::key() const { return node_->key; }
const std::vector<std::uint64_t>& Region::indices() const { return node_->indices; }
const std::vector<Region>& Region::parts() const { return node_->parts; }
const std::vector<Region>& Region::prefix() const { return node_->parts; }
const Region& Region::tail() const { return node_->aux.at(0); }
std::uint32_t Region::tail_der() const { return node_->tail_der; }
const Region& Region::top() const { return node_->aux.at(1); }
const std::vector<LexEntry>& Region::entries() const { return node_->entries; }
const std::vector<Region>& Region::exception_regions() const { return node_->exceptions; }

Region make_chain_region(const Term& t0, std::vector<std::uint64_t> indices)
{
    const Term& t = strip(t0);
    require(t.kind() == TermKind::Chain, "chain");
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    if (!indices.empty() && indices.back() >= t.chain_size())
        throw ValidationError("chain region index out of range");
    if (indices.empty())
        return Region::empty();
    if (indices.size() == t.chain_size())
        return Region::full();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Chain;
    n->key = "C{";
    for (std::size_t i = 0; i < indices.size(); ++i)
        n->key += (i ? "," : "") + std::to_string(indices[i]);
    n->key += "}";
    n->indices = std::move(indices);
    return wrap(std::move(n));
}

Region make_concat_region(const Term& t0, std::vector<Region> parts)
{
    const Term& t = strip(t0);
    require(t.kind() == TermKind::Concat && parts.size() == t.parts().size(), "concat");
    bool all_empty = true;
    bool all_full = true;
    for (const auto& p : parts) {
        all_empty = all_empty && p.is_empty();
        all_full = all_full && p.is_full();
    }
    if (all_empty)
        return Region::empty();
    if (all_full)
        return Region::full();
    auto n = std::make_shared<Node>();
    n->kind = Kind::Concat;
    n->key = "P[" + join_keys(parts) + "]";
    n->parts = std::move(parts);
    return wrap(std::move(n));
}

Region make_omega_region(const Term& t0, std::vector<Region> prefix, Region tail, std::uint32_t tail_der, Region top)
{
    const Term& t = strip(t0);
    require(t.kind() == TermKind::OmegaUp || t.kind() == TermKind::OmegaIter, "omega");
    if (tail_der > 0) {
        require(is_iter(t), "Der tail on omega-up");
        tail = Region::empty();
    } else if (is_iter(t) && !tail.is_empty() && !tail.is_full()) {
        throw RegionError("omega-iter tail must be Empty, Full or Der(j)");
    }
    while (!prefix.empty()) {
        std::uint64_t k = prefix.size() - 1;
        if (!(prefix.back() == tail_instance(t, tail, tail_der, k)))
            break;
        prefix.pop_back();
    }
    if (prefix.empty() && tail_der == 0) {
        if (tail.is_empty() && top.is_empty())
            return Region::empty();
        if (tail.is_full() && top.is_full())
            return Region::full();
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Omega;
    n->key = "W[" + join_keys(prefix) + "|" + tail_key(tail, tail_der) + "|" + top.key() + "]";
    n->parts = std::move(prefix);
    n->aux = {std::move(tail), std::move(top)};
    n->tail_der = tail_der;
    return wrap(std::move(n));
}

Region make_lex_region(const Term& t0, std::vector<LexEntry> entries, std::vector<Region> exceptions)
{
    const Term& t = strip(t0);
    require(t.kind() == TermKind::LexSum, "lexsum");
    const Term& base = t.base();
    const auto& exc = t.exceptions();
    exceptions.resize(exc.size());

    std::optional<Region> regular;
    std::map<std::string, LexEntry> grouped;
    for (auto& e : entries) {
        if (e.base.is_empty() || e.fiber.is_empty())
            continue;
        Region s = e.base;
        bool touches_exception = false;
        for (const auto& x : exc)
            touches_exception = touches_exception || contains(base, s, x.point);
        if (touches_exception) {
            if (!regular)
                regular = detail::lex_regular_points(t);
            s = intersect(base, s, *regular);
            if (s.is_empty())
                continue;
        }
        auto it = grouped.find(e.fiber.key());
        if (it == grouped.end())
            grouped.emplace(e.fiber.key(), LexEntry{s, e.fiber});
        else
            it->second.base = unite(base, it->second.base, s);
    }
    std::vector<LexEntry> norm;
    for (auto& kv : grouped)
        norm.push_back(std::move(kv.second));

    bool exc_empty = true;
    bool exc_full = true;
    for (const auto& r : exceptions) {
        exc_empty = exc_empty && r.is_empty();
        exc_full = exc_full && r.is_full();
    }
    if (norm.empty() && exc_empty)
        return Region::empty();
    if (exc_full) {
        if (!regular)
            regular = detail::lex_regular_points(t);
        if (norm.empty() && regular->is_empty())
            return Region::full();
        if (norm.size() == 1 && norm[0].fiber.is_full() && norm[0].base == *regular)
            return Region::full();
    }
    auto n = std::make_shared<Node>();
    n->kind = Kind::Lex;
    n->key = "X[";
    for (std::size_t i = 0; i < norm.size(); ++i)
        n->key += (i ? ",(" : "(") + norm[i].base.key() + ";" + norm[i].fiber.key() + ")";
    n->key += "|" + join_keys(exceptions) + "]";
    n->entries = std::move(norm);
    n->exceptions = std::move(exceptions);
    return wrap(std::move(n));
}

namespace {

// Component views that expand Empty/Full into the structured form of the term.
std::vector<std::uint64_t> chain_view(const Term& t, const Region& r)
{
    if (r.is_empty())
        return {};
    if (r.is_full()) {
        std::vector<std::uint64_t> all(t.chain_size());
        for (std::uint64_t i = 0; i < all.size(); ++i)
            all[i] = i;
        return all;
    }
    require(r.kind() == Kind::Chain, "chain view");
    return r.indices();
}

Region part_view(const Region& r, std::size_t j)
{
    if (r.is_empty() || r.is_full())
        return r;
    require(r.kind() == Kind::Concat, "concat view");
    return r.parts().at(j);
}

std::size_t omega_prefix_len(const Region& r)
{
    return r.kind() == Kind::Omega ? r.prefix().size() : 0;
}

struct TailView {
    Region uniform;
    std::uint32_t der = 0;
};

TailView omega_tail(const Region& r)
{
    if (r.is_empty() || r.is_full())
        return {r, 0};
    require(r.kind() == Kind::Omega, "omega view");
    return {r.tail_der() > 0 ? Region::empty() : r.tail(), r.tail_der()};
}

Region omega_top(const Region& r)
{
    if (r.is_empty() || r.is_full())
        return r;
    require(r.kind() == Kind::Omega, "omega view");
    return r.top();
}

std::vector<LexEntry> lex_entries_view(const Term& t, const Region& r)
{
    if (r.is_empty())
        return {};
    if (r.is_full()) {
        Region reg = detail::lex_regular_points(t);
        if (reg.is_empty())
            return {};
        return {LexEntry{reg, Region::full()}};
    }
    require(r.kind() == Kind::Lex, "lex view");
    return r.entries();
}

Region lex_exception_view(const Region& r, std::size_t i)
{
    if (r.is_empty() || r.is_full())
        return r;
    require(r.kind() == Kind::Lex, "lex view");
    return r.exception_regions().at(i);
}

Region lex_fiber_region(const Term& t, const Region& r, const LinePoint& b)
{
    int ei = t.exception_index(b);
    if (ei >= 0)
        return lex_exception_view(r, static_cast<std::size_t>(ei));
    if (r.is_empty() || r.is_full())
        return r;
    for (const auto& e : r.entries())
        if (contains(t.base(), e.base, b))
            return e.fiber;
    return Region::empty();
}

enum class Op { And, Or, Minus };

Region combine(const Term& t0, const Region& a, const Region& b, Op op);

Region combine_tail_iter(const Term& t, const TailView& a, const TailView& b, Op op, std::uint32_t& der_out)
{
    auto code = [](const TailView& v) {
        if (v.der > 0)
            return static_cast<int>(v.der);
        return v.uniform.is_empty() ? -1 : 0;
    };
    int x = code(a);
    int y = code(b);
    int r = -1;
    switch (op) {
    case Op::And:
        r = (x < 0 || y < 0) ? -1 : std::max(x, y);
        break;
    case Op::Or:
        if (x < 0)
            r = y;
        else if (y < 0)
            r = x;
        else
            r = std::min(x, y);
        break;
    case Op::Minus:
        if (y < 0)
            r = x;
        else if (x < 0 || y == 0 || x >= y)
            r = -1;
        else
            throw RegionError("difference of omega-iter tails Der(" + std::to_string(x) + ") minus Der(" +
                              std::to_string(y) + ") is not representable");
        break;
    }
    (void)t;
    der_out = r > 0 ? static_cast<std::uint32_t>(r) : 0;
    return r == 0 ? Region::full() : Region::empty();
}

Region combine(const Term& t0, const Region& a, const Region& b, Op op)
{
    switch (op) {
    case Op::And:
        if (a.is_empty() || b.is_full())
            return a;
        if (b.is_empty() || a.is_full())
            return b;
        break;
    case Op::Or:
        if (a.is_empty() || b.is_full())
            return b;
        if (b.is_empty() || a.is_full())
            return a;
        break;
    case Op::Minus:
        if (a.is_empty() || b.is_empty())
            return a;
        if (b.is_full())
            return Region::empty();
        break;
    }
    if (a == b)
        return op == Op::Minus ? Region::empty() : a;

    const Term& t = strip(t0);
    switch (t.kind()) {
    case TermKind::Single:
        // Single has only Empty/Full, handled above.
        break;
    case TermKind::Chain: {
        auto x = chain_view(t, a);
        auto y = chain_view(t, b);
        std::vector<std::uint64_t> out;
        switch (op) {
        case Op::And: std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out)); break;
        case Op::Or: std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out)); break;
        case Op::Minus: std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out)); break;
        }
        return make_chain_region(t, std::move(out));
    }
    case TermKind::Concat: {
        std::vector<Region> parts;
        for (std::size_t j = 0; j < t.parts().size(); ++j)
            parts.push_back(combine(t.parts()[j], part_view(a, j), part_view(b, j), op));
        return make_concat_region(t, std::move(parts));
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        std::size_t m = std::max(omega_prefix_len(a), omega_prefix_len(b));
        std::vector<Region> prefix;
        for (std::size_t k = 0; k < m; ++k)
            prefix.push_back(combine(t.block(k), omega_slice(t, a, k), omega_slice(t, b, k), op));
        TailView ta = omega_tail(a);
        TailView tb = omega_tail(b);
        Region tail;
        std::uint32_t der = 0;
        if (is_iter(t))
            tail = combine_tail_iter(t, ta, tb, op, der);
        else
            tail = combine(t.block(0), ta.uniform, tb.uniform, op);
        Region top = combine(t.top(), omega_top(a), omega_top(b), op);
        return make_omega_region(t, std::move(prefix), std::move(tail), der, std::move(top));
    }
    case TermKind::LexSum: {
        const Term& base = t.base();
        const Term& fiber = t.default_fiber();
        auto ea = lex_entries_view(t, a);
        auto eb = lex_entries_view(t, b);
        Region regular = detail::lex_regular_points(t);
        Region rest_a = regular;
        for (const auto& e : ea)
            rest_a = subtract(base, rest_a, e.base);
        Region rest_b = regular;
        for (const auto& e : eb)
            rest_b = subtract(base, rest_b, e.base);
        ea.push_back({rest_a, Region::empty()});
        eb.push_back({rest_b, Region::empty()});
        std::vector<LexEntry> out;
        for (const auto& x : ea) {
            if (x.base.is_empty())
                continue;
            for (const auto& y : eb) {
                Region s = intersect(base, x.base, y.base);
                if (s.is_empty())
                    continue;
                Region f = combine(fiber, x.fiber, y.fiber, op);
                if (!f.is_empty())
                    out.push_back({s, f});
            }
        }
        std::vector<Region> exc;
        for (std::size_t i = 0; i < t.exceptions().size(); ++i)
            exc.push_back(combine(t.exceptions()[i].fiber, lex_exception_view(a, i), lex_exception_view(b, i), op));
        return make_lex_region(t, std::move(out), std::move(exc));
    }
    case TermKind::Rev:
    case TermKind::Ordinal: break;
    }
    throw InvariantError("region combine: unexpected term kind");
}

}  // namespace

Region omega_slice(const Term& t0, const Region& r, std::uint64_t k)
{
    const Term& t = strip(t0);
    if (r.is_empty() || r.is_full())
        return r;
    require(r.kind() == Kind::Omega, "omega slice");
    if (k < r.prefix().size())
        return r.prefix()[k];
    return tail_instance(t, r.tail(), r.tail_der(), k);
}

Region intersect(const Term& t, const Region& a, const Region& b) { return combine(t, a, b, Op::And); }
Region unite(const Term& t, const Region& a, const Region& b) { return combine(t, a, b, Op::Or); }
Region subtract(const Term& t, const Region& a, const Region& b) { return combine(t, a, b, Op::Minus); }
Region complement(const Term& t, const Region& a) { return combine(t, Region::full(), a, Op::Minus); }

bool is_subset(const Term& t, const Region& a, const Region& b)
{
    return subtract(t, a, b).is_empty();
}

namespace {

bool contains_at(const Term& t0, const Region& r, const std::vector<Step>& s, std::size_t i)
{
    if (r.is_empty())
        return false;
    if (r.is_full())
        return true;
    const Term& t = strip(t0);
    switch (t.kind()) {
    case TermKind::Chain: return std::binary_search(r.indices().begin(), r.indices().end(), s[i].n);
    case TermKind::Concat: return contains_at(t.parts()[s[i].n], r.parts()[s[i].n], s, i + 1);
    case TermKind::OmegaUp:
    case TermKind::OmegaIter:
        if (s[i].kind == StepKind::Top)
            return contains_at(t.top(), r.top(), s, i + 1);
        return contains_at(t.block(s[i].n), omega_slice(t, r, s[i].n), s, i + 1);
    case TermKind::LexSum: {
        const LinePoint& b = *s[i].base;
        return contains_at(t.fiber_at(b), lex_fiber_region(t, r, b), s, i + 1);
    }
    default: break;
    }
    throw InvariantError("region contains: unexpected term kind");
}

Region point_at(const Term& t0, const std::vector<Step>& s, std::size_t i)
{
    const Term& t = strip(t0);
    switch (t.kind()) {
    case TermKind::Single: return Region::full();
    case TermKind::Chain: return make_chain_region(t, {s[i].n});
    case TermKind::Concat: {
        std::vector<Region> parts(t.parts().size());
        parts[s[i].n] = point_at(t.parts()[s[i].n], s, i + 1);
        return make_concat_region(t, std::move(parts));
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        if (s[i].kind == StepKind::Top)
            return make_omega_region(t, {}, Region::empty(), 0, point_at(t.top(), s, i + 1));
        std::vector<Region> prefix(s[i].n + 1);
        prefix.back() = point_at(t.block(s[i].n), s, i + 1);
        return make_omega_region(t, std::move(prefix), Region::empty(), 0, Region::empty());
    }
    case TermKind::LexSum: {
        const LinePoint& b = *s[i].base;
        Region sub = point_at(t.fiber_at(b), s, i + 1);
        int ei = t.exception_index(b);
        std::vector<Region> exc(t.exceptions().size());
        if (ei >= 0) {
            exc[static_cast<std::size_t>(ei)] = sub;
            return make_lex_region(t, {}, std::move(exc));
        }
        return make_lex_region(t, {{point_region(t.base(), b), sub}}, std::move(exc));
    }
    default: break;
    }
    throw InvariantError("point_region: unexpected term kind");
}

Region ray_at(const Term& t0, const std::vector<Step>& s, std::size_t i, bool after, bool inclusive)
{
    const Term* tp = &t0;
    while (tp->kind() == TermKind::Ordinal)
        tp = &tp->compiled();
    const Term& t = *tp;
    switch (t.kind()) {
    case TermKind::Single: return inclusive ? Region::full() : Region::empty();
    case TermKind::Chain: {
        std::vector<std::uint64_t> idx;
        for (std::uint64_t x = 0; x < t.chain_size(); ++x) {
            bool keep = after ? (x > s[i].n) : (x < s[i].n);
            if (keep || (inclusive && x == s[i].n))
                idx.push_back(x);
        }
        return make_chain_region(t, std::move(idx));
    }
    case TermKind::Concat: {
        std::uint64_t j = s[i].n;
        std::vector<Region> parts(t.parts().size());
        for (std::size_t x = 0; x < parts.size(); ++x) {
            if (x == j)
                parts[x] = ray_at(t.parts()[x], s, i + 1, after, inclusive);
            else
                parts[x] = (after ? x > j : x < j) ? Region::full() : Region::empty();
        }
        return make_concat_region(t, std::move(parts));
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        if (s[i].kind == StepKind::Top) {
            Region sub = ray_at(t.top(), s, i + 1, after, inclusive);
            return make_omega_region(t, {}, after ? Region::empty() : Region::full(), 0, sub);
        }
        std::uint64_t k = s[i].n;
        std::vector<Region> prefix(k + 1, after ? Region::empty() : Region::full());
        prefix[k] = ray_at(t.block(k), s, i + 1, after, inclusive);
        Region rest = after ? Region::full() : Region::empty();
        return make_omega_region(t, std::move(prefix), rest, 0, rest);
    }
    case TermKind::Rev: return ray_at(t.inner(), s, i, !after, inclusive);
    case TermKind::LexSum: {
        const LinePoint& b = *s[i].base;
        const Term& base = t.base();
        Region sub = ray_at(t.fiber_at(b), s, i + 1, after, inclusive);
        Region beyond = ray_region(base, b, after, false);
        std::vector<Region> exc(t.exceptions().size());
        for (std::size_t x = 0; x < exc.size(); ++x)
            if (contains(base, beyond, t.exceptions()[x].point))
                exc[x] = Region::full();
        std::vector<LexEntry> entries{{beyond, Region::full()}};
        int ei = t.exception_index(b);
        if (ei >= 0)
            exc[static_cast<std::size_t>(ei)] = sub;
        else
            entries.push_back({point_region(base, b), sub});
        return make_lex_region(t, std::move(entries), std::move(exc));
    }
    case TermKind::Ordinal: break;
    }
    throw InvariantError("ray_region: unexpected term kind");
}

std::optional<std::vector<Step>> bound_at(const Term& t0, const Region& r, bool want_sup);

std::vector<Step> with(const Step& s, std::vector<Step> rest)
{
    rest.insert(rest.begin(), s);
    return rest;
}

std::vector<Step> end_of(const Term& t, bool want_max)
{
    return (want_max ? max_point(t) : min_point(t)).steps();
}

// Infimum (want_sup false) or supremum of a region, relative to the term.
std::optional<std::vector<Step>> bound_at(const Term& t0, const Region& r, bool want_sup)
{
    if (r.is_empty())
        return std::nullopt;
    const Term* tp = &t0;
    while (tp->kind() == TermKind::Ordinal)
        tp = &tp->compiled();
    const Term& t = *tp;
    if (r.is_full())
        return end_of(t, want_sup);
    switch (t.kind()) {
    case TermKind::Rev: return bound_at(t.inner(), r, !want_sup);
    case TermKind::Chain:
        return std::vector<Step>{Step::index(want_sup ? r.indices().back() : r.indices().front())};
    case TermKind::Concat: {
        std::size_t m = t.parts().size();
        for (std::size_t x = 0; x < m; ++x) {
            std::size_t j = want_sup ? m - 1 - x : x;
            auto sub = bound_at(t.parts()[j], r.parts()[j], want_sup);
            if (sub)
                return with(Step::part(j), std::move(*sub));
        }
        return std::nullopt;
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        bool tail_nonempty = r.tail_der() > 0 || !r.tail().is_empty();
        if (want_sup) {
            if (auto sub = bound_at(t.top(), r.top(), true))
                return with(Step::top(), std::move(*sub));
            if (tail_nonempty)
                return with(Step::top(), end_of(t.top(), false));
            for (std::size_t x = r.prefix().size(); x-- > 0;)
                if (auto sub = bound_at(t.block(x), r.prefix()[x], true))
                    return with(Step::copy(x), std::move(*sub));
            return std::nullopt;
        }
        for (std::size_t k = 0; k < r.prefix().size(); ++k)
            if (auto sub = bound_at(t.block(k), r.prefix()[k], false))
                return with(Step::copy(k), std::move(*sub));
        if (tail_nonempty) {
            const std::uint64_t cap = r.prefix().size() + 4096;
            for (std::uint64_t k = r.prefix().size(); k < cap; ++k)
                if (auto sub = bound_at(t.block(k), omega_slice(t, r, k), false))
                    return with(Step::copy(k), std::move(*sub));
            throw RegionError("infimum search over omega-iter tail exceeded its cap");
        }
        if (auto sub = bound_at(t.top(), r.top(), false))
            return with(Step::top(), std::move(*sub));
        return std::nullopt;
    }
    case TermKind::LexSum: {
        const Term& base = t.base();
        Region proj = lex_projection(t, r);
        auto bsteps = bound_at(base, proj, want_sup);
        if (!bsteps)
            return std::nullopt;
        LinePoint b(std::move(*bsteps));
        const Term& fiber = t.fiber_at(b);
        if (contains(base, proj, b)) {
            auto sub = bound_at(fiber, lex_fiber_region(t, r, b), want_sup);
            return with(Step::lex(b), std::move(*sub));
        }
        return with(Step::lex(b), end_of(fiber, !want_sup));
    }
    default: break;
    }
    throw InvariantError("region bound: unexpected term kind");
}

}  // namespace

bool contains(const Term& t, const Region& r, const LinePoint& p)
{
    return contains_at(t, r, p.steps(), 0);
}

Region point_region(const Term& t, const LinePoint& p)
{
    return point_at(t, p.steps(), 0);
}

Region points_region(const Term& t, const std::vector<LinePoint>& ps)
{
    Region out;
    for (const auto& p : ps)
        out = unite(t, out, point_region(t, p));
    return out;
}

Region ray_region(const Term& t, const LinePoint& p, bool after, bool inclusive)
{
    return ray_at(t, p.steps(), 0, after, inclusive);
}

Region interval_region(const Term& t, const Interval& iv)
{
    return intersect(t, ray_region(t, iv.lo, true, true), ray_region(t, iv.hi, false, true));
}

std::optional<LinePoint> region_inf(const Term& t, const Region& r)
{
    auto s = bound_at(t, r, false);
    if (!s)
        return std::nullopt;
    return LinePoint(std::move(*s));
}

std::optional<LinePoint> region_sup(const Term& t, const Region& r)
{
    auto s = bound_at(t, r, true);
    if (!s)
        return std::nullopt;
    return LinePoint(std::move(*s));
}

Region lex_projection(const Term& t0, const Region& r)
{
    const Term& t = strip(t0);
    require(t.kind() == TermKind::LexSum, "lex projection");
    if (r.is_empty())
        return Region::empty();
    const Term& base = t.base();
    if (r.is_full())
        return Region::full();
    Region out;
    for (const auto& e : r.entries())
        out = unite(base, out, e.base);
    for (std::size_t i = 0; i < t.exceptions().size(); ++i)
        if (!r.exception_regions()[i].is_empty())
            out = unite(base, out, point_region(base, t.exceptions()[i].point));
    return out;
}

}  // namespace cline
