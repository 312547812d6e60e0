#include "cline/order_analysis.hpp"

#include <map>
#include <mutex>
#include <set>
#include <tuple>

#include "cline/error.hpp"
#include "cline/map.hpp"
#include "region_internal.hpp"

namespace cline {

std::string InternalOrder::to_string() const
{
    switch (kind) {
    case Kind::NegOne: return "-1";
    case Kind::Finite: return std::to_string(n);
    case Kind::Infinity: return "INFINITY";
    }
    return "?";
}

namespace {

const Term& unwrap_ordinal(const Term& t)
{
    return t.unwrap();
}

Region part_of(const Region& r, std::size_t j)
{
    if (r.is_empty() || r.is_full())
        return r;
    return r.parts().at(j);
}

struct TailOf {
    Region uniform;
    std::uint32_t der = 0;
    bool nonempty() const { return der > 0 || !uniform.is_empty(); }
};

TailOf tail_of(const Region& r)
{
    if (r.is_empty() || r.is_full())
        return {r, 0};
    if (r.tail_der() > 0)
        return {Region::empty(), r.tail_der()};
    return {r.tail(), 0};
}

Region top_of(const Region& r)
{
    if (r.is_empty() || r.is_full())
        return r;
    return r.top();
}

std::size_t prefix_len(const Region& r)
{
    return r.kind() == Region::Kind::Omega ? r.prefix().size() : 0;
}

std::vector<LexEntry> entries_of(const Term& t, const Region& r)
{
    if (r.is_empty())
        return {};
    if (r.is_full()) {
        Region reg = detail::lex_regular_points(t);
        if (reg.is_empty())
            return {};
        return {LexEntry{reg, Region::full()}};
    }
    return r.entries();
}

Region exception_of(const Region& r, std::size_t i)
{
    if (r.is_empty() || r.is_full())
        return r;
    return r.exception_regions().at(i);
}

Region limits(const Term& t0, const Region& a, bool right);

Region lex_limits(const Term& t, const Region& a, bool right)
{
    const Term& base = t.base();
    const Term& fiber = t.default_fiber();
    std::vector<LexEntry> inside;
    for (const auto& e : entries_of(t, a))
        inside.push_back({e.base, limits(fiber, e.fiber, right)});
    std::vector<Region> inside_exc;
    for (std::size_t i = 0; i < t.exceptions().size(); ++i)
        inside_exc.push_back(limits(t.exceptions()[i].fiber, exception_of(a, i), right));
    Region within = make_lex_region(t, std::move(inside), std::move(inside_exc));

    Region q = limits(base, lex_projection(t, a), right);
    if (q.is_empty())
        return within;
    LinePoint fiber_end = right ? max_point(fiber) : min_point(fiber);
    std::vector<LexEntry> cross{{q, point_region(fiber, fiber_end)}};
    std::vector<Region> cross_exc;
    for (const auto& e : t.exceptions()) {
        if (contains(base, q, e.point))
            cross_exc.push_back(point_region(e.fiber, right ? max_point(e.fiber) : min_point(e.fiber)));
        else
            cross_exc.push_back(Region::empty());
    }
    Region across = make_lex_region(t, std::move(cross), std::move(cross_exc));
    return unite(t, within, across);
}

Region limits(const Term& t0, const Region& a, bool right)
{
    if (a.is_empty())
        return Region::empty();
    const Term& t = unwrap_ordinal(t0);
    switch (t.kind()) {
    case TermKind::Single:
    case TermKind::Chain: return Region::empty();
    case TermKind::Rev: return limits(t.inner(), a, !right);
    case TermKind::Concat: {
        std::vector<Region> parts;
        for (std::size_t j = 0; j < t.parts().size(); ++j)
            parts.push_back(limits(t.parts()[j], part_of(a, j), right));
        return make_concat_region(t, std::move(parts));
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        TailOf tail = tail_of(a);
        bool iter = t.kind() == TermKind::OmegaIter;
        if (iter && tail.nonempty())
            throw RegionError("limit points of an omega-iter region with a nonempty tail are not representable");
        std::vector<Region> prefix;
        for (std::size_t k = 0; k < prefix_len(a); ++k)
            prefix.push_back(limits(t.block(k), omega_slice(t, a, k), right));
        Region new_tail = iter ? Region::empty() : limits(t.block(0), tail.uniform, right);
        Region top = limits(t.top(), top_of(a), right);
        if (!right && tail.nonempty())
            top = unite(t.top(), top, point_region(t.top(), min_point(t.top())));
        return make_omega_region(t, std::move(prefix), std::move(new_tail), 0, std::move(top));
    }
    case TermKind::LexSum: return lex_limits(t, a, right);
    case TermKind::Ordinal: break;
    }
    throw InvariantError("limits: unexpected term kind");
}

// Top part of der for omega-up / omega-iter: the min of the top is a left limit exactly
// when infinitely many copies meet the region.
Region omega_top_der(const Term& t, const Region& a, bool tail_nonempty)
{
    Region at = top_of(a);
    if (at.is_empty())
        return at;
    Region r = limits(t.top(), at, true);
    Region l = limits(t.top(), at, false);
    if (tail_nonempty)
        l = unite(t.top(), l, point_region(t.top(), min_point(t.top())));
    return intersect(t.top(), at, intersect(t.top(), r, l));
}

Region der_impl(const Term& t0, const Region& a)
{
    if (a.is_empty())
        return a;
    const Term& t = unwrap_ordinal(t0);
    switch (t.kind()) {
    case TermKind::Single:
    case TermKind::Chain: return Region::empty();
    case TermKind::Rev: return der_impl(t.inner(), a);
    case TermKind::Concat: {
        std::vector<Region> parts;
        for (std::size_t j = 0; j < t.parts().size(); ++j)
            parts.push_back(der_impl(t.parts()[j], part_of(a, j)));
        return make_concat_region(t, std::move(parts));
    }
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        TailOf tail = tail_of(a);
        bool iter = t.kind() == TermKind::OmegaIter;
        std::vector<Region> prefix;
        for (std::size_t k = 0; k < prefix_len(a); ++k)
            prefix.push_back(der_impl(t.block(k), omega_slice(t, a, k)));
        Region new_tail;
        std::uint32_t new_der = 0;
        if (!iter) {
            new_tail = der_impl(t.block(0), tail.uniform);
        } else if (tail.nonempty()) {
            new_der = tail.der + 1;
            if (tail.der > 0 && !detail::omega_iter_unbounded(t))
                throw RegionError("omega-iter tail Der(j) is not certified nonempty");
        }
        Region top = omega_top_der(t, a, tail.nonempty());
        return make_omega_region(t, std::move(prefix), std::move(new_tail), new_der, std::move(top));
    }
    case TermKind::LexSum: {
        Region r = limits(t, a, true);
        Region l = limits(t, a, false);
        return intersect(t, a, intersect(t, r, l));
    }
    case TermKind::Ordinal: break;
    }
    throw InvariantError("der: unexpected term kind");
}

// True when the region contains, inside some omega-iter node with a certified unbounded
// block sequence, a tail of copies of the form der_j(block_k) for all large k.
bool has_unbounded_tail(const Term& t0, const Region& a)
{
    if (a.is_empty())
        return false;
    const Term& t = unwrap_ordinal(t0);
    switch (t.kind()) {
    case TermKind::Single:
    case TermKind::Chain: return false;
    case TermKind::Rev: return has_unbounded_tail(t.inner(), a);
    case TermKind::Concat:
        for (std::size_t j = 0; j < t.parts().size(); ++j)
            if (has_unbounded_tail(t.parts()[j], part_of(a, j)))
                return true;
        return false;
    case TermKind::OmegaUp:
    case TermKind::OmegaIter: {
        TailOf tail = tail_of(a);
        if (t.kind() == TermKind::OmegaIter && tail.nonempty() && detail::omega_iter_unbounded(t))
            return true;
        for (std::size_t k = 0; k < prefix_len(a); ++k)
            if (has_unbounded_tail(t.block(k), omega_slice(t, a, k)))
                return true;
        if (t.kind() == TermKind::OmegaUp && has_unbounded_tail(t.block(0), tail.uniform))
            return true;
        return has_unbounded_tail(t.top(), top_of(a));
    }
    case TermKind::LexSum: {
        for (const auto& e : entries_of(t, a))
            if (has_unbounded_tail(t.default_fiber(), e.fiber))
                return true;
        for (std::size_t i = 0; i < t.exceptions().size(); ++i)
            if (has_unbounded_tail(t.exceptions()[i].fiber, exception_of(a, i)))
                return true;
        return false;
    }
    case TermKind::Ordinal: break;
    }
    return false;
}

std::mutex cache_mutex;
std::map<std::tuple<const TermNode*, std::uint64_t, std::uint32_t>, Region> tail_cache;
std::map<const TermNode*, bool> unbounded_cache;
std::vector<Term> kept_alive;

}  // namespace

namespace detail {

Region der_tail_instance(const Term& iter, std::uint64_t k, std::uint32_t j)
{
    if (j == 0)
        return Region::full();
    auto key = std::make_tuple(iter.node(), k, j);
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = tail_cache.find(key);
        if (it != tail_cache.end())
            return it->second;
    }
    Region prev = der_tail_instance(iter, k, j - 1);
    Region out = der_impl(iter.block(k), prev);
    std::lock_guard<std::mutex> lock(cache_mutex);
    if (tail_cache.size() > 200000)
        tail_cache.clear();
    tail_cache.emplace(key, out);
    kept_alive.push_back(iter);
    if (kept_alive.size() > 4096)
        kept_alive.erase(kept_alive.begin(), kept_alive.begin() + 2048);
    return out;
}

bool omega_iter_unbounded(const Term& iter)
{
    {
        std::lock_guard<std::mutex> lock(cache_mutex);
        auto it = unbounded_cache.find(iter.node());
        if (it != unbounded_cache.end())
            return it->second;
    }
    // A one-point exception fiber at a base point that is a two-sided limit of the
    // non-exception base points forces io(block_{k+1}) >= io(block_k) + 1.
    const Term& base = iter.base();
    Region regular = Region::full();
    std::vector<LinePoint> pts;
    for (const auto& e : iter.exceptions())
        pts.push_back(e.point);
    if (!pts.empty())
        regular = subtract(base, Region::full(), points_region(base, pts));
    Region d = intersect(base, right_limits(base, regular), left_limits(base, regular));
    bool ok = false;
    for (const auto& e : iter.exceptions())
        if (is_one_point(e.fiber) && contains(base, d, e.point))
            ok = true;
    std::lock_guard<std::mutex> lock(cache_mutex);
    unbounded_cache[iter.node()] = ok;
    kept_alive.push_back(iter);
    return ok;
}

}  // namespace detail

Region right_limits(const Term& t, const Region& a)
{
    return limits(t, a, true);
}

Region left_limits(const Term& t, const Region& a)
{
    return limits(t, a, false);
}

Region der(const Term& t, const Region& a)
{
    return der_impl(t, a);
}

Region der_iter(const Term& t, const Region& a, std::uint64_t n)
{
    Region cur = a;
    for (std::uint64_t i = 0; i < n && !cur.is_empty(); ++i)
        cur = der(t, cur);
    return cur;
}

IoReport internal_order(const Term& t, const Region& a, std::uint64_t max_steps)
{
    IoReport rep;
    if (a.is_empty()) {
        rep.io = InternalOrder::neg_one();
        rep.trace.push_back(a.key());
        rep.certificate = "region is empty";
        return rep;
    }
    std::set<std::string> seen;
    Region cur = a;
    for (std::uint64_t n = 0; n < max_steps; ++n) {
        rep.trace.push_back(cur.key());
        if (has_unbounded_tail(t, cur)) {
            rep.io = InternalOrder::infinity();
            rep.certificate = "der_" + std::to_string(n) +
                              " contains a tail of an omega-iter whose blocks have unbounded internal order";
            return rep;
        }
        if (!seen.insert(cur.key()).second) {
            rep.io = InternalOrder::infinity();
            rep.certificate = "der iterates repeat at step " + std::to_string(n);
            return rep;
        }
        Region next = der(t, cur);
        if (next.is_empty()) {
            rep.io = InternalOrder::finite(n);
            rep.trace.push_back(next.key());
            rep.certificate = "der_" + std::to_string(n + 1) + " is empty";
            return rep;
        }
        cur = std::move(next);
    }
    throw RegionError("internal order undecided after " + std::to_string(max_steps) + " derivations");
}

std::vector<bool> brute_der(std::size_t m, const std::vector<bool>& a)
{
    std::vector<bool> out(m, false);
    for (std::size_t x = 0; x < m; ++x) {
        if (!a[x])
            continue;
        bool right = x + 1 < m;
        for (std::size_t y = x + 1; y < m && right; ++y) {
            bool meets = false;
            for (std::size_t z = x + 1; z < y; ++z)
                meets = meets || a[z];
            right = meets;
        }
        bool left = x > 0;
        for (std::size_t y = 0; y < x && left; ++y) {
            bool meets = false;
            for (std::size_t z = y + 1; z < x; ++z)
                meets = meets || a[z];
            left = meets;
        }
        out[x] = right && left;
    }
    return out;
}

namespace {

void collect_points(const Term& t0, std::vector<Step>& prefix, std::vector<LinePoint>& out)
{
    const Term& t = t0.unwrap();
    switch (t.kind()) {
    case TermKind::Single: out.emplace_back(prefix); return;
    case TermKind::Chain:
        for (std::uint64_t i = 0; i < t.chain_size(); ++i) {
            prefix.push_back(Step::index(i));
            out.emplace_back(prefix);
            prefix.pop_back();
        }
        return;
    case TermKind::Concat:
        for (std::size_t j = 0; j < t.parts().size(); ++j) {
            prefix.push_back(Step::part(j));
            collect_points(t.parts()[j], prefix, out);
            prefix.pop_back();
        }
        return;
    case TermKind::Rev: {
        std::vector<LinePoint> inner;
        collect_points(t.inner(), prefix, inner);
        out.insert(out.end(), inner.rbegin(), inner.rend());
        return;
    }
    case TermKind::LexSum: {
        std::vector<LinePoint> base;
        std::vector<Step> none;
        collect_points(t.base(), none, base);
        for (const auto& b : base) {
            prefix.push_back(Step::lex(b));
            collect_points(t.fiber_at(b), prefix, out);
            prefix.pop_back();
        }
        return;
    }
    default: throw ValidationError("finite_points: term is infinite");
    }
}

}  // namespace

std::vector<LinePoint> finite_points(const Term& t)
{
    std::vector<LinePoint> out;
    std::vector<Step> prefix;
    collect_points(t, prefix, out);
    return out;
}

std::vector<LinePoint> brute_der(const Term& finite_term, const std::vector<LinePoint>& a)
{
    std::vector<LinePoint> pts = finite_points(finite_term);
    std::vector<bool> in(pts.size(), false);
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (const auto& p : a)
            if (p == pts[i])
                in[i] = true;
    auto between_meets = [&](std::size_t lo, std::size_t hi) {
        for (std::size_t z = 0; z < pts.size(); ++z)
            if (in[z] && less(finite_term, pts[lo], pts[z]) && less(finite_term, pts[z], pts[hi]))
                return true;
        return false;
    };
    std::vector<LinePoint> out;
    for (std::size_t x = 0; x < pts.size(); ++x) {
        if (!in[x])
            continue;
        bool right = false;
        bool left = false;
        bool all_right = true;
        bool all_left = true;
        for (std::size_t y = 0; y < pts.size(); ++y) {
            if (less(finite_term, pts[x], pts[y])) {
                right = true;
                all_right = all_right && between_meets(x, y);
            } else if (less(finite_term, pts[y], pts[x])) {
                left = true;
                all_left = all_left && between_meets(y, x);
            }
        }
        if (right && left && all_right && all_left)
            out.push_back(pts[x]);
    }
    return out;
}

KKReport kk_complemented(const MapDescriptor& phi)
{
    if (!phi.increasing())
        throw ValidationError("kk_complemented requires an increasing surjection");
    const Term& l = phi.codomain();
    KKReport rep;
    Region dl = der(l, Region::full());
    rep.q = intersect(l, dl, phi.fat_fiber_region());
    IoReport io_rep = internal_order(l, rep.q);
    rep.io = io_rep.io;
    rep.trace = std::move(io_rep.trace);
    rep.complemented = rep.io.is_finite();
    rep.certificate = "Q = der(L) & fat fibers; io(Q) = " + rep.io.to_string() + " (" + io_rep.certificate + ")";
    return rep;
}

}  // namespace cline
