#include "cline/extension.hpp"

#include <algorithm>
#include <map>

#include "cline/error.hpp"

namespace cline {

// ---- bookkeeping ----

void FlagLog::add(const std::string& flag)
{
    std::lock_guard<std::mutex> lock(mu_);
    flags_.insert(flag);
}

std::vector<std::string> FlagLog::list() const
{
    std::lock_guard<std::mutex> lock(mu_);
    return {flags_.begin(), flags_.end()};
}

bool FlagLog::empty() const
{
    std::lock_guard<std::mutex> lock(mu_);
    return flags_.empty();
}

struct ExtensionSequence::State {
    Term domain;
    Generator gen;
    std::mutex mu;
    std::map<std::uint64_t, ExtendedTerm> cache;
};

ExtensionSequence::ExtensionSequence(Term domain, Generator gen) : state_(std::make_shared<State>())
{
    state_->domain = std::move(domain);
    state_->gen = std::move(gen);
}

ExtendedTerm ExtensionSequence::operator()(std::uint64_t n) const
{
    if (n == 0)
        throw ValidationError("extension sequences are indexed from 1");
    {
        std::lock_guard<std::mutex> lock(state_->mu);
        auto it = state_->cache.find(n);
        if (it != state_->cache.end())
            return it->second;
    }
    ExtendedTerm t = state_->gen(n);
    std::lock_guard<std::mutex> lock(state_->mu);
    return state_->cache.emplace(n, std::move(t)).first->second;
}

const Term& ExtensionSequence::domain() const { return state_->domain; }

MeasureSequence ExtensionSequence::measures() const
{
    ExtensionSequence self = *this;
    return MeasureSequence(state_->domain, [self](std::uint64_t n) { return self.measure(n); });
}

// ---- anchor map ----

AnchorMap::AnchorMap(Term k, ClosedSet f) : k_(std::move(k)), f_(std::move(f))
{
    if (f_.components.empty())
        throw ValidationError("anchor map needs a nonempty closed set");
}

AnchorMap build_anchor_map(const ClosedSet& f, const Term& k)
{
    return AnchorMap(k, make_closed_set(k, f.components));
}

LinePoint AnchorMap::anchor(const LinePoint& p) const
{
    const auto& comps = f_.components;
    std::optional<LinePoint> d;
    std::optional<LinePoint> c;
    for (const auto& iv : comps) {
        if (compare(k_, iv.lo, p) <= 0 && compare(k_, p, iv.hi) <= 0)
            return p;
        if (less(k_, iv.hi, p))
            d = iv.hi;
        else if (!c && less(k_, p, iv.lo))
            c = iv.lo;
    }
    if (!d)
        return *c;
    if (!c)
        return *d;
    Neighbor r = right_neighbor(k_, *d);
    Neighbor l = left_neighbor(k_, *c);
    LinePoint lo = r.kind == Neighbor::Kind::Point ? r.point : *d;
    LinePoint hi = l.kind == Neighbor::Kind::Point ? l.point : *c;
    if (lo == hi)
        return *d;
    Jump j = find_jump_in(k_, lo, hi);
    return compare(k_, p, j.left) <= 0 ? *d : *c;
}

SimpleFunction extend_function(const SimpleFunction& f, const AnchorMap& anchors)
{
    const Term& k = anchors.space();
    const auto& comps = anchors.closed_set().components;
    // start points of constant runs, in increasing order
    std::vector<std::pair<LinePoint, Rational>> starts;
    auto push = [&](const LinePoint& at, const Rational& v) {
        if (!starts.empty() && starts.back().second == v)
            return;
        starts.emplace_back(at, v);
    };
    LinePoint kmin = min_point(k);
    if (!(comps.front().lo == kmin))
        push(kmin, f(comps.front().lo));
    for (std::size_t i = 0; i < comps.size(); ++i) {
        const Interval& c = comps[i];
        for (const auto& piece : f.pieces()) {
            auto x = intersect_intervals(k, piece.interval, c);
            if (x)
                push(x->lo, piece.value);
        }
        if (i + 1 == comps.size()) {
            Neighbor r = right_neighbor(k, c.hi);
            if (r.kind == Neighbor::Kind::Point)
                push(r.point, f(c.hi));
            break;
        }
        const LinePoint& d = c.hi;
        const LinePoint& cn = comps[i + 1].lo;
        Neighbor r = right_neighbor(k, d);
        Neighbor l = left_neighbor(k, cn);
        LinePoint lo = r.kind == Neighbor::Kind::Point ? r.point : d;
        LinePoint hi = l.kind == Neighbor::Kind::Point ? l.point : cn;
        if (!(lo == d))
            push(lo, f(d));
        if (lo == hi)
            continue;
        Jump j = find_jump_in(k, lo, hi);
        push(j.right, f(cn));
    }
    std::vector<SimplePiece> pieces;
    for (std::size_t i = 0; i < starts.size(); ++i) {
        LinePoint end;
        if (i + 1 == starts.size()) {
            end = max_point(k);
        } else {
            Neighbor l = left_neighbor(k, starts[i + 1].first);
            if (l.kind != Neighbor::Kind::Point)
                throw InvariantError("extended function jumps at a left limit " + starts[i + 1].first.to_string());
            end = l.point;
        }
        pieces.push_back({{starts[i].first, end}, starts[i].second});
    }
    return SimpleFunction(k, std::move(pieces));
}

Measure p_star(const std::vector<std::pair<LinePoint, Rational>>& v, const AnchorMap& anchors)
{
    const Term& k = anchors.space();
    Measure out(k);
    std::set<LinePoint> seen;
    for (const auto& [p, w] : v) {
        validate_point(k, p);
        if (anchors.in_f(p))
            throw ValidationError("p_star: point " + p.to_string() + " lies in F");
        if (!seen.insert(p).second)
            throw ValidationError("p_star: repeated point " + p.to_string());
        out.add_unchecked(p, w);
        out.add_unchecked(anchors.anchor(p), -w);
    }
    return out;
}

Measure glue_with(const std::vector<GlueBlock>& blocks, const AnchorMap& anchors)
{
    Measure out(anchors.space());
    for (const auto& b : blocks) {
        out.add(b.nu);
        Rational v = b.nu.total();
        if (v != 0)
            out.add_unchecked(anchors.anchor(b.interval.lo), -v);
    }
    return out;
}

Measure glue(const std::vector<GlueBlock>& blocks, const Term& k)
{
    std::vector<Interval> ivs;
    for (const auto& b : blocks) {
        validate_point(k, b.interval.lo);
        validate_point(k, b.interval.hi);
        if (less(k, b.interval.hi, b.interval.lo) || !is_clopen_interval(k, b.interval.lo, b.interval.hi))
            throw ValidationError("glue: block [" + b.interval.lo.to_string() + ", " + b.interval.hi.to_string() +
                                  "] is not a clopen interval");
        for (const auto& [p, w] : b.nu.atoms())
            if (!in_interval(k, b.interval, p))
                throw ValidationError("glue: measure has an atom outside its block at " + p.to_string());
        ivs.push_back(b.interval);
    }
    std::sort(ivs.begin(), ivs.end(), [&](const Interval& a, const Interval& b) { return less(k, a.lo, b.lo); });
    for (std::size_t i = 1; i < ivs.size(); ++i)
        if (compare(k, ivs[i].lo, ivs[i - 1].hi) <= 0)
            throw ValidationError("glue: blocks overlap");
    if (blocks.empty())
        return Measure(k);
    ClosedSet f = complement_of_intervals(k, ivs);
    if (f.components.empty())
        throw ValidationError("glue: blocks cover the whole space");
    return glue_with(blocks, AnchorMap(k, std::move(f)));
}

// ---- index selection ----

struct PhiSelector::State {
    R r;
    std::optional<std::uint64_t> count;
    TailBound tail;
    std::uint64_t cap;
    std::shared_ptr<FlagLog> flags;
    std::mutex mu;
    std::vector<std::uint64_t> thresholds{0};  // thresholds[k] = N_k; index 0 unused
    bool heuristic = false;
};

PhiSelector::PhiSelector(R r, std::optional<std::uint64_t> gamma_count, TailBound tail, std::uint64_t scan_cap,
                         std::shared_ptr<FlagLog> flags)
    : state_(std::make_shared<State>())
{
    state_->r = std::move(r);
    state_->count = gamma_count;
    state_->tail = std::move(tail);
    state_->cap = scan_cap;
    state_->flags = std::move(flags);
}

std::uint64_t PhiSelector::threshold(std::uint64_t k) const
{
    if (k == 0)
        throw ValidationError("N_k is defined for k >= 1");
    State& s = *state_;
    for (;;) {
        std::uint64_t have;
        std::uint64_t prev;
        {
            std::lock_guard<std::mutex> lock(s.mu);
            have = s.thresholds.size() - 1;
            if (have >= k)
                return s.thresholds[k];
            prev = s.thresholds.back();
        }
        std::uint64_t kk = have + 1;
        std::optional<std::uint64_t> bound = s.tail ? s.tail(kk) : std::nullopt;
        bool scanned = false;
        if (!bound) {
            bound = s.cap + 1;
            scanned = true;
        } else if (*bound > s.cap + 1) {
            throw ModulusUnknown("bound for N_" + std::to_string(kk) + " exceeds the scan cap");
        }
        std::uint64_t top = s.count ? std::min<std::uint64_t>(kk, *s.count - 1) : kk;
        Rational limit(1, kk);
        std::uint64_t last = 0;
        for (std::uint64_t n = *bound - 1; n >= 1 && n > prev; --n) {
            Rational sum = 0;
            for (std::uint64_t i = 0; i <= top; ++i)
                sum += s.r(n, i);
            if (rabs(sum) >= limit) {
                last = n;
                break;
            }
        }
        if (scanned) {
            if (last == s.cap)
                throw ModulusUnknown("violation at the scan cap for N_" + std::to_string(kk));
            if (s.flags)
                s.flags->add("select_phi: N_k found by window scan (no certified modulus)");
        }
        std::uint64_t nk = std::max(last + 1, prev + 1);
        std::lock_guard<std::mutex> lock(s.mu);
        if (scanned)
            s.heuristic = true;
        if (s.thresholds.size() - 1 == have)
            s.thresholds.push_back(nk);
    }
}

std::uint64_t PhiSelector::phi(std::uint64_t n) const
{
    std::uint64_t k = 0;
    while (threshold(k + 1) <= n)
        ++k;
    return k;
}

std::uint64_t PhiSelector::size(std::uint64_t n) const
{
    if (state_->count)
        return *state_->count;
    return phi(n) + 1;
}

bool PhiSelector::heuristic() const
{
    std::lock_guard<std::mutex> lock(state_->mu);
    return state_->heuristic;
}

std::vector<std::uint64_t> select_phi(const PhiSelector& sel, std::uint64_t n)
{
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 0; i < sel.size(n); ++i)
        out.push_back(i);
    return out;
}

// ---- extenders ----

Measure point_lift(const Measure& mu, const MapDescriptor& phi)
{
    Measure out(phi.domain());
    for (const auto& [q, w] : mu.atoms())
        out.add_unchecked(phi.section(q), w);
    return out;
}

ExtensionSequence point_lift_sequence(const MeasureSequence& seq, MapPtr phi)
{
    return ExtensionSequence(phi->domain(), [seq, phi](std::uint64_t n) {
        Measure mu = seq(n);
        return ExtendedTerm{point_lift(mu, *phi), mu.tv_norm(), 0, "point-lift"};
    });
}

namespace {

std::uint64_t floor_div(const Rational& a, const Rational& b)
{
    Rational x = a / b;
    mpz_class q = x.get_num() / x.get_den();
    return q.get_ui();
}

struct RescaleState {
    MapPtr phi;
    NormalizedExtender ext;
    MeasureSequence seq;
    ExtensionConfig cfg;
    Rational sup;
    std::mutex mu;
    std::map<std::uint64_t, std::vector<std::uint64_t>> members;
    std::map<std::uint64_t, std::uint64_t> scanned;  // last index scanned per bucket
    std::map<std::uint64_t, bool> infinite;
    std::map<std::uint64_t, ExtensionSequence> exts;

    std::optional<std::uint64_t> bucket(std::uint64_t n)
    {
        Rational a = seq(n).tv_norm();
        if (a == 0)
            return std::nullopt;
        if (a > sup) {
            cfg.flags->add("rescale: a term exceeds the norm bound used for bucketing");
            return 0;
        }
        return floor_div(sup, a);
    }

    std::uint64_t scan_limit() const
    {
        std::uint64_t lim = cfg.scan_cap;
        if (seq.moduli().zero_from && *seq.moduli().zero_from >= 1)
            lim = std::min(lim, *seq.moduli().zero_from - 1);
        return lim;
    }

    // Members of bucket k below `upto` (exclusive), scanning as needed.
    std::uint64_t count_below(std::uint64_t k, std::uint64_t upto)
    {
        std::uint64_t lim = std::min(upto - 1, scan_limit());
        extend_scan(k, lim);
        std::lock_guard<std::mutex> lock(mu);
        const auto& m = members[k];
        return static_cast<std::uint64_t>(std::lower_bound(m.begin(), m.end(), upto) - m.begin());
    }

    void extend_scan(std::uint64_t k, std::uint64_t upto)
    {
        std::uint64_t from;
        {
            std::lock_guard<std::mutex> lock(mu);
            from = scanned[k] + 1;
        }
        std::vector<std::uint64_t> found;
        for (std::uint64_t n = from; n <= upto; ++n)
            if (bucket(n) == k)
                found.push_back(n);
        std::lock_guard<std::mutex> lock(mu);
        if (scanned[k] + 1 == from && upto >= from) {
            auto& m = members[k];
            m.insert(m.end(), found.begin(), found.end());
            scanned[k] = upto;
        }
    }

    std::optional<std::uint64_t> member(std::uint64_t k, std::uint64_t j)
    {
        for (;;) {
            std::uint64_t done;
            {
                std::lock_guard<std::mutex> lock(mu);
                const auto& m = members[k];
                if (m.size() >= j)
                    return m[j - 1];
                done = scanned[k];
            }
            std::uint64_t lim = scan_limit();
            if (done >= lim)
                return std::nullopt;
            extend_scan(k, std::min(lim, done + 256));
        }
    }

    bool is_infinite(std::uint64_t k)
    {
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = infinite.find(k);
            if (it != infinite.end())
                return it->second;
        }
        // a bucket counts as infinite when it has two members in the window, one in its second half
        bool inf = false;
        if (!seq.moduli().zero_from) {
            cfg.flags->add("rescale: bucket infiniteness decided on the window");
            std::uint64_t count = 0;
            bool late = false;
            for (std::uint64_t n = 1; n <= cfg.window; ++n)
                if (bucket(n) == k) {
                    ++count;
                    late = late || n > cfg.window / 2;
                }
            inf = count >= 2 && late;
        }
        std::lock_guard<std::mutex> lock(mu);
        infinite[k] = inf;
        return inf;
    }

    MeasureSequence normalized(std::uint64_t k, const std::shared_ptr<RescaleState>& self)
    {
        const auto& m = seq.moduli();
        MeasureSequence::Moduli out;
        out.norm_sup = Rational(1);
        // members of bucket k have norm > sup / (k + 1) (> sup for k = 0)
        Rational floor_norm = k == 0 ? sup : sup / Rational(k + 1);
        if (m.support_vanish) {
            auto sv = m.support_vanish;
            out.support_vanish = [self, sv, k](const Interval& iv) -> std::optional<std::uint64_t> {
                auto n = sv(iv);
                if (!n || *n - 1 > self->cfg.scan_cap)
                    return std::nullopt;
                return self->count_below(k, *n) + 1;
            };
        }
        if (m.decay) {
            auto dc = m.decay;
            out.decay = [self, dc, k, floor_norm](const Interval& iv, const Rational& eps) -> std::optional<std::uint64_t> {
                auto n = dc(iv, eps * floor_norm);
                if (!n || *n - 1 > self->cfg.scan_cap)
                    return std::nullopt;
                return self->count_below(k, *n) + 1;
            };
        }
        if (m.zero_from)
            out.zero_from = count_below(k, *m.zero_from) + 1;
        Term space = seq.space();
        return MeasureSequence(
            space,
            [self, k, space](std::uint64_t j) {
                auto n = self->member(k, j);
                if (!n)
                    return Measure(space);
                Measure a = self->seq(*n);
                return a.scaled(1 / a.tv_norm());
            },
            std::move(out), seq.name() + "/bucket" + std::to_string(k));
    }

    ExtensionSequence bucket_ext(std::uint64_t k, const std::shared_ptr<RescaleState>& self)
    {
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = exts.find(k);
            if (it != exts.end())
                return it->second;
        }
        ExtensionSequence e = ext(normalized(k, self));
        std::lock_guard<std::mutex> lock(mu);
        return exts.emplace(k, e).first->second;
    }
};

}  // namespace

ExtensionSequence rescale_extension(MapPtr phi, const NormalizedExtender& ext, const MeasureSequence& seq,
                                    const ExtensionConfig& cfg)
{
    auto st = std::make_shared<RescaleState>();
    st->phi = phi;
    st->ext = ext;
    st->seq = seq;
    st->cfg = cfg;
    if (seq.moduli().norm_sup) {
        // a zero bound means every term is zero and no bucket is ever consulted
        st->sup = *seq.moduli().norm_sup > 0 ? *seq.moduli().norm_sup : Rational(1);
    } else {
        Rational best = 0;
        for (std::uint64_t n = 1; n <= cfg.window; ++n)
            best = std::max(best, seq(n).tv_norm());
        st->sup = best > 0 ? best : Rational(1);
        cfg.flags->add("rescale: norm bound taken from the window");
    }
    return ExtensionSequence(phi->domain(), [st](std::uint64_t n) {
        Measure a = st->seq(n);
        Rational norm = a.tv_norm();
        if (norm == 0)
            return ExtendedTerm{Measure(st->phi->domain()), 0, 0, "zero"};
        std::uint64_t k = *st->bucket(n);
        if (!st->is_infinite(k))
            return ExtendedTerm{point_lift(a, *st->phi), norm, 0, "point-lift"};
        std::uint64_t j = st->count_below(k, n) + 1;
        ExtendedTerm t = st->bucket_ext(k, st)(j);
        return ExtendedTerm{t.measure.scaled(norm), t.certified_bound * norm, t.phi_size, t.route};
    });
}

std::uint64_t detect_n0(const ExtensionSequence& ext, const MeasureSequence& orig, const Rational& bound,
                        std::uint64_t window)
{
    std::uint64_t n0 = 0;
    for (std::uint64_t n = 1; n <= window; ++n)
        if (ext.measure(n).tv_norm() > bound * orig(n).tv_norm())
            n0 = n;
    return n0;
}

ExtensionSequence trim_to_bound(const ExtensionSequence& ext, const MeasureSequence& orig, MapPtr phi,
                                std::uint64_t n0)
{
    if (n0 == 0)
        return ext;
    return ExtensionSequence(ext.domain(), [ext, orig, phi, n0](std::uint64_t n) {
        if (n > n0)
            return ext(n);
        Measure mu = orig(n);
        return ExtendedTerm{point_lift(mu, *phi), mu.tv_norm(), 0, "point-lift (trim)"};
    });
}

// ---- gluing step ----

namespace {

struct SumState {
    MapPtr phi;
    SumPartition part;
    SubExtender sub;
    Rational lambda_sub;
    MeasureSequence seq;
    ExtensionConfig cfg;
    std::optional<PhiSelector> selector;
    std::optional<AnchorMap> anchors;
    LinePoint inf_section;

    std::mutex mu;
    std::map<std::uint64_t, Interval> l_blocks;
    std::map<std::uint64_t, std::vector<Interval>> k_blocks;
    std::map<std::uint64_t, ExtensionSequence> subs;

    Interval l_block(std::uint64_t g)
    {
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = l_blocks.find(g);
            if (it != l_blocks.end())
                return it->second;
        }
        Interval iv = part.family.block(g)->interval();
        std::lock_guard<std::mutex> lock(mu);
        return l_blocks.emplace(g, iv).first->second;
    }

    std::vector<Interval> k_block(std::uint64_t g)
    {
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = k_blocks.find(g);
            if (it != k_blocks.end())
                return it->second;
        }
        auto ivs = phi->preimage_interval(l_block(g));
        std::lock_guard<std::mutex> lock(mu);
        return k_blocks.emplace(g, ivs).first->second;
    }

    ExtensionSequence sub_ext(std::uint64_t g)
    {
        {
            std::lock_guard<std::mutex> lock(mu);
            auto it = subs.find(g);
            if (it != subs.end())
                return it->second;
        }
        ExtensionSequence e = sub(g, restrict_sequence(seq, l_block(g)));
        std::lock_guard<std::mutex> lock(mu);
        return subs.emplace(g, e).first->second;
    }

    // r^n_gamma = sum_j |hat mu^n_gamma(I_{gamma,j})|
    Rational r(std::uint64_t n, std::uint64_t g)
    {
        Measure mg = restrict(seq(n), l_block(g));
        if (mg.is_zero())
            return 0;
        auto ks = k_block(g);
        // a single piece carries the whole mass, which the pushforward preserves
        if (ks.size() == 1)
            return rabs(mg.total());
        Measure hat = sub_ext(g).measure(n);
        Rational s = 0;
        for (const auto& iv : ks)
            s += rabs(mass(hat, iv));
        return s;
    }

    std::optional<std::uint64_t> tail(std::uint64_t k)
    {
        const auto& m = seq.moduli();
        std::optional<std::uint64_t> zero = m.zero_from;
        std::uint64_t best = 1;
        Rational eps(1, k * (k + 1));
        for (std::uint64_t i = 0; i <= k; ++i) {
            std::optional<std::uint64_t> b;
            Interval iv = l_block(i);
            if (m.support_vanish)
                b = m.support_vanish(iv);
            if (!b && m.decay && k_block(i).size() == 1)
                b = m.decay(iv, eps);
            if (!b)
                b = zero;
            if (!b)
                return std::nullopt;
            best = std::max(best, *b);
        }
        return best;
    }

    std::map<std::uint64_t, Measure> split(const Measure& mu, Measure& at_inf)
    {
        std::map<std::uint64_t, Measure> out;
        for (const auto& [q, w] : mu.atoms()) {
            if (part.infinity && q == *part.infinity) {
                at_inf.add_unchecked(q, w);
                continue;
            }
            auto g = part.family.locate(q);
            if (!g)
                throw InvariantError("atom " + q.to_string() + " lies outside the partition");
            auto it = out.try_emplace(*g, Measure(mu.space())).first;
            it->second.add_unchecked(q, w);
        }
        return out;
    }

    ExtendedTerm term(std::uint64_t n)
    {
        Measure mu = seq(n);
        Measure at_inf(mu.space());
        auto pieces = split(mu, at_inf);
        const Term& kdom = phi->domain();
        if (!part.infinity) {
            Measure out(kdom);
            Rational bound = 0;
            for (const auto& [g, mg] : pieces) {
                ExtendedTerm t = sub_ext(g)(n);
                out.add(t.measure);
                bound += t.certified_bound;
            }
            return ExtendedTerm{out, bound, 0, "blockwise"};
        }
        std::uint64_t phi_size = selector->size(n);
        std::vector<GlueBlock> blocks;
        Rational bound = 0;
        Rational theta_mass = 0;
        Rational r_sum = 0;
        for (const auto& [g, mg] : pieces) {
            Measure tilde(kdom);
            if (g < phi_size) {
                ExtendedTerm t = sub_ext(g)(n);
                tilde = t.measure;
                bound += t.certified_bound;
                r_sum += r(n, g);
            } else {
                tilde = point_lift(mg, *phi);
                bound += mg.tv_norm();
            }
            Measure covered(kdom);
            for (const auto& iv : k_block(g)) {
                Measure nu = restrict(tilde, iv);
                covered.add(nu);
                if (nu.is_zero())
                    continue;
                theta_mass += rabs(nu.total());
                blocks.push_back({iv, std::move(nu)});
            }
            if (!(covered == tilde))
                throw InvariantError("sub-extension leaves its preimage block");
        }
        Measure out = glue_with(blocks, *anchors);
        Rational tot = mu.total();
        if (tot != 0)
            out.add_unchecked(inf_section, tot);
        Rational certified = bound + theta_mass + rabs(tot);
        Rational formula = lambda_sub * mu.tv_norm() + r_sum + rabs(tot);
        if (certified > formula)
            cfg.flags->add("sum: sub-extension bound exceeded at n = " + std::to_string(n));
        return ExtendedTerm{out, certified, phi_size, "sum"};
    }
};

}  // namespace

ExtensionSequence extend_sequence_sum(MapPtr phi, const SumPartition& part, const SubExtender& sub,
                                      const Rational& lambda_sub, const MeasureSequence& seq,
                                      const ExtensionConfig& cfg)
{
    if (lambda_sub < 2)
        throw ValidationError("extend_sequence_sum needs lambda >= 2");
    if (!part.infinity && !part.family.count)
        throw ValidationError("an infinite partition must leave one point uncovered");
    auto st = std::make_shared<SumState>();
    st->phi = phi;
    st->part = part;
    st->sub = sub;
    st->lambda_sub = lambda_sub;
    st->seq = seq;
    st->cfg = cfg;
    if (part.infinity) {
        st->anchors.emplace(phi->domain(), phi->fiber(*part.infinity));
        st->inf_section = phi->section(*part.infinity);
        std::weak_ptr<SumState> weak = st;
        st->selector.emplace(
            [weak](std::uint64_t n, std::uint64_t g) { return weak.lock()->r(n, g); }, part.family.count,
            [weak](std::uint64_t k) { return weak.lock()->tail(k); }, cfg.scan_cap, cfg.flags);
    }
    return ExtensionSequence(phi->domain(), [st](std::uint64_t n) { return st->term(n); });
}

// ---- recursion over the codomain ----

namespace {

Rational level_bound(const Rational& eps, std::uint32_t depth)
{
    mpz_class pow2 = 1;
    pow2 <<= depth;
    return Rational(2) + eps / Rational(pow2);
}

ExtensionSequence extend_space(const MapPtr& phi, const SpacePtr& space, const MeasureSequence& seq,
                               std::uint32_t depth, const Rational& eps, const ExtensionConfig& cfg)
{
    Partition p = space->decompose();
    switch (p.kind) {
    case Partition::Kind::Leaf: return point_lift_sequence(seq, phi);
    case Partition::Kind::Finite: {
        auto parts = std::make_shared<const std::vector<SpacePtr>>(p.parts);
        Family fam;
        fam.count = parts->size();
        fam.block = [parts](std::uint64_t i) { return parts->at(i); };
        fam.locate = [parts, p](const LinePoint& q) -> std::optional<std::uint64_t> { return locate_part(p, q); };
        SubExtender sub = [phi, parts, depth, eps, cfg](std::uint64_t g, const MeasureSequence& s) {
            return extend_space(phi, parts->at(g), s, depth, eps, cfg);
        };
        return extend_sequence_sum(phi, {fam, std::nullopt}, sub, level_bound(eps, depth), seq, cfg);
    }
    case Partition::Kind::Pivot: break;
    }
    Rational lambda = level_bound(eps, depth);
    Rational lambda_sub = level_bound(eps, depth + 1);
    Family fam = p.family;
    SubExtender sub = [phi, fam, depth, eps, cfg](std::uint64_t g, const MeasureSequence& s) {
        return extend_space(phi, fam.block(g), s, depth + 1, eps, cfg);
    };
    SumPartition sp{fam, p.infinity};
    NormalizedExtender normalized = [phi, sp, sub, lambda, lambda_sub, cfg](const MeasureSequence& beta) {
        ExtensionSequence sum = extend_sequence_sum(phi, sp, sub, lambda_sub, beta, cfg);
        std::uint64_t n0 = detect_n0(sum, beta, lambda, cfg.window);
        return trim_to_bound(sum, beta, phi, n0);
    };
    return rescale_extension(phi, normalized, seq, cfg);
}

}  // namespace

ExtensionSequence extend_sequence_main(MapPtr phi, const Rational& eps, const MeasureSequence& seq,
                                       const ExtensionConfig& cfg)
{
    if (eps <= 0)
        throw ValidationError("epsilon must be positive");
    if (!(seq.space() == phi->codomain()))
        throw ValidationError("sequence space differs from the codomain of the map");
    return extend_space(phi, root_space(phi->codomain()), seq, 0, eps, cfg);
}

EndpointSet fiber_endpoint_set(const MapDescriptor& phi, std::size_t budget)
{
    const Term& k = phi.domain();
    EndpointSet out;
    out.onto = true;
    std::vector<LinePoint> pts;
    for (const auto& q : enumerate(phi.codomain(), budget)) {
        ++out.sampled;
        bool hit = false;
        for (const auto& c : phi.fiber(q).components) {
            for (const LinePoint* e : {&c.lo, &c.hi}) {
                if (phi.eval(*e) == q)
                    hit = true;
                pts.push_back(*e);
            }
        }
        out.onto = out.onto && hit;
    }
    std::sort(pts.begin(), pts.end(), [&](const LinePoint& a, const LinePoint& b) { return less(k, a, b); });
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    out.points = std::move(pts);
    return out;
}

}  // namespace cline
