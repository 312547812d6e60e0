#include "cline/verify.hpp"

#include <algorithm>

namespace cline {

std::vector<SimpleFunction> test_family_clopen(const Term& k, std::size_t budget)
{
    if (budget <= 1)
        return {SimpleFunction::constant(k, 1)};
    std::vector<LinePoint> pts = enumerate(k, budget);
    std::vector<Interval> ivs;
    auto push = [&](const Interval& iv) {
        if (std::find(ivs.begin(), ivs.end(), iv) == ivs.end())
            ivs.push_back(iv);
    };
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i; j < pts.size(); ++j)
            if (is_clopen_interval(k, pts[i], pts[j]))
                push({pts[i], pts[j]});
    LinePoint top = max_point(k);
    for (const auto& p : pts) {
        Neighbor r = right_neighbor(k, p);
        if (r.kind == Neighbor::Kind::Point && is_clopen_interval(k, r.point, top))
            push({r.point, top});
    }
    std::vector<SimpleFunction> out;
    out.push_back(SimpleFunction::indicator(k, std::nullopt));
    for (const auto& iv : ivs)
        out.push_back(SimpleFunction::indicator(k, iv));
    out.push_back(SimpleFunction::constant(k, 1));
    return out;
}

bool DecayReport::ok() const
{
    return std::none_of(rows.begin(), rows.end(), [](const DecayRow& r) { return r.violation.has_value(); });
}

namespace {

// N with |integral f d mu_n| < eps for n >= N, from the decay modulus of each piece.
std::optional<std::uint64_t> declared_modulus(const MeasureSequence& seq, const SimpleFunction& f,
                                              const Rational& eps)
{
    const auto& m = seq.moduli();
    if (m.zero_from)
        return *m.zero_from;
    if (!m.decay)
        return std::nullopt;
    Rational weight = 0;
    for (const auto& p : f.pieces())
        weight += rabs(p.value);
    if (weight == 0)
        return 1;
    std::uint64_t best = 1;
    for (const auto& p : f.pieces()) {
        if (p.value == 0)
            continue;
        auto n = m.decay(p.interval, eps / weight);
        if (!n)
            return std::nullopt;
        best = std::max(best, *n);
    }
    return best;
}

}  // namespace

DecayReport weak_star_decay_report(const MeasureSequence& seq, const std::vector<SimpleFunction>& family,
                                   std::uint64_t window, const Rational& eps)
{
    DecayReport rep;
    rep.window = window;
    rep.eps = eps;
    bool any_declared = false;
    for (const auto& f : family) {
        DecayRow row;
        row.function = f.describe();
        row.max_first_half = 0;
        row.max_second_half = 0;
        row.declared_n = declared_modulus(seq, f, eps);
        any_declared = any_declared || row.declared_n.has_value();
        for (std::uint64_t n = 1; n <= window; ++n) {
            Rational v = rabs(integrate(f, seq(n)));
            row.values.push_back(v);
            Rational& slot = n > window / 2 ? row.max_second_half : row.max_first_half;
            slot = std::max(slot, v);
            if (row.declared_n && n >= *row.declared_n && v >= eps && !row.violation)
                row.violation = n;
        }
        row.flagged = row.max_second_half != 0 && row.max_second_half >= row.max_first_half;
        if (row.flagged)
            rep.flags.push_back("no decay over the window: " + row.function);
        if (row.violation)
            rep.flags.push_back("declared modulus violated at n = " + std::to_string(*row.violation) + ": " +
                                row.function);
        rep.rows.push_back(std::move(row));
    }
    if (!any_declared)
        rep.flags.push_back("sequence declares no decay modulus; decay is judged on the window only");
    return rep;
}

ExtensionReport extension_check(const MapDescriptor& phi, const MeasureSequence& in, const ExtensionSequence& out,
                                const Rational& lambda, const Rational& eps, std::uint64_t window)
{
    ExtensionReport rep;
    rep.bound = lambda + eps;
    rep.max_ratio = 0;
    rep.tail_max_ratio = 0;
    for (std::uint64_t n = 1; n <= window; ++n) {
        ExtendedTerm t = out(n);
        Measure mu = in(n);
        ExtensionRow row;
        row.n = n;
        row.norm_in = mu.tv_norm();
        row.norm_out = t.measure.tv_norm();
        row.ratio = row.norm_in == 0 ? Rational(0) : Rational(row.norm_out / row.norm_in);
        row.certified_bound = t.certified_bound;
        row.pushforward_ok = pushforward(phi, t.measure) == mu;
        row.certified_ok = t.certified_bound >= row.norm_out;
        row.within_bound = row.norm_out <= rep.bound * row.norm_in;
        row.phi_size = t.phi_size;
        row.route = t.route;
        if (!row.pushforward_ok && !rep.first_mismatch)
            rep.first_mismatch = n;
        rep.pushforward_ok = rep.pushforward_ok && row.pushforward_ok;
        rep.certified_ok = rep.certified_ok && row.certified_ok;
        rep.bound_ok = rep.bound_ok && row.within_bound;
        rep.max_ratio = std::max(rep.max_ratio, row.ratio);
        if (n > window / 2)
            rep.tail_max_ratio = std::max(rep.tail_max_ratio, row.ratio);
        rep.rows.push_back(std::move(row));
    }
    if (rep.first_mismatch)
        rep.flags.push_back("pushforward mismatch at n = " + std::to_string(*rep.first_mismatch));
    if (!rep.certified_ok)
        rep.flags.push_back("certified bound below the actual norm");
    if (!rep.bound_ok)
        rep.flags.push_back("norm ratio above " + rep.bound.get_str());
    return rep;
}

}  // namespace cline
