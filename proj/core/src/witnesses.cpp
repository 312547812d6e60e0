#include "cline/witnesses.hpp"

#include "cline/error.hpp"
#include "cline/sequences.hpp"

namespace cline {

void validate_da_point(const DAPoint& p)
{
    if (p.t < 0 || p.t > 1 || (p.level != 0 && p.level != 1))
        throw ValidationError("not a point of the double arrow: (" + p.t.get_str() + ", " +
                              std::to_string(p.level) + ")");
}

RealMeasure project_da(const DAMeasure& mu)
{
    RealMeasure out;
    for (const auto& [p, w] : mu) {
        validate_da_point(p);
        Rational& v = out[p.t];
        v += w;
        if (v == 0)
            out.erase(p.t);
    }
    return out;
}

Rational f_mu(const DAMeasure& mu, const Rational& t)
{
    Rational s = 0;
    for (const auto& [p, w] : mu) {
        if (p > DAPoint{t, 0})
            break;
        s += w;
    }
    return s;
}

Rational f_mu_right(const DAMeasure& mu, const Rational& t)
{
    if (t < 0 || t >= 1)
        throw ValidationError("right limits are taken at t in [0, 1)");
    Rational next = 1;
    for (const auto& [p, w] : mu)
        if (p.t > t) {
            next = p.t;
            break;
        }
    Rational h = (next - t) / 2;
    return f_mu(mu, t + h);
}

Rational g_nu(const RealMeasure& nu, const Rational& t)
{
    Rational s = 0;
    for (const auto& [x, w] : nu) {
        if (x > t)
            break;
        s += w;
    }
    return s;
}

DAWitness::DAWitness(Intervals intervals, WidthModulus modulus, std::string name)
    : intervals_(std::move(intervals)), modulus_(std::move(modulus)), name_(std::move(name))
{
}

RealMeasure DAWitness::operator()(std::uint64_t n) const
{
    auto [a, b] = intervals_(n);
    return {{a, Rational(1)}, {b, Rational(-1)}};
}

std::optional<std::uint64_t> DAWitness::decay_modulus(const Rational& lip, const Rational& eps) const
{
    if (lip <= 0)
        return 1;
    return modulus_(eps / lip);
}

Rational DAWitness::tv_norm(std::uint64_t n) const
{
    auto [a, b] = intervals_(n);
    return a == b ? Rational(0) : Rational(2);
}

DAWitness da_witness_sequence(DAWitness::Intervals intervals, DAWitness::WidthModulus modulus, std::string name)
{
    if (!intervals)
        throw ValidationError("witness sequence needs intervals");
    if (!modulus)
        throw ValidationError("witness sequence needs a width modulus");
    for (std::uint64_t n = 1; n <= 64; ++n) {
        auto [a, b] = intervals(n);
        if (a < 0 || b > 1 || !(a < b))
            throw ValidationError("interval " + std::to_string(n) + " is not [a, b) inside [0, 1]");
    }
    for (int j = 1; j <= 6; ++j) {
        Rational eps(1, 1u << j);
        auto big_n = modulus(eps);
        if (!big_n)
            throw ValidationError("interval widths have no vanishing modulus at eps = " + eps.get_str());
        for (std::uint64_t n = *big_n; n < *big_n + 64; ++n) {
            auto [a, b] = intervals(n);
            if (b - a >= eps)
                throw ValidationError("width modulus contradicted at n = " + std::to_string(n));
        }
    }
    return DAWitness(std::move(intervals), std::move(modulus), std::move(name));
}

DAWitness dyadic_rotation_witness()
{
    auto intervals = [](std::uint64_t n) {
        unsigned m = 63 - static_cast<unsigned>(__builtin_clzll(n));
        mpz_class den = 1;
        den <<= m;
        mpz_class k = n - (std::uint64_t(1) << m);
        Rational a(k, den);
        Rational b(k + 1, den);
        a.canonicalize();
        b.canonicalize();
        return std::pair<Rational, Rational>(a, b);
    };
    auto modulus = [](const Rational& eps) -> std::optional<std::uint64_t> {
        if (eps <= 0)
            return std::nullopt;
        for (unsigned m = 0; m < 63; ++m) {
            mpz_class den = 1;
            den <<= m;
            if (Rational(1, den) < eps)
                return std::uint64_t(1) << m;
        }
        return std::nullopt;
    };
    return da_witness_sequence(intervals, modulus, "dyadic-rotation");
}

DAWitness shrinking_witness()
{
    auto intervals = [](std::uint64_t n) {
        return std::pair<Rational, Rational>(Rational(0), Rational(1, n));
    };
    auto modulus = [](const Rational& eps) -> std::optional<std::uint64_t> {
        if (eps <= 0)
            return std::nullopt;
        Rational inv = 1 / eps;
        mpz_class f = inv.get_num() / inv.get_den();
        return f.get_ui() + 1;
    };
    return da_witness_sequence(intervals, modulus, "shrinking");
}

std::map<Rational, Rational> da_quotient_gaps(const std::function<Rational(const DAPoint&)>& f,
                                              const std::vector<Rational>& grid)
{
    std::map<Rational, Rational> out;
    for (const auto& t : grid)
        out[t] = f(DAPoint{t, 1}) - f(DAPoint{t, 0});
    return out;
}

std::vector<Rational> rational_grid(std::size_t size)
{
    if (size < 2)
        return {Rational(0)};
    std::vector<Rational> out;
    for (std::size_t j = 0; j < size; ++j) {
        out.emplace_back(static_cast<unsigned long>(j), static_cast<unsigned long>(size - 1));
        out.back().canonicalize();
    }
    return out;
}

MeasureSequence optimality_sequence(const Term& l)
{
    std::vector<MovingAtom> atoms{{point_template(l, "{n}"), Rational(1, 2)},
                                  {point_template(l, "{n+1}"), Rational(-1, 2)}};
    return moving_atom_sequence(l, std::move(atoms), {}, "optimality");
}

OptimalityScenario optimality_scenario()
{
    OptimalityScenario sc;
    sc.k = parse_term("(concat (omega-up single single) (omega-up single single))");
    sc.l = Term::ordinal_segment(Ordinal::omega());
    sc.phi = std::make_shared<InterleaveMap>(sc.k, sc.l);
    sc.v = optimality_sequence(sc.l);
    return sc;
}

Rational lower_bound_certificate(const OptimalityScenario& sc, const Measure& mu, std::uint64_t n)
{
    if (!(mu.space() == sc.k))
        throw ValidationError("measure is not on the optimality domain");
    if (!(pushforward(*sc.phi, mu) == sc.v(n)))
        throw ValidationError("pushforward of the candidate differs from v_" + std::to_string(n));
    Rational b0 = mass(mu, {parse_point("p0.c0"), parse_point("p0.T")});
    Rational b1 = mass(mu, {parse_point("p1.c0"), parse_point("p1.T")});
    Rational cert = 2 - rabs(b0) - rabs(b1);
    if (cert > mu.tv_norm())
        throw InvariantError("lower bound " + cert.get_str() + " exceeds the norm " + mu.tv_norm().get_str());
    return cert;
}

BigodeSpaces bigode_spaces()
{
    BigodeSpaces b;
    b.l = term_bigode_l();
    b.k = term_double(b.l);
    b.phi = std::make_shared<CollapseMap>(b.k, b.l);
    return b;
}

MeasureSequence bigode_sequence(const Term& l)
{
    return sum_sequence({delta_diff_sequence(l, path_template(l, "c{n}.L(T.T)")),
                         delta_diff_sequence(l, path_template(l, "c0.c{n-1}"))});
}

}  // namespace cline
