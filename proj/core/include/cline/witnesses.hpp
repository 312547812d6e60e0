#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cline/map.hpp"
#include "cline/measure.hpp"

namespace cline {

// ---- double arrow ----

// (t, level) in [0,1] x {0,1}, ordered lexicographically.
struct DAPoint {
    Rational t;
    int level = 0;
    friend bool operator==(const DAPoint&, const DAPoint&) = default;
    friend std::strong_ordering operator<=>(const DAPoint& a, const DAPoint& b)
    {
        if (a.t != b.t)
            return a.t < b.t ? std::strong_ordering::less : std::strong_ordering::greater;
        return a.level <=> b.level;
    }
};

using DAMeasure = std::map<DAPoint, Rational>;
using RealMeasure = std::map<Rational, Rational>;  // finitely supported measure on [0,1]

void validate_da_point(const DAPoint& p);
RealMeasure project_da(const DAMeasure& mu);   // pushforward along the first projection

// mu[(0,0), (t,0)]
Rational f_mu(const DAMeasure& mu, const Rational& t);
// F_mu(t+), evaluated at t + h with h below the distance to the next atom coordinate. t < 1.
Rational f_mu_right(const DAMeasure& mu, const Rational& t);
// nu[0, t]
Rational g_nu(const RealMeasure& nu, const Rational& t);

// nu_n = delta_{a_n} - delta_{b_n} with b_n - a_n -> 0.
class DAWitness {
public:
    using Intervals = std::function<std::pair<Rational, Rational>(std::uint64_t)>;
    // N with b_n - a_n < eps for all n >= N.
    using WidthModulus = std::function<std::optional<std::uint64_t>(const Rational&)>;

    DAWitness(Intervals intervals, WidthModulus modulus, std::string name);
    std::pair<Rational, Rational> interval(std::uint64_t n) const { return intervals_(n); }
    RealMeasure operator()(std::uint64_t n) const;
    std::optional<std::uint64_t> width_modulus(const Rational& eps) const { return modulus_(eps); }
    // N such that |integral f d nu_n| < eps for n >= N, for f with |f(x) - f(y)| <= lip |x - y|.
    std::optional<std::uint64_t> decay_modulus(const Rational& lip, const Rational& eps) const;
    Rational tv_norm(std::uint64_t n) const;
    const std::string& name() const { return name_; }

private:
    Intervals intervals_;
    WidthModulus modulus_;
    std::string name_;
};

// Throws ValidationError when the modulus is missing or contradicted on the first terms.
DAWitness da_witness_sequence(DAWitness::Intervals intervals, DAWitness::WidthModulus modulus,
                              std::string name = "custom");
// n = 2^m + k, 0 <= k < 2^m: [k/2^m, (k+1)/2^m).
DAWitness dyadic_rotation_witness();
// [0, 1/n).
DAWitness shrinking_witness();

// Gap function t -> f(t,1) - f(t,0) on a grid.
std::map<Rational, Rational> da_quotient_gaps(const std::function<Rational(const DAPoint&)>& f,
                                              const std::vector<Rational>& grid);
// {j / (size - 1) : j = 0..size-1}
std::vector<Rational> rational_grid(std::size_t size);

// ---- optimality of the constant 2 ----

struct OptimalityScenario {
    Term k;      // concat of two omega-up blocks B_0, B_1
    Term l;      // [0, omega]
    MapPtr phi;  // copy k of B_i -> 2k + i, tops -> omega
    MeasureSequence v;   // v_n = 1/2 delta_n - 1/2 delta_{n+1}
};
OptimalityScenario optimality_scenario();
MeasureSequence optimality_sequence(const Term& l);

// 2 - |mu(B_0)| - |mu(B_1)|. Throws ValidationError if phi_* mu != v_n and InvariantError if the
// certificate exceeds ||mu||.
Rational lower_bound_certificate(const OptimalityScenario& sc, const Measure& mu, std::uint64_t n);

// ---- increasing surjection without complementation ----

struct BigodeSpaces {
    Term l;      // B_1 + B_2 + ... + infinity
    Term k;      // L x {0,1}
    MapPtr phi;  // first projection
};
BigodeSpaces bigode_spaces();
// (delta_{c{n}.L(T.T)} - delta_T) + (delta_{c0.c{n-1}} - delta_{c0.T.T})
MeasureSequence bigode_sequence(const Term& l);

}  // namespace cline
