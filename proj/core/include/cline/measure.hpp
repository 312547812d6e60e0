#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cline/line.hpp"
#include "cline/rational.hpp"
#include "cline/region.hpp"
#include "cline/term.hpp"

namespace cline {

class MapDescriptor;

// Finitely supported signed measure with exact rational weights. Atoms are keyed by the
// structural order of points; zero weights are never stored.
class Measure {
public:
    Measure() = default;
    explicit Measure(Term space) : space_(std::move(space)) {}

    const Term& space() const { return space_; }
    const std::map<LinePoint, Rational>& atoms() const { return atoms_; }
    std::size_t support_size() const { return atoms_.size(); }
    bool is_zero() const { return atoms_.empty(); }

    // Validates that p is a point of the space.
    void add_atom(const LinePoint& p, const Rational& w);
    // No validation; for points produced by the library itself.
    void add_unchecked(const LinePoint& p, const Rational& w);
    void add(const Measure& other, const Rational& scale = 1);

    Rational weight(const LinePoint& p) const;
    Rational tv_norm() const;
    Rational total() const;
    Measure scaled(const Rational& c) const;

    std::string to_string() const;

    friend bool operator==(const Measure& a, const Measure& b) { return a.atoms_ == b.atoms_; }
    friend Measure operator+(const Measure& a, const Measure& b);
    friend Measure operator-(const Measure& a, const Measure& b);

private:
    Term space_;
    std::map<LinePoint, Rational> atoms_;
};

Measure dirac(const Term& space, const LinePoint& p, const Rational& w = 1);
Measure restrict(const Measure& m, const Interval& iv);
Measure restrict(const Measure& m, const Region& r);
Rational mass(const Measure& m, const Interval& iv);
Measure pushforward(const MapDescriptor& phi, const Measure& m);

struct SimplePiece {
    Interval interval;
    Rational value;
};

// Finite linear combination of clopen-interval indicators, stored as consecutive
// clopen pieces that partition the space.
class SimpleFunction {
public:
    // Throws ValidationError unless the pieces are clopen, ascending, and cover the space
    // exactly with no gaps or overlaps.
    SimpleFunction(Term space, std::vector<SimplePiece> pieces);
    static SimpleFunction constant(const Term& space, const Rational& c);
    // Indicator of a clopen interval (empty interval when iv is nullopt).
    static SimpleFunction indicator(const Term& space, const std::optional<Interval>& iv);

    const Term& space() const { return space_; }
    const std::vector<SimplePiece>& pieces() const { return pieces_; }
    Rational operator()(const LinePoint& p) const;
    std::string describe() const;

private:
    Term space_;
    std::vector<SimplePiece> pieces_;
};

Rational integrate(const SimpleFunction& f, const Measure& m);

// Lazily generated sequence of measures on one space, indexed from n = 1.
class MeasureSequence {
public:
    using Generator = std::function<Measure(std::uint64_t)>;
    struct Moduli {
        // N such that supp(mu^n) misses the interval for all n >= N.
        std::function<std::optional<std::uint64_t>(const Interval&)> support_vanish;
        // N such that |mu^n(I)| < eps for all n >= N.
        std::function<std::optional<std::uint64_t>(const Interval&, const Rational&)> decay;
        std::optional<Rational> norm_sup;
        // mu^n = 0 for all n >= zero_from.
        std::optional<std::uint64_t> zero_from;
    };

    MeasureSequence() = default;
    MeasureSequence(Term space, Generator gen, Moduli moduli = {}, std::string name = "");

    Measure operator()(std::uint64_t n) const;
    const Term& space() const;
    const Moduli& moduli() const;
    const std::string& name() const;
    bool valid() const { return static_cast<bool>(state_); }

private:
    struct State;
    std::shared_ptr<State> state_;
};

// n -> restrict(mu^n, iv), with the moduli carried over to the restriction.
MeasureSequence restrict_sequence(const MeasureSequence& s, const Interval& iv);

std::vector<Rational> norm_profile(const MeasureSequence& s, std::uint64_t window);

}  // namespace cline
