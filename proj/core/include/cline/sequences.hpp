#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cline/measure.hpp"

namespace cline {

// n -> p(n), monotone in the order of the line and converging to `limit`.
struct PointTemplate {
    std::function<LinePoint(std::uint64_t)> at;
    LinePoint limit;
    std::string text;
};

// Ordinal notation with one coefficient placeholder, e.g. "w.{n}", "w^2+w.{n-1}+3".
// The limit replaces the placeholder term by the next power of omega.
PointTemplate ordinal_template(const Term& segment, std::string_view text);
// Point path with one placeholder inside a copy step, e.g. "c{n}.L(T.T)" or "c0.c{n-1}".
// The limit replaces that step by the top followed by the min of the top term.
PointTemplate path_template(const Term& space, std::string_view text);
// Ordinal notation for ordinal segments when the text parses as one, otherwise a path.
PointTemplate point_template(const Term& space, std::string_view text);

struct MovingAtom {
    PointTemplate point;
    Rational weight;
};

struct FixedAtom {
    LinePoint point;
    Rational weight;
};

// mu^n = sum w_i delta_{p_i(n)} + sum of the fixed atoms. Support and decay moduli are
// derived from the monotone convergence of every p_i.
MeasureSequence moving_atom_sequence(Term space, std::vector<MovingAtom> moving, std::vector<FixedAtom> fixed,
                                     std::string name = "moving-atom");
// delta_{p(n)} - delta_{lim p}
MeasureSequence delta_diff_sequence(const Term& space, PointTemplate p);
MeasureSequence scaled_sequence(const MeasureSequence& s, const Rational& c);
MeasureSequence sum_sequence(const std::vector<MeasureSequence>& parts);
MeasureSequence zero_sequence(const Term& space);
// The same measure for every n; not weak*-null unless zero.
MeasureSequence constant_sequence(const Measure& m);

// First n >= 1 from which pred holds, assuming pred is false then true; nullopt beyond cap.
std::optional<std::uint64_t> first_true(const std::function<bool(std::uint64_t)>& pred,
                                        std::uint64_t cap = std::uint64_t(1) << 40);

}  // namespace cline
