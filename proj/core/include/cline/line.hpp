#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <vector>

#include "cline/ordinal.hpp"
#include "cline/point.hpp"
#include "cline/term.hpp"

namespace cline {

// Closed interval [lo, hi] of a line, lo <= hi.
struct Interval {
    LinePoint lo;
    LinePoint hi;
    bool operator==(const Interval&) const = default;
};

bool is_valid_point(const Term& t, const LinePoint& p);
void validate_point(const Term& t, const LinePoint& p);  // throws ValidationError

// Order of the line.
std::strong_ordering compare(const Term& t, const LinePoint& a, const LinePoint& b);
inline bool less(const Term& t, const LinePoint& a, const LinePoint& b) { return compare(t, a, b) < 0; }
bool in_interval(const Term& t, const Interval& iv, const LinePoint& p);
std::optional<Interval> intersect_intervals(const Term& t, const Interval& a, const Interval& b);

LinePoint min_point(const Term& t);
LinePoint max_point(const Term& t);
bool is_one_point(const Term& t);
bool is_finite_term(const Term& t);

struct Neighbor {
    enum class Kind { Point, Extreme, Limit };
    Kind kind = Kind::Extreme;
    LinePoint point;  // set when kind == Point
};
// Immediate successor, or Extreme at the max, or Limit when p is a right limit.
Neighbor right_neighbor(const Term& t, const LinePoint& p);
Neighbor left_neighbor(const Term& t, const LinePoint& p);

enum class PointClass { Isolated, LeftLimit, RightLimit, TwoSidedLimit };
PointClass classify(const Term& t, const LinePoint& p);

bool is_clopen_interval(const Term& t, const LinePoint& lo, const LinePoint& hi);

// A pair u < v with nothing strictly between them, inside [a, b]. Requires a < b.
// If a has an immediate successor the result is (a, succ a); otherwise the jump at the
// shallowest node separating a and b, leftmost at that node.
struct Jump {
    LinePoint left;
    LinePoint right;
};
Jump find_jump_in(const Term& t, const LinePoint& a, const LinePoint& b);

// Deterministic finite sample, ascending, at most `budget` points; always contains the
// min, and the max whenever budget >= 2.
std::vector<LinePoint> enumerate(const Term& t, std::size_t budget);

// Conversions for an ordinal-segment term [0, alpha].
LinePoint ordinal_point(const Term& segment, const Ordinal& beta);
Ordinal point_ordinal(const Term& segment, const LinePoint& p);
// Compiled form of [0, alpha] used by Term::ordinal_segment.
Term compile_ordinal_segment(const Ordinal& alpha);

}  // namespace cline
