#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace cline {

using Rational = mpq_class;

// Accepts "p", "-p", "p/q". Throws ParseError.
Rational parse_rational(std::string_view text);
std::string to_string(const Rational& q);

inline Rational rabs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

}  // namespace cline
