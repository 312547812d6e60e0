#pragma once

#include "cline/region.hpp"

namespace cline::detail {

// Strips ordinal-segment and Rev wrappers (regions do not see either).
const Term& strip(const Term& t);

// der_j of block k of an omega-iter term, as a region of that block.
Region der_tail_instance(const Term& iter, std::uint64_t k, std::uint32_t j);

// Whether io(block_k) of an omega-iter term is certified to grow without bound.
bool omega_iter_unbounded(const Term& iter);

// LexSum: the non-exception base points.
Region lex_regular_points(const Term& lex);

}  // namespace cline::detail
