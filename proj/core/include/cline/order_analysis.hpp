#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cline/region.hpp"
#include "cline/term.hpp"

namespace cline {

class MapDescriptor;

// Internal order io(A, X): the largest n with der_n(A) nonempty.
struct InternalOrder {
    enum class Kind { NegOne, Finite, Infinity };
    Kind kind = Kind::NegOne;
    std::uint64_t n = 0;

    static InternalOrder neg_one() { return {Kind::NegOne, 0}; }
    static InternalOrder finite(std::uint64_t v) { return {Kind::Finite, v}; }
    static InternalOrder infinity() { return {Kind::Infinity, 0}; }
    bool is_finite() const { return kind != Kind::Infinity; }
    std::string to_string() const;
    bool operator==(const InternalOrder&) const = default;
};

// Points x (in A or not) such that every open interval (x, y) meets A.
Region right_limits(const Term& t, const Region& a);
Region left_limits(const Term& t, const Region& a);

// Points of A that are two-sided limits of A.
Region der(const Term& t, const Region& a);
Region der_iter(const Term& t, const Region& a, std::uint64_t n);

struct IoReport {
    InternalOrder io;
    std::vector<std::string> trace;  // keys of der_0, der_1, ...
    std::string certificate;         // how the value was decided
};
IoReport internal_order(const Term& t, const Region& a, std::uint64_t max_steps = 4096);
inline InternalOrder io(const Term& t, const Region& a) { return internal_order(t, a).io; }

// Definitional der on a finite chain of m points; `a` marks the members of A.
std::vector<bool> brute_der(std::size_t m, const std::vector<bool>& a);
// Definitional der on a finite term, quantifying over all its points.
std::vector<LinePoint> brute_der(const Term& finite_term, const std::vector<LinePoint>& a);
// All points of a finite term, ascending. Throws ValidationError on infinite terms.
std::vector<LinePoint> finite_points(const Term& t);

struct KKReport {
    bool complemented = false;
    InternalOrder io;
    Region q;  // der(L) intersected with the fat-fiber region
    std::vector<std::string> trace;
    std::string certificate;
};
// Decides whether the subspace induced by an increasing surjection is complemented.
KKReport kk_complemented(const MapDescriptor& phi);

}  // namespace cline
