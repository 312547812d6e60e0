#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cline {

// Ordinal below omega^omega in Cantor normal form:
// omega^e1 * c1 + ... + omega^ek * ck with e1 > ... > ek and all ci > 0.
class Ordinal {
public:
    struct Term {
        std::uint32_t exp;
        std::uint64_t coef;
        bool operator==(const Term&) const = default;
    };

    Ordinal() = default;  // zero
    static Ordinal finite(std::uint64_t n);
    // omega^e * c
    static Ordinal power(std::uint32_t e, std::uint64_t c = 1);
    static Ordinal omega() { return power(1); }
    // Throws ValidationError unless exponents strictly decrease and coefficients are positive.
    static Ordinal from_terms(std::vector<Term> terms);

    const std::vector<Term>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_finite() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].exp == 0); }
    bool is_limit() const { return !terms_.empty() && terms_.back().exp > 0; }
    bool is_successor() const { return !terms_.empty() && terms_.back().exp == 0; }
    // Value of a finite ordinal.
    std::uint64_t finite_value() const;
    // Largest exponent, 0 for finite ordinals.
    std::uint32_t degree() const { return terms_.empty() ? 0 : terms_.front().exp; }

    std::string to_string() const;

    friend bool operator==(const Ordinal&, const Ordinal&) = default;
    friend std::strong_ordering operator<=>(const Ordinal& a, const Ordinal& b);

private:
    std::vector<Term> terms_;
};

std::strong_ordering compare(const Ordinal& a, const Ordinal& b);
Ordinal add(const Ordinal& a, const Ordinal& b);
inline Ordinal operator+(const Ordinal& a, const Ordinal& b) { return add(a, b); }
Ordinal successor(const Ordinal& a);

// The unique d with a + d == b. Requires a <= b.
Ordinal left_subtract(const Ordinal& a, const Ordinal& b);

// For a = b + omega^(e+1): the k-th element b + omega^e * (k+1). Requires a limit.
Ordinal fundamental_sequence(const Ordinal& a, std::uint64_t k);
// The limit step of a: for a = b + omega^e * c (e >= 1) returns {b + omega^e*(c-1), e}.
struct LimitSplit {
    Ordinal base;
    std::uint32_t exp;
};
LimitSplit split_limit(const Ordinal& a);

// Order type d of the half-open interval (b, g], so that g == b + 1 + d. Requires b < g.
Ordinal interval_type(const Ordinal& b, const Ordinal& g);

// Text notation: "0", "5", "w", "w.3", "w^2", "w^2.3+w.1+5". Throws ParseError.
Ordinal parse_ordinal(std::string_view text);

}  // namespace cline
