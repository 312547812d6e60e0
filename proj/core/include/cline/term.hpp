#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cline/ordinal.hpp"
#include "cline/point.hpp"

namespace cline {

enum class TermKind : std::uint8_t {
    Single,     // one point
    Chain,      // finite chain 0 < 1 < ... < n-1
    Concat,     // ordered sum of finitely many parts
    OmegaUp,    // block + block + ... (omega copies) + top
    Rev,        // reversed order
    LexSum,     // lexicographic sum over a base, one fiber per base point
    Ordinal,    // the segment [0, alpha]; wraps its compiled term
    OmegaIter,  // block_0 = seed, block_{k+1} = LexSum(base, block_k, exceptions), then top
};

struct TermNode;
struct FiberException;

// Immutable, structurally shared countable compact line description.
class Term {
public:
    Term();  // single point
    explicit Term(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}

    static Term single();
    static Term chain(std::uint64_t n);
    static Term concat(std::vector<Term> parts);
    static Term omega_up(Term block, Term top);
    static Term rev(Term inner);
    using Exception = FiberException;
    static Term lexsum(Term base, Term default_fiber, std::vector<Exception> exceptions = {});
    static Term ordinal_segment(const Ordinal& alpha);
    static Term omega_iter(Term seed, Term base, std::vector<Exception> exceptions, Term top);

    TermKind kind() const;
    std::uint64_t chain_size() const;
    const std::vector<Term>& parts() const;
    // OmegaUp: the repeated block. OmegaIter: block_k, built on demand.
    Term block(std::uint64_t k = 0) const;
    const Term& top() const;
    const Term& inner() const;  // Rev
    const Term& base() const;   // LexSum, OmegaIter template base
    const Term& default_fiber() const;  // LexSum
    const Term& seed() const;   // OmegaIter
    const std::vector<Exception>& exceptions() const;  // LexSum, OmegaIter template
    const Ordinal& ordinal() const;
    const Term& compiled() const;  // Ordinal
    // Strips Ordinal wrappers.
    const Term& unwrap() const;

    // LexSum: the fiber over base point b (exception or default).
    const Term& fiber_at(const LinePoint& b) const;
    // LexSum: index of the exception at b, or -1.
    int exception_index(const LinePoint& b) const;

    std::uint64_t hash() const;
    std::string to_sexpr() const;
    const TermNode* node() const { return node_.get(); }

    friend bool operator==(const Term& a, const Term& b);

private:
    std::shared_ptr<const TermNode> node_;
};

struct FiberException {
    LinePoint point;  // point of the base
    Term fiber;
};

// Builders for the named spaces.
// B = omega-up(single, rev(omega-up(single, single))): the points -1/(k+1), 0, 1/(k+1), with 0 = "T.T".
Term term_b();
LinePoint b_zero();
// B_1 = B, B_n = LexSum(B, B_{n-1}, {0 -> single}).
Term term_b_n(std::uint64_t n);
// The sum of all B_n followed by one limit point.
Term term_bigode_l();
// X x {0,1} ordered lexicographically.
Term term_double(Term x);

// S-expression syntax, e.g. (omega-up single (rev (omega-up single single))).
Term parse_term(std::string_view text);

}  // namespace cline
