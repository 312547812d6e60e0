#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cline/line.hpp"
#include "cline/term.hpp"

namespace cline {

class Space;
using SpacePtr = std::shared_ptr<const Space>;

// Countable family of disjoint clopen blocks, indexed from 0. `count` is empty for an
// infinite family.
struct Family {
    std::optional<std::uint64_t> count;
    std::function<SpacePtr(std::uint64_t)> block;
    // Index of the block containing a point of the codomain, if any.
    std::function<std::optional<std::uint64_t>(const LinePoint&)> locate;
};

// How a clopen piece of the codomain is split for the extension recursion.
//   Leaf:   finitely many points.
//   Finite: finitely many clopen blocks covering the piece.
//   Pivot:  a point `infinity` plus a family of clopen blocks covering the rest.
struct Partition {
    enum class Kind { Leaf, Finite, Pivot } kind = Kind::Leaf;
    std::vector<SpacePtr> parts;
    LinePoint infinity;
    Family family;
};

// Clopen interval of a codomain term together with the rule that splits it.
class Space {
public:
    virtual ~Space() = default;
    const Term& root() const { return root_; }
    virtual Interval interval() const = 0;
    virtual Partition decompose() const = 0;
    virtual std::string describe() const = 0;
    bool contains(const LinePoint& q) const { return in_interval(root_, interval(), q); }

protected:
    explicit Space(Term root) : root_(std::move(root)) {}
    Term root_;
};

// [offset, offset + type] inside an ordinal segment, split along fundamental sequences.
SpacePtr ordinal_space(const Term& segment, const Ordinal& offset, const Ordinal& type);
// The whole term, split by its structure (concat parts, omega copies around the top,
// lexicographic sums through their base). Throws ValidationError on shapes with no
// supported split.
SpacePtr structural_space(const Term& t);
// Ordinal route for ordinal segments, structural route otherwise.
SpacePtr root_space(const Term& t);

// Locates the part of a finite partition containing q.
std::optional<std::size_t> locate_part(const Partition& p, const LinePoint& q);

}  // namespace cline
