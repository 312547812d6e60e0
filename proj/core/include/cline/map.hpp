#pragma once

#include <memory>
#include <string>
#include <vector>

#include "cline/line.hpp"
#include "cline/region.hpp"
#include "cline/term.hpp"

namespace cline {

// Finite union of pairwise separated closed intervals, ascending.
struct ClosedSet {
    std::vector<Interval> components;
};

// Sorts and merges overlapping or adjacent intervals.
ClosedSet make_closed_set(const Term& t, std::vector<Interval> intervals);
bool contains(const Term& t, const ClosedSet& f, const LinePoint& p);
// Complement of a finite union of disjoint clopen intervals.
ClosedSet complement_of_intervals(const Term& t, const std::vector<Interval>& intervals);

// Continuous surjection phi: K -> L between line terms.
class MapDescriptor {
public:
    virtual ~MapDescriptor() = default;
    virtual const Term& domain() const = 0;
    virtual const Term& codomain() const = 0;
    virtual LinePoint eval(const LinePoint& p) const = 0;
    // phi^{-1}[a, b] for a clopen interval [a, b] of L, as ascending clopen intervals of K.
    virtual std::vector<Interval> preimage_interval(const Interval& iv) const = 0;
    virtual ClosedSet fiber(const LinePoint& q) const = 0;
    // Point of phi^{-1}(q); the min of the fiber.
    virtual LinePoint section(const LinePoint& q) const;
    // Points of L whose fiber has more than one point.
    virtual Region fat_fiber_region() const = 0;
    virtual bool increasing() const = 0;
    virtual std::string name() const = 0;
};

using MapPtr = std::shared_ptr<const MapDescriptor>;

// Structural collapse K -> L. Built by matching the two terms node by node: identical
// subterms map identically, a one-point subterm of L absorbs any subterm of K, a LexSum
// of K over a base equal to the L subterm projects to its base, and nodes of the same
// kind recurse. Covers first projections and ordinal collapses; always increasing.
class CollapseMap : public MapDescriptor {
public:
    struct Corr;
    CollapseMap(Term k, Term l);  // throws ValidationError when no such collapse exists

    const Term& domain() const override { return k_; }
    const Term& codomain() const override { return l_; }
    LinePoint eval(const LinePoint& p) const override;
    std::vector<Interval> preimage_interval(const Interval& iv) const override;
    ClosedSet fiber(const LinePoint& q) const override;
    Region fat_fiber_region() const override;
    bool increasing() const override { return true; }
    std::string name() const override { return "collapse"; }

private:
    Interval fiber_interval(const LinePoint& q) const;
    Term k_;
    Term l_;
    std::shared_ptr<const Corr> corr_;
};

// K = Concat(OmegaUp(X0, Y0), OmegaUp(X1, Y1)) onto L = [0, omega]: copy k of part i goes
// to 2k + i, both tops go to omega. Not increasing.
class InterleaveMap : public MapDescriptor {
public:
    InterleaveMap(Term k, Term l);

    const Term& domain() const override { return k_; }
    const Term& codomain() const override { return l_; }
    LinePoint eval(const LinePoint& p) const override;
    std::vector<Interval> preimage_interval(const Interval& iv) const override;
    ClosedSet fiber(const LinePoint& q) const override;
    Region fat_fiber_region() const override;
    bool increasing() const override { return false; }
    std::string name() const override { return "interleave"; }

private:
    Interval copy_interval(std::uint64_t part, std::uint64_t k) const;
    Interval top_interval(std::uint64_t part) const;
    Term k_;
    Term l_;
};

// Map onto a finite line given by the clopen fiber intervals of each codomain point.
class IntervalTableMap : public MapDescriptor {
public:
    // table[j] lists the clopen intervals of K mapped to the j-th point of L.
    IntervalTableMap(Term k, Term l, std::vector<std::vector<Interval>> table);

    const Term& domain() const override { return k_; }
    const Term& codomain() const override { return l_; }
    LinePoint eval(const LinePoint& p) const override;
    std::vector<Interval> preimage_interval(const Interval& iv) const override;
    ClosedSet fiber(const LinePoint& q) const override;
    Region fat_fiber_region() const override;
    bool increasing() const override { return increasing_; }
    std::string name() const override { return "interval-table"; }

private:
    std::size_t codomain_index(const LinePoint& q) const;
    Term k_;
    Term l_;
    std::vector<LinePoint> l_points_;
    std::vector<std::vector<Interval>> table_;
    std::vector<std::pair<Interval, std::size_t>> sorted_;
    bool increasing_ = true;
};

}  // namespace cline
