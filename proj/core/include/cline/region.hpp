#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cline/line.hpp"
#include "cline/point.hpp"
#include "cline/term.hpp"

namespace cline {

struct LexEntry;

// Finitely described subset of a line term. A region carries no reference to its term:
// every operation takes the term the region lives on. Rev and ordinal-segment nodes are
// transparent, so a region over X is also a region over Rev(X).
//
// Structured forms, one per term node kind:
//   Chain   set of indices
//   Concat  one region per part
//   Omega   explicit regions for copies 0..m-1, one tail pattern for copies >= m, and a
//           region of the top. For omega-up the tail is a region of the block; for
//           omega-iter it is Empty, Full, or Der(j): the j-th derived set of each block.
//   Lex     entries (S, R): fiber region R over every non-exception base point in S,
//           plus one region per exception fiber.
// Regions are normalized on construction, so equal sets have equal keys.
class Region {
public:
    enum class Kind { Empty, Full, Chain, Concat, Omega, Lex };
    struct Node;

    Region();
    static Region empty();
    static Region full();

    Kind kind() const;
    bool is_empty() const { return kind() == Kind::Empty; }
    bool is_full() const { return kind() == Kind::Full; }
    const std::string& key() const;

    const std::vector<std::uint64_t>& indices() const;  // Chain
    const std::vector<Region>& parts() const;           // Concat
    const std::vector<Region>& prefix() const;          // Omega
    const Region& tail() const;                          // Omega, when tail_der() == 0
    std::uint32_t tail_der() const;                      // Omega: j >= 1 means Der(j)
    const Region& top() const;                           // Omega
    const std::vector<LexEntry>& entries() const;        // Lex
    const std::vector<Region>& exception_regions() const;  // Lex

    friend bool operator==(const Region& a, const Region& b) { return a.key() == b.key(); }

    explicit Region(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

private:
    std::shared_ptr<const Node> node_;
};

struct LexEntry {
    Region base;
    Region fiber;
};

// Normalizing constructors. `t` is the term the region lives on (Rev/Ordinal are stripped).
Region make_chain_region(const Term& t, std::vector<std::uint64_t> indices);
Region make_concat_region(const Term& t, std::vector<Region> parts);
Region make_omega_region(const Term& t, std::vector<Region> prefix, Region tail, std::uint32_t tail_der, Region top);
Region make_lex_region(const Term& t, std::vector<LexEntry> entries, std::vector<Region> exceptions);

Region point_region(const Term& t, const LinePoint& p);
Region points_region(const Term& t, const std::vector<LinePoint>& ps);
// {x : x > p} (after) or {x : x < p}; inclusive adds p.
Region ray_region(const Term& t, const LinePoint& p, bool after, bool inclusive);
Region interval_region(const Term& t, const Interval& iv);

bool contains(const Term& t, const Region& r, const LinePoint& p);
Region intersect(const Term& t, const Region& a, const Region& b);
Region unite(const Term& t, const Region& a, const Region& b);
Region subtract(const Term& t, const Region& a, const Region& b);
Region complement(const Term& t, const Region& a);
bool is_subset(const Term& t, const Region& a, const Region& b);

// Greatest lower / least upper bound of a nonempty region (nullopt for the empty region).
std::optional<LinePoint> region_inf(const Term& t, const Region& r);
std::optional<LinePoint> region_sup(const Term& t, const Region& r);

// LexSum: the set of base points whose fiber meets r.
Region lex_projection(const Term& t, const Region& r);

// Omega: the region of copy k (prefix entry or tail instance).
Region omega_slice(const Term& t, const Region& r, std::uint64_t k);

}  // namespace cline
