#pragma once

#include <compare>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace cline {

class LinePoint;

enum class StepKind : std::uint8_t {
    Index,  // position inside a finite chain
    Part,   // summand of a concatenation
    Copy,   // k-th block of an omega-up / omega-iter
    Top,    // the top summand of an omega-up / omega-iter
    Lex,    // base point of a lexicographic sum; the fiber path follows
};

struct Step {
    StepKind kind = StepKind::Index;
    std::uint64_t n = 0;
    std::shared_ptr<const LinePoint> base;  // only for Lex

    static Step index(std::uint64_t i) { return {StepKind::Index, i, nullptr}; }
    static Step part(std::uint64_t i) { return {StepKind::Part, i, nullptr}; }
    static Step copy(std::uint64_t k) { return {StepKind::Copy, k, nullptr}; }
    static Step top() { return {StepKind::Top, 0, nullptr}; }
    static Step lex(LinePoint base);
};

// A point of a line term, written as the path of choices from the root.
// Rev and ordinal-segment nodes are transparent and contribute no step.
// Ordering operators here are structural (for use as map keys), not the line order;
// see cline::compare in line.hpp for the order of the line.
class LinePoint {
public:
    LinePoint() = default;
    explicit LinePoint(std::vector<Step> steps) : steps_(std::move(steps)) {}

    const std::vector<Step>& steps() const { return steps_; }
    std::size_t size() const { return steps_.size(); }
    bool empty() const { return steps_.empty(); }

    LinePoint with_prefix(const Step& s) const;
    LinePoint with_prefix(const std::vector<Step>& prefix) const;
    LinePoint suffix(std::size_t from) const;

    // "_" for the empty path, otherwise steps joined by '.': i3, p1, c5, T, L(<point>).
    std::string to_string() const;

    friend bool operator==(const LinePoint& a, const LinePoint& b);
    friend std::strong_ordering operator<=>(const LinePoint& a, const LinePoint& b);

private:
    std::vector<Step> steps_;
};

std::strong_ordering structural_compare(const Step& a, const Step& b);
bool operator==(const Step& a, const Step& b);

LinePoint parse_point(std::string_view text);

}  // namespace cline
