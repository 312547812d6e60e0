#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cline/extension.hpp"
#include "cline/map.hpp"
#include "cline/measure.hpp"

namespace cline {

// Parsed scenario file. The map and sequence descriptions are kept as canonical JSON text.
struct ScenarioSpec {
    std::string name;
    std::string kind = "main";   // main | sum
    std::string domain;          // s-expression, canonical after parsing
    std::string codomain;
    std::string map_json;
    std::string sequence_json;
    std::string epsilon = "1/10";
    std::uint64_t window = 200;
    std::string expected_json;   // optional fixture: [{"n": .., "atoms": [[point, weight], ..]}, ..]

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

// Throws ParseError for malformed JSON or terms, ValidationError for unknown builtins.
ScenarioSpec parse_scenario(std::string_view json_text);
ScenarioSpec load_scenario_file(const std::string& path);
std::string print_scenario(const ScenarioSpec& spec);

struct Scenario {
    ScenarioSpec spec;
    Term k;
    Term l;
    MapPtr phi;
    MeasureSequence seq;
    Rational epsilon;
    std::vector<std::pair<std::uint64_t, Measure>> expected;
};

Scenario build_scenario(const ScenarioSpec& spec);

// kind main: extend_sequence_main. kind sum: one gluing step over the top-level decomposition
// of the codomain, with point lifts on the blocks.
ExtensionSequence run_scenario(const Scenario& sc, const ExtensionConfig& cfg);

// Measure as [[point, "p/q"], ...].
std::string measure_to_json(const Measure& m);

}  // namespace cline
