#include <gtest/gtest.h>

#include <filesystem>

#include "cline/error.hpp"
#include "cline/scenario.hpp"

using namespace cline;

namespace {

std::vector<std::string> bundled()
{
    std::vector<std::string> out;
    for (const auto& e : std::filesystem::directory_iterator(CLINE_SCENARIO_DIR))
        if (e.path().extension() == ".json")
            out.push_back(e.path().string());
    std::sort(out.begin(), out.end());
    return out;
}

std::string data(const char* name) { return std::string(CLINE_TEST_DATA_DIR) + "/" + name; }

}  // namespace

TEST(Scenario, BundledFilesRoundTrip)
{
    auto files = bundled();
    ASSERT_GE(files.size(), 7u);
    for (const auto& f : files) {
        ScenarioSpec s = load_scenario_file(f);
        std::string text = print_scenario(s);
        ScenarioSpec again = parse_scenario(text);
        EXPECT_EQ(again, s) << f;
        EXPECT_EQ(print_scenario(again), text) << f;
    }
}

TEST(Scenario, BundledFilesBuild)
{
    for (const auto& f : bundled()) {
        Scenario sc = build_scenario(load_scenario_file(f));
        ASSERT_TRUE(sc.seq.valid()) << f;
        EXPECT_EQ(sc.phi->domain(), sc.k) << f;
        EXPECT_EQ(sc.phi->codomain(), sc.l) << f;
        EXPECT_GT(sc.epsilon, 0);
        for (std::uint64_t n = 1; n <= 5; ++n)
            EXPECT_EQ(sc.seq(n).space(), sc.l) << f;
    }
}

TEST(Scenario, FixturesMatchSequence)
{
    Scenario sc = build_scenario(load_scenario_file(std::string(CLINE_SCENARIO_DIR) + "/double_omega.json"));
    ASSERT_EQ(sc.expected.size(), 2u);
    for (const auto& [n, m] : sc.expected)
        EXPECT_EQ(sc.seq(n), m) << n;
    Scenario bad = build_scenario(load_scenario_file(data("corrupted_expected.json")));
    ASSERT_EQ(bad.expected.size(), 1u);
    EXPECT_NE(bad.seq(bad.expected[0].first), bad.expected[0].second);
}

TEST(Scenario, RunProducesLifts)
{
    for (const char* name : {"double_omega.json", "double_omega_sum.json", "identity.json"}) {
        Scenario sc = build_scenario(load_scenario_file(std::string(CLINE_SCENARIO_DIR) + "/" + name));
        ExtensionSequence out = run_scenario(sc, ExtensionConfig{});
        for (std::uint64_t n = 1; n <= 30; ++n) {
            EXPECT_EQ(pushforward(*sc.phi, out.measure(n)), sc.seq(n)) << name << " n=" << n;
            EXPECT_LE(out.measure(n).tv_norm(), (2 + sc.epsilon) * sc.seq(n).tv_norm()) << name;
        }
    }
}

TEST(Scenario, ErrorMapping)
{
    EXPECT_THROW(load_scenario_file(data("malformed_term.json")), ParseError);
    EXPECT_THROW(build_scenario(load_scenario_file(data("unknown_map.json"))), ValidationError);
    EXPECT_THROW(load_scenario_file(data("no_such_file.json")), ValidationError);
    EXPECT_THROW(parse_scenario("{\"name\": "), ParseError);
    EXPECT_THROW(parse_scenario("[1, 2]"), ParseError);
    EXPECT_THROW(parse_scenario(R"({"name": "x", "kind": "other", "spaces": {"domain": "single", "codomain": "single"},
                                    "map": {"builtin": "identity"}, "sequence": {"builtin": "zero"}})"),
                 ValidationError);
    EXPECT_THROW(parse_scenario(R"({"name": "x", "spaces": {"domain": "single", "codomain": "single"},
                                    "map": {"builtin": "identity"}, "sequence": {"builtin": "zero"},
                                    "window": 0})"),
                 ValidationError);
}

TEST(Scenario, MeasureJson)
{
    Term w = parse_term("(ordinal w)");
    Measure m = dirac(w, parse_point("c2"), Rational(1, 2)) - dirac(w, parse_point("T"));
    std::string js = measure_to_json(m);
    EXPECT_NE(js.find("1/2"), std::string::npos);
    EXPECT_NE(js.find("-1"), std::string::npos);
    EXPECT_EQ(measure_to_json(Measure(w)), "[]");
}
