#include <fstream>
#include <iostream>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "cline/error.hpp"
#include "cline/extension.hpp"
#include "cline/order_analysis.hpp"
#include "cline/scenario.hpp"
#include "cline/verify.hpp"
#include "cline/witnesses.hpp"

using namespace cline;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kParseError = 2;
constexpr int kValidationError = 3;
constexpr int kUsage = 64;

struct Options {
    std::string scenario;
    std::uint64_t window = 0;
    std::string epsilon;
    std::size_t budget = 8;
    std::string report;
    std::string format = "json";
    std::string csv;
    std::size_t grid = 100;
    std::uint64_t seed = 1;
    std::string demo;
};

std::string q(const Rational& r) { return r.get_str(); }

void emit(const json& j, const std::string& path)
{
    if (path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    out << j.dump(2) << "\n";
}

void emit_text(const std::string& text, const std::string& path)
{
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw ValidationError("cannot write " + path);
    out << text;
}

json decay_json(const DecayReport& rep)
{
    json rows = json::array();
    for (const auto& r : rep.rows) {
        json row = {{"function", r.function},
                    {"max_first_half", q(r.max_first_half)},
                    {"max_second_half", q(r.max_second_half)},
                    {"flagged", r.flagged}};
        row["declared_n"] = r.declared_n ? json(*r.declared_n) : json(nullptr);
        row["violation"] = r.violation ? json(*r.violation) : json(nullptr);
        rows.push_back(row);
    }
    return {{"eps", q(rep.eps)}, {"window", rep.window}, {"rows", rows}, {"flags", rep.flags}, {"ok", rep.ok()}};
}

Scenario load(const Options& o)
{
    ScenarioSpec spec = load_scenario_file(o.scenario);
    if (o.window)
        spec.window = o.window;
    if (!o.epsilon.empty())
        spec.epsilon = o.epsilon;
    return build_scenario(spec);
}

int cmd_extend(const Options& o)
{
    Scenario sc = load(o);
    ExtensionConfig cfg;
    cfg.window = std::max<std::uint64_t>(cfg.window, sc.spec.window);
    ExtensionSequence out = run_scenario(sc, cfg);
    std::uint64_t window = sc.spec.window;
    Rational lambda = 2;
    ExtensionReport rep = extension_check(*sc.phi, sc.seq, out, lambda, sc.epsilon, window);

    bool fixture_ok = true;
    json fixtures = json::array();
    for (const auto& [n, expected] : sc.expected) {
        bool ok = pushforward(*sc.phi, out.measure(n)) == expected;
        fixture_ok = fixture_ok && ok;
        fixtures.push_back({{"n", n}, {"ok", ok}});
    }
    DecayReport decay_out = weak_star_decay_report(out.measures(), test_family_clopen(sc.k, o.budget), window);
    DecayReport decay_in = weak_star_decay_report(sc.seq, test_family_clopen(sc.l, o.budget), window);

    bool bound_required = sc.spec.kind == "main";
    bool ok = rep.pushforward_ok && rep.certified_ok && fixture_ok && (!bound_required || rep.bound_ok);

    if (o.format == "csv") {
        std::string text = "n,norm_in,norm_out,ratio,certified_bound,pushforward_ok,phi_n_size,route\n";
        for (const auto& r : rep.rows)
            text += std::to_string(r.n) + "," + q(r.norm_in) + "," + q(r.norm_out) + "," + q(r.ratio) + "," +
                    q(r.certified_bound) + "," + (r.pushforward_ok ? "1" : "0") + "," +
                    std::to_string(r.phi_size) + "," + r.route + "\n";
        emit_text(text, o.report);
        return ok ? kOk : kCheckFailed;
    }

    json terms = json::array();
    for (const auto& r : rep.rows)
        terms.push_back({{"n", r.n},
                         {"norm_in", q(r.norm_in)},
                         {"norm_out", q(r.norm_out)},
                         {"ratio", q(r.ratio)},
                         {"certified_bound", q(r.certified_bound)},
                         {"pushforward_ok", r.pushforward_ok},
                         {"phi_n_size", r.phi_size},
                         {"route", r.route}});
    std::vector<std::string> flags = cfg.flags->list();
    flags.insert(flags.end(), rep.flags.begin(), rep.flags.end());
    json j;
    j["scenario"] = sc.spec.name;
    j["kind"] = sc.spec.kind;
    j["epsilon"] = sc.spec.epsilon;
    j["window"] = window;
    j["exact"] = {{"pushforward_ok", rep.pushforward_ok},
                  {"certified_ok", rep.certified_ok},
                  {"bound", q(rep.bound)},
                  {"bound_ok", rep.bound_ok},
                  {"fixtures", fixtures},
                  {"fixtures_ok", fixture_ok}};
    j["exact"]["first_mismatch"] = rep.first_mismatch ? json(*rep.first_mismatch) : json(nullptr);
    j["empirical"] = {{"max_ratio", q(rep.max_ratio)},
                      {"tail_max_ratio", q(rep.tail_max_ratio)},
                      {"decay_input", decay_json(decay_in)},
                      {"decay_output", decay_json(decay_out)}};
    j["flags"] = flags;
    j["terms"] = terms;
    j["ok"] = ok;
    emit(j, o.report);
    return ok ? kOk : kCheckFailed;
}

json kk_json(const KKReport& kk)
{
    return {{"verdict", kk.complemented ? "COMPLEMENTED" : "NOT_COMPLEMENTED"},
            {"io", kk.io.to_string()},
            {"q", kk.q.key()},
            {"trace", kk.trace},
            {"certificate", kk.certificate}};
}

int cmd_analyze_io(const Options& o)
{
    Scenario sc = load(o);
    IoReport full = internal_order(sc.l, Region::full());
    json j;
    j["scenario"] = sc.spec.name;
    j["codomain"] = sc.l.to_sexpr();
    j["io_full"] = {{"io", full.io.to_string()}, {"trace", full.trace}, {"certificate", full.certificate}};
    if (sc.phi->increasing())
        j["kk"] = kk_json(kk_complemented(*sc.phi));
    else
        j["kk"] = {{"verdict", "NOT_APPLICABLE"}, {"certificate", "map is not increasing"}};
    emit(j, o.report);
    return kOk;
}

int demo_double_arrow(const Options& o)
{
    DAWitness w = dyadic_rotation_witness();
    std::vector<Rational> grid = rational_grid(o.grid);
    std::uint64_t window = o.window ? o.window : 100;
    bool g_ok = true;
    std::vector<std::uint64_t> late_hits(grid.size(), 0);
    for (std::uint64_t n = 1; n <= window; ++n) {
        auto [a, b] = w.interval(n);
        RealMeasure nu = w(n);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Rational& t = grid[i];
            Rational want = (a <= t && t < b) ? 1 : 0;
            Rational got = g_nu(nu, t);
            g_ok = g_ok && got == want;
            if (n > window / 2 && got != 0)
                ++late_hits[i];
        }
    }
    // random measures on the double arrow against their projections
    std::mt19937_64 rng(o.seed);
    std::uniform_int_distribution<int> coord(0, static_cast<int>(grid.size()) * 2);
    std::uniform_int_distribution<int> weight(-5, 5);
    std::uniform_int_distribution<int> level(0, 1);
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
        DAMeasure mu;
        for (int a = 0; a < 6; ++a) {
            Rational t(coord(rng), static_cast<unsigned long>(grid.size() * 2));
            int wv = weight(rng);
            if (wv != 0)
                mu[{t, level(rng)}] += wv;
        }
        RealMeasure nu = project_da(mu);
        for (const auto& t : grid)
            if (t < 1 && f_mu_right(mu, t) != g_nu(nu, t))
                ++mismatches;
    }
    std::size_t stuck = 0;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
        if (late_hits[i] > 0)
            ++stuck;
    json j;
    j["demo"] = "double-arrow";
    j["witness"] = w.name();
    j["window"] = window;
    j["grid"] = grid.size();
    j["certificate"] = {{"g_equals_indicator", g_ok},
                        {"grid_points_hit_in_second_half", stuck},
                        {"grid_points_below_one", grid.size() - 1},
                        {"random_measures", 200},
                        {"right_limit_mismatches", mismatches}};
    emit(j, o.report);
    if (!o.csv.empty()) {
        std::string text = "t,late_hits\n";
        for (std::size_t i = 0; i < grid.size(); ++i)
            text += grid[i].get_str() + "," + std::to_string(late_hits[i]) + "\n";
        emit_text(text, o.csv);
    }
    return g_ok && mismatches == 0 ? kOk : kCheckFailed;
}

int demo_optimality(const Options& o)
{
    OptimalityScenario sc = optimality_scenario();
    std::uint64_t window = o.window ? o.window : 200;
    ExtensionConfig cfg;
    cfg.window = std::max<std::uint64_t>(cfg.window, window);
    ExtensionSequence out = extend_sequence_main(sc.phi, Rational(1, 10), sc.v, cfg);
    Rational max_pipeline = 0;
    Rational max_lift = 0;
    bool ok = true;
    std::string text = "n,norm_point_lift,cert_point_lift,norm_pipeline,cert_pipeline\n";
    for (std::uint64_t n = 1; n <= window; ++n) {
        Measure lift = point_lift(sc.v(n), *sc.phi);
        Measure ext = out.measure(n);
        Rational cl = lower_bound_certificate(sc, lift, n);
        Rational ce = lower_bound_certificate(sc, ext, n);
        ok = ok && cl <= lift.tv_norm() && ce <= ext.tv_norm();
        max_lift = std::max(max_lift, lift.tv_norm());
        max_pipeline = std::max(max_pipeline, ext.tv_norm());
        text += std::to_string(n) + "," + q(lift.tv_norm()) + "," + q(cl) + "," + q(ext.tv_norm()) + "," + q(ce) +
                "\n";
    }
    Rational threshold = 2 - Rational(1, 20);
    json j;
    j["demo"] = "optimality";
    j["window"] = window;
    j["certificate"] = {{"certificates_below_norms", ok},
                        {"max_norm_point_lift", q(max_lift)},
                        {"max_norm_pipeline", q(max_pipeline)},
                        {"threshold", q(threshold)},
                        {"pipeline_reaches_threshold", max_pipeline >= threshold}};
    j["flags"] = cfg.flags->list();
    emit(j, o.report);
    if (!o.csv.empty())
        emit_text(text, o.csv);
    return ok ? kOk : kCheckFailed;
}

int demo_bigode(const Options& o)
{
    BigodeSpaces b = bigode_spaces();
    std::uint64_t window = o.window ? o.window : 200;
    KKReport kk = kk_complemented(*b.phi);
    MeasureSequence seq = bigode_sequence(b.l);
    ExtensionConfig cfg;
    cfg.window = std::max<std::uint64_t>(cfg.window, window);
    Rational eps(1, 10);
    ExtensionSequence out = extend_sequence_main(b.phi, eps, seq, cfg);
    ExtensionReport rep = extension_check(*b.phi, seq, out, 2, eps, window);
    std::string text = "n,norm_in,norm_out,certified_bound\n";
    for (const auto& r : rep.rows)
        text += std::to_string(r.n) + "," + q(r.norm_in) + "," + q(r.norm_out) + "," + q(r.certified_bound) + "\n";
    json j;
    j["demo"] = "bigode";
    j["kk"] = kk_json(kk);
    j["extension"] = {{"window", window},
                      {"pushforward_ok", rep.pushforward_ok},
                      {"bound", q(rep.bound)},
                      {"bound_ok", rep.bound_ok},
                      {"max_ratio", q(rep.max_ratio)}};
    j["flags"] = cfg.flags->list();
    emit(j, o.report);
    if (!o.csv.empty())
        emit_text(text, o.csv);
    return rep.ok() && !kk.complemented ? kOk : kCheckFailed;
}

int cmd_demo(const Options& o)
{
    if (o.demo == "double-arrow")
        return demo_double_arrow(o);
    if (o.demo == "optimality")
        return demo_optimality(o);
    if (o.demo == "bigode")
        return demo_bigode(o);
    std::cerr << "unknown demo '" << o.demo << "' (double-arrow, optimality, bigode)\n";
    return kUsage;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Exact extension pipeline for c0-valued operators on compact lines"};
    app.require_subcommand(1);
    Options o;

    auto* extend = app.add_subcommand("extend", "Extend a scenario's measure sequence and check it");
    extend->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
    extend->add_option("--window", o.window, "Number of terms to check");
    extend->add_option("--epsilon", o.epsilon, "Norm slack as p/q");
    extend->add_option("--budget", o.budget, "Sample size for the test family");
    extend->add_option("--report", o.report, "Output file (stdout when omitted)");
    extend->add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

    auto* analyze = app.add_subcommand("analyze-io", "Internal order and complementation certificate");
    analyze->add_option("--scenario", o.scenario, "Scenario JSON file")->required();
    analyze->add_option("--report", o.report, "Output file (stdout when omitted)");

    auto* demo = app.add_subcommand("demo", "Run a bundled witness construction");
    demo->add_option("name", o.demo, "double-arrow, optimality or bigode")->required();
    demo->add_option("--grid", o.grid, "Grid size for the double arrow demo");
    demo->add_option("--window", o.window, "Number of terms");
    demo->add_option("--seed", o.seed, "Seed for random measures");
    demo->add_option("--report", o.report, "JSON output file (stdout when omitted)");
    demo->add_option("--csv", o.csv, "CSV output file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (extend->parsed())
            return cmd_extend(o);
        if (analyze->parsed())
            return cmd_analyze_io(o);
        return cmd_demo(o);
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kParseError;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kValidationError;
    } catch (const RegionError& e) {
        std::cerr << "region error: " << e.what() << "\n";
        return kValidationError;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kCheckFailed;
    }
}
