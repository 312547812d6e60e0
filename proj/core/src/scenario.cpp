#include "cline/scenario.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cline/error.hpp"
#include "cline/sequences.hpp"
#include "cline/witnesses.hpp"

namespace cline {

using nlohmann::json;

namespace {

std::string canonical_term(const json& j, const char* what)
{
    if (!j.is_string())
        throw ParseError(std::string(what) + " must be an s-expression string", 0);
    return parse_term(j.get<std::string>()).to_sexpr();
}

const json& field(const json& j, const char* key)
{
    auto it = j.find(key);
    if (it == j.end())
        throw ValidationError(std::string("missing field '") + key + "'");
    return *it;
}

std::string text_field(const json& j, const char* key)
{
    const json& v = field(j, key);
    if (v.is_string())
        return v.get<std::string>();
    if (v.is_number_integer())
        return std::to_string(v.get<std::int64_t>());
    throw ValidationError(std::string("field '") + key + "' must be a string");
}

Rational weight_of(const json& j)
{
    if (j.is_number_integer())
        return Rational(j.get<long>());
    if (!j.is_string())
        throw ValidationError("weights are strings \"p/q\" or integers");
    return parse_rational(j.get<std::string>());
}

std::vector<std::pair<std::string, Rational>> atom_list(const json& j)
{
    if (!j.is_array())
        throw ValidationError("atoms must be an array of [point, weight] pairs");
    std::vector<std::pair<std::string, Rational>> out;
    for (const auto& a : j) {
        if (!a.is_array() || a.size() != 2 || !a[0].is_string())
            throw ValidationError("atom must be [point, weight]");
        out.emplace_back(a[0].get<std::string>(), weight_of(a[1]));
    }
    return out;
}

// Points of ordinal segments may also be written in ordinal notation.
LinePoint point_of(const Term& space, const std::string& text)
{
    if (space.kind() == TermKind::Ordinal) {
        try {
            return ordinal_point(space, parse_ordinal(text));
        } catch (const ParseError&) {
        }
    }
    LinePoint p = parse_point(text);
    validate_point(space, p);
    return p;
}

Measure measure_of(const Term& space, const json& atoms)
{
    Measure m(space);
    for (const auto& [p, w] : atom_list(atoms))
        m.add_atom(point_of(space, p), w);
    return m;
}

MapPtr build_map(const json& j, const Term& k, const Term& l)
{
    std::string name = text_field(j, "builtin");
    if (name == "first-projection") {
        const Term& d = k.unwrap();
        if (d.kind() != TermKind::LexSum || !(d.base() == l))
            throw ValidationError("first-projection needs a domain that is a lexicographic sum over the codomain");
        return std::make_shared<CollapseMap>(k, l);
    }
    if (name == "ordinal-collapse") {
        if (l.kind() != TermKind::Ordinal)
            throw ValidationError("ordinal-collapse needs an ordinal segment as codomain");
        return std::make_shared<CollapseMap>(k, l);
    }
    if (name == "collapse")
        return std::make_shared<CollapseMap>(k, l);
    if (name == "interleave")
        return std::make_shared<InterleaveMap>(k, l);
    if (name == "interval-table") {
        const json& rows = field(j, "table");
        if (!rows.is_array())
            throw ValidationError("table must be an array of rows");
        std::vector<std::vector<Interval>> table;
        for (const auto& row : rows) {
            std::vector<Interval> ivs;
            for (const auto& iv : row) {
                if (!iv.is_array() || iv.size() != 2 || !iv[0].is_string() || !iv[1].is_string())
                    throw ValidationError("table entries are [lo, hi] point pairs");
                ivs.push_back({parse_point(iv[0].get<std::string>()), parse_point(iv[1].get<std::string>())});
            }
            table.push_back(std::move(ivs));
        }
        return std::make_shared<IntervalTableMap>(k, l, std::move(table));
    }
    throw ValidationError("unknown map builtin '" + name + "'");
}

MeasureSequence build_sequence(const json& j, const Term& l)
{
    std::string name = text_field(j, "builtin");
    if (name == "delta-diff")
        return delta_diff_sequence(l, point_template(l, text_field(j, "point")));
    if (name == "moving-atom") {
        std::vector<MovingAtom> moving;
        for (const auto& [p, w] : atom_list(field(j, "atoms")))
            moving.push_back({point_template(l, p), w});
        std::vector<FixedAtom> fixed;
        if (j.contains("fixed"))
            for (const auto& [p, w] : atom_list(j["fixed"]))
                fixed.push_back({point_of(l, p), w});
        return moving_atom_sequence(l, std::move(moving), std::move(fixed));
    }
    if (name == "scaled")
        return scaled_sequence(build_sequence(field(j, "of"), l), parse_rational(text_field(j, "factor")));
    if (name == "sum") {
        std::vector<MeasureSequence> parts;
        for (const auto& p : field(j, "of"))
            parts.push_back(build_sequence(p, l));
        return sum_sequence(parts);
    }
    if (name == "zero")
        return zero_sequence(l);
    if (name == "constant") {
        Measure m(l);
        for (const auto& [p, w] : atom_list(field(j, "atoms")))
            m.add_atom(point_of(l, p), w);
        return constant_sequence(m);
    }
    if (name == "witness") {
        std::string w = text_field(j, "name");
        if (w == "optimality")
            return optimality_sequence(l);
        if (w == "bigode")
            return bigode_sequence(l);
        throw ValidationError("unknown witness sequence '" + w + "'");
    }
    throw ValidationError("unknown sequence builtin '" + name + "'");
}

}  // namespace

ScenarioSpec parse_scenario(std::string_view text)
{
    json j;
    try {
        j = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
    }
    if (!j.is_object())
        throw ParseError("scenario must be a JSON object", 0);
    ScenarioSpec s;
    try {
        s.name = j.value("name", std::string());
        s.kind = j.value("kind", std::string("main"));
        if (s.kind != "main" && s.kind != "sum")
            throw ValidationError("kind must be main or sum");
        const json& spaces = field(j, "spaces");
        s.domain = canonical_term(field(spaces, "domain"), "domain");
        s.codomain = canonical_term(field(spaces, "codomain"), "codomain");
        s.map_json = field(j, "map").dump();
        s.sequence_json = field(j, "sequence").dump();
        if (j.contains("epsilon"))
            s.epsilon = text_field(j, "epsilon");
        parse_rational(s.epsilon);
        if (j.contains("window")) {
            if (!j["window"].is_number_unsigned() || j["window"].get<std::uint64_t>() == 0)
                throw ValidationError("window must be a positive integer");
            s.window = j["window"].get<std::uint64_t>();
        }
        if (j.contains("expected"))
            s.expected_json = j["expected"].dump();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad scenario field: ") + e.what());
    }
    return s;
}

ScenarioSpec load_scenario_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ValidationError("cannot open scenario file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str());
}

std::string print_scenario(const ScenarioSpec& s)
{
    json j;
    j["name"] = s.name;
    j["kind"] = s.kind;
    j["spaces"] = {{"domain", s.domain}, {"codomain", s.codomain}};
    j["map"] = json::parse(s.map_json);
    j["sequence"] = json::parse(s.sequence_json);
    j["epsilon"] = s.epsilon;
    j["window"] = s.window;
    if (!s.expected_json.empty())
        j["expected"] = json::parse(s.expected_json);
    return j.dump(2);
}

Scenario build_scenario(const ScenarioSpec& spec)
{
    Scenario sc;
    sc.spec = spec;
    sc.k = parse_term(spec.domain);
    sc.l = parse_term(spec.codomain);
    sc.epsilon = parse_rational(spec.epsilon);
    if (sc.epsilon <= 0)
        throw ValidationError("epsilon must be positive");
    try {
        sc.phi = build_map(json::parse(spec.map_json), sc.k, sc.l);
        sc.seq = build_sequence(json::parse(spec.sequence_json), sc.l);
        if (!spec.expected_json.empty()) {
            for (const auto& e : json::parse(spec.expected_json)) {
                std::uint64_t n = field(e, "n").get<std::uint64_t>();
                if (n == 0)
                    throw ValidationError("fixture indices start at 1");
                sc.expected.emplace_back(n, measure_of(sc.l, field(e, "atoms")));
            }
        }
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad scenario field: ") + e.what());
    }
    return sc;
}

ExtensionSequence run_scenario(const Scenario& sc, const ExtensionConfig& cfg)
{
    if (sc.spec.kind == "main")
        return extend_sequence_main(sc.phi, sc.epsilon, sc.seq, cfg);
    Partition p = root_space(sc.l)->decompose();
    if (p.kind == Partition::Kind::Leaf)
        return point_lift_sequence(sc.seq, sc.phi);
    Family fam = p.family;
    if (p.kind == Partition::Kind::Finite) {
        auto parts = std::make_shared<const std::vector<SpacePtr>>(p.parts);
        fam.count = parts->size();
        fam.block = [parts](std::uint64_t i) { return parts->at(i); };
        fam.locate = [p](const LinePoint& q) { return locate_part(p, q); };
    }
    MapPtr phi = sc.phi;
    SubExtender sub = [phi](std::uint64_t, const MeasureSequence& s) { return point_lift_sequence(s, phi); };
    return extend_sequence_sum(phi, {fam, p.infinity}, sub, 2, sc.seq, cfg);
}

std::string measure_to_json(const Measure& m)
{
    json a = json::array();
    for (const auto& [p, w] : m.atoms())
        a.push_back({p.to_string(), w.get_str()});
    return a.dump();
}

}  // namespace cline
