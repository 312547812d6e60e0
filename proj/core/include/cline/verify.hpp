#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cline/extension.hpp"
#include "cline/map.hpp"
#include "cline/measure.hpp"

namespace cline {

// Empty indicator, indicators of the clopen intervals with endpoints in enumerate(k, budget),
// indicators of the final segments starting right after a sample point, and the constant 1.
// budget <= 1 gives the constant alone.
std::vector<SimpleFunction> test_family_clopen(const Term& k, std::size_t budget);

struct DecayRow {
    std::string function;
    std::vector<Rational> values;   // |integral f d mu_n|, n = 1..window
    Rational max_first_half;
    Rational max_second_half;       // over n > window / 2
    bool flagged = false;           // no visible decay over the window
    std::optional<std::uint64_t> declared_n;  // from the sequence moduli at eps
    std::optional<std::uint64_t> violation;   // first n >= declared_n with |integral| >= eps
};

struct DecayReport {
    std::uint64_t window = 0;
    Rational eps;
    std::vector<DecayRow> rows;
    std::vector<std::string> flags;
    bool ok() const;   // no modulus violations
};

DecayReport weak_star_decay_report(const MeasureSequence& seq, const std::vector<SimpleFunction>& family,
                                   std::uint64_t window, const Rational& eps = Rational(1, 10));

struct ExtensionRow {
    std::uint64_t n = 0;
    Rational norm_in;
    Rational norm_out;
    Rational ratio;            // norm_out / norm_in, 0 when norm_in = 0
    Rational certified_bound;
    bool pushforward_ok = false;
    bool certified_ok = false; // certified bound >= norm_out
    bool within_bound = false; // norm_out <= (lambda + eps) norm_in
    std::uint64_t phi_size = 0;
    std::string route;
};

struct ExtensionReport {
    Rational bound;            // lambda + eps
    std::vector<ExtensionRow> rows;
    std::optional<std::uint64_t> first_mismatch;
    Rational max_ratio;
    Rational tail_max_ratio;   // over n > window / 2
    bool pushforward_ok = true;
    bool certified_ok = true;
    bool bound_ok = true;
    std::vector<std::string> flags;
    bool ok() const { return pushforward_ok && certified_ok && bound_ok; }
};

ExtensionReport extension_check(const MapDescriptor& phi, const MeasureSequence& in, const ExtensionSequence& out,
                                const Rational& lambda, const Rational& eps, std::uint64_t window);

}  // namespace cline
