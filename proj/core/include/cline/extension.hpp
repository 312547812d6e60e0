#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "cline/decompose.hpp"
#include "cline/map.hpp"
#include "cline/measure.hpp"

namespace cline {

// Deduplicated notes about heuristic decisions taken while building an extension.
class FlagLog {
public:
    void add(const std::string& flag);
    std::vector<std::string> list() const;
    bool empty() const;

private:
    mutable std::mutex mu_;
    std::set<std::string> flags_;
};

struct ExtensionConfig {
    std::uint64_t window = 200;      // indices examined by window-based decisions
    std::uint64_t scan_cap = 4096;   // hard limit for any forward scan over indices
    std::shared_ptr<FlagLog> flags = std::make_shared<FlagLog>();
};

// One term of an extended sequence.
struct ExtendedTerm {
    Measure measure;
    Rational certified_bound;     // exact upper bound for tv_norm(measure)
    std::uint64_t phi_size = 0;   // |Phi_n| at the outermost sum level, 0 if none
    std::string route;
};

// Lazily evaluated, cached sequence of extended terms, indexed from 1.
class ExtensionSequence {
public:
    using Generator = std::function<ExtendedTerm(std::uint64_t)>;
    ExtensionSequence() = default;
    ExtensionSequence(Term domain, Generator gen);

    ExtendedTerm operator()(std::uint64_t n) const;
    Measure measure(std::uint64_t n) const { return (*this)(n).measure; }
    const Term& domain() const;
    MeasureSequence measures() const;

private:
    struct State;
    std::shared_ptr<State> state_;
};

// ---- regular extension operator for a closed set ----

class AnchorMap {
public:
    // Throws ValidationError when f is empty.
    AnchorMap(Term k, ClosedSet f);
    const Term& space() const { return k_; }
    const ClosedSet& closed_set() const { return f_; }
    bool in_f(const LinePoint& p) const { return contains(k_, f_, p); }
    // Point of F that p is sent to.
    LinePoint anchor(const LinePoint& p) const;

private:
    Term k_;
    ClosedSet f_;
};

AnchorMap build_anchor_map(const ClosedSet& f, const Term& k);

// E_F(f|_F): p -> f(anchor(p)). Only the values of f on F are used.
SimpleFunction extend_function(const SimpleFunction& f, const AnchorMap& anchors);

// sum_theta v(theta) (delta_{p_theta} - delta_{anchor(p_theta)}). Throws ValidationError if
// some p_theta lies in F or the points repeat.
Measure p_star(const std::vector<std::pair<LinePoint, Rational>>& v, const AnchorMap& anchors);

struct GlueBlock {
    Interval interval;   // clopen
    Measure nu;          // supported in the interval
};

// nu = sum nu_theta + P*(v) off the blocks, v(theta) = nu_theta(I_theta), p_theta = min I_theta.
Measure glue_with(const std::vector<GlueBlock>& blocks, const AnchorMap& anchors);
// Same with F = K minus the blocks. Throws ValidationError on overlap, non-clopen blocks,
// or blocks covering K.
Measure glue(const std::vector<GlueBlock>& blocks, const Term& k);

// ---- index selection ----

// Chooses the increasing finite sets Phi_n = {0, ..., phi(n)} for a family r^n_gamma
// with lim_n r^n_gamma = 0.
class PhiSelector {
public:
    using R = std::function<Rational(std::uint64_t n, std::uint64_t gamma)>;
    // Certified M_k: |sum_{i<=k} r^n_i| < 1/k for every n >= M_k.
    using TailBound = std::function<std::optional<std::uint64_t>(std::uint64_t k)>;

    PhiSelector(R r, std::optional<std::uint64_t> gamma_count, TailBound tail, std::uint64_t scan_cap,
                std::shared_ptr<FlagLog> flags = nullptr);

    // Throws ModulusUnknown when no bound can be established within the scan cap.
    std::uint64_t threshold(std::uint64_t k) const;   // N_k, k >= 1
    std::uint64_t phi(std::uint64_t n) const;         // max{k >= 1 : N_k <= n}, or 0
    // Size of Phi_n; for a finite index set every Phi_n is the whole set.
    std::uint64_t size(std::uint64_t n) const;
    bool contains(std::uint64_t n, std::uint64_t gamma) const { return gamma < size(n); }
    bool heuristic() const;

private:
    struct State;
    std::shared_ptr<State> state_;
};

// Phi_n as an explicit list.
std::vector<std::uint64_t> select_phi(const PhiSelector& sel, std::uint64_t n);

// ---- sequence extenders ----

// Atomic norm-preserving lift along the section of phi.
Measure point_lift(const Measure& mu, const MapDescriptor& phi);
ExtensionSequence point_lift_sequence(const MeasureSequence& seq, MapPtr phi);

using NormalizedExtender = std::function<ExtensionSequence(const MeasureSequence&)>;

// Norm bucketing: zero terms go to zero, finite buckets to point_lift, infinite buckets are
// normalized, extended, and scaled back.
ExtensionSequence rescale_extension(MapPtr phi, const NormalizedExtender& ext, const MeasureSequence& seq,
                                    const ExtensionConfig& cfg);

// Last n <= window with tv_norm(ext(n)) > bound * tv_norm(orig(n)), or 0.
std::uint64_t detect_n0(const ExtensionSequence& ext, const MeasureSequence& orig, const Rational& bound,
                        std::uint64_t window);
// Terms n <= n0 replaced by point_lift of orig(n).
ExtensionSequence trim_to_bound(const ExtensionSequence& ext, const MeasureSequence& orig, MapPtr phi,
                                std::uint64_t n0);

// Blocks L_gamma of the codomain plus at most one remaining point.
struct SumPartition {
    Family family;
    std::optional<LinePoint> infinity;
};
using SubExtender = std::function<ExtensionSequence(std::uint64_t gamma, const MeasureSequence& restricted)>;

// Gluing step for a partition of the codomain. Sub-extensions must satisfy
// tv_norm <= lambda_sub * tv_norm(input) for every n.
ExtensionSequence extend_sequence_sum(MapPtr phi, const SumPartition& part, const SubExtender& sub,
                                      const Rational& lambda_sub, const MeasureSequence& seq,
                                      const ExtensionConfig& cfg);

// Full recursion over the clopen decomposition of the codomain; per-n ratio <= 2 + eps
// on the window.
ExtensionSequence extend_sequence_main(MapPtr phi, const Rational& eps,
                                       const MeasureSequence& seq, const ExtensionConfig& cfg);

// Endpoints of the convex components of the fibers over sampled codomain points.
struct EndpointSet {
    std::vector<LinePoint> points;   // ascending in the order of the domain
    bool onto = false;               // every sampled codomain point has an endpoint over it
    std::size_t sampled = 0;
};
EndpointSet fiber_endpoint_set(const MapDescriptor& phi, std::size_t budget);

}  // namespace cline
