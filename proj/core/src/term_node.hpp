#pragma once

#include <mutex>

#include "cline/term.hpp"

namespace cline {

struct TermNode {
    TermKind kind = TermKind::Single;
    std::uint64_t n = 0;               // Chain size
    std::vector<Term> children;        // see Term accessors for the layout per kind
    std::vector<FiberException> exceptions;
    Ordinal ordinal;
    std::uint64_t hash = 0;

    // OmegaIter blocks, grown on demand.
    mutable std::mutex block_mutex;
    mutable std::vector<Term> blocks;
};

}  // namespace cline
