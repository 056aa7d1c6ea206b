#pragma once

#include "ChcSystem.h"
#include "Proof.h"
#include "Smt.h"

#include <cstdint>
#include <optional>

namespace horncfa {

struct OracleResult {
    enum class Kind { Found, NoneWithinBound };
    Kind kind = Kind::NoneWithinBound;
    Refutation refutation;
    bool inconclusive = false; // a solver Unknown or budget cap hit along the way
};

// Bounded symbolic search for a refutation: enumerates derivation skeletons
// fact . induction^t . query with t < depthBound over the clause graph and
// discharges each to the solver. A positive answer proves unsatisfiability;
// exhaustion proves nothing.
OracleResult boundedRefute(CHCSystem const & system, int depthBound, SolverSession & session);

struct SizeParams {
    int maxPredicates = 4;
    int maxArity = 3;
    int maxClauses = 8;
    int maxCoeff = 3;
};

// Deterministic generator of linear, well-sorted CHC systems.
CHCSystem randomSystem(uint64_t seed, SizeParams const & params);

} // namespace horncfa
