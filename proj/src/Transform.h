#pragma once

#include "Cfa.h"
#include "ChcSystem.h"

#include <map>
#include <stdexcept>
#include <vector>

namespace horncfa {

enum class Direction { Forward, Backward };

std::string const & directionName(Direction d);

class UnknownEdge : public std::runtime_error {
public:
    UnknownEdge() : std::runtime_error("edge does not belong to this transformation result") {}
};

struct TransformResult {
    Cfa cfa;
    Direction direction = Direction::Forward;
    std::vector<LocationId> predLocation;              // predicate index -> location
    std::vector<std::vector<std::string>> predVars;    // predicate index -> parameter variable names
    std::vector<int> edgeClause;                       // edge id -> clause id (bijection)
    std::vector<int> clauseEdge;                       // clause id -> edge id
    std::vector<std::map<std::string, std::string>> clauseVarNames; // clause id -> original name -> cfa name
};

// Bottom-up encoding: facts leave the initial location, queries enter the
// error location, reaching l_i with values v means B_i(v) is deducible.
TransformResult forwardTransform(CHCSystem const & system);

// Top-down dual: queries leave the initial location, facts enter the error
// location, reaching l_i with values v means assuming B_i(v) makes the goal
// derivable.
TransformResult backwardTransform(CHCSystem const & system);

TransformResult transform(CHCSystem const & system, Direction direction);

Clause const & edgeToClause(CHCSystem const & system, TransformResult const & result, Edge const & edge);

} // namespace horncfa
