#pragma once

#include "Cegar.h"
#include "ChcSystem.h"
#include "Smt.h"
#include "Transform.h"

#include <stdexcept>
#include <string>
#include <vector>

namespace horncfa {

class DirectionMismatch : public std::runtime_error {
public:
    DirectionMismatch()
        : std::runtime_error("refutations are read off forward paths; use the backward variant") {}
};

// One definition per declared predicate, over placeholder parameters p1..pm.
struct ModelDefs {
    std::vector<Term> definitions;
    std::vector<std::vector<std::string>> paramNames;
    std::vector<bool> quantified; // true where elimination failed and a quantifier remains
};

// Eq. 6: disjoin the labels of the non-covered ARG nodes per location, rename
// the location parameters to placeholders and project away foreign variables.
// A no-query system gets the all-true model; unreachable predicates are false.
ModelDefs buildModel(CHCSystem const & system, TransformResult const & transform, Domain domain,
                     Precision const & precision, Arg const & arg, SolverSession & session);

// Substitutes the definitions into every clause and checks validity.
Tri validateModel(CHCSystem const & system, ModelDefs const & model, SolverSession & session);

struct RefutationStep {
    int clauseId = -1;
    std::map<std::string, Value> substitution; // original clause variable -> value
    std::optional<std::pair<int, std::vector<Value>>> headInstance;
    std::optional<std::pair<int, std::vector<Value>>> bodyInstance;
};

struct Refutation {
    std::vector<RefutationStep> steps;
};

// Maps a validated forward counterexample path back to a chain of clause
// instantiations (fact, inductions, query).
Refutation buildRefutation(CHCSystem const & system, TransformResult const & transform,
                           ConcretePath const & path);

// The dual reading for backward paths: the path runs query -> ... -> fact, so
// the refutation is the reversed step sequence.
Refutation refutationFromBackwardPath(CHCSystem const & system, TransformResult const & transform,
                                      ConcretePath const & path);

struct RefutationCheck {
    bool ok = true;
    std::string diagnostic;
};

// Purely concrete validation: kind sequence, chained instances, and every
// constraint evaluating to true under the substitution.
RefutationCheck validateRefutation(CHCSystem const & system, Refutation const & refutation);

std::string modelToSmt(CHCSystem const & system, ModelDefs const & model);
std::string refutationToText(CHCSystem const & system, Refutation const & refutation);
std::string modelWarnings(ModelDefs const & model);

} // namespace horncfa
