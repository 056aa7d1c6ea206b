#pragma once

#include "Term.h"

#include <optional>
#include <string>
#include <vector>

namespace horncfa {

struct PredicateDecl {
    std::string name;
    std::vector<Sort> paramSorts;
    int index = -1;

    [[nodiscard]] int arity() const { return static_cast<int>(paramSorts.size()); }
};

// An applied predicate occurrence; after normalization the arguments are
// distinct clause variables.
struct AtomRef {
    int predIndex = -1;
    std::vector<std::string> argVars;
};

enum class ClauseKind { Fact, Induction, Query, DegenerateQuery };

std::string const & clauseKindName(ClauseKind k);

struct Clause {
    int id = -1;
    std::optional<AtomRef> head; // absent = false head
    std::optional<AtomRef> body; // at most one uninterpreted body atom
    Term constraint;             // interpreted body part, Bool
    std::vector<Binder> clauseVars;

    [[nodiscard]] std::optional<Sort> varSort(std::string const & name) const;
};

// Total on normalized clauses; the degenerate false <- constraint case is its
// own kind rather than an error.
ClauseKind classify(Clause const & clause);

struct CHCSystem {
    std::vector<PredicateDecl> predicates;
    std::vector<Clause> clauses;

    [[nodiscard]] int predicateIndex(std::string const & name) const;
    [[nodiscard]] bool hasFact() const;
    [[nodiscard]] bool hasQuery() const; // includes degenerate queries
};

// Renders the system as an SMT-LIB 2 HORN script; reparsing the output yields
// a structurally identical system.
std::string toSmtScript(CHCSystem const & system);

std::string clauseToString(CHCSystem const & system, Clause const & clause);

} // namespace horncfa
