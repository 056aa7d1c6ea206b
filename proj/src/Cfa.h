#pragma once

#include "Term.h"

#include <span>
#include <string>
#include <vector>

namespace horncfa {

using LocationId = int;

enum class LocationKind { Init, Error, Predicate };

struct Location {
    LocationId id = -1;
    LocationKind kind = LocationKind::Predicate;
    int predIndex = -1; // for Predicate locations
    std::string name;   // "Init", "Err" or the predicate name
};

struct CfaVariable {
    std::string name;
    Sort sort;
};

struct CfaOp {
    enum class Kind { Assign, Havoc, Guard };
    Kind kind;
    std::string var; // Assign/Havoc target
    Term term;       // Assign rhs / Guard condition

    static CfaOp assign(std::string var, Term rhs) { return {Kind::Assign, std::move(var), std::move(rhs)}; }
    static CfaOp havoc(std::string var) { return {Kind::Havoc, std::move(var), nullptr}; }
    static CfaOp guard(Term cond) { return {Kind::Guard, {}, std::move(cond)}; }
};

std::string opToString(CfaOp const & op);
std::string opsToString(std::span<CfaOp const> ops);

struct Edge {
    int id = -1;
    LocationId source = -1;
    LocationId target = -1;
    std::vector<CfaOp> ops; // order is significant
    int clauseId = -1;
};

struct Cfa {
    std::vector<CfaVariable> variables;
    std::vector<Location> locations;
    LocationId initial = -1;
    LocationId error = -1;
    std::vector<Edge> edges;

    [[nodiscard]] CfaVariable const * findVariable(std::string const & name) const;
    [[nodiscard]] std::vector<int> outgoing(LocationId loc) const;
};

// One havoc choice per havoced variable of an edge.
using HavocChoices = std::map<std::string, Value>;

// Folds the operations left to right over a partial valuation. Returns
// nullopt when a guard fails or a step cannot be evaluated (unconstrained
// read, division by zero); both make the step infeasible.
std::optional<Valuation> execOps(Valuation valuation, std::span<CfaOp const> ops, HavocChoices const & choices);

struct ConcreteState {
    LocationId location = -1;
    Valuation valuation;
};

struct PathStep {
    int edgeId = -1;
    HavocChoices havocChoices;
    ConcreteState post;
};

struct ConcretePath {
    ConcreteState initial;
    std::vector<PathStep> steps;

    [[nodiscard]] ConcreteState const & last() const { return steps.empty() ? initial : steps.back().post; }
};

struct PathCheck {
    bool ok = true;
    int failStep = -1; // 1-based step index of the first failing replay
    std::string reason;
};

// Replays every step with execOps and compares against the recorded states.
PathCheck validatePath(Cfa const & cfa, ConcretePath const & path);

// Deterministic DOT rendering: locations by id, edges by clause id.
std::string toDot(Cfa const & cfa);

} // namespace horncfa
