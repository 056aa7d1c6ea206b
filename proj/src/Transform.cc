#include "Transform.h"

#include <cassert>
#include <cctype>
#include <set>

namespace horncfa {

std::string const & directionName(Direction d) {
    static const std::string fw = "forward";
    static const std::string bw = "backward";
    return d == Direction::Forward ? fw : bw;
}

namespace {

class Builder {
public:
    Builder(CHCSystem const & system, Direction direction) : system(system), direction(direction) {}

    TransformResult build() {
        createLocations();
        createVariables();
        for (auto const & clause : system.clauses) {
            addEdge(clause);
        }
        return std::move(result);
    }

private:
    CHCSystem const & system;
    Direction direction;
    TransformResult result;
    std::set<std::string> takenNames;

    std::string claimName(std::string base) {
        while (takenNames.count(base)) {
            base += "'";
        }
        takenNames.insert(base);
        return base;
    }

    void createLocations() {
        result.direction = direction;
        Cfa & cfa = result.cfa;
        cfa.locations.push_back({0, LocationKind::Init, -1, "Init"});
        cfa.locations.push_back({1, LocationKind::Error, -1, "Err"});
        cfa.initial = 0;
        cfa.error = 1;
        for (auto const & pred : system.predicates) {
            LocationId id = static_cast<LocationId>(cfa.locations.size());
            cfa.locations.push_back({id, LocationKind::Predicate, pred.index, pred.name});
            result.predLocation.push_back(id);
        }
    }

    void createVariables() {
        Cfa & cfa = result.cfa;
        // one variable per predicate parameter, named after the predicate
        for (auto const & pred : system.predicates) {
            std::vector<std::string> params;
            std::string base = pred.name;
            for (auto & c : base) {
                c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            }
            for (int j = 0; j < pred.arity(); ++j) {
                std::string name = claimName(base + "_" + std::to_string(j + 1));
                cfa.variables.push_back({name, pred.paramSorts[j]});
                params.push_back(std::move(name));
            }
            result.predVars.push_back(std::move(params));
        }
        // clause-local variables, suffixed with the clause id to keep one namespace
        for (auto const & clause : system.clauses) {
            std::map<std::string, std::string> renaming;
            for (auto const & binder : clause.clauseVars) {
                std::string name = claimName(binder.name + "#" + std::to_string(clause.id));
                cfa.variables.push_back({name, binder.sort});
                renaming.emplace(binder.name, std::move(name));
            }
            result.clauseVarNames.push_back(std::move(renaming));
        }
    }

    Term renameConstraint(Clause const & clause) {
        std::map<std::string, Term> subst;
        for (auto const & binder : clause.clauseVars) {
            subst.emplace(binder.name, term::var(result.clauseVarNames[clause.id].at(binder.name), binder.sort));
        }
        return substitute(clause.constraint, subst);
    }

    std::vector<CfaOp> havocClauseVars(Clause const & clause) {
        std::vector<CfaOp> ops;
        for (auto const & binder : clause.clauseVars) {
            ops.push_back(CfaOp::havoc(result.clauseVarNames[clause.id].at(binder.name)));
        }
        return ops;
    }

    // copies location parameters into the atom's argument variables
    void copyIn(std::vector<CfaOp> & ops, Clause const & clause, AtomRef const & atom) {
        auto const & params = result.predVars[atom.predIndex];
        auto const & pred = system.predicates[atom.predIndex];
        for (size_t j = 0; j < atom.argVars.size(); ++j) {
            ops.push_back(CfaOp::assign(result.clauseVarNames[clause.id].at(atom.argVars[j]),
                                        term::var(params[j], pred.paramSorts[j])));
        }
    }

    // copies the atom's argument variables into the location parameters
    void copyOut(std::vector<CfaOp> & ops, Clause const & clause, AtomRef const & atom) {
        auto const & params = result.predVars[atom.predIndex];
        auto const & pred = system.predicates[atom.predIndex];
        for (size_t j = 0; j < atom.argVars.size(); ++j) {
            ops.push_back(CfaOp::assign(params[j], term::var(result.clauseVarNames[clause.id].at(atom.argVars[j]),
                                                             pred.paramSorts[j])));
        }
    }

    void addEdge(Clause const & clause) {
        Cfa & cfa = result.cfa;
        ClauseKind kind = classify(clause);
        std::vector<CfaOp> ops = havocClauseVars(clause);
        LocationId source = -1, target = -1;

        if (direction == Direction::Forward) {
            switch (kind) {
                case ClauseKind::Fact:
                    source = cfa.initial;
                    target = result.predLocation[clause.head->predIndex];
                    ops.push_back(CfaOp::guard(renameConstraint(clause)));
                    copyOut(ops, clause, *clause.head);
                    break;
                case ClauseKind::Induction:
                    source = result.predLocation[clause.body->predIndex];
                    target = result.predLocation[clause.head->predIndex];
                    copyIn(ops, clause, *clause.body);
                    ops.push_back(CfaOp::guard(renameConstraint(clause)));
                    copyOut(ops, clause, *clause.head);
                    break;
                case ClauseKind::Query:
                    source = result.predLocation[clause.body->predIndex];
                    target = cfa.error;
                    copyIn(ops, clause, *clause.body);
                    ops.push_back(CfaOp::guard(renameConstraint(clause)));
                    break;
                case ClauseKind::DegenerateQuery:
                    source = cfa.initial;
                    target = cfa.error;
                    ops.push_back(CfaOp::guard(renameConstraint(clause)));
                    break;
            }
        } else {
            switch (kind) {
                case ClauseKind::Query:
                    source = cfa.initial;
                    target = result.predLocation[clause.body->predIndex];
                    ops.push_back(CfaOp::guard(renameConstraint(clause)));
                    copyOut(ops, clause, *clause.body);
                    break;
                case ClauseKind::Induction:
                    source = result.predLocation[clause.head->predIndex];
                    target = result.predLocation[clause.body->predIndex];
                    copyIn(ops, clause, *clause.head);
                    ops.push_back(CfaOp::guard(renameConstraint(clause)));
                    copyOut(ops, clause, *clause.body);
                    break;
                case ClauseKind::Fact:
                    source = result.predLocation[clause.head->predIndex];
                    target = cfa.error;
                    copyIn(ops, clause, *clause.head);
                    ops.push_back(CfaOp::guard(renameConstraint(clause)));
                    break;
                case ClauseKind::DegenerateQuery:
                    source = cfa.initial;
                    target = cfa.error;
                    ops.push_back(CfaOp::guard(renameConstraint(clause)));
                    break;
            }
        }

        Edge edge;
        edge.id = static_cast<int>(cfa.edges.size());
        edge.source = source;
        edge.target = target;
        edge.ops = std::move(ops);
        edge.clauseId = clause.id;
        result.edgeClause.push_back(clause.id);
        result.clauseEdge.push_back(edge.id);
        cfa.edges.push_back(std::move(edge));
    }
};

} // namespace

TransformResult forwardTransform(CHCSystem const & system) {
    return Builder(system, Direction::Forward).build();
}

TransformResult backwardTransform(CHCSystem const & system) {
    return Builder(system, Direction::Backward).build();
}

TransformResult transform(CHCSystem const & system, Direction direction) {
    return Builder(system, direction).build();
}

Clause const & edgeToClause(CHCSystem const & system, TransformResult const & result, Edge const & edge) {
    if (edge.id < 0 || edge.id >= static_cast<int>(result.edgeClause.size())) { throw UnknownEdge(); }
    Edge const & own = result.cfa.edges[edge.id];
    if (own.source != edge.source || own.target != edge.target || own.clauseId != edge.clauseId ||
        own.ops.size() != edge.ops.size()) {
        throw UnknownEdge();
    }
    return system.clauses[result.edgeClause[edge.id]];
}

} // namespace horncfa
