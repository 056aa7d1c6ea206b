#include "Proof.h"

#include <algorithm>
#include <cassert>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace horncfa {

namespace {

// Splits a conjunction into variable-connected components and drops the
// components that touch none of the kept variables. Exact for satisfiable
// labels under existential projection.
Term dropIndependentParts(Term const & label, std::set<std::string> const & keep) {
    std::vector<Term> parts = conjuncts(label);
    size_t n = parts.size();
    std::vector<int> component(n);
    for (size_t i = 0; i < n; ++i) {
        component[i] = static_cast<int>(i);
    }
    std::function<int(int)> find = [&](int x) { return component[x] == x ? x : component[x] = find(component[x]); };
    std::map<std::string, int> firstUse;
    for (size_t i = 0; i < n; ++i) {
        for (auto const & [name, sort] : freeVars(parts[i])) {
            (void)sort;
            auto it = firstUse.find(name);
            if (it == firstUse.end()) {
                firstUse.emplace(name, static_cast<int>(i));
            } else {
                component[find(static_cast<int>(i))] = find(it->second);
            }
        }
    }
    std::set<int> keepComponents;
    for (auto const & [name, root] : firstUse) {
        if (keep.count(name)) { keepComponents.insert(find(root)); }
    }
    std::vector<Term> kept;
    for (size_t i = 0; i < n; ++i) {
        auto fv = freeVars(parts[i]);
        if (fv.empty()) {
            kept.push_back(parts[i]); // ground conjunct, keep as is
        } else if (keepComponents.count(find(static_cast<int>(i)))) {
            kept.push_back(parts[i]);
        }
    }
    return term::conjAll(kept);
}

} // namespace

ModelDefs buildModel(CHCSystem const & system, TransformResult const & transform, Domain domain,
                     Precision const & precision, Arg const & arg, SolverSession & session) {
    if (transform.direction != Direction::Forward) { throw DirectionMismatch(); }
    ModelDefs model;
    size_t n = system.predicates.size();
    model.definitions.resize(n);
    model.paramNames.resize(n);
    model.quantified.assign(n, false);

    for (size_t i = 0; i < n; ++i) {
        auto const & pred = system.predicates[i];
        for (int j = 0; j < pred.arity(); ++j) {
            model.paramNames[i].push_back("p" + std::to_string(j + 1));
        }
    }

    // without queries nothing can be violated: everything may hold
    if (!system.hasQuery()) {
        for (size_t i = 0; i < n; ++i) {
            model.definitions[i] = term::top();
        }
        return model;
    }

    for (size_t i = 0; i < n; ++i) {
        auto const & pred = system.predicates[i];
        LocationId loc = transform.predLocation[i];

        std::map<std::string, std::string> paramRename;
        std::set<std::string> keep;
        for (int j = 0; j < pred.arity(); ++j) {
            paramRename[transform.predVars[i][j]] = model.paramNames[i][j];
            keep.insert(transform.predVars[i][j]);
        }

        std::vector<Term> disjuncts;
        std::vector<std::string> seen;
        for (auto const & node : arg.nodes) {
            if (!node.alive || node.coveredBy != -1) { continue; }
            if (node.state.location != loc) { continue; }
            Term reduced = dropIndependentParts(node.label, keep);
            // project away remaining foreign variables (other locations'
            // parameters and clause-local variables)
            std::vector<Binder> foreign;
            for (auto const & [name, sort] : freeVars(reduced)) {
                if (!keep.count(name)) { foreign.push_back(Binder{name, sort}); }
            }
            Term projected;
            if (foreign.empty()) {
                projected = reduced;
            } else {
                auto elim = session.eliminate(term::exists(foreign, reduced));
                if (!elim.eliminated) { model.quantified[i] = true; }
                projected = elim.term;
            }
            Term disjunct = simplify(renameVars(projected, paramRename));
            std::string key = toSmt(disjunct);
            if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
                seen.push_back(std::move(key));
                disjuncts.push_back(std::move(disjunct));
            }
        }

        if (disjuncts.empty()) {
            model.definitions[i] = term::bottom(); // unreachable location
            continue;
        }

        // absorption: drop a disjunct implied by another one
        std::vector<CfaVariable> params;
        for (int j = 0; j < pred.arity(); ++j) {
            params.push_back({model.paramNames[i][j], pred.paramSorts[j]});
        }
        std::vector<bool> dropped(disjuncts.size(), false);
        for (size_t a = 0; a < disjuncts.size(); ++a) {
            if (dropped[a]) { continue; }
            for (size_t b = 0; b < disjuncts.size(); ++b) {
                if (a == b || dropped[b] || dropped[a]) { continue; }
                if (isTrue(disjuncts[b]) ||
                    session.checkValid(params, term::implies(disjuncts[a], disjuncts[b])) == Tri::True) {
                    dropped[a] = true;
                }
            }
        }
        std::vector<Term> kept;
        for (size_t a = 0; a < disjuncts.size(); ++a) {
            if (!dropped[a]) { kept.push_back(disjuncts[a]); }
        }
        if (kept.empty()) { kept.push_back(term::top()); } // all disjuncts absorbed each other
        model.definitions[i] = simplify(term::disjAll(kept));
    }
    (void)domain;
    (void)precision;
    return model;
}

namespace {
Term instantiateAtom(CHCSystem const & system, ModelDefs const & model, AtomRef const & atom,
                     Clause const & clause) {
    Term def = model.definitions[atom.predIndex];
    std::map<std::string, Term> subst;
    for (size_t j = 0; j < atom.argVars.size(); ++j) {
        Sort sort = system.predicates[atom.predIndex].paramSorts[j];
        subst[model.paramNames[atom.predIndex][j]] = term::var(atom.argVars[j], sort);
    }
    (void)clause;
    return substitute(def, subst);
}
} // namespace

Tri validateModel(CHCSystem const & system, ModelDefs const & model, SolverSession & session) {
    bool inconclusive = false;
    for (auto const & clause : system.clauses) {
        std::vector<Term> body{clause.constraint};
        if (clause.body) { body.push_back(instantiateAtom(system, model, *clause.body, clause)); }
        Term head = clause.head ? instantiateAtom(system, model, *clause.head, clause) : term::bottom();
        Term obligation = term::implies(term::conjAll(body), head);
        std::vector<CfaVariable> decls;
        for (auto const & b : clause.clauseVars) {
            decls.push_back({b.name, b.sort});
        }
        Tri r = session.checkValid(decls, obligation);
        if (r == Tri::False) { return Tri::False; }
        if (r == Tri::Unknown) { inconclusive = true; }
    }
    return inconclusive ? Tri::Unknown : Tri::True;
}

namespace {

RefutationStep stepFromPathStep(CHCSystem const & system, TransformResult const & transform,
                                PathStep const & pathStep) {
    Clause const & clause = system.clauses[transform.edgeClause[pathStep.edgeId]];
    RefutationStep step;
    step.clauseId = clause.id;
    auto const & renaming = transform.clauseVarNames[clause.id];
    for (auto const & binder : clause.clauseVars) {
        auto it = pathStep.post.valuation.find(renaming.at(binder.name));
        if (it != pathStep.post.valuation.end()) { step.substitution[binder.name] = it->second; }
    }
    auto instance = [&](AtomRef const & atom) {
        std::vector<Value> values;
        for (auto const & argVar : atom.argVars) {
            values.push_back(step.substitution.at(argVar));
        }
        return std::make_pair(atom.predIndex, std::move(values));
    };
    if (clause.head) { step.headInstance = instance(*clause.head); }
    if (clause.body) { step.bodyInstance = instance(*clause.body); }
    return step;
}

} // namespace

Refutation buildRefutation(CHCSystem const & system, TransformResult const & transform,
                           ConcretePath const & path) {
    if (transform.direction != Direction::Forward) { throw DirectionMismatch(); }
    Refutation refutation;
    for (auto const & pathStep : path.steps) {
        refutation.steps.push_back(stepFromPathStep(system, transform, pathStep));
    }
    return refutation;
}

Refutation refutationFromBackwardPath(CHCSystem const & system, TransformResult const & transform,
                                      ConcretePath const & path) {
    if (transform.direction != Direction::Backward) { throw DirectionMismatch(); }
    Refutation refutation;
    for (auto it = path.steps.rbegin(); it != path.steps.rend(); ++it) {
        refutation.steps.push_back(stepFromPathStep(system, transform, *it));
    }
    return refutation;
}

RefutationCheck validateRefutation(CHCSystem const & system, Refutation const & refutation) {
    auto failed = [](std::string reason) { return RefutationCheck{false, std::move(reason)}; };
    if (refutation.steps.empty()) { return failed("empty refutation"); }
    for (size_t i = 0; i < refutation.steps.size(); ++i) {
        auto const & step = refutation.steps[i];
        if (step.clauseId < 0 || step.clauseId >= static_cast<int>(system.clauses.size())) {
            return failed("step " + std::to_string(i + 1) + " references an unknown clause");
        }
        Clause const & clause = system.clauses[step.clauseId];
        ClauseKind kind = classify(clause);
        bool first = i == 0;
        bool last = i + 1 == refutation.steps.size();
        if (refutation.steps.size() == 1) {
            if (kind != ClauseKind::DegenerateQuery) {
                return failed("a one-step refutation must use a degenerate query clause");
            }
        } else if (first && kind != ClauseKind::Fact) {
            return failed("the first step must instantiate a fact");
        } else if (last && kind != ClauseKind::Query) {
            return failed("the last step must instantiate a query");
        } else if (!first && !last && kind != ClauseKind::Induction) {
            return failed("intermediate steps must instantiate inductions");
        }
        // the substitution must cover the clause variables and evaluate the body
        Valuation valuation;
        for (auto const & binder : clause.clauseVars) {
            auto it = step.substitution.find(binder.name);
            if (it == step.substitution.end()) {
                return failed("step " + std::to_string(i + 1) + " misses a value for " + binder.name);
            }
            valuation[binder.name] = it->second;
        }
        auto value = evaluate(clause.constraint, valuation);
        if (!value || !std::get<bool>(*value)) {
            return failed("step " + std::to_string(i + 1) + ": the clause constraint is not satisfied");
        }
        // instances must agree with the substitution
        auto checkInstance = [&](std::optional<AtomRef> const & atom,
                                 std::optional<std::pair<int, std::vector<Value>>> const & instance,
                                 char const * side) -> std::optional<std::string> {
            if (atom.has_value() != instance.has_value()) {
                return std::string("step ") + std::to_string(i + 1) + " " + side + " instance mismatch";
            }
            if (!atom) { return std::nullopt; }
            if (instance->first != atom->predIndex || instance->second.size() != atom->argVars.size()) {
                return std::string("step ") + std::to_string(i + 1) + " " + side + " instance mismatch";
            }
            for (size_t j = 0; j < atom->argVars.size(); ++j) {
                if (!valueEquals(instance->second[j], valuation.at(atom->argVars[j]))) {
                    return std::string("step ") + std::to_string(i + 1) + " " + side +
                           " instance disagrees with the substitution";
                }
            }
            return std::nullopt;
        };
        if (auto err = checkInstance(clause.head, step.headInstance, "head")) { return failed(*err); }
        if (auto err = checkInstance(clause.body, step.bodyInstance, "body")) { return failed(*err); }
        // chaining: the previous head feeds this body
        if (i > 0) {
            auto const & prev = refutation.steps[i - 1];
            if (!prev.headInstance || !step.bodyInstance) {
                return failed("step " + std::to_string(i + 1) + " breaks the deduction chain");
            }
            if (prev.headInstance->first != step.bodyInstance->first ||
                prev.headInstance->second.size() != step.bodyInstance->second.size()) {
                return failed("step " + std::to_string(i + 1) + " chains to a different predicate");
            }
            for (size_t j = 0; j < prev.headInstance->second.size(); ++j) {
                if (!valueEquals(prev.headInstance->second[j], step.bodyInstance->second[j])) {
                    return failed("step " + std::to_string(i + 1) + " chains with different values");
                }
            }
        }
    }
    return {};
}

std::string modelToSmt(CHCSystem const & system, ModelDefs const & model) {
    std::ostringstream os;
    os << "(\n";
    for (size_t i = 0; i < system.predicates.size(); ++i) {
        auto const & pred = system.predicates[i];
        os << "  (define-fun " << quoteSymbol(pred.name) << " (";
        for (int j = 0; j < pred.arity(); ++j) {
            if (j > 0) { os << " "; }
            os << "(" << model.paramNames[i][j] << " " << sortName(pred.paramSorts[j]) << ")";
        }
        os << ") Bool " << toSmt(model.definitions[i]) << ")\n";
    }
    os << ")\n";
    return os.str();
}

std::string modelWarnings(ModelDefs const & model) {
    for (bool q : model.quantified) {
        if (q) { return "note: some definitions keep an explicit quantifier (elimination failed)"; }
    }
    return {};
}

std::string refutationToText(CHCSystem const & system, Refutation const & refutation) {
    std::ostringstream os;
    for (size_t i = 0; i < refutation.steps.size(); ++i) {
        auto const & step = refutation.steps[i];
        Clause const & clause = system.clauses[step.clauseId];
        os << (i + 1) << ". clause " << step.clauseId << " (" << clauseKindName(classify(clause)) << "): ";
        auto writeInstance = [&](std::optional<std::pair<int, std::vector<Value>>> const & inst) {
            if (!inst) {
                os << "false";
                return;
            }
            os << system.predicates[inst->first].name << "(";
            for (size_t j = 0; j < inst->second.size(); ++j) {
                if (j > 0) { os << ", "; }
                os << valueToString(inst->second[j]);
            }
            os << ")";
        };
        writeInstance(step.headInstance);
        os << " <- ";
        if (step.bodyInstance) {
            writeInstance(step.bodyInstance);
            os << " with ";
        }
        bool firstVar = true;
        for (auto const & [name, value] : step.substitution) {
            if (!firstVar) { os << ", "; }
            firstVar = false;
            os << name << " = " << valueToString(value);
        }
        if (firstVar) { os << "(no variables)"; }
        os << "\n";
    }
    return os.str();
}

} // namespace horncfa
