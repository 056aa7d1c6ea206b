#include "Oracle.h"

#include "ChcParser.h"

#include <random>
#include <sstream>

namespace horncfa {

namespace {

std::string stepSymbol(int step, int clauseId, std::string const & var) {
    return "o!" + std::to_string(step) + "!" + std::to_string(clauseId) + "!" + var;
}

class RefutationSearch {
public:
    RefutationSearch(CHCSystem const & system, int depthBound, SolverSession & session)
        : system(system), depthBound(depthBound), session(session), script(session.script()) {}

    OracleResult run() {
        int maxSteps = depthBound + 1;
        for (auto const & clause : system.clauses) {
            ClauseKind kind = classify(clause);
            if (kind == ClauseKind::Fact) { facts.push_back(clause.id); }
            if (kind == ClauseKind::Induction) { inductions.push_back(clause.id); }
            if (kind == ClauseKind::Query) { queries.push_back(clause.id); }
            if (kind == ClauseKind::DegenerateQuery) { degenerate.push_back(clause.id); }
        }
        // step-indexed clause variable copies, declared up front so push/pop
        // frames contain assertions only
        for (int step = 0; step < maxSteps; ++step) {
            for (auto const & clause : system.clauses) {
                for (auto const & binder : clause.clauseVars) {
                    script.declare({stepSymbol(step, clause.id, binder.name), binder.sort});
                }
            }
        }

        // one-step refutations from degenerate queries
        for (int clauseId : degenerate) {
            if (budgetExhausted()) { return finish(); }
            Clause const & clause = system.clauses[clauseId];
            script.push();
            script.add(constraintAt(clause, 0));
            SatStatus st = check();
            if (st == SatStatus::Sat) {
                if (auto refutation = decode({clauseId})) { return found(std::move(*refutation)); }
            }
            if (st == SatStatus::Unknown) { inconclusive = true; }
            script.pop();
        }

        for (int factId : facts) {
            if (budgetExhausted()) { return finish(); }
            Clause const & fact = system.clauses[factId];
            script.push();
            script.add(constraintAt(fact, 0));
            SatStatus st = check();
            if (st == SatStatus::Sat) {
                stack.push_back(factId);
                if (auto result = extend(fact.head->predIndex, 1)) {
                    return found(std::move(*result));
                }
                stack.pop_back();
            }
            if (st == SatStatus::Unknown) { inconclusive = true; }
            script.pop();
        }
        return finish();
    }

private:
    CHCSystem const & system;
    int depthBound;
    SolverSession & session;
    SolverSession::Script script;
    std::vector<int> facts, inductions, queries, degenerate;
    std::vector<int> stack; // clause ids of the current skeleton prefix
    long checks = 0;
    bool inconclusive = false;

    static constexpr long kMaxChecks = 20000;

    bool budgetExhausted() {
        if (checks >= kMaxChecks) {
            inconclusive = true;
            return true;
        }
        return false;
    }

    SatStatus check() {
        ++checks;
        SatStatus st = script.check();
        if (script.dead()) { inconclusive = true; }
        return st;
    }

    OracleResult finish() {
        OracleResult r;
        r.kind = OracleResult::Kind::NoneWithinBound;
        r.inconclusive = inconclusive;
        return r;
    }

    OracleResult found(Refutation refutation) {
        OracleResult r;
        r.kind = OracleResult::Kind::Found;
        r.refutation = std::move(refutation);
        r.inconclusive = inconclusive;
        return r;
    }

    Term constraintAt(Clause const & clause, int step) {
        std::map<std::string, Term> subst;
        for (auto const & binder : clause.clauseVars) {
            subst[binder.name] = term::var(stepSymbol(step, clause.id, binder.name), binder.sort);
        }
        return substitute(clause.constraint, subst);
    }

    // equalities chaining the previous step's head instance to this body atom
    void addChain(Clause const & prev, int prevStep, Clause const & cur, int curStep) {
        auto const & headVars = prev.head->argVars;
        auto const & bodyVars = cur.body->argVars;
        for (size_t j = 0; j < headVars.size(); ++j) {
            Sort sort = *prev.varSort(headVars[j]);
            script.add(sortedEq(term::var(stepSymbol(prevStep, prev.id, headVars[j]), sort),
                                term::var(stepSymbol(curStep, cur.id, bodyVars[j]), sort)));
        }
    }

    std::optional<Refutation> extend(int currentPred, int step) {
        Clause const & prev = system.clauses[stack.back()];
        // try to close with a query
        for (int queryId : queries) {
            if (budgetExhausted()) { return std::nullopt; }
            Clause const & query = system.clauses[queryId];
            if (query.body->predIndex != currentPred) { continue; }
            script.push();
            addChain(prev, step - 1, query, step);
            script.add(constraintAt(query, step));
            SatStatus st = check();
            if (st == SatStatus::Sat) {
                std::vector<int> skeleton = stack;
                skeleton.push_back(queryId);
                if (auto refutation = decode(skeleton)) { return refutation; }
            }
            if (st == SatStatus::Unknown) { inconclusive = true; }
            script.pop();
        }
        // grow with an induction while the bound allows (step inductions so far)
        if (step <= depthBound - 1) {
            for (int inductionId : inductions) {
                if (budgetExhausted()) { return std::nullopt; }
                Clause const & induction = system.clauses[inductionId];
                if (induction.body->predIndex != currentPred) { continue; }
                script.push();
                addChain(prev, step - 1, induction, step);
                script.add(constraintAt(induction, step));
                SatStatus st = check();
                if (st == SatStatus::Sat) {
                    stack.push_back(inductionId);
                    if (auto refutation = extend(induction.head->predIndex, step + 1)) { return refutation; }
                    stack.pop_back();
                }
                if (st == SatStatus::Unknown) { inconclusive = true; }
                script.pop();
            }
        }
        return std::nullopt;
    }

    std::optional<Refutation> decode(std::vector<int> const & skeleton) {
        std::vector<std::string> names;
        for (size_t step = 0; step < skeleton.size(); ++step) {
            Clause const & clause = system.clauses[skeleton[step]];
            for (auto const & binder : clause.clauseVars) {
                names.push_back(stepSymbol(static_cast<int>(step), clause.id, binder.name));
            }
        }
        std::optional<Valuation> model;
        if (names.empty()) {
            model = Valuation{};
        } else {
            model = script.values(names);
        }
        if (!model) {
            inconclusive = true;
            return std::nullopt;
        }
        Refutation refutation;
        for (size_t step = 0; step < skeleton.size(); ++step) {
            Clause const & clause = system.clauses[skeleton[step]];
            RefutationStep rs;
            rs.clauseId = clause.id;
            for (auto const & binder : clause.clauseVars) {
                rs.substitution[binder.name] = model->at(stepSymbol(static_cast<int>(step), clause.id, binder.name));
            }
            auto instance = [&](AtomRef const & atom) {
                std::vector<Value> values;
                for (auto const & argVar : atom.argVars) {
                    values.push_back(rs.substitution.at(argVar));
                }
                return std::make_pair(atom.predIndex, std::move(values));
            };
            if (clause.head) { rs.headInstance = instance(*clause.head); }
            if (clause.body) { rs.bodyInstance = instance(*clause.body); }
            refutation.steps.push_back(std::move(rs));
        }
        if (!validateRefutation(system, refutation).ok) {
            inconclusive = true;
            return std::nullopt;
        }
        return refutation;
    }
};

} // namespace

OracleResult boundedRefute(CHCSystem const & system, int depthBound, SolverSession & session) {
    return RefutationSearch(system, depthBound, session).run();
}

// --- random systems ---------------------------------------------------------

namespace {

class Generator {
public:
    Generator(uint64_t seed, SizeParams const & params)
        : rng(seed * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL), params(params) {}

    std::string script() {
        std::ostringstream os;
        os << "(set-logic HORN)\n";
        int predCount = 1 + pick(params.maxPredicates);
        for (int i = 0; i < predCount; ++i) {
            arities.push_back(pick(params.maxArity + 1));
            os << "(declare-fun P" << i << " (";
            for (int j = 0; j < arities[i]; ++j) {
                if (j > 0) { os << " "; }
                os << "Int";
            }
            os << ") Bool)\n";
        }
        int clauseCount = pick(params.maxClauses + 1);
        for (int c = 0; c < clauseCount; ++c) {
            os << clause(predCount) << "\n";
        }
        os << "(check-sat)\n";
        return os.str();
    }

private:
    std::mt19937_64 rng;
    SizeParams params;
    std::vector<int> arities;

    int pick(int n) { return n <= 0 ? 0 : static_cast<int>(rng() % static_cast<uint64_t>(n)); }
    int coeff() {
        int c = pick(2 * params.maxCoeff) - params.maxCoeff; // [-maxCoeff, maxCoeff-1]
        return c >= 0 ? c + 1 : c;                           // skip zero
    }

    std::string linearTerm(int varCount) {
        std::ostringstream os;
        int pieces = 1 + pick(2);
        std::vector<std::string> parts;
        for (int i = 0; i < pieces; ++i) {
            if (varCount > 0 && pick(4) != 0) {
                int c = coeff();
                std::string v = "v" + std::to_string(pick(varCount));
                if (c == 1) {
                    parts.push_back(v);
                } else {
                    parts.push_back("(* " + std::to_string(c) + " " + v + ")");
                }
            } else {
                parts.push_back(std::to_string(pick(21) - 10));
            }
        }
        if (parts.size() == 1) { return parts[0]; }
        os << "(+";
        for (auto const & p : parts) {
            os << " " << p;
        }
        os << ")";
        return os.str();
    }

    std::string atom(int varCount) {
        static char const * ops[] = {"<", "<=", ">", ">=", "="};
        if (varCount > 0 && pick(10) == 0) {
            // an occasional constant-divisor mod constraint
            std::string v = "v" + std::to_string(pick(varCount));
            int d = 2 + pick(2);
            return "(= (mod " + v + " " + std::to_string(d) + ") " + std::to_string(pick(d)) + ")";
        }
        std::string op = ops[pick(5)];
        return "(" + op + " " + linearTerm(varCount) + " " + linearTerm(varCount) + ")";
    }

    std::string constraint(int varCount) {
        int n = 1 + pick(3);
        if (n == 1) { return atom(varCount); }
        std::ostringstream os;
        os << "(and";
        for (int i = 0; i < n; ++i) {
            os << " " << atom(varCount);
        }
        os << ")";
        return os.str();
    }

    // argument list for a predicate application; mostly fresh variables, with
    // occasional composite terms to exercise the normalizer
    std::string atomApplication(int pred, int varCount, std::vector<bool> & used) {
        std::ostringstream os;
        if (arities[pred] == 0) { return "P" + std::to_string(pred); }
        os << "(P" << pred;
        for (int j = 0; j < arities[pred]; ++j) {
            int choice = pick(6);
            int v = varCount > 0 ? pick(varCount) : -1;
            if (choice == 0 || v < 0) {
                os << " " << (pick(21) - 10);
            } else if (choice == 1) {
                os << " (+ v" << v << " " << (1 + pick(3)) << ")";
            } else if (used[v]) {
                os << " (- v" << v << " " << (1 + pick(3)) << ")";
            } else {
                used[v] = true;
                os << " v" << v;
            }
        }
        os << ")";
        return os.str();
    }

    std::string clause(int predCount) {
        int varCount = 1 + pick(3);
        std::ostringstream binders;
        binders << "(";
        for (int v = 0; v < varCount; ++v) {
            if (v > 0) { binders << " "; }
            binders << "(v" << v << " Int)";
        }
        binders << ")";

        int roll = pick(10);
        std::vector<bool> used(static_cast<size_t>(varCount), false);
        std::ostringstream os;
        if (roll == 9) {
            // degenerate query (false <- constraint)
            os << "(assert (forall " << binders.str() << " (=> " << constraint(varCount) << " false)))";
            return os.str();
        }
        if (roll >= 7) {
            // query
            int body = pick(predCount);
            os << "(assert (forall " << binders.str() << " (=> (and "
               << atomApplication(body, varCount, used) << " " << constraint(varCount)
               << ") false)))";
            return os.str();
        }
        if (roll >= 3) {
            // induction
            int body = pick(predCount);
            int head = pick(predCount);
            std::string bodyAtom = atomApplication(body, varCount, used);
            std::string headAtom = atomApplication(head, varCount, used);
            os << "(assert (forall " << binders.str() << " (=> (and " << bodyAtom << " "
               << constraint(varCount) << ") " << headAtom << ")))";
            return os.str();
        }
        // fact
        int head = pick(predCount);
        std::string headAtom = atomApplication(head, varCount, used);
        os << "(assert (forall " << binders.str() << " (=> " << constraint(varCount) << " " << headAtom
           << ")))";
        return os.str();
    }
};

} // namespace

CHCSystem randomSystem(uint64_t seed, SizeParams const & params) {
    Generator gen(seed, params);
    return parseScript(gen.script());
}

} // namespace horncfa
