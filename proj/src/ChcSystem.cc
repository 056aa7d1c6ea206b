#include "ChcSystem.h"

#include <sstream>

namespace horncfa {

std::string const & clauseKindName(ClauseKind k) {
    static const std::string names[] = {"fact", "induction", "query", "degenerate-query"};
    return names[static_cast<int>(k)];
}

std::optional<Sort> Clause::varSort(std::string const & name) const {
    for (auto const & b : clauseVars) {
        if (b.name == name) { return b.sort; }
    }
    return std::nullopt;
}

ClauseKind classify(Clause const & clause) {
    if (clause.head && clause.body) { return ClauseKind::Induction; }
    if (clause.head) { return ClauseKind::Fact; }
    if (clause.body) { return ClauseKind::Query; }
    return ClauseKind::DegenerateQuery;
}

int CHCSystem::predicateIndex(std::string const & name) const {
    for (auto const & p : predicates) {
        if (p.name == name) { return p.index; }
    }
    return -1;
}

bool CHCSystem::hasFact() const {
    for (auto const & c : clauses) {
        if (classify(c) == ClauseKind::Fact) { return true; }
    }
    return false;
}

bool CHCSystem::hasQuery() const {
    for (auto const & c : clauses) {
        ClauseKind k = classify(c);
        if (k == ClauseKind::Query || k == ClauseKind::DegenerateQuery) { return true; }
    }
    return false;
}

namespace {
void writeAtom(std::ostream & os, CHCSystem const & system, AtomRef const & atom) {
    auto const & pred = system.predicates[atom.predIndex];
    if (atom.argVars.empty()) {
        os << quoteSymbol(pred.name);
        return;
    }
    os << "(" << quoteSymbol(pred.name);
    for (auto const & v : atom.argVars) {
        os << " " << quoteSymbol(v);
    }
    os << ")";
}
} // namespace

std::string toSmtScript(CHCSystem const & system) {
    std::ostringstream os;
    os << "(set-logic HORN)\n";
    for (auto const & p : system.predicates) {
        os << "(declare-fun " << quoteSymbol(p.name) << " (";
        for (size_t i = 0; i < p.paramSorts.size(); ++i) {
            if (i > 0) { os << " "; }
            os << sortName(p.paramSorts[i]);
        }
        os << ") Bool)\n";
    }
    for (auto const & c : system.clauses) {
        os << "(assert ";
        if (!c.clauseVars.empty()) {
            os << "(forall (";
            for (size_t i = 0; i < c.clauseVars.size(); ++i) {
                if (i > 0) { os << " "; }
                os << "(" << quoteSymbol(c.clauseVars[i].name) << " " << sortName(c.clauseVars[i].sort) << ")";
            }
            os << ") ";
        }
        os << "(=> ";
        if (c.body) {
            os << "(and ";
            writeAtom(os, system, *c.body);
            os << " " << toSmt(c.constraint) << ")";
        } else {
            os << toSmt(c.constraint);
        }
        os << " ";
        if (c.head) {
            writeAtom(os, system, *c.head);
        } else {
            os << "false";
        }
        os << ")";
        if (!c.clauseVars.empty()) { os << ")"; }
        os << ")\n";
    }
    os << "(check-sat)\n";
    return os.str();
}

std::string clauseToString(CHCSystem const & system, Clause const & clause) {
    std::ostringstream os;
    auto writeSide = [&](std::optional<AtomRef> const & atom) {
        if (!atom) {
            os << "false";
            return;
        }
        auto const & pred = system.predicates[atom->predIndex];
        os << pred.name << "(";
        for (size_t i = 0; i < atom->argVars.size(); ++i) {
            if (i > 0) { os << ", "; }
            os << atom->argVars[i];
        }
        os << ")";
    };
    writeSide(clause.head);
    os << " <- ";
    if (clause.body) {
        writeSide(clause.body);
        os << " && ";
    }
    os << toInfix(clause.constraint);
    return os.str();
}

} // namespace horncfa
