#include "Ssa.h"

#include <cassert>
#include <stdexcept>

namespace horncfa {

Term sortedEq(Term const & a, Term const & b) {
    assert(a->sort == b->sort);
    if (a->sort == Sort::Int) { return term::eq(a, b); }
    return term::conj(term::implies(a, b), term::implies(b, a));
}

Sort SsaBuilder::sortOf(std::string const & var) const {
    CfaVariable const * v = cfa->findVariable(var);
    if (!v) { throw std::logic_error("unknown CFA variable " + var); }
    return v->sort;
}

std::string SsaBuilder::symbolName(std::string const & var, int version) const {
    return var + "!" + std::to_string(version);
}

std::string SsaBuilder::current(std::string const & var) {
    auto it = versions.find(var);
    if (it == versions.end()) {
        versions.emplace(var, 0);
        symbols_.push_back({symbolName(var, 0), sortOf(var)});
        return symbolName(var, 0);
    }
    return symbolName(var, it->second);
}

std::string SsaBuilder::bump(std::string const & var) {
    int next = 0;
    auto it = versions.find(var);
    if (it == versions.end()) {
        // version 0 is reserved for the initial value
        versions.emplace(var, 1);
        next = 1;
    } else {
        next = ++it->second;
    }
    std::string name = symbolName(var, next);
    symbols_.push_back({name, sortOf(var)});
    return name;
}

Term SsaBuilder::rewrite(Term const & t) {
    std::map<std::string, Term> subst;
    for (auto const & [name, sort] : freeVars(t)) {
        subst.emplace(name, term::var(current(name), sort));
    }
    return substitute(t, subst);
}

SsaBuilder::StepInfo SsaBuilder::applyEdge(Edge const & edge) {
    StepInfo info;
    for (auto const & op : edge.ops) {
        switch (op.kind) {
            case CfaOp::Kind::Assign: {
                Term rhs = rewrite(op.term);
                std::string sym = bump(op.var);
                Term c = sortedEq(term::var(sym, sortOf(op.var)), rhs);
                info.constraints.push_back(c);
                constraints_.push_back(c);
                break;
            }
            case CfaOp::Kind::Havoc: {
                std::string sym = bump(op.var);
                info.havocSyms[op.var] = sym;
                break;
            }
            case CfaOp::Kind::Guard: {
                Term c = rewrite(op.term);
                info.constraints.push_back(c);
                constraints_.push_back(c);
                break;
            }
        }
    }
    info.postSyms = snapshot();
    return info;
}

std::map<std::string, std::string> SsaBuilder::snapshot() {
    std::map<std::string, std::string> out;
    for (auto const & v : cfa->variables) {
        out[v.name] = current(v.name);
    }
    return out;
}

} // namespace horncfa
