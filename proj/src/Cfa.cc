#include "Cfa.h"

#include <algorithm>
#include <sstream>

namespace horncfa {

std::string opToString(CfaOp const & op) {
    switch (op.kind) {
        case CfaOp::Kind::Assign: return op.var + " := " + toInfix(op.term);
        case CfaOp::Kind::Havoc: return "havoc " + op.var;
        case CfaOp::Kind::Guard: return "[" + toInfix(op.term) + "]";
    }
    return {};
}

std::string opsToString(std::span<CfaOp const> ops) {
    std::ostringstream os;
    for (size_t i = 0; i < ops.size(); ++i) {
        if (i > 0) { os << "; "; }
        os << opToString(ops[i]);
    }
    return os.str();
}

CfaVariable const * Cfa::findVariable(std::string const & name) const {
    for (auto const & v : variables) {
        if (v.name == name) { return &v; }
    }
    return nullptr;
}

std::vector<int> Cfa::outgoing(LocationId loc) const {
    std::vector<int> out;
    for (auto const & e : edges) {
        if (e.source == loc) { out.push_back(e.id); }
    }
    return out;
}

std::optional<Valuation> execOps(Valuation valuation, std::span<CfaOp const> ops, HavocChoices const & choices) {
    for (auto const & op : ops) {
        switch (op.kind) {
            case CfaOp::Kind::Assign: {
                auto v = evaluate(op.term, valuation);
                if (!v) { return std::nullopt; }
                valuation[op.var] = *v;
                break;
            }
            case CfaOp::Kind::Havoc: {
                auto it = choices.find(op.var);
                if (it != choices.end()) {
                    valuation[op.var] = it->second;
                } else {
                    valuation.erase(op.var); // back to unconstrained
                }
                break;
            }
            case CfaOp::Kind::Guard: {
                auto v = evaluate(op.term, valuation);
                if (!v || !std::get<bool>(*v)) { return std::nullopt; }
                break;
            }
        }
    }
    return valuation;
}

PathCheck validatePath(Cfa const & cfa, ConcretePath const & path) {
    auto failAt = [](int step, std::string reason) {
        return PathCheck{false, step, std::move(reason)};
    };
    if (path.initial.location != cfa.initial) { return failAt(0, "path does not start at the initial location"); }
    Valuation current = path.initial.valuation;
    LocationId loc = path.initial.location;
    for (size_t i = 0; i < path.steps.size(); ++i) {
        auto const & step = path.steps[i];
        int stepNo = static_cast<int>(i) + 1;
        if (step.edgeId < 0 || step.edgeId >= static_cast<int>(cfa.edges.size())) {
            return failAt(stepNo, "unknown edge");
        }
        Edge const & edge = cfa.edges[step.edgeId];
        if (edge.source != loc) { return failAt(stepNo, "edge source does not match the current location"); }
        if (edge.target != step.post.location) { return failAt(stepNo, "edge target does not match the recorded state"); }
        auto next = execOps(current, edge.ops, step.havocChoices);
        if (!next) { return failAt(stepNo, "step does not replay (guard failed or evaluation error)"); }
        // the recorded post state must agree with the replay on every constrained variable
        for (auto const & [name, value] : *next) {
            auto it = step.post.valuation.find(name);
            if (it == step.post.valuation.end() || !valueEquals(it->second, value)) {
                return failAt(stepNo, "recorded state disagrees with replay on " + name);
            }
        }
        current = step.post.valuation;
        loc = step.post.location;
    }
    return {};
}

namespace {
std::string dotEscape(std::string const & s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') { out += '\\'; }
        out += c;
    }
    return out;
}
} // namespace

std::string toDot(Cfa const & cfa) {
    std::ostringstream os;
    os << "digraph cfa {\n";
    std::vector<Location> locs = cfa.locations;
    std::sort(locs.begin(), locs.end(), [](Location const & a, Location const & b) { return a.id < b.id; });
    for (auto const & l : locs) {
        os << "  l" << l.id << " [label=\"" << dotEscape(l.name) << "\"";
        if (l.kind == LocationKind::Init) { os << " shape=circle"; }
        if (l.kind == LocationKind::Error) { os << " shape=doublecircle"; }
        os << "];\n";
    }
    std::vector<Edge> edges = cfa.edges;
    std::sort(edges.begin(), edges.end(), [](Edge const & a, Edge const & b) { return a.clauseId < b.clauseId; });
    for (auto const & e : edges) {
        os << "  l" << e.source << " -> l" << e.target << " [label=\"" << dotEscape(opsToString(e.ops))
           << "\"];\n";
    }
    os << "}\n";
    return os.str();
}

} // namespace horncfa
