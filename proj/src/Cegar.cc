#include "Cegar.h"

#include "Ssa.h"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <sstream>

namespace horncfa {

namespace {
double monotonicSeconds() {
    using namespace std::chrono;
    return duration_cast<duration<double>>(steady_clock::now().time_since_epoch()).count();
}
} // namespace

std::string const & domainName(Domain d) {
    static const std::string names[] = {"expl", "pred-cart", "pred-bool"};
    return names[static_cast<int>(d)];
}
std::string const & refinementName(Refinement r) {
    static const std::string names[] = {"wp", "seq-itp", "bw-bin-itp"};
    return names[static_cast<int>(r)];
}
std::string const & predSplitName(PredSplit p) {
    static const std::string names[] = {"whole", "atoms"};
    return names[static_cast<int>(p)];
}
std::optional<Domain> parseDomain(std::string const & s) {
    if (s == "expl") { return Domain::Expl; }
    if (s == "pred-cart") { return Domain::PredCart; }
    if (s == "pred-bool") { return Domain::PredBool; }
    return std::nullopt;
}
std::optional<Refinement> parseRefinement(std::string const & s) {
    if (s == "wp") { return Refinement::Wp; }
    if (s == "seq-itp") { return Refinement::SeqItp; }
    if (s == "bw-bin-itp") { return Refinement::BwBinItp; }
    return std::nullopt;
}
std::optional<PredSplit> parsePredSplit(std::string const & s) {
    if (s == "whole") { return PredSplit::Whole; }
    if (s == "atoms") { return PredSplit::Atoms; }
    return std::nullopt;
}

// --- Precision --------------------------------------------------------------

void Precision::init(size_t locationCount) {
    tracked.assign(locationCount, {});
    preds.assign(locationCount, {});
    predKeys.assign(locationCount, {});
}

bool Precision::trackVariable(LocationId loc, std::string const & var) {
    return tracked[loc].insert(var).second;
}

bool Precision::addPredicate(LocationId loc, Term const & pred) {
    std::string key = toSmt(pred);
    if (predKeys[loc].count(key)) { return false; }
    predKeys[loc].emplace(std::move(key), static_cast<int>(preds[loc].size()));
    preds[loc].push_back(pred);
    return true;
}

int Precision::predicateIndexAt(LocationId loc, std::string const & key) const {
    auto it = predKeys[loc].find(key);
    return it == predKeys[loc].end() ? -1 : it->second;
}

long Precision::size() const {
    long n = 0;
    for (auto const & t : tracked) {
        n += static_cast<long>(t.size());
    }
    for (auto const & p : preds) {
        n += static_cast<long>(p.size());
    }
    return n;
}

// --- AbstractState -----------------------------------------------------------

Term AbstractState::label(Domain domain, Precision const & precision) const {
    switch (domain) {
        case Domain::Expl: {
            std::vector<Term> parts;
            for (auto const & [name, value] : explValues) {
                Sort sort = std::holds_alternative<bool>(value) ? Sort::Bool : Sort::Int;
                Term var = term::var(name, sort);
                Term lit = sort == Sort::Bool ? term::boolLit(std::get<bool>(value))
                                              : term::intLit(std::get<long long>(value));
                parts.push_back(sortedEq(var, lit));
            }
            return term::conjAll(parts);
        }
        case Domain::PredCart: {
            std::vector<Term> parts;
            auto const & preds = precision.predicatesAt(location);
            for (auto const & [idx, polarity] : cartLits) {
                parts.push_back(polarity ? preds[idx] : term::negate(preds[idx]));
            }
            return term::conjAll(parts);
        }
        case Domain::PredBool: {
            auto const & preds = precision.predicatesAt(location);
            std::vector<Term> disjuncts;
            for (auto const & cube : cubes) {
                std::vector<Term> parts;
                for (auto const & [idx, polarity] : cube) {
                    parts.push_back(polarity ? preds[idx] : term::negate(preds[idx]));
                }
                disjuncts.push_back(term::conjAll(parts));
            }
            return term::disjAll(disjuncts);
        }
    }
    return term::top();
}

// --- Arg ---------------------------------------------------------------------

bool Arg::isAncestor(int maybeAncestor, int node) const {
    int cur = node;
    while (cur != -1) {
        if (cur == maybeAncestor) { return true; }
        cur = nodes[cur].parent;
    }
    return false;
}

int Arg::addNode(AbstractState state, Term label, int parent, int inEdge) {
    ArgNode node;
    node.id = static_cast<int>(nodes.size());
    node.state = std::move(state);
    node.label = std::move(label);
    node.labelKey = toSmt(node.label);
    node.parent = parent;
    node.inEdge = inEdge;
    nodes.push_back(std::move(node));
    int id = nodes.back().id;
    if (parent >= 0) { nodes[parent].children.push_back(id); }
    byLocation[nodes[id].state.location].push_back(id);
    if (root < 0 && parent < 0) { root = id; }
    return id;
}

std::vector<int> Arg::prune(int id) {
    std::vector<int> deleted;
    std::vector<int> stack{id};
    while (!stack.empty()) {
        int cur = stack.back();
        stack.pop_back();
        if (!nodes[cur].alive) { continue; }
        nodes[cur].alive = false;
        deleted.push_back(cur);
        for (int child : nodes[cur].children) {
            stack.push_back(child);
        }
    }
    int parent = nodes[id].parent;
    if (parent >= 0 && nodes[parent].alive) {
        auto & ch = nodes[parent].children;
        ch.erase(std::remove(ch.begin(), ch.end(), id), ch.end());
        nodes[parent].expandedEdges.erase(nodes[id].inEdge);
    }
    return deleted;
}

long Arg::aliveCount() const {
    long n = 0;
    for (auto const & node : nodes) {
        if (node.alive) { ++n; }
    }
    return n;
}

std::string AbstractCex::key() const {
    std::ostringstream os;
    for (int e : edges) {
        os << e << ",";
    }
    return os.str();
}

// --- CegarEngine ---------------------------------------------------------------

CegarEngine::CegarEngine(Cfa const & cfa, CegarOptions options, SolverSession & session)
    : cfa(cfa), opts(options), session(session) {
    precision_.init(cfa.locations.size());
    arg_.byLocation.assign(cfa.locations.size(), {});
}

AbstractState CegarEngine::initialState() const {
    AbstractState s;
    s.location = cfa.initial;
    if (opts.domain == Domain::PredBool) {
        s.cubes = {{}}; // single empty cube: top
    }
    return s;
}

void CegarEngine::ensureRoot() {
    if (arg_.root >= 0 && arg_.alive(arg_.root)) { return; }
    AbstractState init = initialState();
    Term label = init.label(opts.domain, precision_);
    int id = arg_.addNode(std::move(init), label, -1, -1);
    arg_.root = id;
    worklist.push_back(id);
}

bool CegarEngine::deadlineExceeded() const {
    return opts.deadlineSeconds > 0 && monotonicSeconds() > opts.deadlineSeconds;
}

int CegarEngine::enqueueNode(AbstractState state, int parent, int inEdge) {
    Term label = state.label(opts.domain, precision_);
    int id = arg_.addNode(std::move(state), label, parent, inEdge);
    worklist.push_back(id);
    stats_.peakNodes = std::max(stats_.peakNodes, static_cast<long>(arg_.nodes.size()));
    return id;
}

// --- covering ----------------------------------------------------------------

Tri CegarEngine::labelImplies(AbstractState const & a, AbstractState const & b) {
    assert(a.location == b.location);
    switch (opts.domain) {
        case Domain::Expl: {
            // b's constraints must all be present in a with the same value
            for (auto const & [name, value] : b.explValues) {
                auto it = a.explValues.find(name);
                if (it == a.explValues.end() || !valueEquals(it->second, value)) { return Tri::False; }
            }
            return Tri::True;
        }
        case Domain::PredCart: {
            std::set<std::pair<int, bool>> have(a.cartLits.begin(), a.cartLits.end());
            bool all = true;
            for (auto const & lit : b.cartLits) {
                if (!have.count(lit)) {
                    all = false;
                    break;
                }
            }
            if (all) { return Tri::True; }
            break; // fall through to the semantic check
        }
        case Domain::PredBool: {
            // every cube of a must contain some cube of b as a subset
            auto cubeLeq = [](std::vector<std::pair<int, bool>> const & strong,
                              std::vector<std::pair<int, bool>> const & weak) {
                std::set<std::pair<int, bool>> have(strong.begin(), strong.end());
                for (auto const & lit : weak) {
                    if (!have.count(lit)) { return false; }
                }
                return true;
            };
            bool all = true;
            for (auto const & ca : a.cubes) {
                bool found = false;
                for (auto const & cb : b.cubes) {
                    if (cubeLeq(ca, cb)) {
                        found = true;
                        break;
                    }
                }
                if (!found) {
                    all = false;
                    break;
                }
            }
            if (all) { return Tri::True; }
            break;
        }
    }
    Term la = a.label(opts.domain, precision_);
    Term lb = b.label(opts.domain, precision_);
    std::string key = toSmt(la) + "=>" + toSmt(lb);
    auto it = implicationCache.find(key);
    if (it != implicationCache.end()) { return it->second; }
    Tri result = session.checkValid(cfa.variables, term::implies(la, lb));
    implicationCache.emplace(std::move(key), result);
    return result;
}

bool CegarEngine::tryCover(int nodeId) {
    ArgNode & node = arg_.nodes[nodeId];
    for (int candidate : arg_.byLocation[node.state.location]) {
        if (candidate == nodeId || !arg_.alive(candidate)) { continue; }
        if (arg_.nodes[candidate].coveredBy != -1) { continue; }
        if (arg_.isAncestor(nodeId, candidate)) { continue; } // no covering by a descendant
        stats_.coverAttempts += 1;
        if (labelImplies(node.state, arg_.nodes[candidate].state) == Tri::True) {
            node.coveredBy = candidate;
            return true;
        }
    }
    return false;
}

// --- abstract post -------------------------------------------------------------

CegarEngine::PostResult CegarEngine::abstractPost(AbstractState const & state, Edge const & edge) {
    assert(edge.source == state.location);
    stats_.posts += 1;
    switch (opts.domain) {
        case Domain::Expl: return postExpl(state, edge);
        case Domain::PredCart: return postCart(state, edge);
        case Domain::PredBool: return postBool(state, edge);
    }
    return {};
}

CegarEngine::PostResult CegarEngine::postExpl(AbstractState const & state, Edge const & edge) {
    // symbolic execution over the partial valuation
    Valuation known = state.explValues;
    bool undecided = false;
    for (auto const & op : edge.ops) {
        switch (op.kind) {
            case CfaOp::Kind::Assign: {
                auto v = evaluate(op.term, known);
                if (v) {
                    known[op.var] = *v;
                } else {
                    known.erase(op.var);
                    undecided = true; // the rhs may still be determined by guards
                }
                break;
            }
            case CfaOp::Kind::Havoc:
                known.erase(op.var);
                break;
            case CfaOp::Kind::Guard: {
                auto v = evaluate(op.term, known);
                if (v && !std::get<bool>(*v)) { return {}; } // infeasible
                if (!v) { undecided = true; }
                break;
            }
        }
    }
    auto const & trackedVars = precision_.trackedAt(edge.target);
    AbstractState post;
    post.location = edge.target;
    for (auto const & var : trackedVars) {
        auto it = known.find(var);
        if (it != known.end()) { post.explValues.emplace(var, it->second); }
    }
    bool allTrackedKnown = post.explValues.size() == trackedVars.size();
    if (!undecided && allTrackedKnown) { return {{std::move(post)}, false}; }

    // solver-backed pass: consistency plus unique-value determination
    SsaBuilder ssa(cfa);
    Term preLabel = ssa.rewrite(state.label(opts.domain, precision_));
    auto step = ssa.applyEdge(edge);
    auto script = session.script();
    script.declare(ssa.symbols());
    script.add(preLabel);
    for (auto const & c : step.constraints) {
        script.add(c);
    }
    SatStatus st = script.check();
    if (st == SatStatus::Unsat) { return {}; }
    if (st == SatStatus::Unknown) { return {{}, true}; }
    std::vector<std::string> targetSyms;
    std::vector<std::string> targetVars;
    for (auto const & var : trackedVars) {
        if (post.explValues.count(var)) { continue; } // already determined syntactically
        targetVars.push_back(var);
        targetSyms.push_back(step.postSyms.at(var));
    }
    if (!targetVars.empty()) {
        auto model = script.values(targetSyms);
        if (!model) { return {{}, true}; }
        std::vector<Term> distinctness;
        std::vector<std::pair<std::string, Value>> candidates;
        for (size_t i = 0; i < targetVars.size(); ++i) {
            Value v = model->at(targetSyms[i]);
            CfaVariable const * cv = cfa.findVariable(targetVars[i]);
            Term sym = term::var(targetSyms[i], cv->sort);
            Term lit = cv->sort == Sort::Bool ? term::boolLit(std::get<bool>(v))
                                              : term::intLit(std::get<long long>(v));
            distinctness.push_back(term::negate(sortedEq(sym, lit)));
            candidates.emplace_back(targetVars[i], v);
        }
        auto results = script.checkEach(distinctness);
        for (size_t i = 0; i < candidates.size(); ++i) {
            if (results[i] == SatStatus::Unsat) { // no other value possible
                post.explValues.emplace(candidates[i].first, candidates[i].second);
            }
        }
    }
    return {{std::move(post)}, false};
}

CegarEngine::PostResult CegarEngine::postCart(AbstractState const & state, Edge const & edge) {
    auto const & targetPreds = precision_.predicatesAt(edge.target);
    std::set<std::string> modified;
    for (auto const & op : edge.ops) {
        if (op.kind != CfaOp::Kind::Guard) { modified.insert(op.var); }
    }

    AbstractState post;
    post.location = edge.target;

    std::vector<int> needSolver;
    for (int idx = 0; idx < static_cast<int>(targetPreds.size()); ++idx) {
        Term const & pred = targetPreds[idx];
        bool touchesModified = false;
        for (auto const & [name, sort] : freeVars(pred)) {
            (void)sort;
            if (modified.count(name)) {
                touchesModified = true;
                break;
            }
        }
        if (!touchesModified) {
            // the predicate's variables are untouched: copy the source polarity if scoped there
            int srcIdx = precision_.predicateIndexAt(edge.source, toSmt(pred));
            if (srcIdx >= 0) {
                bool found = false;
                for (auto const & [i, pol] : state.cartLits) {
                    if (i == srcIdx) {
                        post.cartLits.emplace_back(idx, pol);
                        found = true;
                        break;
                    }
                }
                if (found) { continue; }
            }
        }
        needSolver.push_back(idx);
    }

    SsaBuilder ssa(cfa);
    Term preLabel = ssa.rewrite(state.label(opts.domain, precision_));
    auto step = ssa.applyEdge(edge);
    auto script = session.script();
    script.declare(ssa.symbols());
    script.add(preLabel);
    for (auto const & c : step.constraints) {
        script.add(c);
    }
    SatStatus st = script.check();
    if (st == SatStatus::Unsat) { return {}; }
    if (st == SatStatus::Unknown) { return {{}, true}; }

    if (!needSolver.empty()) {
        std::map<std::string, std::string> renameToPost(step.postSyms.begin(), step.postSyms.end());
        std::vector<Term> positives;
        for (int idx : needSolver) {
            positives.push_back(renameVars(targetPreds[idx], renameToPost));
        }
        // entailment of p: label /\ ops /\ (not p') unsat
        std::vector<Term> negated;
        negated.reserve(positives.size());
        for (auto const & p : positives) {
            negated.push_back(term::negate(p));
        }
        auto entailPos = script.checkEach(negated);
        std::vector<Term> secondBatch;
        std::vector<int> secondIdx;
        for (size_t i = 0; i < needSolver.size(); ++i) {
            if (entailPos[i] == SatStatus::Unsat) {
                post.cartLits.emplace_back(needSolver[i], true);
            } else if (entailPos[i] == SatStatus::Sat) {
                secondBatch.push_back(positives[i]);
                secondIdx.push_back(needSolver[i]);
            }
            // unknown: drop the predicate (sound overapproximation)
        }
        if (!secondBatch.empty()) {
            auto entailNeg = script.checkEach(secondBatch);
            for (size_t i = 0; i < secondBatch.size(); ++i) {
                if (entailNeg[i] == SatStatus::Unsat) { post.cartLits.emplace_back(secondIdx[i], false); }
            }
        }
        std::sort(post.cartLits.begin(), post.cartLits.end());
    }
    return {{std::move(post)}, false};
}

CegarEngine::PostResult CegarEngine::postBool(AbstractState const & state, Edge const & edge) {
    auto const & targetPreds = precision_.predicatesAt(edge.target);
    SsaBuilder ssa(cfa);
    Term preLabel = ssa.rewrite(state.label(opts.domain, precision_));
    auto step = ssa.applyEdge(edge);

    auto script = session.script();
    script.declare(ssa.symbols());
    script.add(preLabel);
    for (auto const & c : step.constraints) {
        script.add(c);
    }

    if (targetPreds.empty()) {
        SatStatus st = script.check();
        if (st == SatStatus::Unsat) { return {}; }
        if (st == SatStatus::Unknown) { return {{}, true}; }
        AbstractState post;
        post.location = edge.target;
        post.cubes = {{}};
        return {{std::move(post)}, false};
    }

    std::map<std::string, std::string> renameToPost(step.postSyms.begin(), step.postSyms.end());
    std::vector<std::string> indicators;
    for (size_t i = 0; i < targetPreds.size(); ++i) {
        std::string g = "g!" + std::to_string(i);
        indicators.push_back(g);
        script.declare({g, Sort::Bool});
        script.add(sortedEq(term::var(g, Sort::Bool), renameVars(targetPreds[i], renameToPost)));
    }

    // AllSAT over the indicator variables
    AbstractState post;
    post.location = edge.target;
    while (true) {
        SatStatus st = script.check();
        if (st == SatStatus::Unknown) { return {{}, true}; }
        if (st == SatStatus::Unsat) { break; }
        auto model = script.values(indicators);
        if (!model) { return {{}, true}; }
        std::vector<std::pair<int, bool>> cube;
        std::vector<Term> blocking;
        for (size_t i = 0; i < indicators.size(); ++i) {
            bool polarity = std::get<bool>(model->at(indicators[i]));
            cube.emplace_back(static_cast<int>(i), polarity);
            Term g = term::var(indicators[i], Sort::Bool);
            blocking.push_back(polarity ? term::negate(g) : g);
        }
        post.cubes.push_back(std::move(cube));
        script.add(term::disjAll(blocking));
        if (static_cast<int>(post.cubes.size()) > opts.boolCubeLimit) {
            // enumeration blow-up: fall back to the Cartesian post (sound)
            stats_.notes.push_back("pred-bool cube limit hit, falling back to cartesian post");
            AbstractState cartState = state;
            return postCart(cartState, edge);
        }
    }
    if (post.cubes.empty()) { return {}; }
    return {{std::move(post)}, false};
}

// --- abstractor ----------------------------------------------------------------

CegarEngine::BuildOutcome CegarEngine::buildArg() {
    ensureRoot();
    while (!worklist.empty()) {
        if (deadlineExceeded()) { return {BuildOutcome::Kind::Unknown, {}, "timeout"}; }
        if (arg_.aliveCount() > opts.maxNodes) {
            return {BuildOutcome::Kind::Unknown, {}, "abstract state budget exhausted"};
        }
        int nodeId = opts.dfs ? worklist.back() : worklist.front();
        if (opts.dfs) {
            worklist.pop_back();
        } else {
            worklist.pop_front();
        }
        if (!arg_.alive(nodeId)) { continue; }
        ArgNode & node = arg_.nodes[nodeId];
        if (node.coveredBy != -1) { continue; }
        if (cfa.locations[node.state.location].kind == LocationKind::Error) {
            return {BuildOutcome::Kind::FoundCex, cexFromNode(nodeId), ""};
        }
        if (tryCover(nodeId)) { continue; }
        for (auto const & edge : cfa.edges) {
            if (edge.source != node.state.location) { continue; }
            if (node.expandedEdges.count(edge.id)) { continue; }
            PostResult post = abstractPost(node.state, edge);
            if (post.unknown) {
                return {BuildOutcome::Kind::Unknown, {}, "solver failure during expansion"};
            }
            arg_.nodes[nodeId].expandedEdges.insert(edge.id);
            for (auto & s : post.states) {
                int childId = enqueueNode(std::move(s), nodeId, edge.id);
                if (cfa.locations[arg_.nodes[childId].state.location].kind == LocationKind::Error) {
                    return {BuildOutcome::Kind::FoundCex, cexFromNode(childId), ""};
                }
            }
        }
    }
    return {BuildOutcome::Kind::Closed, {}, ""};
}

AbstractCex CegarEngine::cexFromNode(int errorNodeId) const {
    AbstractCex cex;
    int cur = errorNodeId;
    while (cur != -1) {
        cex.nodes.push_back(cur);
        if (arg_.nodes[cur].inEdge != -1) { cex.edges.push_back(arg_.nodes[cur].inEdge); }
        cur = arg_.nodes[cur].parent;
    }
    std::reverse(cex.nodes.begin(), cex.nodes.end());
    std::reverse(cex.edges.begin(), cex.edges.end());
    return cex;
}

// --- refiner ---------------------------------------------------------------------

CegarEngine::Feasibility CegarEngine::checkFeasible(AbstractCex const & cex) {
    assert(!cex.edges.empty());
    SsaBuilder ssa(cfa);
    auto initialSnapshot = ssa.snapshot();
    auto script = session.script();
    script.declare(ssa.symbols());

    std::vector<SsaBuilder::StepInfo> steps;
    size_t declaredUpTo = ssa.symbols().size();
    for (size_t i = 0; i < cex.edges.size(); ++i) {
        Edge const & edge = cfa.edges[cex.edges[i]];
        steps.push_back(ssa.applyEdge(edge));
        for (size_t s = declaredUpTo; s < ssa.symbols().size(); ++s) {
            script.declare(ssa.symbols()[s]);
        }
        declaredUpTo = ssa.symbols().size();
        for (auto const & c : steps.back().constraints) {
            script.add(c);
        }
        SatStatus st = script.check();
        if (st == SatStatus::Unknown) { return {Feasibility::Kind::Unknown, {}, 0, "solver failure"}; }
        if (st == SatStatus::Unsat) {
            return {Feasibility::Kind::Infeasible, {}, static_cast<int>(i), ""};
        }
    }

    // feasible: decode the model into a concrete path
    std::vector<std::string> allSyms;
    for (auto const & s : ssa.symbols()) {
        allSyms.push_back(s.name);
    }
    auto model = script.values(allSyms);
    if (!model) { return {Feasibility::Kind::Unknown, {}, 0, "model extraction failed"}; }

    ConcretePath path;
    path.initial.location = cfa.initial;
    for (auto const & [var, sym] : initialSnapshot) {
        path.initial.valuation[var] = model->at(sym);
    }
    for (size_t i = 0; i < cex.edges.size(); ++i) {
        Edge const & edge = cfa.edges[cex.edges[i]];
        PathStep step;
        step.edgeId = edge.id;
        for (auto const & [var, sym] : steps[i].havocSyms) {
            step.havocChoices[var] = model->at(sym);
        }
        step.post.location = edge.target;
        for (auto const & [var, sym] : steps[i].postSyms) {
            step.post.valuation[var] = model->at(sym);
        }
        path.steps.push_back(std::move(step));
    }
    PathCheck check = validatePath(cfa, path);
    if (!check.ok) {
        return {Feasibility::Kind::Unknown, {}, 0,
                "counterexample failed concrete replay at step " + std::to_string(check.failStep) + ": " +
                    check.reason};
    }
    return {Feasibility::Kind::Feasible, std::move(path), static_cast<int>(cex.edges.size()), ""};
}

Term CegarEngine::preImage(std::span<CfaOp const> ops, Term const & post) {
    Term pre = post;
    size_t i = ops.size();
    while (i > 0) {
        --i;
        CfaOp const & op = ops[i];
        switch (op.kind) {
            case CfaOp::Kind::Guard:
                pre = term::conj(op.term, pre);
                break;
            case CfaOp::Kind::Assign: {
                CfaVariable const * v = cfa.findVariable(op.var);
                std::map<std::string, Term> subst{{op.var, op.term}};
                pre = substitute(pre, subst);
                (void)v;
                break;
            }
            case CfaOp::Kind::Havoc: {
                // gather the whole run of havocs ending here and eliminate them together
                size_t start = i;
                while (start > 0 && ops[start - 1].kind == CfaOp::Kind::Havoc) {
                    --start;
                }
                std::vector<Binder> group;
                for (size_t k = start; k <= i; ++k) {
                    if (containsVar(pre, ops[k].var)) {
                        group.push_back(Binder{ops[k].var, cfa.findVariable(ops[k].var)->sort});
                    }
                }
                i = start;
                if (!group.empty()) {
                    Term quantified = term::exists(std::move(group), pre);
                    auto elim = session.eliminate(quantified);
                    pre = elim.eliminated ? elim.term : quantified;
                }
                break;
            }
        }
    }
    return simplify(pre);
}

CegarEngine::ChainResult CegarEngine::wpChain(AbstractCex const & cex) {
    size_t m = cex.edges.size();
    ChainResult out;
    // bad[s]: states at position s from which the remaining suffix can execute;
    // since the whole path is infeasible the chain anchors at false somewhere
    std::vector<Term> badAt(m + 1, term::bottom());
    badAt[m] = term::top();
    Term bad = term::top();
    bool anchored = false;
    for (size_t s = m; s-- > 0;) {
        Edge const & edge = cfa.edges[cex.edges[s]];
        bad = preImage(edge.ops, bad);
        if (isFalse(bad)) {
            anchored = true;
            break;
        }
        auto sat = session.checkSat(cfa.variables, bad);
        if (sat.status == SatStatus::Unsat) {
            anchored = true;
            break;
        }
        // a solver Unknown keeps the formula registered, which is sound
        badAt[s] = bad;
        if (s == 0 && sat.status == SatStatus::Sat) {
            out.unknown = true;
            out.reason = "inconsistent refinement: the infeasible path has a satisfiable precondition";
            return out;
        }
    }
    (void)anchored;
    out.formulas.resize(m + 1, term::top());
    for (size_t s = 1; s < m; ++s) {
        if (isFalse(badAt[s]) || isTrue(badAt[s])) { continue; }
        out.formulas[s] = simplify(term::negate(badAt[s]));
    }
    return out;
}

CegarEngine::ChainResult CegarEngine::itpChain(AbstractCex const & cex, bool fromSuffix) {
    size_t m = cex.edges.size();
    ChainResult out;
    SsaBuilder ssa(cfa);
    std::vector<Term> partition;
    std::vector<std::map<std::string, std::string>> snapshots;
    for (size_t i = 0; i < m; ++i) {
        auto step = ssa.applyEdge(cfa.edges[cex.edges[i]]);
        partition.push_back(term::conjAll(step.constraints));
        snapshots.push_back(step.postSyms);
    }
    auto interpolants = session.interpolantSeq(partition, fromSuffix);
    if (!interpolants) {
        out.unknown = true;
        out.reason = "interpolation unsupported";
        return out;
    }
    out.formulas.resize(m + 1, term::top());
    for (size_t s = 1; s < m; ++s) {
        Term itp = (*interpolants)[s - 1];
        if (isTrue(itp) || isFalse(itp)) { continue; }
        // map cut symbols back to CFA variables
        std::map<std::string, std::string> toVars;
        for (auto const & [var, sym] : snapshots[s - 1]) {
            toVars[sym] = var;
        }
        bool mappable = true;
        for (auto const & [name, sort] : freeVars(itp)) {
            (void)sort;
            if (!toVars.count(name)) {
                mappable = false;
                break;
            }
        }
        if (!mappable) { continue; } // interpolant mentions a non-cut symbol
        out.formulas[s] = simplify(renameVars(itp, toVars));
    }
    return out;
}

bool CegarEngine::registerFormula(LocationId loc, Term const & formula) {
    bool progressed = false;
    if (opts.domain == Domain::Expl) {
        for (auto const & [name, sort] : freeVars(formula)) {
            (void)sort;
            if (cfa.findVariable(name)) { progressed |= precision_.trackVariable(loc, name); }
        }
        return progressed;
    }
    if (opts.predSplit == PredSplit::Atoms) {
        for (auto const & atom : atoms(formula)) {
            progressed |= precision_.addPredicate(loc, atom);
        }
        return progressed;
    }
    return precision_.addPredicate(loc, formula);
}

CegarEngine::RefineOutcome CegarEngine::refine(AbstractCex const & cex) {
    ChainResult chain;
    bool interpolationRequested = opts.refinement != Refinement::Wp;
    if (interpolationRequested) {
        chain = itpChain(cex, opts.refinement == Refinement::BwBinItp);
        if (chain.unknown) {
            stats_.notes.push_back("falling back to wp refinement: " + chain.reason);
            chain = wpChain(cex);
        }
    } else {
        chain = wpChain(cex);
    }
    if (chain.unknown) { return {false, 0, true, chain.reason}; }

    RefineOutcome out;
    out.prunePosition = -1;
    size_t m = cex.edges.size();
    for (size_t s = 1; s < m; ++s) {
        Term const & formula = chain.formulas[s];
        if (isTrue(formula)) { continue; }
        if (out.prunePosition < 0) { out.prunePosition = static_cast<int>(s); }
        LocationId loc = arg_.nodes[cex.nodes[s]].state.location;
        out.progressed |= registerFormula(loc, formula);
    }
    if (out.prunePosition < 0) { out.prunePosition = static_cast<int>(m) - 1; }
    if (out.prunePosition == 0) { out.prunePosition = 1; }
    return out;
}

void CegarEngine::pruneAt(int nodeId) {
    std::vector<int> deleted = arg_.prune(nodeId);
    std::set<int> deletedSet(deleted.begin(), deleted.end());
    int parent = arg_.nodes[nodeId].parent;
    if (parent >= 0 && arg_.alive(parent)) { worklist.push_back(parent); }
    for (auto & node : arg_.nodes) {
        if (node.alive && node.coveredBy != -1 && deletedSet.count(node.coveredBy)) {
            node.coveredBy = -1;
            worklist.push_back(node.id);
        }
    }
}

Verdict CegarEngine::run() {
    while (true) {
        stats_.iterations += 1;
        if (stats_.iterations > opts.maxIterations) {
            return {Verdict::Kind::Unknown, "iteration budget exhausted", std::nullopt};
        }
        if (deadlineExceeded()) { return {Verdict::Kind::Unknown, "timeout", std::nullopt}; }

        BuildOutcome build = buildArg();
        if (build.kind == BuildOutcome::Kind::Unknown) {
            return {Verdict::Kind::Unknown, build.reason, std::nullopt};
        }
        if (build.kind == BuildOutcome::Kind::Closed) {
            if (opts.checkInvariants) { checkSafeArgInvariants(); }
            return {Verdict::Kind::Safe, "", std::nullopt};
        }

        AbstractCex const & cex = build.cex;
        std::string key = cex.key();
        if (seenCexKeys.count(key)) {
            return {Verdict::Kind::Unknown, "refinement stuck (counterexample recurred)", std::nullopt};
        }

        Feasibility feas = checkFeasible(cex);
        if (feas.kind == Feasibility::Kind::Unknown) {
            return {Verdict::Kind::Unknown, feas.reason, std::nullopt};
        }
        if (feas.kind == Feasibility::Kind::Feasible) {
            return {Verdict::Kind::Unsafe, "", std::move(feas.path)};
        }

        long precisionBefore = precision_.size();
        RefineOutcome ref = refine(cex);
        if (ref.unknown) { return {Verdict::Kind::Unknown, ref.reason, std::nullopt}; }
        if (!ref.progressed || precision_.size() <= precisionBefore) {
            return {Verdict::Kind::Unknown, "refinement stuck (no new predicates)", std::nullopt};
        }
        stats_.refinements += 1;
        seenCexKeys.insert(key);
        if (opts.checkInvariants &&
            (opts.domain == Domain::PredCart || opts.domain == Domain::PredBool)) {
            checkRefinementBlocked(cex);
        }
        pruneAt(cex.nodes[ref.prunePosition]);
    }
}

// --- invariant checks ------------------------------------------------------------

void CegarEngine::checkSafeArgInvariants() {
    long sampled = 0;
    for (auto const & node : arg_.nodes) {
        if (!node.alive) { continue; }
        if (cfa.locations[node.state.location].kind == LocationKind::Error) {
            stats_.invariantViolations.push_back("error node present in a closed ARG");
        }
        // covering: the coverer's label must be implied, same location
        if (node.coveredBy != -1) {
            ArgNode const & coverer = arg_.nodes[node.coveredBy];
            if (!coverer.alive || coverer.state.location != node.state.location) {
                stats_.invariantViolations.push_back("covering link to a pruned or misplaced node");
                continue;
            }
            Tri ok = session.checkValid(cfa.variables, term::implies(node.label, coverer.label));
            if (ok == Tri::False) {
                stats_.invariantViolations.push_back("covering implication failed for node " +
                                                     std::to_string(node.id));
            }
        }
        // overapproximation of sampled ARG edges
        if (node.parent >= 0 && sampled < 64) {
            ++sampled;
            SsaBuilder ssa(cfa);
            Term pre = ssa.rewrite(arg_.nodes[node.parent].label);
            auto step = ssa.applyEdge(cfa.edges[node.inEdge]);
            Term post = renameVars(node.label, std::map<std::string, std::string>(step.postSyms.begin(),
                                                                                  step.postSyms.end()));
            std::vector<Term> parts{pre};
            parts.insert(parts.end(), step.constraints.begin(), step.constraints.end());
            Tri ok = session.checkValid(ssa.symbols(), term::implies(term::conjAll(parts), post));
            if (ok == Tri::False) {
                stats_.invariantViolations.push_back("post overapproximation failed for node " +
                                                     std::to_string(node.id));
            }
        }
    }
}

void CegarEngine::checkRefinementBlocked(AbstractCex const & cex) {
    // replay the same edge sequence with fresh posts under the refined precision
    AbstractState cur = initialState();
    for (int edgeId : cex.edges) {
        PostResult post = abstractPost(cur, cfa.edges[edgeId]);
        if (post.unknown) { return; } // cannot decide, do not flag
        if (post.states.empty()) { return; } // blocked
        cur = post.states.front();
    }
    stats_.invariantViolations.push_back("refinement did not block the spurious counterexample");
}

} // namespace horncfa
