#include "ChcParser.h"

#include "TermReader.h"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace horncfa {

namespace {

[[noreturn]] void fail(FrontendErrorKind kind, std::string const & msg, int line = 0) {
    std::string where = line > 0 ? " (line " + std::to_string(line) + ")" : "";
    throw FrontendError(kind, msg + where);
}

struct RawAtom {
    int predIndex;
    std::vector<Term> args;
    int line;
};

class ScriptReader {
public:
    CHCSystem run(std::vector<SExpr> const & commands) {
        for (auto const & cmd : commands) {
            handleCommand(cmd);
        }
        return std::move(system);
    }

private:
    CHCSystem system;
    std::map<std::string, int> predIndexByName;
    std::set<std::string> predNames;

    void handleCommand(SExpr const & cmd) {
        if (!cmd.isList() || cmd.size() == 0 || !cmd[0].atom) {
            fail(FrontendErrorKind::SyntaxError, "expected a command", cmd.line);
        }
        std::string const & head = cmd[0].text;
        if (head == "set-logic" || head == "set-info" || head == "set-option" || head == "check-sat" ||
            head == "exit" || head == "get-model" || head == "get-info") {
            return;
        }
        if (head == "declare-fun") {
            declarePredicate(cmd);
            return;
        }
        if (head == "declare-const") {
            if (cmd.size() != 3 || !cmd[1].atom) {
                fail(FrontendErrorKind::SyntaxError, "malformed declare-const", cmd.line);
            }
            if (!cmd[2].isAtom("Bool")) {
                fail(FrontendErrorKind::UnsupportedTheory,
                     "only Bool constants (nullary predicates) are supported", cmd.line);
            }
            addPredicate(cmd[1].text, {}, cmd.line);
            return;
        }
        if (head == "assert") {
            if (cmd.size() != 2) { fail(FrontendErrorKind::SyntaxError, "malformed assert", cmd.line); }
            handleAssert(cmd[1]);
            return;
        }
        fail(FrontendErrorKind::SyntaxError, "unsupported command " + head, cmd.line);
    }

    Sort parseSort(SExpr const & s) const {
        if (s.isAtom("Int")) { return Sort::Int; }
        if (s.isAtom("Bool")) { return Sort::Bool; }
        fail(FrontendErrorKind::UnsupportedTheory, "unsupported sort " + s.toString(), s.line);
    }

    void addPredicate(std::string const & name, std::vector<Sort> params, int line) {
        if (predIndexByName.count(name)) {
            fail(FrontendErrorKind::SyntaxError, "duplicate declaration of " + name, line);
        }
        PredicateDecl decl;
        decl.name = name;
        decl.paramSorts = std::move(params);
        decl.index = static_cast<int>(system.predicates.size());
        predIndexByName.emplace(name, decl.index);
        predNames.insert(name);
        system.predicates.push_back(std::move(decl));
    }

    void declarePredicate(SExpr const & cmd) {
        if (cmd.size() != 4 || !cmd[1].atom || !cmd[2].isList()) {
            fail(FrontendErrorKind::SyntaxError, "malformed declare-fun", cmd.line);
        }
        if (!cmd[3].isAtom("Bool")) {
            fail(FrontendErrorKind::UnsupportedTheory,
                 "declare-fun must return Bool (uninterpreted predicate)", cmd.line);
        }
        std::vector<Sort> params;
        params.reserve(cmd[2].size());
        for (auto const & s : cmd[2].items) {
            params.push_back(parseSort(s));
        }
        addPredicate(cmd[1].text, std::move(params), cmd.line);
    }

    using VarEnv = std::map<std::string, Sort>;

    Term parseTerm(SExpr const & s, VarEnv const & env) const {
        TermReaderOptions opts;
        opts.rejectSymbols = &predNames;
        return readTermSexpr(s, env, opts);
    }

    // Expands let bindings by substitution at the s-expression level so the
    // clause structure (atoms under and) stays visible.
    SExpr expandLets(SExpr const & s, std::map<std::string, SExpr> const & env) const {
        if (s.atom) {
            auto it = env.find(s.text);
            if (it != env.end()) { return it->second; }
            return s;
        }
        if (s.size() == 3 && s[0].isAtom("let") && s[1].isList()) {
            std::map<std::string, SExpr> inner = env;
            for (auto const & binding : s[1].items) {
                if (!binding.isList() || binding.size() != 2 || !binding[0].atom) {
                    fail(FrontendErrorKind::SyntaxError, "malformed let binding", s.line);
                }
                // SMT-LIB let is parallel: right-hand sides see the outer env.
                inner[binding[0].text] = expandLets(binding[1], env);
            }
            return expandLets(s[2], inner);
        }
        if (s.size() == 3 && (s[0].isAtom("forall") || s[0].isAtom("exists")) && s[1].isList()) {
            std::map<std::string, SExpr> inner = env;
            for (auto const & b : s[1].items) {
                if (b.isList() && b.size() == 2 && b[0].atom) { inner.erase(b[0].text); }
            }
            SExpr out;
            out.line = s.line;
            out.items.push_back(s[0]);
            out.items.push_back(s[1]);
            out.items.push_back(expandLets(s[2], inner));
            return out;
        }
        SExpr out;
        out.line = s.line;
        for (auto const & item : s.items) {
            out.items.push_back(expandLets(item, env));
        }
        return out;
    }

    static SExpr const & stripAnnotations(SExpr const & s) {
        if (s.isList() && s.size() >= 2 && s[0].isAtom("!")) { return stripAnnotations(s[1]); }
        return s;
    }

    std::optional<RawAtom> tryAtom(SExpr const & s, VarEnv const & env) const {
        if (s.atom) {
            auto it = predIndexByName.find(s.text);
            if (it == predIndexByName.end()) { return std::nullopt; }
            RawAtom atom{it->second, {}, s.line};
            checkArity(atom);
            return atom;
        }
        if (s.size() == 0 || !s[0].atom) { return std::nullopt; }
        auto it = predIndexByName.find(s[0].text);
        if (it == predIndexByName.end()) { return std::nullopt; }
        RawAtom atom{it->second, {}, s.line};
        for (size_t i = 1; i < s.size(); ++i) {
            atom.args.push_back(parseTerm(s[i], env));
        }
        checkArity(atom);
        return atom;
    }

    void checkArity(RawAtom const & atom) const {
        auto const & pred = system.predicates[atom.predIndex];
        if (static_cast<int>(atom.args.size()) != pred.arity()) {
            fail(FrontendErrorKind::SyntaxError, "arity mismatch for " + pred.name, atom.line);
        }
        for (size_t j = 0; j < atom.args.size(); ++j) {
            if (atom.args[j]->sort != pred.paramSorts[j]) {
                fail(FrontendErrorKind::SyntaxError, "ill-sorted argument of " + pred.name, atom.line);
            }
        }
    }

    struct BodyParts {
        std::vector<RawAtom> atoms;
        std::vector<Term> constraints;
    };

    void parseBody(SExpr const & s, VarEnv const & env, BodyParts & out) const {
        SExpr const & expr = stripAnnotations(s);
        if (expr.isList() && expr.size() >= 1 && expr[0].isAtom("and")) {
            for (size_t i = 1; i < expr.size(); ++i) {
                parseBody(expr[i], env, out);
            }
            return;
        }
        if (auto atom = tryAtom(expr, env)) {
            out.atoms.push_back(std::move(*atom));
            return;
        }
        Term t = parseTerm(expr, env);
        if (t->sort != Sort::Bool) { fail(FrontendErrorKind::SyntaxError, "clause body must be Bool", expr.line); }
        if (!isTrue(t)) { out.constraints.push_back(std::move(t)); }
    }

    void handleAssert(SExpr const & rawAssertion) {
        std::map<std::string, SExpr> emptyLetEnv;
        SExpr assertion = expandLets(stripAnnotations(rawAssertion), emptyLetEnv);

        std::vector<Binder> binders;
        bool negatedBody = false;
        SExpr const * core = &assertion;

        // (not (exists (...) body)) and ground (not body) encode queries
        if (core->isList() && core->size() == 2 && (*core)[0].isAtom("not")) {
            SExpr const & inner = stripAnnotations((*core)[1]);
            if (inner.isList() && inner.size() == 3 && inner[0].isAtom("exists")) {
                readBinders(inner[1], binders);
                negatedBody = true;
                core = &inner.items[2];
            } else {
                negatedBody = true;
                core = &(*core)[1];
            }
        } else if (core->isList() && core->size() == 3 && (*core)[0].isAtom("forall")) {
            readBinders((*core)[1], binders);
            core = &(*core)[2];
            SExpr const & stripped = stripAnnotations(*core);
            if (stripped.isList() && stripped.size() == 2 && stripped[0].isAtom("not")) {
                negatedBody = true;
                core = &stripped.items[1];
            }
        }

        VarEnv env;
        for (auto const & b : binders) {
            env[b.name] = b.sort;
        }

        BodyParts body;
        std::optional<RawAtom> headAtom;

        if (negatedBody) {
            parseBody(*core, env, body);
        } else {
            SExpr const * cur = core;
            // uncurried implications: (=> a (=> b h)) contributes a and b to the body
            while (true) {
                SExpr const & c = stripAnnotations(*cur);
                if (c.isList() && c.size() >= 3 && c[0].isAtom("=>")) {
                    for (size_t i = 1; i + 1 < c.size(); ++i) {
                        parseBody(c[i], env, body);
                    }
                    cur = &c.items[c.size() - 1];
                    continue;
                }
                break;
            }
            SExpr const & headExpr = stripAnnotations(*cur);
            if (headExpr.isAtom("false")) {
                // query clause, head stays absent
            } else if (headExpr.isAtom("true")) {
                fail(FrontendErrorKind::UnsupportedShape, "clause head is the constant true", headExpr.line);
            } else if (auto atom = tryAtom(headExpr, env)) {
                headAtom = std::move(*atom);
            } else {
                fail(FrontendErrorKind::UnsupportedShape,
                     "clause head must be an uninterpreted atom or false", headExpr.line);
            }
        }

        if (body.atoms.size() > 1) {
            fail(FrontendErrorKind::NonlinearClause,
                 "clause body has " + std::to_string(body.atoms.size()) + " uninterpreted atoms",
                 rawAssertion.line);
        }

        system.clauses.push_back(
            normalizeClause(std::move(binders), std::move(headAtom),
                            body.atoms.empty() ? std::nullopt : std::optional<RawAtom>(body.atoms[0]),
                            std::move(body.constraints)));
    }

    void readBinders(SExpr const & list, std::vector<Binder> & out) const {
        if (!list.isList()) { fail(FrontendErrorKind::SyntaxError, "malformed binder list", list.line); }
        for (auto const & b : list.items) {
            if (!b.isList() || b.size() != 2 || !b[0].atom) {
                fail(FrontendErrorKind::SyntaxError, "malformed binder", list.line);
            }
            out.push_back(Binder{b[0].text, parseSort(b[1])});
        }
    }

    static Term iff(Term const & a, Term const & b) {
        return term::conj(term::implies(a, b), term::implies(b, a));
    }

    // Replaces predicate arguments by distinct clause variables, pushing the
    // original argument terms into the constraint as equalities.
    Clause normalizeClause(std::vector<Binder> binders, std::optional<RawAtom> headAtom,
                           std::optional<RawAtom> bodyAtom, std::vector<Term> constraints) {
        std::set<std::string> names;
        for (auto const & b : binders) {
            names.insert(b.name);
        }
        std::set<std::string> claimed;
        int freshCounter = 0;
        auto freshName = [&](std::string const & base) {
            std::string name;
            do {
                name = base + std::to_string(freshCounter++);
            } while (names.count(name));
            names.insert(name);
            return name;
        };

        auto normalizeAtom = [&](RawAtom const & atom, std::string const & base) {
            AtomRef ref;
            ref.predIndex = atom.predIndex;
            auto const & pred = system.predicates[atom.predIndex];
            for (size_t j = 0; j < atom.args.size(); ++j) {
                Term const & arg = atom.args[j];
                if (arg->kind == TermKind::Var && !claimed.count(arg->name)) {
                    claimed.insert(arg->name);
                    ref.argVars.push_back(arg->name);
                    continue;
                }
                std::string fresh = freshName(base);
                binders.push_back(Binder{fresh, pred.paramSorts[j]});
                claimed.insert(fresh);
                Term freshVar = term::var(fresh, pred.paramSorts[j]);
                constraints.push_back(pred.paramSorts[j] == Sort::Int ? term::eq(freshVar, arg)
                                                                      : iff(freshVar, arg));
                ref.argVars.push_back(std::move(fresh));
            }
            return ref;
        };

        Clause clause;
        if (headAtom) { clause.head = normalizeAtom(*headAtom, "_h"); }
        if (bodyAtom) { clause.body = normalizeAtom(*bodyAtom, "_y"); }
        clause.constraint = term::conjAll(constraints);
        clause.clauseVars = std::move(binders);
        clause.id = static_cast<int>(system.clauses.size());
        return clause;
    }
};

} // namespace

CHCSystem parseScript(std::string const & text) {
    return ScriptReader().run(parseSExprs(text));
}

CHCSystem parseChcFile(std::string const & path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) { throw FrontendError(FrontendErrorKind::SyntaxError, "cannot open " + path); }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseScript(buf.str());
}

} // namespace horncfa
