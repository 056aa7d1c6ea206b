#include "TermReader.h"

namespace horncfa {

namespace {

[[noreturn]] void fail(FrontendErrorKind kind, std::string const & msg, int line) {
    std::string where = line > 0 ? " (line " + std::to_string(line) + ")" : "";
    throw FrontendError(kind, msg + where);
}

bool looksNumeric(std::string const & s) {
    if (s.empty()) { return false; }
    for (char c : s) {
        if (c < '0' || c > '9') { return false; }
    }
    return true;
}

long long parseNumeral(std::string const & s, int line) {
    try {
        size_t used = 0;
        long long v = std::stoll(s, &used);
        if (used != s.size()) { fail(FrontendErrorKind::SyntaxError, "bad numeral " + s, line); }
        return v;
    } catch (std::out_of_range const &) {
        fail(FrontendErrorKind::UnsupportedTheory, "integer literal out of supported range: " + s, line);
    } catch (std::invalid_argument const &) {
        fail(FrontendErrorKind::SyntaxError, "bad numeral " + s, line);
    }
}

class Reader {
public:
    Reader(TermReaderOptions const & opts) : opts(opts) {}

    using Env = std::map<std::string, Term>; // both variables and let bindings

    Term read(SExpr const & s, Env const & env) {
        if (s.atom) { return readAtom(s, env); }
        if (s.size() == 0 || !s[0].atom) { fail(FrontendErrorKind::SyntaxError, "malformed term", s.line); }
        std::string const & op = s[0].text;
        if (op == "!") {
            if (s.size() < 2) { fail(FrontendErrorKind::SyntaxError, "malformed annotation", s.line); }
            return read(s[1], env);
        }
        if (op == "let") {
            if (s.size() != 3 || !s[1].isList()) { fail(FrontendErrorKind::SyntaxError, "malformed let", s.line); }
            Env inner = env; // parallel let: right-hand sides read in the outer env
            for (auto const & binding : s[1].items) {
                if (!binding.isList() || binding.size() != 2 || !binding[0].atom) {
                    fail(FrontendErrorKind::SyntaxError, "malformed let binding", s.line);
                }
                inner[binding[0].text] = read(binding[1], env);
            }
            return read(s[2], inner);
        }
        if (op == "forall" || op == "exists") {
            if (!opts.allowQuantifiers) {
                fail(FrontendErrorKind::UnsupportedShape, "nested quantifier in a clause body", s.line);
            }
            if (s.size() != 3 || !s[1].isList()) {
                fail(FrontendErrorKind::SyntaxError, "malformed quantifier", s.line);
            }
            std::vector<Binder> binders;
            Env inner = env;
            for (auto const & b : s[1].items) {
                if (!b.isList() || b.size() != 2 || !b[0].atom) {
                    fail(FrontendErrorKind::SyntaxError, "malformed binder", s.line);
                }
                Sort sort = readSort(b[1]);
                binders.push_back(Binder{b[0].text, sort});
                inner[b[0].text] = term::var(b[0].text, sort);
            }
            Term body = read(s[2], inner);
            if (body->sort != Sort::Bool) { fail(FrontendErrorKind::SyntaxError, "quantifier body must be Bool", s.line); }
            return op == "forall" ? term::forall(std::move(binders), body) : term::exists(std::move(binders), body);
        }
        if (opts.rejectSymbols && opts.rejectSymbols->count(op)) {
            fail(FrontendErrorKind::UnsupportedShape,
                 "uninterpreted predicate " + op + " in an interpreted position", s.line);
        }
        std::vector<Term> args;
        args.reserve(s.size() - 1);
        for (size_t i = 1; i < s.size(); ++i) {
            args.push_back(read(s[i], env));
        }
        return apply(op, std::move(args), s.line);
    }

private:
    TermReaderOptions const & opts;

    static Sort readSort(SExpr const & s) {
        if (s.isAtom("Int")) { return Sort::Int; }
        if (s.isAtom("Bool")) { return Sort::Bool; }
        fail(FrontendErrorKind::UnsupportedTheory, "unsupported sort " + s.toString(), s.line);
    }

    Term readAtom(SExpr const & s, Env const & env) {
        if (!s.quoted) {
            if (s.text == "true") { return term::boolLit(true); }
            if (s.text == "false") { return term::boolLit(false); }
            if (looksNumeric(s.text)) { return term::intLit(parseNumeral(s.text, s.line)); }
        }
        auto it = env.find(s.text);
        if (it != env.end()) { return it->second; }
        if (opts.rejectSymbols && opts.rejectSymbols->count(s.text)) {
            fail(FrontendErrorKind::UnsupportedShape,
                 "uninterpreted predicate " + s.text + " in an interpreted position", s.line);
        }
        fail(FrontendErrorKind::SyntaxError, "unknown symbol " + s.text, s.line);
    }

    static void requireBool(Term const & t, int line) {
        if (t->sort != Sort::Bool) { fail(FrontendErrorKind::SyntaxError, "expected a Bool term", line); }
    }
    static void requireInt(Term const & t, int line) {
        if (t->sort != Sort::Int) { fail(FrontendErrorKind::SyntaxError, "expected an Int term", line); }
    }

    static Term iff(Term const & a, Term const & b) {
        return term::conj(term::implies(a, b), term::implies(b, a));
    }

    static Term mkEq(Term const & a, Term const & b, int line) {
        if (a->sort != b->sort) { fail(FrontendErrorKind::SyntaxError, "ill-sorted equality", line); }
        if (a->sort == Sort::Int) { return term::eq(a, b); }
        return iff(a, b);
    }

    Term apply(std::string const & op, std::vector<Term> args, int line) {
        auto nary = [&](size_t atLeast) {
            if (args.size() < atLeast) {
                fail(FrontendErrorKind::SyntaxError, "operator " + op + " needs more arguments", line);
            }
        };
        if (op == "+") {
            nary(1);
            Term acc = args[0];
            requireInt(acc, line);
            for (size_t i = 1; i < args.size(); ++i) {
                requireInt(args[i], line);
                acc = term::add(acc, args[i]);
            }
            return acc;
        }
        if (op == "-") {
            nary(1);
            requireInt(args[0], line);
            if (args.size() == 1) { return term::neg(args[0]); }
            Term acc = args[0];
            for (size_t i = 1; i < args.size(); ++i) {
                requireInt(args[i], line);
                acc = term::sub(acc, args[i]);
            }
            return acc;
        }
        if (op == "*") {
            nary(2);
            long long coeff = 1;
            Term nonConst = nullptr;
            for (auto const & a : args) {
                requireInt(a, line);
                if (a->kind == TermKind::IntLit) {
                    long long r;
                    if (__builtin_mul_overflow(coeff, a->num, &r)) {
                        fail(FrontendErrorKind::UnsupportedTheory, "coefficient overflow", line);
                    }
                    coeff = r;
                } else if (nonConst == nullptr) {
                    nonConst = a;
                } else {
                    fail(FrontendErrorKind::UnsupportedTheory, "nonlinear arithmetic (product of variables)",
                         line);
                }
            }
            if (nonConst == nullptr) { return term::intLit(coeff); }
            if (coeff == 1) { return nonConst; }
            return term::mulConst(coeff, nonConst);
        }
        if (op == "div" || op == "mod") {
            if (args.size() != 2) { fail(FrontendErrorKind::SyntaxError, op + " needs two arguments", line); }
            requireInt(args[0], line);
            requireInt(args[1], line);
            return op == "div" ? term::div(args[0], args[1]) : term::mod(args[0], args[1]);
        }
        if (op == "/") { fail(FrontendErrorKind::UnsupportedTheory, "real division is not supported", line); }
        if (op == "abs") {
            if (args.size() != 1) { fail(FrontendErrorKind::SyntaxError, "abs needs one argument", line); }
            requireInt(args[0], line);
            return term::ite(term::ge(args[0], term::intLit(0)), args[0], term::neg(args[0]));
        }
        if (op == "<" || op == "<=" || op == ">" || op == ">=") {
            nary(2);
            std::vector<Term> chain;
            for (size_t i = 0; i + 1 < args.size(); ++i) {
                requireInt(args[i], line);
                requireInt(args[i + 1], line);
                if (op == "<") { chain.push_back(term::lt(args[i], args[i + 1])); }
                if (op == "<=") { chain.push_back(term::le(args[i], args[i + 1])); }
                if (op == ">") { chain.push_back(term::gt(args[i], args[i + 1])); }
                if (op == ">=") { chain.push_back(term::ge(args[i], args[i + 1])); }
            }
            return term::conjAll(chain);
        }
        if (op == "=") {
            nary(2);
            std::vector<Term> chain;
            for (size_t i = 0; i + 1 < args.size(); ++i) {
                chain.push_back(mkEq(args[i], args[i + 1], line));
            }
            return term::conjAll(chain);
        }
        if (op == "distinct") {
            nary(2);
            std::vector<Term> pairs;
            for (size_t i = 0; i < args.size(); ++i) {
                for (size_t j = i + 1; j < args.size(); ++j) {
                    pairs.push_back(term::negate(mkEq(args[i], args[j], line)));
                }
            }
            return term::conjAll(pairs);
        }
        if (op == "and" || op == "or") {
            if (args.empty()) { return term::boolLit(op == "and"); }
            Term acc = args[0];
            requireBool(acc, line);
            for (size_t i = 1; i < args.size(); ++i) {
                requireBool(args[i], line);
                acc = op == "and" ? term::conj(acc, args[i]) : term::disj(acc, args[i]);
            }
            return acc;
        }
        if (op == "not") {
            if (args.size() != 1) { fail(FrontendErrorKind::SyntaxError, "not needs one argument", line); }
            requireBool(args[0], line);
            return term::negate(args[0]);
        }
        if (op == "=>") {
            nary(2);
            Term acc = args.back();
            requireBool(acc, line);
            for (size_t i = args.size() - 1; i-- > 0;) {
                requireBool(args[i], line);
                acc = term::implies(args[i], acc);
            }
            return acc;
        }
        if (op == "xor") {
            if (args.size() != 2) { fail(FrontendErrorKind::SyntaxError, "xor needs two arguments", line); }
            requireBool(args[0], line);
            requireBool(args[1], line);
            return term::negate(iff(args[0], args[1]));
        }
        if (op == "ite") {
            if (args.size() != 3) { fail(FrontendErrorKind::SyntaxError, "ite needs three arguments", line); }
            requireBool(args[0], line);
            if (args[1]->sort != args[2]->sort) {
                fail(FrontendErrorKind::SyntaxError, "ite branches disagree on sort", line);
            }
            return term::ite(args[0], args[1], args[2]);
        }
        fail(FrontendErrorKind::UnsupportedTheory, "unsupported operator " + op, line);
    }
};

} // namespace

Term readTermSexpr(SExpr const & s, std::map<std::string, Sort> const & vars, TermReaderOptions const & opts) {
    Reader reader(opts);
    Reader::Env env;
    for (auto const & [name, sort] : vars) {
        env.emplace(name, term::var(name, sort));
    }
    return reader.read(s, env);
}

} // namespace horncfa
