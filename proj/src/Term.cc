#include "Term.h"

#include <cassert>
#include <set>
#include <sstream>
#include <stdexcept>

namespace horncfa {

std::string const & sortName(Sort s) {
    static const std::string intName = "Int";
    static const std::string boolName = "Bool";
    return s == Sort::Int ? intName : boolName;
}

std::string valueToString(Value const & v) {
    if (std::holds_alternative<bool>(v)) { return std::get<bool>(v) ? "true" : "false"; }
    return std::to_string(std::get<long long>(v));
}

bool valueEquals(Value const & a, Value const & b) {
    return a == b;
}

namespace term {

namespace {
Term node(TermKind k, Sort s, std::vector<Term> kids) {
    auto n = std::make_shared<TermNode>(k, s);
    n->kids = std::move(kids);
    return n;
}

void requireSort(Term const & t, Sort s) {
    if (t->sort != s) { throw std::logic_error("term sort mismatch: expected " + sortName(s)); }
}
} // namespace

Term var(std::string name, Sort sort) {
    auto n = std::make_shared<TermNode>(TermKind::Var, sort);
    n->name = std::move(name);
    return n;
}

Term intLit(long long v) {
    auto n = std::make_shared<TermNode>(TermKind::IntLit, Sort::Int);
    n->num = v;
    return n;
}

Term boolLit(bool b) {
    auto n = std::make_shared<TermNode>(TermKind::BoolLit, Sort::Bool);
    n->flag = b;
    return n;
}

Term add(Term a, Term b) {
    requireSort(a, Sort::Int);
    requireSort(b, Sort::Int);
    return node(TermKind::Add, Sort::Int, {std::move(a), std::move(b)});
}

Term sub(Term a, Term b) {
    requireSort(a, Sort::Int);
    requireSort(b, Sort::Int);
    return node(TermKind::Sub, Sort::Int, {std::move(a), std::move(b)});
}

Term neg(Term a) {
    requireSort(a, Sort::Int);
    if (a->kind == TermKind::IntLit) { return intLit(-a->num); }
    return node(TermKind::Neg, Sort::Int, {std::move(a)});
}

Term mulConst(long long c, Term a) {
    requireSort(a, Sort::Int);
    auto n = std::make_shared<TermNode>(TermKind::MulConst, Sort::Int);
    n->num = c;
    n->kids = {std::move(a)};
    return n;
}

Term mod(Term a, Term b) {
    requireSort(a, Sort::Int);
    requireSort(b, Sort::Int);
    return node(TermKind::Mod, Sort::Int, {std::move(a), std::move(b)});
}

Term div(Term a, Term b) {
    requireSort(a, Sort::Int);
    requireSort(b, Sort::Int);
    return node(TermKind::Div, Sort::Int, {std::move(a), std::move(b)});
}

namespace {
Term cmp(TermKind k, Term a, Term b) {
    requireSort(a, Sort::Int);
    requireSort(b, Sort::Int);
    return node(k, Sort::Bool, {std::move(a), std::move(b)});
}
Term bin(TermKind k, Term a, Term b) {
    requireSort(a, Sort::Bool);
    requireSort(b, Sort::Bool);
    return node(k, Sort::Bool, {std::move(a), std::move(b)});
}
} // namespace

Term lt(Term a, Term b) { return cmp(TermKind::Lt, std::move(a), std::move(b)); }
Term le(Term a, Term b) { return cmp(TermKind::Le, std::move(a), std::move(b)); }
Term gt(Term a, Term b) { return cmp(TermKind::Gt, std::move(a), std::move(b)); }
Term ge(Term a, Term b) { return cmp(TermKind::Ge, std::move(a), std::move(b)); }
Term eq(Term a, Term b) { return cmp(TermKind::Eq, std::move(a), std::move(b)); }
Term neq(Term a, Term b) { return cmp(TermKind::Neq, std::move(a), std::move(b)); }
Term conj(Term a, Term b) { return bin(TermKind::And, std::move(a), std::move(b)); }
Term disj(Term a, Term b) { return bin(TermKind::Or, std::move(a), std::move(b)); }
Term implies(Term a, Term b) { return bin(TermKind::Implies, std::move(a), std::move(b)); }

Term negate(Term a) {
    requireSort(a, Sort::Bool);
    return node(TermKind::Not, Sort::Bool, {std::move(a)});
}

Term ite(Term c, Term a, Term b) {
    requireSort(c, Sort::Bool);
    if (a->sort != b->sort) { throw std::logic_error("ite branches disagree on sort"); }
    Sort s = a->sort;
    return node(TermKind::Ite, s, {std::move(c), std::move(a), std::move(b)});
}

Term forall(std::vector<Binder> binders, Term body) {
    requireSort(body, Sort::Bool);
    if (binders.empty()) { return body; }
    auto n = std::make_shared<TermNode>(TermKind::Forall, Sort::Bool);
    n->binders = std::move(binders);
    n->kids = {std::move(body)};
    return n;
}

Term exists(std::vector<Binder> binders, Term body) {
    requireSort(body, Sort::Bool);
    if (binders.empty()) { return body; }
    auto n = std::make_shared<TermNode>(TermKind::Exists, Sort::Bool);
    n->binders = std::move(binders);
    n->kids = {std::move(body)};
    return n;
}

Term top() {
    static const Term t = boolLit(true);
    return t;
}

Term bottom() {
    static const Term f = boolLit(false);
    return f;
}

Term conjAll(std::vector<Term> const & ts) {
    if (ts.empty()) { return top(); }
    Term acc = ts.front();
    for (size_t i = 1; i < ts.size(); ++i) {
        acc = conj(acc, ts[i]);
    }
    return acc;
}

Term disjAll(std::vector<Term> const & ts) {
    if (ts.empty()) { return bottom(); }
    Term acc = ts.front();
    for (size_t i = 1; i < ts.size(); ++i) {
        acc = disj(acc, ts[i]);
    }
    return acc;
}

} // namespace term

bool isTrue(Term const & t) {
    return t->kind == TermKind::BoolLit && t->flag;
}

bool isFalse(Term const & t) {
    return t->kind == TermKind::BoolLit && !t->flag;
}

std::optional<long long> euclideanDiv(long long a, long long b) {
    if (b == 0) { return std::nullopt; }
    long long q = a / b;
    long long r = a % b;
    if (r < 0) { q += (b > 0 ? -1 : 1); }
    return q;
}

std::optional<long long> euclideanMod(long long a, long long b) {
    if (b == 0) { return std::nullopt; }
    long long r = a % b;
    if (r < 0) { r += (b > 0 ? b : -b); }
    return r;
}

namespace {

std::optional<long long> evalInt(Term const & t, Valuation const & vals);
std::optional<bool> evalBool(Term const & t, Valuation const & vals);

std::optional<long long> checkedAdd(long long a, long long b) {
    long long r;
    if (__builtin_add_overflow(a, b, &r)) { return std::nullopt; }
    return r;
}
std::optional<long long> checkedSub(long long a, long long b) {
    long long r;
    if (__builtin_sub_overflow(a, b, &r)) { return std::nullopt; }
    return r;
}
std::optional<long long> checkedMul(long long a, long long b) {
    long long r;
    if (__builtin_mul_overflow(a, b, &r)) { return std::nullopt; }
    return r;
}

std::optional<long long> evalInt(Term const & t, Valuation const & vals) {
    switch (t->kind) {
        case TermKind::Var: {
            auto it = vals.find(t->name);
            if (it == vals.end() || !std::holds_alternative<long long>(it->second)) { return std::nullopt; }
            return std::get<long long>(it->second);
        }
        case TermKind::IntLit:
            return t->num;
        case TermKind::Add: {
            auto a = evalInt(t->kids[0], vals), b = evalInt(t->kids[1], vals);
            if (!a || !b) { return std::nullopt; }
            return checkedAdd(*a, *b);
        }
        case TermKind::Sub: {
            auto a = evalInt(t->kids[0], vals), b = evalInt(t->kids[1], vals);
            if (!a || !b) { return std::nullopt; }
            return checkedSub(*a, *b);
        }
        case TermKind::Neg: {
            auto a = evalInt(t->kids[0], vals);
            if (!a) { return std::nullopt; }
            return checkedSub(0, *a);
        }
        case TermKind::MulConst: {
            auto a = evalInt(t->kids[0], vals);
            if (!a) { return std::nullopt; }
            return checkedMul(t->num, *a);
        }
        case TermKind::Mod: {
            auto a = evalInt(t->kids[0], vals), b = evalInt(t->kids[1], vals);
            if (!a || !b) { return std::nullopt; }
            return euclideanMod(*a, *b);
        }
        case TermKind::Div: {
            auto a = evalInt(t->kids[0], vals), b = evalInt(t->kids[1], vals);
            if (!a || !b) { return std::nullopt; }
            return euclideanDiv(*a, *b);
        }
        case TermKind::Ite: {
            auto c = evalBool(t->kids[0], vals);
            if (!c) { return std::nullopt; }
            return evalInt(t->kids[*c ? 1 : 2], vals);
        }
        default:
            return std::nullopt;
    }
}

std::optional<bool> evalBool(Term const & t, Valuation const & vals) {
    switch (t->kind) {
        case TermKind::Var: {
            auto it = vals.find(t->name);
            if (it == vals.end() || !std::holds_alternative<bool>(it->second)) { return std::nullopt; }
            return std::get<bool>(it->second);
        }
        case TermKind::BoolLit:
            return t->flag;
        case TermKind::Lt:
        case TermKind::Le:
        case TermKind::Gt:
        case TermKind::Ge:
        case TermKind::Eq:
        case TermKind::Neq: {
            auto a = evalInt(t->kids[0], vals), b = evalInt(t->kids[1], vals);
            if (!a || !b) { return std::nullopt; }
            switch (t->kind) {
                case TermKind::Lt: return *a < *b;
                case TermKind::Le: return *a <= *b;
                case TermKind::Gt: return *a > *b;
                case TermKind::Ge: return *a >= *b;
                case TermKind::Eq: return *a == *b;
                default: return *a != *b;
            }
        }
        case TermKind::And: {
            auto a = evalBool(t->kids[0], vals), b = evalBool(t->kids[1], vals);
            if (!a || !b) { return std::nullopt; }
            return *a && *b;
        }
        case TermKind::Or: {
            auto a = evalBool(t->kids[0], vals), b = evalBool(t->kids[1], vals);
            if (!a || !b) { return std::nullopt; }
            return *a || *b;
        }
        case TermKind::Not: {
            auto a = evalBool(t->kids[0], vals);
            if (!a) { return std::nullopt; }
            return !*a;
        }
        case TermKind::Implies: {
            auto a = evalBool(t->kids[0], vals), b = evalBool(t->kids[1], vals);
            if (!a || !b) { return std::nullopt; }
            return !*a || *b;
        }
        case TermKind::Ite: {
            auto c = evalBool(t->kids[0], vals);
            if (!c) { return std::nullopt; }
            return evalBool(t->kids[*c ? 1 : 2], vals);
        }
        default:
            return std::nullopt;
    }
}

} // namespace

std::optional<Value> evaluate(Term const & t, Valuation const & vals) {
    if (t->sort == Sort::Int) {
        auto v = evalInt(t, vals);
        if (!v) { return std::nullopt; }
        return Value(*v);
    }
    auto v = evalBool(t, vals);
    if (!v) { return std::nullopt; }
    return Value(*v);
}

Term substitute(Term const & t, std::map<std::string, Term> const & subst) {
    if (subst.empty()) { return t; }
    switch (t->kind) {
        case TermKind::Var: {
            auto it = subst.find(t->name);
            if (it == subst.end()) { return t; }
            assert(it->second->sort == t->sort);
            return it->second;
        }
        case TermKind::IntLit:
        case TermKind::BoolLit:
            return t;
        case TermKind::Forall:
        case TermKind::Exists: {
            // Bound names shadow; replacement terms must not capture them.
            std::map<std::string, Term> inner = subst;
            for (auto const & b : t->binders) {
                inner.erase(b.name);
            }
            for (auto const & [from, to] : inner) {
                (void)from;
                for (auto const & b : t->binders) {
                    if (containsVar(to, b.name)) {
                        throw std::logic_error("substitution would capture bound variable " + b.name);
                    }
                }
            }
            Term body = substitute(t->kids[0], inner);
            if (body == t->kids[0]) { return t; }
            auto n = std::make_shared<TermNode>(t->kind, t->sort);
            n->binders = t->binders;
            n->kids = {std::move(body)};
            return n;
        }
        default: {
            bool changed = false;
            std::vector<Term> kids;
            kids.reserve(t->kids.size());
            for (auto const & k : t->kids) {
                Term nk = substitute(k, subst);
                changed = changed || nk != k;
                kids.push_back(std::move(nk));
            }
            if (!changed) { return t; }
            auto n = std::make_shared<TermNode>(t->kind, t->sort);
            n->num = t->num;
            n->flag = t->flag;
            n->kids = std::move(kids);
            return n;
        }
    }
}

Term renameVars(Term const & t, std::map<std::string, std::string> const & renaming) {
    std::map<std::string, Term> subst;
    std::map<std::string, Sort> fv = freeVars(t);
    for (auto const & [from, to] : renaming) {
        auto it = fv.find(from);
        if (it != fv.end()) { subst.emplace(from, term::var(to, it->second)); }
    }
    return substitute(t, subst);
}

void collectFreeVars(Term const & t, std::map<std::string, Sort> & out) {
    switch (t->kind) {
        case TermKind::Var:
            out.emplace(t->name, t->sort);
            return;
        case TermKind::Forall:
        case TermKind::Exists: {
            std::map<std::string, Sort> inner;
            collectFreeVars(t->kids[0], inner);
            for (auto const & b : t->binders) {
                inner.erase(b.name);
            }
            out.insert(inner.begin(), inner.end());
            return;
        }
        default:
            for (auto const & k : t->kids) {
                collectFreeVars(k, out);
            }
    }
}

std::map<std::string, Sort> freeVars(Term const & t) {
    std::map<std::string, Sort> out;
    collectFreeVars(t, out);
    return out;
}

bool containsVar(Term const & t, std::string const & name) {
    switch (t->kind) {
        case TermKind::Var:
            return t->name == name;
        case TermKind::Forall:
        case TermKind::Exists:
            for (auto const & b : t->binders) {
                if (b.name == name) { return false; }
            }
            return containsVar(t->kids[0], name);
        default:
            for (auto const & k : t->kids) {
                if (containsVar(k, name)) { return true; }
            }
            return false;
    }
}

bool containsQuantifier(Term const & t) {
    if (t->kind == TermKind::Forall || t->kind == TermKind::Exists) { return true; }
    for (auto const & k : t->kids) {
        if (containsQuantifier(k)) { return true; }
    }
    return false;
}

bool structurallyEqual(Term const & a, Term const & b) {
    if (a == b) { return true; }
    if (a->kind != b->kind || a->sort != b->sort || a->num != b->num || a->flag != b->flag ||
        a->name != b->name || a->kids.size() != b->kids.size() || !(a->binders == b->binders)) {
        return false;
    }
    for (size_t i = 0; i < a->kids.size(); ++i) {
        if (!structurallyEqual(a->kids[i], b->kids[i])) { return false; }
    }
    return true;
}

std::vector<Term> conjuncts(Term const & t) {
    std::vector<Term> out;
    std::vector<Term> stack{t};
    while (!stack.empty()) {
        Term cur = stack.back();
        stack.pop_back();
        if (cur->kind == TermKind::And) {
            stack.push_back(cur->kids[1]);
            stack.push_back(cur->kids[0]);
        } else {
            out.push_back(cur);
        }
    }
    return out;
}

namespace {
void collectAtoms(Term const & t, std::vector<Term> & out, std::set<std::string> & seen);

bool isAtomKind(TermKind k) {
    switch (k) {
        case TermKind::Lt:
        case TermKind::Le:
        case TermKind::Gt:
        case TermKind::Ge:
        case TermKind::Eq:
        case TermKind::Neq:
            return true;
        default:
            return false;
    }
}

void collectAtoms(Term const & t, std::vector<Term> & out, std::set<std::string> & seen) {
    if (isAtomKind(t->kind) || (t->kind == TermKind::Var && t->sort == Sort::Bool)) {
        std::string key = toSmt(t);
        if (seen.insert(key).second) { out.push_back(t); }
        return;
    }
    if (t->kind == TermKind::BoolLit) { return; }
    for (auto const & k : t->kids) {
        if (k->sort == Sort::Bool) { collectAtoms(k, out, seen); }
    }
}
} // namespace

std::vector<Term> atoms(Term const & t) {
    std::vector<Term> out;
    std::set<std::string> seen;
    collectAtoms(t, out, seen);
    return out;
}

std::string quoteSymbol(std::string const & name) {
    static const std::string extra = "~!@$%^&*_-+=<>.?/";
    bool simple = !name.empty() && !(name[0] >= '0' && name[0] <= '9');
    for (char c : name) {
        bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') ||
                  extra.find(c) != std::string::npos;
        if (!ok) {
            simple = false;
            break;
        }
    }
    if (simple) { return name; }
    return "|" + name + "|";
}

namespace {
void writeSmt(Term const & t, std::ostream & os) {
    switch (t->kind) {
        case TermKind::Var:
            os << quoteSymbol(t->name);
            return;
        case TermKind::IntLit:
            if (t->num < 0) {
                os << "(- " << -(unsigned long long)t->num << ")";
            } else {
                os << t->num;
            }
            return;
        case TermKind::BoolLit:
            os << (t->flag ? "true" : "false");
            return;
        case TermKind::Forall:
        case TermKind::Exists: {
            os << (t->kind == TermKind::Forall ? "(forall (" : "(exists (");
            for (size_t i = 0; i < t->binders.size(); ++i) {
                if (i > 0) { os << " "; }
                os << "(" << quoteSymbol(t->binders[i].name) << " " << sortName(t->binders[i].sort) << ")";
            }
            os << ") ";
            writeSmt(t->kids[0], os);
            os << ")";
            return;
        }
        default: {
            const char * op = nullptr;
            switch (t->kind) {
                case TermKind::Add: op = "+"; break;
                case TermKind::Sub: op = "-"; break;
                case TermKind::Neg: op = "-"; break;
                case TermKind::MulConst: op = "*"; break;
                case TermKind::Mod: op = "mod"; break;
                case TermKind::Div: op = "div"; break;
                case TermKind::Lt: op = "<"; break;
                case TermKind::Le: op = "<="; break;
                case TermKind::Gt: op = ">"; break;
                case TermKind::Ge: op = ">="; break;
                case TermKind::Eq: op = "="; break;
                case TermKind::Neq: op = "distinct"; break;
                case TermKind::And: op = "and"; break;
                case TermKind::Or: op = "or"; break;
                case TermKind::Not: op = "not"; break;
                case TermKind::Implies: op = "=>"; break;
                case TermKind::Ite: op = "ite"; break;
                default: assert(false);
            }
            os << "(" << op;
            if (t->kind == TermKind::MulConst) {
                os << " ";
                if (t->num < 0) {
                    os << "(- " << -(unsigned long long)t->num << ")";
                } else {
                    os << t->num;
                }
            }
            for (auto const & k : t->kids) {
                os << " ";
                writeSmt(k, os);
            }
            os << ")";
        }
    }
}
} // namespace

std::string toSmt(Term const & t) {
    std::ostringstream os;
    writeSmt(t, os);
    return os.str();
}

namespace {
// Precedence for infix printing, higher binds tighter.
int prec(TermKind k) {
    switch (k) {
        case TermKind::Implies: return 1;
        case TermKind::Or: return 2;
        case TermKind::And: return 3;
        case TermKind::Not: return 4;
        case TermKind::Lt:
        case TermKind::Le:
        case TermKind::Gt:
        case TermKind::Ge:
        case TermKind::Eq:
        case TermKind::Neq: return 5;
        case TermKind::Add:
        case TermKind::Sub: return 6;
        case TermKind::MulConst:
        case TermKind::Mod:
        case TermKind::Div: return 7;
        case TermKind::Neg: return 8;
        default: return 9;
    }
}

void writeInfix(Term const & t, std::ostream & os, int parentPrec) {
    int p = prec(t->kind);
    auto paren = [&](auto fn) {
        if (p < parentPrec) { os << "("; }
        fn();
        if (p < parentPrec) { os << ")"; }
    };
    switch (t->kind) {
        case TermKind::Var: os << t->name; return;
        case TermKind::IntLit: os << t->num; return;
        case TermKind::BoolLit: os << (t->flag ? "true" : "false"); return;
        case TermKind::Neg:
            paren([&] {
                os << "-";
                writeInfix(t->kids[0], os, p + 1);
            });
            return;
        case TermKind::Not:
            paren([&] {
                os << "!";
                writeInfix(t->kids[0], os, p + 1);
            });
            return;
        case TermKind::MulConst:
            paren([&] {
                os << t->num << " * ";
                writeInfix(t->kids[0], os, p + 1);
            });
            return;
        case TermKind::Ite:
            os << "ite(";
            writeInfix(t->kids[0], os, 0);
            os << ", ";
            writeInfix(t->kids[1], os, 0);
            os << ", ";
            writeInfix(t->kids[2], os, 0);
            os << ")";
            return;
        case TermKind::Forall:
        case TermKind::Exists: {
            os << (t->kind == TermKind::Forall ? "forall " : "exists ");
            for (size_t i = 0; i < t->binders.size(); ++i) {
                if (i > 0) { os << ", "; }
                os << t->binders[i].name;
            }
            os << ". ";
            writeInfix(t->kids[0], os, 0);
            return;
        }
        default: {
            const char * op = nullptr;
            switch (t->kind) {
                case TermKind::Add: op = " + "; break;
                case TermKind::Sub: op = " - "; break;
                case TermKind::Mod: op = " mod "; break;
                case TermKind::Div: op = " div "; break;
                case TermKind::Lt: op = " < "; break;
                case TermKind::Le: op = " <= "; break;
                case TermKind::Gt: op = " > "; break;
                case TermKind::Ge: op = " >= "; break;
                case TermKind::Eq: op = " = "; break;
                case TermKind::Neq: op = " != "; break;
                case TermKind::And: op = " && "; break;
                case TermKind::Or: op = " || "; break;
                case TermKind::Implies: op = " -> "; break;
                default: assert(false);
            }
            paren([&] {
                writeInfix(t->kids[0], os, p + 1);
                os << op;
                writeInfix(t->kids[1], os, p);
            });
        }
    }
}
} // namespace

std::string toInfix(Term const & t) {
    std::ostringstream os;
    writeInfix(t, os, 0);
    return os.str();
}

Term simplify(Term const & t) {
    switch (t->kind) {
        case TermKind::Var:
        case TermKind::IntLit:
        case TermKind::BoolLit:
            return t;
        default:
            break;
    }
    std::vector<Term> kids;
    kids.reserve(t->kids.size());
    bool changed = false;
    for (auto const & k : t->kids) {
        Term nk = simplify(k);
        changed = changed || nk != k;
        kids.push_back(std::move(nk));
    }
    auto lit = [](Term const & x) -> std::optional<long long> {
        if (x->kind == TermKind::IntLit) { return x->num; }
        return std::nullopt;
    };
    switch (t->kind) {
        case TermKind::And:
            if (isFalse(kids[0]) || isFalse(kids[1])) { return term::bottom(); }
            if (isTrue(kids[0])) { return kids[1]; }
            if (isTrue(kids[1])) { return kids[0]; }
            break;
        case TermKind::Or:
            if (isTrue(kids[0]) || isTrue(kids[1])) { return term::top(); }
            if (isFalse(kids[0])) { return kids[1]; }
            if (isFalse(kids[1])) { return kids[0]; }
            break;
        case TermKind::Not:
            if (isTrue(kids[0])) { return term::bottom(); }
            if (isFalse(kids[0])) { return term::top(); }
            if (kids[0]->kind == TermKind::Not) { return kids[0]->kids[0]; }
            break;
        case TermKind::Implies:
            if (isFalse(kids[0]) || isTrue(kids[1])) { return term::top(); }
            if (isTrue(kids[0])) { return kids[1]; }
            break;
        case TermKind::Ite:
            if (isTrue(kids[0])) { return kids[1]; }
            if (isFalse(kids[0])) { return kids[2]; }
            break;
        case TermKind::Add:
            if (lit(kids[0]) && lit(kids[1])) {
                if (auto r = checkedAdd(*lit(kids[0]), *lit(kids[1]))) { return term::intLit(*r); }
            }
            if (lit(kids[0]) == std::optional<long long>(0)) { return kids[1]; }
            if (lit(kids[1]) == std::optional<long long>(0)) { return kids[0]; }
            break;
        case TermKind::Sub:
            if (lit(kids[0]) && lit(kids[1])) {
                if (auto r = checkedSub(*lit(kids[0]), *lit(kids[1]))) { return term::intLit(*r); }
            }
            if (lit(kids[1]) == std::optional<long long>(0)) { return kids[0]; }
            break;
        case TermKind::Neg:
            if (lit(kids[0])) { return term::intLit(-*lit(kids[0])); }
            break;
        case TermKind::MulConst: {
            if (t->num == 0) { return term::intLit(0); }
            if (t->num == 1) { return kids[0]; }
            if (lit(kids[0])) {
                if (auto r = checkedMul(t->num, *lit(kids[0]))) { return term::intLit(*r); }
            }
            break;
        }
        case TermKind::Lt:
        case TermKind::Le:
        case TermKind::Gt:
        case TermKind::Ge:
        case TermKind::Eq:
        case TermKind::Neq:
            if (lit(kids[0]) && lit(kids[1])) {
                long long a = *lit(kids[0]), b = *lit(kids[1]);
                bool v = false;
                switch (t->kind) {
                    case TermKind::Lt: v = a < b; break;
                    case TermKind::Le: v = a <= b; break;
                    case TermKind::Gt: v = a > b; break;
                    case TermKind::Ge: v = a >= b; break;
                    case TermKind::Eq: v = a == b; break;
                    default: v = a != b; break;
                }
                return term::boolLit(v);
            }
            break;
        case TermKind::Forall:
        case TermKind::Exists:
            if (isTrue(kids[0]) || isFalse(kids[0])) { return kids[0]; }
            break;
        default:
            break;
    }
    if (!changed) { return t; }
    auto n = std::make_shared<TermNode>(t->kind, t->sort);
    n->num = t->num;
    n->flag = t->flag;
    n->name = t->name;
    n->binders = t->binders;
    n->kids = std::move(kids);
    return n;
}

} // namespace horncfa
