#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace horncfa {

enum class Sort : uint8_t { Int, Bool };

std::string const & sortName(Sort s);

enum class TermKind : uint8_t {
    Var,
    IntLit,
    BoolLit,
    Add,
    Sub,
    Neg,
    MulConst,
    Mod,
    Div,
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Neq,
    And,
    Or,
    Not,
    Implies,
    Ite,
    Forall,
    Exists,
};

class TermNode;
using Term = std::shared_ptr<TermNode const>;

struct Binder {
    std::string name;
    Sort sort;
    bool operator==(Binder const & o) const { return name == o.name && sort == o.sort; }
};

class TermNode {
public:
    TermKind kind;
    Sort sort;
    long long num = 0; // IntLit value, MulConst coefficient
    bool flag = false; // BoolLit value
    std::string name;  // Var
    std::vector<Term> kids;
    std::vector<Binder> binders; // Forall/Exists

    TermNode(TermKind k, Sort s) : kind(k), sort(s) {}
};

// Concrete values and (partial) valuations. A variable absent from the map is
// unconstrained; reading it during evaluation fails the evaluation.
using Value = std::variant<long long, bool>;
using Valuation = std::map<std::string, Value>;

std::string valueToString(Value const & v);
bool valueEquals(Value const & a, Value const & b);

namespace term {
Term var(std::string name, Sort sort);
Term intLit(long long v);
Term boolLit(bool b);
Term add(Term a, Term b);
Term sub(Term a, Term b);
Term neg(Term a);
Term mulConst(long long c, Term a);
Term mod(Term a, Term b);
Term div(Term a, Term b);
Term lt(Term a, Term b);
Term le(Term a, Term b);
Term gt(Term a, Term b);
Term ge(Term a, Term b);
Term eq(Term a, Term b);
Term neq(Term a, Term b);
Term conj(Term a, Term b);
Term disj(Term a, Term b);
Term negate(Term a);
Term implies(Term a, Term b);
Term ite(Term c, Term a, Term b);
Term forall(std::vector<Binder> binders, Term body);
Term exists(std::vector<Binder> binders, Term body);
Term top();
Term bottom();
// Left fold; empty input yields the neutral element.
Term conjAll(std::vector<Term> const & ts);
Term disjAll(std::vector<Term> const & ts);
} // namespace term

bool isTrue(Term const & t);
bool isFalse(Term const & t);

// Euclidean div/mod as defined by SMT-LIB Ints. Fails on zero divisor.
std::optional<long long> euclideanDiv(long long a, long long b);
std::optional<long long> euclideanMod(long long a, long long b);

// Evaluates a term under a (partial) valuation. Returns nullopt when a read
// variable is unconstrained, a divisor is zero or the arithmetic overflows.
std::optional<Value> evaluate(Term const & t, Valuation const & vals);

// Simultaneous substitution of free variables; binders shadow as usual.
Term substitute(Term const & t, std::map<std::string, Term> const & subst);
Term renameVars(Term const & t, std::map<std::string, std::string> const & renaming);

void collectFreeVars(Term const & t, std::map<std::string, Sort> & out);
std::map<std::string, Sort> freeVars(Term const & t);
bool containsVar(Term const & t, std::string const & name);
bool containsQuantifier(Term const & t);

bool structurallyEqual(Term const & a, Term const & b);

// Splits nested conjunctions into a flat list (the term itself if not a conjunction).
std::vector<Term> conjuncts(Term const & t);
// Atomic boolean subterms (comparisons, boolean vars/literals) of a formula.
std::vector<Term> atoms(Term const & t);

// SMT-LIB 2 rendering; symbols are |quoted| when needed.
std::string quoteSymbol(std::string const & name);
std::string toSmt(Term const & t);
// Infix rendering for diagnostics and DOT labels.
std::string toInfix(Term const & t);

// Constant folding and boolean unit-propagation only: never reorders or
// rewrites non-trivial subterms, so the result is deterministic and readable.
Term simplify(Term const & t);

} // namespace horncfa
