#pragma once

#include "Cfa.h"
#include "Term.h"

#include <map>
#include <string>
#include <vector>

namespace horncfa {

// Single-static-assignment encoding of CFA operation sequences: every
// assignment or havoc of a variable introduces a fresh indexed symbol, guards
// constrain the current symbols. Symbol names are <var>!<k>.
class SsaBuilder {
public:
    explicit SsaBuilder(Cfa const & cfa) : cfa(&cfa) {}

    struct StepInfo {
        std::map<std::string, std::string> havocSyms; // havoced var -> fresh symbol
        std::map<std::string, std::string> postSyms;  // every cfa var -> symbol after the step
        std::vector<Term> constraints;                // this step's conjuncts
    };

    StepInfo applyEdge(Edge const & edge);

    // rewrites a term over CFA variables to the current symbols
    Term rewrite(Term const & t);

    [[nodiscard]] std::map<std::string, std::string> snapshot();
    [[nodiscard]] std::vector<CfaVariable> const & symbols() const { return symbols_; }
    [[nodiscard]] std::vector<Term> const & constraints() const { return constraints_; }

private:
    Cfa const * cfa;
    std::map<std::string, int> versions;
    std::vector<CfaVariable> symbols_;
    std::vector<Term> constraints_;

    Sort sortOf(std::string const & var) const;
    std::string symbolName(std::string const & var, int version) const;
    std::string current(std::string const & var);
    std::string bump(std::string const & var);
};

// Equality appropriate for the sort (iff for Bool).
Term sortedEq(Term const & a, Term const & b);

} // namespace horncfa
