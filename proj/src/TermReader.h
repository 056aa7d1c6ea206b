#pragma once

#include "SExpr.h"
#include "Term.h"

#include <map>
#include <set>
#include <string>

namespace horncfa {

struct TermReaderOptions {
    bool allowQuantifiers = false;
    // Symbols rejected with UnsupportedShape (used for uninterpreted predicates,
    // which must not occur inside interpreted terms).
    std::set<std::string> const * rejectSymbols = nullptr;
};

// Reads an SMT-LIB term over Int/Bool with the LIA operator set; handles let
// bindings and (! ... :attr) annotations. Multiplication must have at most one
// non-constant factor. Chainable operators (=, <, <=, ...) are expanded to
// conjunctions; Bool equality and distinct are rewritten to implications.
Term readTermSexpr(SExpr const & s, std::map<std::string, Sort> const & vars,
                   TermReaderOptions const & opts = {});

} // namespace horncfa
