#pragma once

#include "ChcSystem.h"
#include "SExpr.h"

#include <string>

namespace horncfa {

// Parses an SMT-LIB 2 HORN script into a normalized linear CHC system.
// Accepts the two assertion encodings seen in CHC-COMP: (forall ... (=> body head))
// and (not (exists ... body)); ground (quantifier-free) clauses are allowed.
// Throws FrontendError on malformed input, unsupported sorts or theories,
// nonlinear clauses and uninterpreted atoms in unsupported positions.
CHCSystem parseScript(std::string const & text);

CHCSystem parseChcFile(std::string const & path);

} // namespace horncfa
