#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace horncfa {

// Errors raised while reading or interpreting input scripts.
enum class FrontendErrorKind {
    SyntaxError,
    UnsupportedTheory,
    NonlinearClause,
    UnsupportedShape,
};

class FrontendError : public std::runtime_error {
public:
    FrontendError(FrontendErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind(kind) {}
    FrontendErrorKind kind;
};

struct SExpr {
    bool atom = false;
    bool quoted = false; // symbol was written |...|
    std::string text;    // atom payload
    std::vector<SExpr> items;
    int line = 0;

    [[nodiscard]] bool isList() const { return !atom; }
    [[nodiscard]] bool isAtom(std::string const & s) const { return atom && text == s; }
    [[nodiscard]] size_t size() const { return items.size(); }
    SExpr const & operator[](size_t i) const { return items[i]; }
    [[nodiscard]] std::string toString() const;
};

// Reads a sequence of s-expressions; ';' starts a line comment, symbols may be
// |quoted|, strings are "..." with doubled-quote escapes.
std::vector<SExpr> parseSExprs(std::string const & text);

} // namespace horncfa
