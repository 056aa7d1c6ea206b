#include "SExpr.h"

#include <sstream>

namespace horncfa {

std::string SExpr::toString() const {
    if (atom) { return text; }
    std::ostringstream os;
    os << "(";
    for (size_t i = 0; i < items.size(); ++i) {
        if (i > 0) { os << " "; }
        os << items[i].toString();
    }
    os << ")";
    return os.str();
}

namespace {

class Reader {
public:
    explicit Reader(std::string const & text) : text(text) {}

    std::vector<SExpr> readAll() {
        std::vector<SExpr> out;
        skipWs();
        while (pos < text.size()) {
            out.push_back(readOne());
            skipWs();
        }
        return out;
    }

private:
    std::string const & text;
    size_t pos = 0;
    int line = 1;

    [[noreturn]] void fail(std::string const & msg) const {
        throw FrontendError(FrontendErrorKind::SyntaxError,
                            "syntax error at line " + std::to_string(line) + ": " + msg);
    }

    void advance() {
        if (text[pos] == '\n') { ++line; }
        ++pos;
    }

    void skipWs() {
        while (pos < text.size()) {
            char c = text[pos];
            if (c == ';') {
                while (pos < text.size() && text[pos] != '\n') {
                    ++pos;
                }
            } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else {
                break;
            }
        }
    }

    SExpr readOne() {
        char c = text[pos];
        if (c == '(') {
            SExpr list;
            list.line = line;
            advance();
            skipWs();
            while (pos < text.size() && text[pos] != ')') {
                list.items.push_back(readOne());
                skipWs();
            }
            if (pos >= text.size()) { fail("unbalanced '('"); }
            advance();
            return list;
        }
        if (c == ')') { fail("unexpected ')'"); }
        SExpr a;
        a.atom = true;
        a.line = line;
        if (c == '|') {
            advance();
            while (pos < text.size() && text[pos] != '|') {
                a.text += text[pos];
                advance();
            }
            if (pos >= text.size()) { fail("unterminated quoted symbol"); }
            advance();
            a.quoted = true;
            return a;
        }
        if (c == '"') {
            a.text += '"';
            advance();
            while (pos < text.size()) {
                if (text[pos] == '"') {
                    if (pos + 1 < text.size() && text[pos + 1] == '"') {
                        a.text += '"';
                        advance();
                        advance();
                        continue;
                    }
                    break;
                }
                a.text += text[pos];
                advance();
            }
            if (pos >= text.size()) { fail("unterminated string literal"); }
            a.text += '"';
            advance();
            return a;
        }
        while (pos < text.size()) {
            char d = text[pos];
            if (d == '(' || d == ')' || d == ';' || d == ' ' || d == '\t' || d == '\r' || d == '\n') { break; }
            a.text += d;
            advance();
        }
        if (a.text.empty()) { fail("empty token"); }
        return a;
    }
};

} // namespace

std::vector<SExpr> parseSExprs(std::string const & text) {
    return Reader(text).readAll();
}

} // namespace horncfa
