#include "Smt.h"

#include "SExpr.h"
#include "TermReader.h"

#include <algorithm>
#include <cassert>
#include <chrono>
#include <cstring>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

namespace horncfa {

namespace {

constexpr char kSentinel[] = "@@DONE@@";

std::string exeDirectory() {
    char buf[4096];
    ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
    if (n <= 0) { return {}; }
    buf[n] = '\0';
    return std::filesystem::path(buf).parent_path().string();
}

double nowSeconds() {
    using namespace std::chrono;
    return duration_cast<duration<double>>(steady_clock::now().time_since_epoch()).count();
}

} // namespace

std::string defaultSolverCommand() {
    if (char const * env = std::getenv("CHC_SMT_SOLVER"); env && *env) { return env; }
    std::vector<std::filesystem::path> candidates;
    std::string exeDir = exeDirectory();
    if (!exeDir.empty()) {
        std::filesystem::path d(exeDir);
        candidates.push_back(d / "z3repl.js");
        candidates.push_back(d.parent_path() / "z3repl.js");
        candidates.push_back(d.parent_path().parent_path() / "z3repl.js");
    }
    candidates.push_back(std::filesystem::path("tools") / "z3repl.js");
    candidates.push_back(std::filesystem::path("z3repl.js"));
    for (auto const & c : candidates) {
        std::error_code ec;
        if (std::filesystem::exists(c, ec)) { return "node " + c.string(); }
    }
    return "z3 -in";
}

SolverSession::SolverSession(SolverOptions options) : opts(std::move(options)) {
    if (opts.command.empty()) { opts.command = defaultSolverCommand(); }
}

SolverSession::~SolverSession() {
    stopChild();
}

bool SolverSession::ensureStarted() {
    if (childPid > 0) { return true; }
    int inPipe[2], outPipe[2];
    if (::pipe(inPipe) != 0) { return false; }
    if (::pipe(outPipe) != 0) {
        ::close(inPipe[0]);
        ::close(inPipe[1]);
        return false;
    }
    pid_t pid = ::fork();
    if (pid < 0) {
        for (int fd : {inPipe[0], inPipe[1], outPipe[0], outPipe[1]}) {
            ::close(fd);
        }
        return false;
    }
    if (pid == 0) {
        ::dup2(inPipe[0], STDIN_FILENO);
        ::dup2(outPipe[1], STDOUT_FILENO);
        for (int fd : {inPipe[0], inPipe[1], outPipe[0], outPipe[1]}) {
            ::close(fd);
        }
        std::string cmd = "exec " + opts.command;
        ::execlp("/bin/sh", "sh", "-c", cmd.c_str(), nullptr);
        _exit(127);
    }
    ::close(inPipe[0]);
    ::close(outPipe[1]);
    childPid = pid;
    toChild = inPipe[1];
    fromChild = outPipe[0];
    readBuffer.clear();
    // handshake; generous limit to cover slow interpreter startup
    auto r = rawRequest("", 60000);
    if (!r) {
        std::cerr << "solver did not answer the startup handshake (command: " << opts.command << ")\n";
        return false;
    }
    return true;
}

void SolverSession::stopChild() {
    if (childPid > 0) {
        ::close(toChild);
        ::close(fromChild);
        ::kill(childPid, SIGKILL);
        int status = 0;
        ::waitpid(childPid, &status, 0);
        childPid = -1;
        toChild = fromChild = -1;
        readBuffer.clear();
    }
}

std::optional<std::string> SolverSession::rawRequest(std::string const & body, int wallLimitMs) {
    if (childPid <= 0) { return std::nullopt; }
    double t0 = nowSeconds();
    std::string line = body;
    line += "(echo \"";
    line += kSentinel;
    line += "\")\n";
    if (opts.logScripts) { std::cerr << "[smt] >> " << line; }
    stats_.batches += 1;

    size_t written = 0;
    while (written < line.size()) {
        ssize_t n = ::write(toChild, line.data() + written, line.size() - written);
        if (n <= 0) {
            stopChild();
            return std::nullopt;
        }
        written += static_cast<size_t>(n);
    }

    std::string sentinelLine = std::string(kSentinel) + "\n";
    auto findPayload = [&]() -> std::optional<std::string> {
        size_t pos = readBuffer.find(sentinelLine);
        while (pos != std::string::npos) {
            if (pos == 0 || readBuffer[pos - 1] == '\n') {
                std::string payload = readBuffer.substr(0, pos);
                readBuffer.erase(0, pos + sentinelLine.size());
                return payload;
            }
            pos = readBuffer.find(sentinelLine, pos + 1);
        }
        return std::nullopt;
    };

    auto deadline = t0 + wallLimitMs / 1000.0;
    while (true) {
        if (auto payload = findPayload()) {
            stats_.wallSeconds += nowSeconds() - t0;
            if (opts.logScripts) { std::cerr << "[smt] << " << *payload; }
            return payload;
        }
        double remaining = deadline - nowSeconds();
        if (remaining <= 0) {
            stopChild();
            stats_.wallSeconds += nowSeconds() - t0;
            return std::nullopt;
        }
        struct pollfd pfd { fromChild, POLLIN, 0 };
        int pr = ::poll(&pfd, 1, std::max(1, static_cast<int>(remaining * 1000)));
        if (pr < 0) {
            if (errno == EINTR) { continue; }
            stopChild();
            return std::nullopt;
        }
        if (pr == 0) { continue; }
        char buf[65536];
        ssize_t n = ::read(fromChild, buf, sizeof(buf));
        if (n <= 0) {
            stopChild();
            stats_.wallSeconds += nowSeconds() - t0;
            return std::nullopt;
        }
        readBuffer.append(buf, static_cast<size_t>(n));
    }
}

std::string SolverSession::resetPrefix() const {
    std::ostringstream os;
    os << "(reset)(set-option :produce-models true)(set-option :timeout " << opts.queryTimeoutMs << ")";
    return os.str();
}

std::optional<std::string> SolverSession::requestWithRetry(std::string const & body, int checkCount) {
    int limit = opts.queryTimeoutMs * std::max(1, checkCount) + 5000;
    for (int attempt = 0; attempt < 2; ++attempt) {
        if (!ensureStarted()) { return std::nullopt; }
        auto r = rawRequest(body, limit);
        if (r) { return r; }
        stats_.restarts += 1;
    }
    return std::nullopt;
}

namespace {

struct ResponseScanner {
    std::vector<SExpr> items;
    size_t next = 0;
    bool parseError = false;

    explicit ResponseScanner(std::string const & payload) {
        try {
            items = parseSExprs(payload);
        } catch (FrontendError const &) {
            parseError = true;
        }
    }

    std::optional<SExpr> take() {
        if (next >= items.size()) { return std::nullopt; }
        return items[next++];
    }

    std::optional<SatStatus> takeStatus() {
        while (auto item = take()) {
            if (item->atom) {
                if (item->text == "sat") { return SatStatus::Sat; }
                if (item->text == "unsat") { return SatStatus::Unsat; }
                if (item->text == "unknown") { return SatStatus::Unknown; }
                continue; // stray diagnostics
            }
            if (item->size() > 0 && (*item)[0].isAtom("error")) { return std::nullopt; }
        }
        return std::nullopt;
    }

    std::optional<SExpr> takeList() {
        while (auto item = take()) {
            if (item->isList()) {
                if (item->size() > 0 && (*item)[0].isAtom("error")) { return std::nullopt; }
                return item;
            }
        }
        return std::nullopt;
    }
};

std::optional<Value> parseModelValue(SExpr const & s, Sort sort) {
    if (s.atom) {
        if (s.text == "true") { return Value(true); }
        if (s.text == "false") { return Value(false); }
        try {
            return Value(static_cast<long long>(std::stoll(s.text)));
        } catch (...) {
            return std::nullopt;
        }
    }
    if (s.size() == 2 && s[0].isAtom("-")) {
        auto inner = parseModelValue(s[1], sort);
        if (!inner || !std::holds_alternative<long long>(*inner)) { return std::nullopt; }
        return Value(-std::get<long long>(*inner));
    }
    return std::nullopt;
}

std::optional<Valuation> parseValuePairs(SExpr const & list, std::vector<CfaVariable> const & vars) {
    // ((name value) ...) in query order
    if (list.size() != vars.size()) { return std::nullopt; }
    Valuation out;
    for (size_t i = 0; i < list.size(); ++i) {
        SExpr const & pair = list[i];
        if (!pair.isList() || pair.size() != 2) { return std::nullopt; }
        auto v = parseModelValue(pair[1], vars[i].sort);
        if (!v) { return std::nullopt; }
        if (vars[i].sort == Sort::Bool && !std::holds_alternative<bool>(*v)) { return std::nullopt; }
        if (vars[i].sort == Sort::Int && !std::holds_alternative<long long>(*v)) { return std::nullopt; }
        out[vars[i].name] = *v;
    }
    return out;
}

std::string declareLine(CfaVariable const & v) {
    return "(declare-const " + quoteSymbol(v.name) + " " + sortName(v.sort) + ")";
}

} // namespace

SatResult SolverSession::checkSat(std::vector<CfaVariable> const & decls, std::vector<Term> const & assertions) {
    std::ostringstream os;
    os << resetPrefix();
    for (auto const & v : decls) {
        os << declareLine(v);
    }
    for (auto const & a : assertions) {
        os << "(assert " << toSmt(a) << ")";
    }
    os << "(check-sat)";
    stats_.checkSats += 1;
    auto payload = requestWithRetry(os.str(), 1);
    if (!payload) { return {SatStatus::Unknown, {}, "solver crash or timeout"}; }
    ResponseScanner scan(*payload);
    auto status = scan.takeStatus();
    if (!status) { return {SatStatus::Unknown, {}, "unparseable solver answer"}; }
    if (*status != SatStatus::Sat) {
        return {*status, {}, *status == SatStatus::Unknown ? "solver returned unknown" : ""};
    }
    if (decls.empty()) { return {SatStatus::Sat, {}, ""}; }
    // fetch a total model over the declared variables
    std::ostringstream gv;
    gv << "(get-value (";
    for (size_t i = 0; i < decls.size(); ++i) {
        if (i > 0) { gv << " "; }
        gv << quoteSymbol(decls[i].name);
    }
    gv << "))";
    auto valuesPayload = rawRequest(gv.str(), opts.queryTimeoutMs + 5000);
    if (!valuesPayload) { return {SatStatus::Unknown, {}, "solver crash while reading the model"}; }
    ResponseScanner vscan(*valuesPayload);
    auto list = vscan.takeList();
    if (!list) { return {SatStatus::Unknown, {}, "unparseable model"}; }
    auto model = parseValuePairs(*list, decls);
    if (!model) { return {SatStatus::Unknown, {}, "unparseable model"}; }
    return {SatStatus::Sat, std::move(*model), ""};
}

SatResult SolverSession::checkSat(std::vector<CfaVariable> const & decls, Term const & assertion) {
    return checkSat(decls, std::vector<Term>{assertion});
}

Tri SolverSession::checkValid(std::vector<CfaVariable> const & decls, Term const & formula) {
    std::ostringstream os;
    os << resetPrefix();
    for (auto const & v : decls) {
        os << declareLine(v);
    }
    os << "(assert (not " << toSmt(formula) << "))(check-sat)";
    stats_.checkSats += 1;
    auto payload = requestWithRetry(os.str(), 1);
    if (!payload) { return Tri::Unknown; }
    ResponseScanner scan(*payload);
    auto status = scan.takeStatus();
    if (!status) { return Tri::Unknown; }
    switch (*status) {
        case SatStatus::Unsat: return Tri::True;
        case SatStatus::Sat: return Tri::False;
        default: return Tri::Unknown;
    }
}

bool SolverSession::supportsInterpolants() {
    if (qeSupport) { return *qeSupport; }
    std::ostringstream os;
    os << resetPrefix() << "(declare-const " << quoteSymbol("qe!probe") << " Int)"
       << "(assert (exists ((x Int)) (> x " << quoteSymbol("qe!probe") << ")))"
       << "(apply (then qe simplify))";
    auto payload = requestWithRetry(os.str(), 1);
    bool ok = false;
    if (payload) {
        ResponseScanner scan(*payload);
        auto goals = scan.takeList();
        ok = goals && goals->size() >= 1 && (*goals)[0].isAtom("goals");
    }
    qeSupport = ok;
    return ok;
}

SolverSession::Elimination SolverSession::eliminate(Term const & quantified) {
    if (!containsQuantifier(quantified)) { return {quantified, true}; }
    if (!supportsInterpolants()) { return {quantified, false}; }
    auto fv = freeVars(quantified);
    std::ostringstream os;
    os << resetPrefix();
    for (auto const & [name, sort] : fv) {
        os << declareLine({name, sort});
    }
    os << "(assert " << toSmt(quantified) << ")(apply (then qe simplify))";
    stats_.checkSats += 1;
    auto payload = requestWithRetry(os.str(), 1);
    if (!payload) { return {quantified, false}; }
    ResponseScanner scan(*payload);
    auto goals = scan.takeList();
    if (!goals || goals->size() < 2 || !(*goals)[0].isAtom("goals")) { return {quantified, false}; }
    if (goals->size() != 2) { return {quantified, false}; } // splitting tactic, should not happen
    SExpr const & goal = (*goals)[1];
    if (!goal.isList() || goal.size() < 1 || !goal[0].isAtom("goal")) { return {quantified, false}; }
    std::vector<Term> parts;
    TermReaderOptions ropts;
    ropts.allowQuantifiers = true;
    for (size_t i = 1; i < goal.size(); ++i) {
        if (goal[i].atom && !goal[i].text.empty() && goal[i].text[0] == ':') {
            break; // goal attributes (:precision ...)
        }
        try {
            parts.push_back(readTermSexpr(goal[i], fv, ropts));
        } catch (FrontendError const &) {
            return {quantified, false};
        }
    }
    Term result = term::conjAll(parts);
    if (containsQuantifier(result)) { return {quantified, false}; }
    return {result, true};
}

std::optional<std::vector<Term>> SolverSession::interpolantSeq(std::vector<Term> const & partition,
                                                               bool fromSuffix) {
    if (!supportsInterpolants()) { return std::nullopt; }
    if (partition.size() < 2) { return std::vector<Term>{}; }
    size_t m = partition.size();
    std::vector<std::map<std::string, Sort>> varsOf(m);
    for (size_t i = 0; i < m; ++i) {
        varsOf[i] = freeVars(partition[i]);
    }
    std::vector<Term> interpolants;
    for (size_t cut = 1; cut < m; ++cut) {
        std::map<std::string, Sort> prefixVars, suffixVars;
        for (size_t i = 0; i < cut; ++i) {
            prefixVars.insert(varsOf[i].begin(), varsOf[i].end());
        }
        for (size_t i = cut; i < m; ++i) {
            suffixVars.insert(varsOf[i].begin(), varsOf[i].end());
        }
        auto sideVars = fromSuffix ? suffixVars : prefixVars;
        std::vector<Binder> locals;
        for (auto const & [name, sort] : sideVars) {
            bool shared = fromSuffix ? prefixVars.count(name) > 0 : suffixVars.count(name) > 0;
            if (!shared) { locals.push_back(Binder{name, sort}); }
        }
        std::vector<Term> side;
        if (fromSuffix) {
            side.assign(partition.begin() + static_cast<long>(cut), partition.end());
        } else {
            side.assign(partition.begin(), partition.begin() + static_cast<long>(cut));
        }
        Term projected = term::exists(std::move(locals), term::conjAll(side));
        auto elim = eliminate(projected);
        if (!elim.eliminated) { return std::nullopt; }
        Term itp = simplify(fromSuffix ? term::negate(elim.term) : elim.term);
        interpolants.push_back(itp);
    }
    return interpolants;
}

// --- Script ---------------------------------------------------------------

SolverSession::Script::Script(SolverSession & session) : session(session) {
    pending = session.resetPrefix();
}

SolverSession::Script SolverSession::script() {
    return Script(*this);
}

void SolverSession::Script::declare(CfaVariable const & v) {
    if (declared.insert(v.name).second) { pending += declareLine(v); }
}

void SolverSession::Script::declare(std::vector<CfaVariable> const & vs) {
    for (auto const & v : vs) {
        declare(v);
    }
}

void SolverSession::Script::add(Term const & assertion) {
    pending += "(assert " + toSmt(assertion) + ")";
}

void SolverSession::Script::push() {
    pending += "(push 1)";
}

void SolverSession::Script::pop() {
    pending += "(pop 1)";
}

SatStatus SolverSession::Script::check() {
    if (dead_) { return SatStatus::Unknown; }
    pending += "(check-sat)";
    session.stats_.checkSats += 1;
    if (!session.ensureStarted()) {
        dead_ = true;
        return SatStatus::Unknown;
    }
    auto payload = session.rawRequest(pending, session.opts.queryTimeoutMs + 5000);
    pending.clear();
    if (!payload) {
        dead_ = true;
        session.stats_.restarts += 1;
        return SatStatus::Unknown;
    }
    ResponseScanner scan(*payload);
    auto status = scan.takeStatus();
    if (!status) {
        dead_ = true;
        return SatStatus::Unknown;
    }
    return *status;
}

std::vector<SatStatus> SolverSession::Script::checkEach(std::vector<Term> const & alternatives) {
    std::vector<SatStatus> out(alternatives.size(), SatStatus::Unknown);
    if (alternatives.empty()) { return out; }
    if (dead_) { return out; }
    for (auto const & t : alternatives) {
        pending += "(push 1)(assert " + toSmt(t) + ")(check-sat)(pop 1)";
    }
    session.stats_.checkSats += static_cast<long>(alternatives.size());
    if (!session.ensureStarted()) {
        dead_ = true;
        return out;
    }
    int limit = session.opts.queryTimeoutMs * static_cast<int>(alternatives.size()) + 5000;
    auto payload = session.rawRequest(pending, limit);
    pending.clear();
    if (!payload) {
        dead_ = true;
        session.stats_.restarts += 1;
        return out;
    }
    ResponseScanner scan(*payload);
    for (auto & slot : out) {
        auto status = scan.takeStatus();
        if (!status) {
            dead_ = true;
            break;
        }
        slot = *status;
    }
    return out;
}

std::optional<Valuation> SolverSession::Script::values(std::vector<std::string> const & names) {
    if (dead_ || names.empty()) { return std::nullopt; }
    std::string cmd = pending + "(get-value (";
    pending.clear();
    for (size_t i = 0; i < names.size(); ++i) {
        if (i > 0) { cmd += " "; }
        cmd += quoteSymbol(names[i]);
    }
    cmd += "))";
    auto payload = session.rawRequest(cmd, session.opts.queryTimeoutMs + 5000);
    if (!payload) {
        dead_ = true;
        session.stats_.restarts += 1;
        return std::nullopt;
    }
    ResponseScanner scan(*payload);
    auto list = scan.takeList();
    if (!list || list->size() != names.size()) { return std::nullopt; }
    Valuation out;
    for (size_t i = 0; i < names.size(); ++i) {
        SExpr const & pair = (*list)[i];
        if (!pair.isList() || pair.size() != 2) { return std::nullopt; }
        auto v = parseModelValue(pair[1], Sort::Int);
        if (!v) { return std::nullopt; }
        out[names[i]] = *v;
    }
    return out;
}

} // namespace horncfa
