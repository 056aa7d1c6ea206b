#pragma once

#include "Cfa.h"
#include "Term.h"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace horncfa {

struct SolverOptions {
    std::string command;         // shell command speaking SMT-LIB 2 on stdin/stdout
    int queryTimeoutMs = 10000;  // per check-sat, enforced in-band and by wall clock
    bool logScripts = false;
};

struct SolverStats {
    long batches = 0;
    long checkSats = 0;
    long restarts = 0;
    double wallSeconds = 0;
};

enum class SatStatus { Sat, Unsat, Unknown };
enum class Tri { True, False, Unknown };

struct SatResult {
    SatStatus status = SatStatus::Unknown;
    Valuation model; // total over the declared variables when Sat
    std::string reason;
};

// Resolution order: $CHC_SMT_SOLVER, a z3repl.js found near the executable or
// the working directory (run through node), plain "z3 -in".
std::string defaultSolverCommand();

// Drives one external solver process over the SMT-LIB 2 text protocol.
// Queries are stateless: every logical query starts with (reset) and
// re-declares its symbols. The process is restarted after a crash.
class SolverSession {
public:
    explicit SolverSession(SolverOptions options = SolverOptions{});
    ~SolverSession();
    SolverSession(SolverSession const &) = delete;
    SolverSession & operator=(SolverSession const &) = delete;

    [[nodiscard]] SolverOptions const & options() const { return opts; }
    [[nodiscard]] SolverStats const & stats() const { return stats_; }

    // Capability probe for quantifier elimination, which backs interpolation.
    bool supportsInterpolants();

    SatResult checkSat(std::vector<CfaVariable> const & decls, std::vector<Term> const & assertions);
    SatResult checkSat(std::vector<CfaVariable> const & decls, Term const & assertion);

    // true iff (not formula) is unsatisfiable
    Tri checkValid(std::vector<CfaVariable> const & decls, Term const & formula);

    // Sequence interpolants for an unsatisfiable partition, computed by
    // projecting the prefix (or, with fromSuffix, negating the projection of
    // the suffix) onto the symbols shared across each cut. Returns nullopt if
    // the backend cannot eliminate quantifiers.
    std::optional<std::vector<Term>> interpolantSeq(std::vector<Term> const & partition, bool fromSuffix);

    struct Elimination {
        Term term;
        bool eliminated;
    };
    // Quantifier elimination; returns the input unchanged (eliminated=false)
    // when the backend fails or lacks support.
    Elimination eliminate(Term const & quantified);

    // A multi-round interaction forming one logical query: declarations and
    // assertions accumulate, with check-sat / get-value / push / pop rounds.
    class Script {
    public:
        void declare(CfaVariable const & v);
        void declare(std::vector<CfaVariable> const & vs);
        void add(Term const & assertion);
        void push();
        void pop();
        SatStatus check();
        // one (push)(assert t)(check-sat)(pop) per element, single round trip
        std::vector<SatStatus> checkEach(std::vector<Term> const & alternatives);
        std::optional<Valuation> values(std::vector<std::string> const & names);
        [[nodiscard]] bool dead() const { return dead_; }

    private:
        friend class SolverSession;
        explicit Script(SolverSession & session);
        SolverSession & session;
        std::string pending;
        std::set<std::string> declared;
        bool dead_ = false;
    };

    // Starts a fresh logical query ((reset) + options).
    Script script();

private:
    friend class Script;

    SolverOptions opts;
    SolverStats stats_;
    int childPid = -1;
    int toChild = -1;
    int fromChild = -1;
    std::string readBuffer;
    std::optional<bool> qeSupport;

    bool ensureStarted();
    void stopChild();
    // Sends a batch (without sentinel) and returns the response payload;
    // nullopt on crash or wall timeout (the child is killed in that case).
    std::optional<std::string> rawRequest(std::string const & body, int wallLimitMs);
    // Self-contained request: restarts and retries once after a crash.
    std::optional<std::string> requestWithRetry(std::string const & body, int checkCount);
    std::string resetPrefix() const;
};

} // namespace horncfa
