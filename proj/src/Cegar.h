#pragma once

#include "Cfa.h"
#include "Smt.h"

#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace horncfa {

enum class Domain { Expl, PredCart, PredBool };
enum class Refinement { Wp, SeqItp, BwBinItp };
enum class PredSplit { Whole, Atoms };

std::string const & domainName(Domain d);
std::string const & refinementName(Refinement r);
std::string const & predSplitName(PredSplit p);
std::optional<Domain> parseDomain(std::string const & s);
std::optional<Refinement> parseRefinement(std::string const & s);
std::optional<PredSplit> parsePredSplit(std::string const & s);

// Per-location abstraction parameter: tracked variables for the explicit
// domain, predicates for the predicate domains. Grows monotonically.
class Precision {
public:
    void init(size_t locationCount);
    bool trackVariable(LocationId loc, std::string const & var);
    bool addPredicate(LocationId loc, Term const & pred);
    [[nodiscard]] std::set<std::string> const & trackedAt(LocationId loc) const { return tracked[loc]; }
    [[nodiscard]] std::vector<Term> const & predicatesAt(LocationId loc) const { return preds[loc]; }
    [[nodiscard]] int predicateIndexAt(LocationId loc, std::string const & key) const;
    [[nodiscard]] long size() const;

private:
    std::vector<std::set<std::string>> tracked;
    std::vector<std::vector<Term>> preds;
    std::vector<std::map<std::string, int>> predKeys;
};

// Abstract state: a location plus a label over the CFA variables. The label
// payload depends on the domain; label() renders it as a single term.
struct AbstractState {
    LocationId location = -1;
    std::map<std::string, Value> explValues;              // EXPL: known values of tracked variables
    std::vector<std::pair<int, bool>> cartLits;           // PRED_CART: (precision index, polarity)
    std::vector<std::vector<std::pair<int, bool>>> cubes; // PRED_BOOL: disjunction of cubes

    Term label(Domain domain, Precision const & precision) const;
};

struct ArgNode {
    int id = -1;
    AbstractState state;
    Term label;       // rendered at creation time
    std::string labelKey;
    int parent = -1;  // -1 for the root
    int inEdge = -1;  // CFA edge id leading here
    int coveredBy = -1;
    std::vector<int> children;
    std::set<int> expandedEdges;
    bool alive = true;
};

class Arg {
public:
    std::vector<ArgNode> nodes;
    std::vector<std::vector<int>> byLocation; // creation order per location
    int root = -1;

    [[nodiscard]] bool alive(int id) const { return id >= 0 && id < (int)nodes.size() && nodes[id].alive; }
    [[nodiscard]] bool isAncestor(int maybeAncestor, int node) const;
    int addNode(AbstractState state, Term label, int parent, int inEdge);
    // removes the subtree rooted at id; returns deleted ids
    std::vector<int> prune(int id);
    [[nodiscard]] long aliveCount() const;
};

struct AbstractCex {
    std::vector<int> nodes; // root ... error node
    std::vector<int> edges; // connecting CFA edge ids
    [[nodiscard]] std::string key() const;
};

struct CegarOptions {
    Domain domain = Domain::PredCart;
    Refinement refinement = Refinement::Wp;
    PredSplit predSplit = PredSplit::Whole;
    bool dfs = false;
    int maxIterations = 200;
    long maxNodes = 50000;
    double deadlineSeconds = 0; // absolute (monotonic clock), 0 = none
    int boolCubeLimit = 128;
    bool checkInvariants = false;
};

struct CegarStats {
    int iterations = 0;
    int refinements = 0;
    long posts = 0;
    long coverAttempts = 0;
    long peakNodes = 0;
    std::vector<std::string> notes;
    std::vector<std::string> invariantViolations;
};

struct Verdict {
    enum class Kind { Safe, Unsafe, Unknown };
    Kind kind = Kind::Unknown;
    std::string reason;                // Unknown
    std::optional<ConcretePath> path;  // Unsafe: validated concrete counterexample
};

class CegarEngine {
public:
    CegarEngine(Cfa const & cfa, CegarOptions options, SolverSession & session);

    // The CEGAR loop: abstract, check the counterexample, refine, repeat.
    Verdict run();

    struct PostResult {
        std::vector<AbstractState> states;
        bool unknown = false;
    };
    PostResult abstractPost(AbstractState const & state, Edge const & edge);

    struct BuildOutcome {
        enum class Kind { Closed, FoundCex, Unknown };
        Kind kind = Kind::Unknown;
        AbstractCex cex;
        std::string reason;
    };
    BuildOutcome buildArg();

    struct Feasibility {
        enum class Kind { Feasible, Infeasible, Unknown };
        Kind kind = Kind::Unknown;
        ConcretePath path; // Feasible
        int pivot = 0;     // Infeasible: longest feasible prefix length in edges
        std::string reason;
    };
    Feasibility checkFeasible(AbstractCex const & cex);

    struct RefineOutcome {
        bool progressed = false;
        int prunePosition = 0; // node position along the cex to prune at
        bool unknown = false;
        std::string reason;
    };
    RefineOutcome refine(AbstractCex const & cex);

    Tri labelImplies(AbstractState const & a, AbstractState const & b);

    [[nodiscard]] Arg const & arg() const { return arg_; }
    [[nodiscard]] Precision const & precision() const { return precision_; }
    [[nodiscard]] CegarStats const & stats() const { return stats_; }
    [[nodiscard]] CegarOptions const & options() const { return opts; }

    void setPrecision(Precision p) { precision_ = std::move(p); }

    // Backward pre-image of a condition through an operation sequence; havocs
    // are eliminated by quantifier elimination when the backend supports it.
    Term preImage(std::span<CfaOp const> ops, Term const & post);

private:
    Cfa const & cfa;
    CegarOptions opts;
    SolverSession & session;
    Precision precision_;
    Arg arg_;
    CegarStats stats_;
    std::deque<int> worklist;
    std::set<std::string> seenCexKeys;
    std::map<std::string, Tri> implicationCache;

    AbstractState initialState() const;
    void ensureRoot();
    bool deadlineExceeded() const;
    int enqueueNode(AbstractState state, int parent, int inEdge);
    bool tryCover(int nodeId);
    AbstractCex cexFromNode(int errorNodeId) const;
    void pruneAt(int nodeId);

    PostResult postExpl(AbstractState const & state, Edge const & edge);
    PostResult postCart(AbstractState const & state, Edge const & edge);
    PostResult postBool(AbstractState const & state, Edge const & edge);

    struct ChainResult {
        std::vector<Term> formulas; // per position 1..m-1, invariant-side (negated bad region)
        bool unknown = false;
        std::string reason;
    };
    ChainResult wpChain(AbstractCex const & cex);
    ChainResult itpChain(AbstractCex const & cex, bool fromSuffix);
    bool registerFormula(LocationId loc, Term const & formula);

    void checkSafeArgInvariants();
    void checkRefinementBlocked(AbstractCex const & cex);
};

} // namespace horncfa
